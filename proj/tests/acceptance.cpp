#include "polarwt/simulate.hpp"
int main() { return 0; }
