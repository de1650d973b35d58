#include <catch2/catch_amalgamated.hpp>
#include "polarwt/wiretap.hpp"
