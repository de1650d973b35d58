#include <catch2/catch_amalgamated.hpp>
#include "polarwt/security.hpp"
