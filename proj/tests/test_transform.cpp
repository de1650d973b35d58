#include <catch2/catch_amalgamated.hpp>

#include "polarwt/transform.hpp"

using namespace polarwt;

TEST_CASE("bit reversal permutation small cases") {
    CHECK(bit_reversal_permutation(0) == std::vector<uint32_t>{0});
    CHECK(bit_reversal_permutation(1) == std::vector<uint32_t>{0, 1});
    // 2-bit reversals: 00->00, 01->10, 10->01, 11->11
    CHECK(bit_reversal_permutation(2) == std::vector<uint32_t>{0, 2, 1, 3});
}

TEST_CASE("bit reversal is an involution") {
    for (unsigned m : {3u, 5u, 8u}) {
        auto perm = bit_reversal_permutation(m);
        for (std::size_t i = 0; i < perm.size(); ++i) CHECK(perm[perm[i]] == i);
    }
}

TEST_CASE("transform matrix base cases") {
    GF2Matrix g0 = polar_transform_matrix(0);
    CHECK(g0.get(0, 0) == 1);

    GF2Matrix g1 = polar_transform_matrix(1);
    CHECK(g1.get(0, 0) == 1);
    CHECK(g1.get(0, 1) == 0);
    CHECK(g1.get(1, 0) == 1);
    CHECK(g1.get(1, 1) == 1);
}

TEST_CASE("transform matrix m=2 equals permuted Kronecker square") {
    // independent construction: K = G (x) G, then rows in bit-reversed order
    int k4[4][4] = {
        {1, 0, 0, 0},
        {1, 1, 0, 0},
        {1, 0, 1, 0},
        {1, 1, 1, 1},
    };
    int rev[4] = {0, 2, 1, 3};
    GF2Matrix g2 = polar_transform_matrix(2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g2.get(i, j) == k4[rev[i]][j]);
}

TEST_CASE("encode length-2 cases") {
    CHECK(polar_encode(BitVector{1, 0}) == BitVector{1, 0});
    CHECK(polar_encode(BitVector{0, 1}) == BitVector{1, 1});
    CHECK(polar_encode(BitVector{1, 1}) == BitVector{0, 1});
    CHECK(polar_encode(BitVector{0, 0}) == BitVector{0, 0});
}

TEST_CASE("encode unit vectors give matrix rows") {
    GF2Matrix g4 = polar_transform_matrix(2);
    for (std::size_t i = 0; i < 4; ++i) {
        BitVector e(4);
        e.set(i, 1);
        BitVector x = polar_encode(e);
        for (std::size_t j = 0; j < 4; ++j) CHECK(x[j] == g4.get(i, j));
    }
}

TEST_CASE("all-zero input maps to all-zero") {
    for (unsigned m : {0u, 3u, 6u}) {
        BitVector z(std::size_t{1} << m);
        CHECK(polar_encode(z).all_zero());
    }
}

TEST_CASE("fast butterfly equals dense multiplication") {
    Rng rng(42);
    for (unsigned m : {1u, 2u, 3u, 5u, 7u}) {
        GF2Matrix gn = polar_transform_matrix(m);
        for (int t = 0; t < 20; ++t) {
            BitVector v = BitVector::random(std::size_t{1} << m, rng);
            CHECK(polar_encode(v) == gn.multiply_left(v));
        }
    }
}

TEST_CASE("transform is its own inverse") {
    Rng rng(7);
    for (unsigned m : {1u, 4u, 8u, 10u}) {
        for (int t = 0; t < 10; ++t) {
            BitVector v = BitVector::random(std::size_t{1} << m, rng);
            CHECK(polar_encode(polar_encode(v)) == v);
        }
    }
}

TEST_CASE("transform is linear") {
    Rng rng(11);
    for (unsigned m : {2u, 5u, 9u}) {
        for (int t = 0; t < 10; ++t) {
            BitVector v = BitVector::random(std::size_t{1} << m, rng);
            BitVector w = BitVector::random(std::size_t{1} << m, rng);
            CHECK(polar_encode(v ^ w) == (polar_encode(v) ^ polar_encode(w)));
        }
    }
}

TEST_CASE("encode rejects non-power-of-two lengths") {
    BitVector v(3);
    CHECK_THROWS_AS(polar_encode(v), std::invalid_argument);
    CHECK_THROWS_AS(polar_transform_matrix(13), std::invalid_argument);
}

TEST_CASE("bit vector parsing round trips") {
    BitVector v = BitVector::parse("10110");
    CHECK(v.to_binary_string() == "10110");
    BitVector h = BitVector::parse("0x1f", 5);
    CHECK(h.to_binary_string() == "11111");
    CHECK(BitVector::parse(v.to_hex_string(), 5) == v);
    CHECK_THROWS_AS(BitVector::parse("012"), std::invalid_argument);
    CHECK_THROWS_AS(BitVector::parse("0xzz"), std::invalid_argument);
}
