#include <catch2/catch_amalgamated.hpp>

#include "polarwt/channel.hpp"

using namespace polarwt;
using Catch::Approx;

TEST_CASE("bsc construction and measures") {
    CHECK(capacity(make_bsc(0.0)) == Approx(1.0));
    CHECK(capacity(make_bsc(0.5)) == Approx(0.0).margin(1e-12));
    // 1 - h2(0.11)
    CHECK(capacity(make_bsc(0.11)) == Approx(0.500084041835472).epsilon(1e-9));
    CHECK(capacity(make_bsc(0.11)) == Approx(0.5001).margin(1e-3));
    CHECK(bhattacharyya(make_bsc(0.11)) == Approx(0.6257795138864807).epsilon(1e-12));
    CHECK(bhattacharyya(make_bsc(0.0)) == 0.0);
    CHECK(bhattacharyya(make_bsc(0.5)) == Approx(1.0));
    CHECK_THROWS_AS(make_bsc(0.6), std::invalid_argument);
    CHECK_THROWS_AS(make_bsc(-0.1), std::invalid_argument);
}

TEST_CASE("bec construction and measures") {
    CHECK(capacity(make_bec(0.0)) == Approx(1.0));
    CHECK(capacity(make_bec(1.0)) == Approx(0.0).margin(1e-12));
    CHECK(capacity(make_bec(0.5)) == Approx(0.5).epsilon(1e-12));
    CHECK(bhattacharyya(make_bec(0.5)) == Approx(0.5).epsilon(1e-12));
    CHECK(bhattacharyya(make_bec(0.25)) == Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(make_bec(1.5), std::invalid_argument);
}

TEST_CASE("closed forms match table evaluation on grids") {
    for (double p : {0.01, 0.1, 0.2, 0.33, 0.49}) {
        CHECK(capacity(make_bsc(p)) == Approx(1.0 - binary_entropy(p)).epsilon(1e-12));
        CHECK(bhattacharyya(make_bsc(p)) == Approx(2.0 * std::sqrt(p * (1.0 - p))).epsilon(1e-12));
    }
    for (double e : {0.05, 0.3, 0.7, 0.95}) {
        CHECK(capacity(make_bec(e)) == Approx(1.0 - e).epsilon(1e-12));
        CHECK(bhattacharyya(make_bec(e)) == Approx(e).epsilon(1e-12));
    }
}

TEST_CASE("identical rows give zero capacity") {
    DiscreteChannel noise({0.3, 0.7}, {0.3, 0.7});
    CHECK(capacity(noise) == Approx(0.0).margin(1e-12));
}

TEST_CASE("measures stay in the unit interval") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        std::size_t nz = 2 + rng.next_u64() % 5;
        std::vector<double> w0(nz), w1(nz);
        double s0 = 0, s1 = 0;
        for (std::size_t z = 0; z < nz; ++z) {
            w0[z] = rng.next_double() + 1e-3;
            w1[z] = rng.next_double() + 1e-3;
            s0 += w0[z];
            s1 += w1[z];
        }
        for (std::size_t z = 0; z < nz; ++z) {
            w0[z] /= s0;
            w1[z] /= s1;
        }
        DiscreteChannel w(w0, w1, {}, 1e-9);
        double c = capacity(w), zb = bhattacharyya(w);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        CHECK(zb >= 0.0);
        CHECK(zb <= 1.0);
    }
}

TEST_CASE("symmetry detection") {
    CHECK(is_symmetric(make_bsc(0.2)).symmetric);
    CHECK(is_symmetric(make_bec(0.7)).symmetric);
    for (double p : {0.0, 0.1, 0.25, 0.5})
        CHECK(is_symmetric(make_bsc(p)).symmetric);
    for (double e : {0.0, 0.4, 1.0})
        CHECK(is_symmetric(make_bec(e)).symmetric);

    DiscreteChannel asym({0.7, 0.3}, {0.6, 0.4});
    auto wit = is_symmetric(asym);
    CHECK_FALSE(wit.symmetric);
    CHECK_FALSE(wit.unmatched.empty());
}

TEST_CASE("symmetry witness pairs columns correctly") {
    auto wit = is_symmetric(make_bec(0.4));
    REQUIRE(wit.symmetric);
    CHECK(wit.pairing[0] == 2);  // "0" pairs with "1"
    CHECK(wit.pairing[2] == 0);
    CHECK(wit.pairing[1] == 1);  // erasure is self-paired
}

TEST_CASE("cascade with identity is the original channel") {
    DiscreteChannel w = make_bsc(0.17);
    std::vector<std::vector<double>> id = {{1.0, 0.0}, {0.0, 1.0}};
    DiscreteChannel w2 = cascade(w, id);
    CHECK(w2.prob(0, 0) == Approx(w.prob(0, 0)));
    CHECK(w2.prob(1, 0) == Approx(w.prob(1, 0)));
}

TEST_CASE("bsc cascade composes crossover probabilities") {
    double p = 0.1, q = 0.2;
    std::vector<std::vector<double>> flip = {{1.0 - q, q}, {q, 1.0 - q}};
    DiscreteChannel w2 = cascade(make_bsc(p), flip);
    double expect = p * (1.0 - q) + q * (1.0 - p);
    CHECK(w2.prob(0, 1) == Approx(expect).epsilon(1e-12));
    CHECK(capacity(w2) == Approx(capacity(make_bsc(expect))).epsilon(1e-12));
}

TEST_CASE("bec cascade composes erasure probabilities") {
    double e1 = 0.3, e2 = 0.25;
    // second hop: keep symbols, erase with probability e2; erasure stays put
    std::vector<std::vector<double>> hop = {
        {1.0 - e2, e2, 0.0},
        {0.0, 1.0, 0.0},
        {0.0, e2, 1.0 - e2},
    };
    DiscreteChannel w2 = cascade(make_bec(e1), hop);
    double expect = 1.0 - (1.0 - e1) * (1.0 - e2);
    CHECK(capacity(w2) == Approx(1.0 - expect).epsilon(1e-12));
    CHECK(bhattacharyya(w2) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("cascade cannot improve the channel") {
    Rng rng(17);
    DiscreteChannel w1 = make_bsc(0.08);
    for (int t = 0; t < 30; ++t) {
        // random 2x3 stochastic second hop
        std::vector<std::vector<double>> w3(2, std::vector<double>(3));
        for (auto& row : w3) {
            double s = 0;
            for (double& p : row) {
                p = rng.next_double() + 1e-3;
                s += p;
            }
            for (double& p : row) p /= s;
        }
        DiscreteChannel w2 = cascade(w1, w3);
        CHECK(capacity(w2) <= capacity(w1) + 1e-9);
        CHECK(bhattacharyya(w2) >= bhattacharyya(w1) - 1e-9);
    }
}

TEST_CASE("cascade input validation") {
    CHECK_THROWS_AS(cascade(make_bsc(0.1), {{0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(cascade(make_bsc(0.1), {{0.7, 0.7}, {0.5, 0.5}}), std::invalid_argument);
}

TEST_CASE("secrecy capacity") {
    CHECK(secrecy_capacity(make_bsc(0.1), make_bsc(0.1)) == Approx(0.0).margin(1e-12));
    double cs = secrecy_capacity(make_bsc(0.001), make_bsc(0.45));
    CHECK(cs == Approx(binary_entropy(0.45) - binary_entropy(0.001)).epsilon(1e-12));
    CHECK(cs == Approx(0.9814).margin(2e-4));
    // noiseless main
    CHECK(secrecy_capacity(make_bsc(0.0), make_bsc(0.3)) ==
          Approx(binary_entropy(0.3)).epsilon(1e-12));
    DiscreteChannel asym({0.7, 0.3}, {0.6, 0.4});
    CHECK_THROWS_AS(secrecy_capacity(asym, make_bsc(0.1)), std::invalid_argument);
}

TEST_CASE("channel json round trip") {
    json b = {{"kind", "bsc"}, {"p", 0.11}};
    DiscreteChannel w = channel_from_json(b);
    CHECK(w.prob(0, 1) == Approx(0.11));
    json e = {{"kind", "bec"}, {"eps", 0.5}};
    CHECK(channel_from_json(e).output_count() == 3);
    json g = {{"kind", "generic"}, {"transitions", {{0.9, 0.1}, {0.2, 0.8}}}};
    CHECK(channel_from_json(g).prob(1, 0) == Approx(0.2));
    CHECK_THROWS_AS(channel_from_json(json{{"kind", "awgn"}}), std::invalid_argument);
}

TEST_CASE("capacity bounded by Bhattacharyya bound") {
    // C(W) <= sqrt(1 - Z(W)^2) on parameter grids
    for (double p : {0.01, 0.05, 0.11, 0.2, 0.3, 0.45}) {
        DiscreteChannel w = make_bsc(p);
        double z = bhattacharyya(w);
        CHECK(capacity(w) <= std::sqrt(1.0 - z * z) + 1e-9);
    }
    for (double e : {0.1, 0.3, 0.5, 0.8}) {
        DiscreteChannel w = make_bec(e);
        double z = bhattacharyya(w);
        CHECK(capacity(w) <= std::sqrt(1.0 - z * z) + 1e-9);
    }
}
