#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarwt/rng.hpp"

namespace polarwt {

using json = nlohmann::ordered_json;

// LLRs of (near-)deterministic symbols saturate here. Large enough that a
// full block of them cannot be outweighed by moderate evidence, small enough
// that sums over a block stay exactly representable.
inline constexpr double kLlrCap = 1e9;

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Finite binary-input discrete memoryless channel: a 2 x |Z| table of
// transition probabilities under opaque ordered output labels.
class DiscreteChannel {
public:
    DiscreteChannel(std::vector<double> w0, std::vector<double> w1,
                    std::vector<std::string> labels = {}, double row_sum_tol = 1e-12)
        : w0_(std::move(w0)), w1_(std::move(w1)), labels_(std::move(labels)) {
        if (w0_.size() != w1_.size() || w0_.empty())
            throw std::invalid_argument("DiscreteChannel: rows must be non-empty and equal length");
        if (!labels_.empty() && labels_.size() != w0_.size())
            throw std::invalid_argument("DiscreteChannel: label count mismatch");
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t z = 0; z < w0_.size(); ++z) {
            if (w0_[z] < 0.0 || w1_[z] < 0.0)
                throw std::invalid_argument("DiscreteChannel: negative transition probability");
            s0 += w0_[z];
            s1 += w1_[z];
        }
        if (std::abs(s0 - 1.0) > row_sum_tol || std::abs(s1 - 1.0) > row_sum_tol)
            throw std::invalid_argument("DiscreteChannel: row sums deviate from 1 beyond tolerance");
    }

    std::size_t output_count() const { return w0_.size(); }
    double prob(int x, std::size_t z) const { return x == 0 ? w0_[z] : w1_[z]; }
    const std::vector<double>& row(int x) const { return x == 0 ? w0_ : w1_; }
    std::string label(std::size_t z) const {
        return labels_.empty() ? "z" + std::to_string(z) : labels_[z];
    }
    bool has_labels() const { return !labels_.empty(); }

    // log W(z|0)/W(z|1), saturated at +-kLlrCap
    double llr(std::size_t z) const {
        double a = w0_[z], b = w1_[z];
        if (a == b) return 0.0;
        if (b == 0.0) return kLlrCap;
        if (a == 0.0) return -kLlrCap;
        return std::clamp(std::log(a) - std::log(b), -kLlrCap, kLlrCap);
    }

    std::size_t sample(int x, Rng& rng) const {
        double u = rng.next_double();
        const std::vector<double>& r = x == 0 ? w0_ : w1_;
        double acc = 0.0;
        for (std::size_t z = 0; z + 1 < r.size(); ++z) {
            acc += r[z];
            if (u < acc) return z;
        }
        return r.size() - 1;
    }

private:
    std::vector<double> w0_, w1_;
    std::vector<std::string> labels_;
};

inline DiscreteChannel make_bsc(double p) {
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("make_bsc: p must be in [0, 1/2]");
    return DiscreteChannel({1.0 - p, p}, {p, 1.0 - p}, {"0", "1"});
}

inline DiscreteChannel make_bec(double eps) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("make_bec: eps must be in [0, 1]");
    return DiscreteChannel({1.0 - eps, eps, 0.0}, {0.0, eps, 1.0 - eps}, {"0", "e", "1"});
}

// Mutual information in bits between a uniform input and the output.
inline double capacity(const DiscreteChannel& w) {
    double sum = 0.0, comp = 0.0;  // Kahan
    for (std::size_t z = 0; z < w.output_count(); ++z) {
        double q = 0.5 * (w.prob(0, z) + w.prob(1, z));
        for (int x = 0; x < 2; ++x) {
            double p = w.prob(x, z);
            if (p <= 0.0) continue;
            double term = 0.5 * p * std::log2(p / q);
            double y = term - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline double bhattacharyya(const DiscreteChannel& w) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t z = 0; z < w.output_count(); ++z) {
        double term = std::sqrt(w.prob(0, z) * w.prob(1, z));
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// Output-symmetry witness: an involution on outputs pairing each column
// (a, b) with a column (b, a). pairing[z] == z marks a self-paired symbol.
struct SymmetryWitness {
    bool symmetric = false;
    std::vector<std::size_t> pairing;
    std::vector<std::size_t> unmatched;
};

inline SymmetryWitness is_symmetric(const DiscreteChannel& w, double tol = 1e-9) {
    std::size_t nz = w.output_count();
    SymmetryWitness wit;
    wit.pairing.assign(nz, SIZE_MAX);
    std::vector<bool> used(nz, false);
    for (std::size_t z = 0; z < nz; ++z) {
        if (used[z]) continue;
        // prefer a self-pairing when the column is balanced
        if (std::abs(w.prob(0, z) - w.prob(1, z)) <= tol) {
            wit.pairing[z] = z;
            used[z] = true;
            continue;
        }
        bool found = false;
        for (std::size_t z2 = z + 1; z2 < nz; ++z2) {
            if (used[z2]) continue;
            if (std::abs(w.prob(0, z2) - w.prob(1, z)) <= tol &&
                std::abs(w.prob(1, z2) - w.prob(0, z)) <= tol) {
                wit.pairing[z] = z2;
                wit.pairing[z2] = z;
                used[z] = used[z2] = true;
                found = true;
                break;
            }
        }
        if (!found) wit.unmatched.push_back(z);
    }
    wit.symmetric = wit.unmatched.empty();
    return wit;
}

// W2(z|x) = sum_y W1(y|x) W3(z|y). The result is degraded with respect to w1
// by construction.
inline DiscreteChannel cascade(const DiscreteChannel& w1,
                               const std::vector<std::vector<double>>& w3) {
    std::size_t ny = w1.output_count();
    if (w3.size() != ny) throw std::invalid_argument("cascade: w3 must have one row per w1 output");
    std::size_t nz = w3.front().size();
    for (const auto& r : w3) {
        if (r.size() != nz) throw std::invalid_argument("cascade: ragged w3");
        double s = 0.0;
        for (double p : r) {
            if (p < 0.0) throw std::invalid_argument("cascade: negative entry in w3");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("cascade: w3 rows must sum to 1");
    }
    std::vector<double> r0(nz, 0.0), r1(nz, 0.0);
    for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z) {
            r0[z] += w1.prob(0, y) * w3[y][z];
            r1[z] += w1.prob(1, y) * w3[y][z];
        }
    return DiscreteChannel(std::move(r0), std::move(r1), {}, 1e-9);
}

// C(main) - C(tap) for symmetric channels; degradation of tap w.r.t. main is
// the caller's responsibility (the value has no proven operational meaning
// for non-degraded pairs).
inline double secrecy_capacity(const DiscreteChannel& main, const DiscreteChannel& tap) {
    if (!is_symmetric(main).symmetric)
        throw std::invalid_argument("secrecy_capacity: main channel is not symmetric");
    if (!is_symmetric(tap).symmetric)
        throw std::invalid_argument("secrecy_capacity: tap channel is not symmetric");
    return capacity(main) - capacity(tap);
}

inline json channel_to_json(const DiscreteChannel& w) {
    json j;
    j["kind"] = "generic";
    j["transitions"] = {w.row(0), w.row(1)};
    return j;
}

inline DiscreteChannel channel_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "bsc") return make_bsc(j.at("p").get<double>());
    if (kind == "bec") return make_bec(j.at("eps").get<double>());
    if (kind == "generic") {
        auto t = j.at("transitions");
        if (!t.is_array() || t.size() != 2)
            throw std::invalid_argument("channel: transitions must have 2 rows");
        return DiscreteChannel(t[0].get<std::vector<double>>(), t[1].get<std::vector<double>>());
    }
    throw std::invalid_argument("channel: unknown kind \"" + kind + "\"");
}

}  // namespace polarwt
