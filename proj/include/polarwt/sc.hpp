#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polarwt/transform.hpp"

namespace polarwt {

// Exact soft combination of two LLRs at a check node:
//   chk(a, b) = log((1 + e^{a+b}) / (e^a + e^b))
// evaluated in a form stable for large magnitudes and exact at 0 (erasures).
inline double llr_check(double a, double b) {
    double sign = 1.0;
    if (a < 0) { a = -a; sign = -sign; }
    if (b < 0) { b = -b; sign = -sign; }
    double lo = a < b ? a : b;
    double hi = a < b ? b : a;
    if (lo == 0.0) return 0.0;
    double corr = 0.0;
    if (hi + lo < 40.0) corr += std::log1p(std::exp(-(hi + lo)));
    if (hi - lo < 40.0) corr -= std::log1p(std::exp(-(hi - lo)));
    return sign * (lo + corr);
}

inline double llr_var(double a, double b, uint8_t bit) { return (bit ? -a : a) + b; }

// log Pr(chosen bit | llr); the path metric accumulates these
inline double llr_logprob(double llr, uint8_t bit) {
    double s = bit ? llr : -llr;
    if (s > 40.0) return -s;  // log1p(e^s) ~ s
    return -std::log1p(std::exp(s));
}

// Stepwise successive-cancellation engine for x = v P_n G^{(x) m}.
// next_llr() yields the exact bit-channel LLR of the next input position
// given all previously fed decisions; feed() commits a decision. Copyable,
// so list-style decoders can fork paths at chosen positions.
class ScEngine {
public:
    explicit ScEngine(std::vector<double> channel_llrs) : chllr_(std::move(channel_llrs)) {
        n_ = chllr_.size();
        m_ = log2_exact(n_);
        la_.resize(m_);
        lb_.resize(m_);
        for (unsigned d = 0; d < m_; ++d) {
            la_[d].assign(std::size_t{1} << d, 0.0);
            lb_[d].assign(std::size_t{1} << d, 0.0);
        }
        fed_.assign(m_ + 1, std::vector<uint8_t>(n_, 0));
        cursor_ = 0;
    }

    std::size_t size() const { return n_; }
    std::size_t cursor() const { return cursor_; }
    bool done() const { return cursor_ == n_; }

    double next_llr() {
        if (done()) throw std::logic_error("ScEngine: all bits already decided");
        return llr_of(0, 0, cursor_);
    }

    void feed(uint8_t bit) {
        fed_[0][cursor_] = bit;
        if (cursor_ & 1) push_down(0, 0, cursor_);
        ++cursor_;
    }

private:
    // LLR of local input bit `phase` of the subtree (depth d, ordinal q),
    // given that all earlier local inputs of this subtree have been fed.
    double llr_of(unsigned d, std::size_t q, std::size_t phase) {
        if (d == m_) return chllr_[q];
        if ((phase & 1) == 0) {
            double a = llr_of(d + 1, 2 * q, phase >> 1);
            double b = llr_of(d + 1, 2 * q + 1, phase >> 1);
            la_[d][q] = a;
            lb_[d][q] = b;
            return llr_check(a, b);
        }
        std::size_t sub = std::size_t{1} << (m_ - d);
        uint8_t prev = fed_[d][q * sub + phase - 1];
        return llr_var(la_[d][q], lb_[d][q], prev);
    }

    // after the odd phase of a pair is fed, propagate partial sums to children
    void push_down(unsigned d, std::size_t q, std::size_t phase) {
        if (d == m_) return;
        std::size_t sub = std::size_t{1} << (m_ - d);
        std::size_t half = sub >> 1;
        std::size_t psi = phase >> 1;
        uint8_t even = fed_[d][q * sub + phase - 1];
        uint8_t odd = fed_[d][q * sub + phase];
        fed_[d + 1][2 * q * half + psi] = even ^ odd;
        fed_[d + 1][(2 * q + 1) * half + psi] = odd;
        if (psi & 1) {
            push_down(d + 1, 2 * q, psi);
            push_down(d + 1, 2 * q + 1, psi);
        }
    }

    std::size_t n_ = 0;
    unsigned m_ = 0;
    std::size_t cursor_ = 0;
    std::vector<double> chllr_;
    std::vector<std::vector<double>> la_, lb_;   // cached child LLRs per node
    std::vector<std::vector<uint8_t>> fed_;      // fed input bits per depth
};

}  // namespace polarwt
