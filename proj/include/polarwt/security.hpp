#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarwt/channel.hpp"
#include "polarwt/construction.hpp"
#include "polarwt/gf2.hpp"
#include "polarwt/parallel.hpp"
#include "polarwt/transform.hpp"
#include "polarwt/wiretap.hpp"

namespace polarwt {

// A bound component kept in both linear bits and log2 bits, so that values
// below the double underflow threshold remain reportable.
struct BoundTerm {
    double bits = 0.0;
    double log2 = -kInf;
};

inline BoundTerm term_from_linear(double x) { return {x, x > 0.0 ? std::log2(x) : -kInf}; }

// h2(2^t) for t <= 0, stable for very negative t
inline BoundTerm h2_term_log2(double t) {
    if (t >= -50.0) {
        double x = std::exp2(t);
        return term_from_linear(binary_entropy(x));
    }
    // h2(x) ~ x (log2(1/x) + 1/ln2) for tiny x
    double l = t + std::log2(-t + kInvLn2);
    return {std::exp2(l), l};
}

inline double logsumexp2(const std::vector<double>& ls) {
    double hi = -kInf;
    for (double l : ls) hi = std::max(hi, l);
    if (hi == -kInf) return -kInf;
    double acc = 0.0;
    for (double l : ls) acc += std::exp2(l - hi);
    return hi + std::log2(acc);
}

struct LeakageReport {
    WiretapMode mode = WiretapMode::Weak;
    double bound_bits = 0.0;
    double bound_log2 = -kInf;
    // weak components
    BoundTerm n_eps_term, h2_term, tail_term;
    // strong components
    double delta_log2 = 0.0;
    std::size_t poor_count = 0;
    bool vanishing_regime = false;  // delta * n < 1
    // exact oracle, when applicable
    std::optional<double> exact_bits;
    std::optional<double> exact_stderr;
    double normalized = 0.0;  // bound / k
};

// Three-term weak-security leakage bound: n(C - |R|/n), plus the conditional
// entropy cost of a failed randomizer recovery under the certified
// Bhattacharyya budget.
inline LeakageReport weak_leakage_bound(const WiretapCode& code, const BitChannelStats& eve) {
    if (code.mode != WiretapMode::Weak)
        throw std::invalid_argument("weak_leakage_bound: code is not weak-mode");
    if (eve.n != code.n) throw std::invalid_argument("weak_leakage_bound: stats length mismatch");
    LeakageReport rep;
    rep.mode = WiretapMode::Weak;
    double n = static_cast<double>(code.n);
    double nbeta = std::pow(n, code.beta);
    rep.n_eps_term = term_from_linear(
        std::max(0.0, n * eve.base_capacity - static_cast<double>(code.r())));
    rep.h2_term = h2_term_log2(-nbeta);
    double tail_log2 = std::log2(n - static_cast<double>(code.k())) - nbeta;
    rep.tail_term = {std::exp2(tail_log2), tail_log2};
    rep.bound_log2 = logsumexp2({rep.n_eps_term.log2, rep.h2_term.log2, rep.tail_term.log2});
    rep.bound_bits = rep.n_eps_term.bits + rep.h2_term.bits + rep.tail_term.bits;
    rep.normalized = code.k() > 0 ? rep.bound_bits / static_cast<double>(code.k())
                                  : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

// delta_n * |poor set|; holds for any message distribution.
inline LeakageReport strong_leakage_bound(const WiretapCode& code, const BitChannelStats& eve) {
    if (code.mode != WiretapMode::Strong)
        throw std::invalid_argument("strong_leakage_bound: code is not strong-mode");
    if (eve.n != code.n) throw std::invalid_argument("strong_leakage_bound: stats length mismatch");
    LeakageReport rep;
    rep.mode = WiretapMode::Strong;
    rep.delta_log2 = code.delta_log2;
    rep.poor_count = code.set_a.size() + code.set_b.size();
    if (rep.poor_count > 0)
        rep.bound_log2 = code.delta_log2 + std::log2(static_cast<double>(rep.poor_count));
    rep.bound_bits = std::exp2(rep.bound_log2);
    rep.vanishing_regime = code.delta_log2 + std::log2(static_cast<double>(code.n)) < 0.0;
    rep.normalized = code.k() > 0 ? rep.bound_bits / static_cast<double>(code.k())
                                  : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

// ---------------------------------------------------------------------------
// exact leakage over an erasure tap via GF(2) ranks
// ---------------------------------------------------------------------------

struct BecLeakage {
    double bits = 0.0;
    double stderr_bits = 0.0;
    bool exhaustive = false;
    uint64_t patterns = 0;
};

namespace detail {

// rows of the transform restricted to T, packed
inline std::vector<std::vector<uint64_t>> packed_rows(const GF2Matrix& gn,
                                                      const std::vector<uint32_t>& idx) {
    std::vector<std::vector<uint64_t>> rows;
    rows.reserve(idx.size());
    for (uint32_t i : idx)
        rows.emplace_back(gn.row(i), gn.row(i) + gn.words_per_row());
    return rows;
}

// independent message rows given the randomizer rows, on the unerased columns
inline unsigned leakage_sample(const std::vector<std::vector<uint64_t>>& r_rows,
                               const std::vector<std::vector<uint64_t>>& a_rows,
                               const std::vector<uint64_t>& mask, std::size_t cols,
                               std::vector<uint64_t>& scratch, GF2Echelon& ech) {
    ech.reset();
    for (const auto& row : r_rows) {
        for (std::size_t w = 0; w < mask.size(); ++w) scratch[w] = row[w] & mask[w];
        ech.insert(scratch.data());
    }
    unsigned cnt = 0;
    for (const auto& row : a_rows) {
        for (std::size_t w = 0; w < mask.size(); ++w) scratch[w] = row[w] & mask[w];
        if (ech.insert(scratch.data())) ++cnt;
    }
    (void)cols;
    return cnt;
}

}  // namespace detail

// I(U; Z) for a uniform message over an erasure tap with parameter eps:
// the expected number of message rows of the transform that stay independent
// of the randomizer rows once erased columns are dropped. Exhaustive over
// erasure patterns when 2^n fits the budget (n <= 20), Monte-Carlo otherwise.
// freeze_randomizer drops the randomizer rows entirely (fixed e), in which
// case the sample is the plain rank of the message rows.
inline BecLeakage bec_exact_leakage(const WiretapCode& code, double eps, uint64_t pattern_budget,
                                    uint64_t seed, uint64_t mc_patterns = 100000,
                                    bool freeze_randomizer = false, unsigned threads = 1) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("bec_exact_leakage: eps in [0,1]");
    unsigned m = log2_exact(code.n);
    GF2Matrix gn = polar_transform_matrix(m);
    auto r_rows = freeze_randomizer ? std::vector<std::vector<uint64_t>>{}
                                    : detail::packed_rows(gn, code.set_r);
    auto a_rows = detail::packed_rows(gn, code.set_a);
    std::size_t words = gn.words_per_row();

    BecLeakage out;
    bool exhaustive = code.n <= 20 && (uint64_t{1} << code.n) <= pattern_budget;
    if (exhaustive) {
        uint64_t total = uint64_t{1} << code.n;
        double sum = 0.0, comp = 0.0, wsum = 0.0;
        std::vector<uint64_t> mask(words, 0), scratch(words, 0);
        GF2Echelon ech(code.n);
        for (uint64_t s = 0; s < total; ++s) {
            // bit t of s set => column t kept
            mask[0] = s;
            int kept = __builtin_popcountll(s);
            double w = std::pow(1.0 - eps, kept) * std::pow(eps, static_cast<int>(code.n) - kept);
            if (w == 0.0) {
                if ((eps == 0.0 && static_cast<std::size_t>(kept) == code.n) ||
                    (eps == 1.0 && kept == 0))
                    w = 1.0;
                else
                    continue;
            }
            unsigned smp = detail::leakage_sample(r_rows, a_rows, mask, code.n, scratch, ech);
            wsum += w;
            double y = w * smp - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            throw std::logic_error("bec_exact_leakage: pattern weights do not sum to 1");
        out.bits = sum;
        out.stderr_bits = 0.0;
        out.exhaustive = true;
        out.patterns = total;
        return out;
    }

    std::vector<uint16_t> samples(mc_patterns, 0);
    parallel_for(0, mc_patterns, threads, [&](std::size_t t) {
        thread_local std::vector<uint64_t> mask, scratch;
        thread_local std::unique_ptr<GF2Echelon> ech;
        thread_local std::size_t ech_cols = 0;
        if (mask.size() != words) {
            mask.assign(words, 0);
            scratch.assign(words, 0);
        }
        if (!ech || ech_cols != code.n) {
            ech = std::make_unique<GF2Echelon>(code.n);
            ech_cols = code.n;
        }
        Rng rng = derive_rng(seed, t, 0x65726173ULL);
        std::fill(mask.begin(), mask.end(), 0);
        for (std::size_t c = 0; c < code.n; ++c)
            if (!(rng.next_double() < eps)) mask[c / 64] |= uint64_t{1} << (c % 64);
        samples[t] =
            static_cast<uint16_t>(detail::leakage_sample(r_rows, a_rows, mask, code.n, scratch, *ech));
    });
    double sum = 0.0, sumsq = 0.0;
    for (uint16_t s : samples) {
        sum += s;
        sumsq += static_cast<double>(s) * s;
    }
    double mean = sum / static_cast<double>(mc_patterns);
    double var = std::max(0.0, sumsq / static_cast<double>(mc_patterns) - mean * mean);
    out.bits = mean;
    out.stderr_bits = std::sqrt(var / static_cast<double>(mc_patterns));
    out.exhaustive = false;
    out.patterns = mc_patterns;
    return out;
}

// ---------------------------------------------------------------------------
// induced channel (small-n dense oracle)
// ---------------------------------------------------------------------------

// Channel from the non-randomized transform inputs to the full output block
// when positions R carry uniform random bits. Rows indexed by the bits on
// R^c (ascending positions, position rc[0] = LSB); columns by output codes
// z_code = sum_t z_t |Z|^{n-1-t}.
struct InducedChannel {
    std::size_t n = 0;
    std::vector<uint32_t> set_r;
    std::size_t base_outputs = 0;
    std::vector<std::vector<double>> q;

    std::size_t inputs() const { return q.size(); }
    std::size_t outputs() const { return q.empty() ? 0 : q.front().size(); }
};

inline InducedChannel induced_channel(const DiscreteChannel& w, unsigned n,
                                      const std::vector<uint32_t>& set_r) {
    if (n != 1 && n != 2 && n != 4)
        throw std::invalid_argument("induced_channel: n must be 1, 2 or 4");
    for (uint32_t i : set_r)
        if (i >= n) throw std::invalid_argument("induced_channel: index out of range");
    std::size_t r = set_r.size();
    std::size_t zn = 1;
    for (unsigned t = 0; t < n; ++t) zn *= w.output_count();
    if (zn * (std::size_t{1} << (n - r)) > (std::size_t{1} << 22))
        throw std::invalid_argument("induced_channel: dense table too large");
    std::vector<uint32_t> rc;
    for (uint32_t i = 0; i < n; ++i)
        if (!std::binary_search(set_r.begin(), set_r.end(), i)) rc.push_back(i);

    InducedChannel ic;
    ic.n = n;
    ic.set_r = set_r;
    ic.base_outputs = w.output_count();
    ic.q.assign(std::size_t{1} << (n - r), std::vector<double>(zn, 0.0));
    double scale = std::exp2(-static_cast<double>(r));
    std::vector<uint8_t> v(n);
    for (std::size_t xc = 0; xc < ic.q.size(); ++xc) {
        for (std::size_t ec = 0; ec < (std::size_t{1} << r); ++ec) {
            std::fill(v.begin(), v.end(), 0);
            for (std::size_t j = 0; j < rc.size(); ++j) v[rc[j]] = (xc >> j) & 1;
            for (std::size_t j = 0; j < r; ++j) v[set_r[j]] = (ec >> j) & 1;
            std::vector<uint8_t> x = v;
            polar_transform_inplace(x);
            for (std::size_t zc = 0; zc < zn; ++zc) {
                double p = scale;
                std::size_t rem = zc;
                for (unsigned t = n; t-- > 0;) {
                    p *= w.prob(x[t], rem % w.output_count());
                    rem /= w.output_count();
                    if (p == 0.0) break;
                }
                ic.q[xc][zc] += p;
            }
        }
    }
    for (const auto& row : ic.q) {
        double s = 0.0;
        for (double p : row) s += p;
        if (std::abs(s - 1.0) > 1e-10)
            throw std::logic_error("induced_channel: row sum deviates from 1");
    }
    return ic;
}

inline DiscreteChannel induced_to_binary(const InducedChannel& ic) {
    if (ic.inputs() != 2)
        throw std::invalid_argument("induced_to_binary: input alphabet is not binary");
    return DiscreteChannel(ic.q[0], ic.q[1], {}, 1e-9);
}

// mutual information under uniform input (the capacity, by symmetry)
inline double induced_capacity(const InducedChannel& ic) {
    double px = 1.0 / static_cast<double>(ic.inputs());
    double sum = 0.0, comp = 0.0;
    for (std::size_t z = 0; z < ic.outputs(); ++z) {
        double qz = 0.0;
        for (std::size_t x = 0; x < ic.inputs(); ++x) qz += px * ic.q[x][z];
        if (qz <= 0.0) continue;
        for (std::size_t x = 0; x < ic.inputs(); ++x) {
            double p = ic.q[x][z];
            if (p <= 0.0) continue;
            double term = px * p * std::log2(p / qz);
            double y = term - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return std::max(0.0, sum);
}

struct InducedCapacityReport {
    double c_induced = 0.0;
    double sum_bit_capacities = 0.0;  // over R^c
    bool ok = false;
};

// C(Q) <= sum of the R^c bit-channel capacities (exact small-instance check)
inline InducedCapacityReport induced_capacity_check(const DiscreteChannel& w, unsigned n,
                                                    const std::vector<uint32_t>& set_r,
                                                    const BitChannelStats& exact,
                                                    double tol = 1e-9) {
    if (exact.n != n) throw std::invalid_argument("induced_capacity_check: stats length mismatch");
    InducedChannel ic = induced_channel(w, n, set_r);
    InducedCapacityReport rep;
    rep.c_induced = induced_capacity(ic);
    for (uint32_t i = 0; i < n; ++i)
        if (!std::binary_search(set_r.begin(), set_r.end(), i))
            rep.sum_bit_capacities += exact.rec[i].c_hi;
    rep.ok = rep.c_induced <= rep.sum_bit_capacities + tol;
    return rep;
}

// ---------------------------------------------------------------------------
// symmetry certificates
// ---------------------------------------------------------------------------

struct SymmetryCertificate {
    bool ok = false;
    std::vector<std::vector<std::size_t>> orbits;
    std::string violation;  // empty when ok
};

// orbit partition of a symmetric binary-input channel under its output
// involution
inline SymmetryCertificate symmetry_certificate(const DiscreteChannel& w, double tol = 1e-9) {
    SymmetryCertificate cert;
    SymmetryWitness wit = is_symmetric(w, tol);
    if (!wit.symmetric) {
        cert.violation = "no output pairing exists";
        return cert;
    }
    std::vector<bool> seen(w.output_count(), false);
    for (std::size_t z = 0; z < w.output_count(); ++z) {
        if (seen[z]) continue;
        std::size_t zp = wit.pairing[z];
        if (zp == z) cert.orbits.push_back({z});
        else cert.orbits.push_back({z, zp});
        seen[z] = seen[zp] = true;
    }
    cert.ok = true;
    return cert;
}

namespace detail {

// output involution of a symmetric binary-input channel
inline std::vector<std::size_t> output_involution(const DiscreteChannel& w, double tol = 1e-9) {
    SymmetryWitness wit = is_symmetric(w, tol);
    if (!wit.symmetric)
        throw std::invalid_argument("channel is not symmetric: no output involution");
    return wit.pairing;
}

// action of the codeword c on an output code: flip each symbol where c_t = 1
inline std::size_t act_on_code(std::size_t zc, const std::vector<uint8_t>& c,
                               const std::vector<std::size_t>& pi1, std::size_t base,
                               unsigned n) {
    std::vector<std::size_t> digits(n);
    std::size_t rem = zc;
    for (unsigned t = n; t-- > 0;) {
        digits[t] = rem % base;
        rem /= base;
    }
    std::size_t out = 0;
    for (unsigned t = 0; t < n; ++t) {
        std::size_t d = c[t] ? pi1[digits[t]] : digits[t];
        out = out * base + d;
    }
    return out;
}

}  // namespace detail

// Constructive symmetry check for an induced channel: verifies
// Q(z | a + x) = Q(a o z | x) where a o z acts through the codeword of (a; 0),
// and returns the orbit partition of output codes under that action.
inline SymmetryCertificate verify_induced_symmetry(const InducedChannel& ic,
                                                   const DiscreteChannel& base,
                                                   double tol = 1e-10) {
    SymmetryCertificate cert;
    std::vector<std::size_t> pi1 = detail::output_involution(base);
    unsigned n = static_cast<unsigned>(ic.n);
    std::size_t inputs = ic.inputs();
    std::size_t zn = ic.outputs();
    std::vector<uint32_t> rc;
    for (uint32_t i = 0; i < n; ++i)
        if (!std::binary_search(ic.set_r.begin(), ic.set_r.end(), i)) rc.push_back(i);

    // codeword of (a; 0) for every input a
    std::vector<std::vector<uint8_t>> act(inputs);
    for (std::size_t a = 0; a < inputs; ++a) {
        std::vector<uint8_t> v(n, 0);
        for (std::size_t j = 0; j < rc.size(); ++j) v[rc[j]] = (a >> j) & 1;
        polar_transform_inplace(v);
        act[a] = v;
    }
    for (std::size_t a = 0; a < inputs && cert.violation.empty(); ++a)
        for (std::size_t x = 0; x < inputs && cert.violation.empty(); ++x)
            for (std::size_t zc = 0; zc < zn; ++zc) {
                std::size_t za = detail::act_on_code(zc, act[a], pi1, ic.base_outputs, n);
                if (std::abs(ic.q[a ^ x][zc] - ic.q[x][za]) > tol) {
                    cert.violation = "Q(z|a+x) != Q(a.z|x) at a=" + std::to_string(a) +
                                     " x=" + std::to_string(x) + " z=" + std::to_string(zc);
                    break;
                }
            }
    if (!cert.violation.empty()) return cert;

    std::vector<bool> seen(zn, false);
    for (std::size_t z = 0; z < zn; ++z) {
        if (seen[z]) continue;
        std::vector<std::size_t> orbit;
        for (std::size_t a = 0; a < inputs; ++a) {
            std::size_t za = detail::act_on_code(z, act[a], pi1, ic.base_outputs, n);
            if (!seen[za]) {
                seen[za] = true;
                orbit.push_back(za);
            }
        }
        std::sort(orbit.begin(), orbit.end());
        cert.orbits.push_back(std::move(orbit));
    }
    cert.ok = true;
    return cert;
}

struct ActionCheckReport {
    bool ok = false;
    uint64_t checked = 0;
    std::string violation;
};

// Verifies the product-channel shift identity W^n(z | (a+x)G) = W^n(aG.z | xG)
// exhaustively at tiny n (sampled when the space is too large).
inline ActionCheckReport product_action_check(const DiscreteChannel& w, unsigned n,
                                              double tol = 1e-10, uint64_t sample_limit = 20000000,
                                              uint64_t seed = 1) {
    if (n != 1 && n != 2 && n != 4)
        throw std::invalid_argument("product_action_check: n must be 1, 2 or 4");
    std::vector<std::size_t> pi1 = detail::output_involution(w);
    std::size_t base = w.output_count();
    std::size_t zn = 1;
    for (unsigned t = 0; t < n; ++t) zn *= base;
    uint64_t space = (uint64_t{1} << (2 * n)) * zn;
    bool exhaustive = space <= sample_limit;
    ActionCheckReport rep;

    auto encode_bits = [&](std::size_t code) {
        std::vector<uint8_t> v(n);
        for (unsigned t = 0; t < n; ++t) v[t] = (code >> t) & 1;
        polar_transform_inplace(v);
        return v;
    };
    auto wn = [&](std::size_t zc, const std::vector<uint8_t>& x) {
        double p = 1.0;
        std::size_t rem = zc;
        for (unsigned t = n; t-- > 0;) {
            p *= w.prob(x[t], rem % base);
            rem /= base;
        }
        return p;
    };

    Rng rng = derive_rng(seed, 0x616374ULL);
    uint64_t iters = exhaustive ? space : sample_limit / 4;
    for (uint64_t it = 0; it < iters; ++it) {
        std::size_t ac, xc, zc;
        if (exhaustive) {
            ac = it % (std::size_t{1} << n);
            xc = (it >> n) % (std::size_t{1} << n);
            zc = static_cast<std::size_t>(it >> (2 * n));
        } else {
            ac = rng.next_u64() % (std::size_t{1} << n);
            xc = rng.next_u64() % (std::size_t{1} << n);
            zc = rng.next_u64() % zn;
        }
        std::vector<uint8_t> ag = encode_bits(ac);
        std::vector<uint8_t> xg = encode_bits(xc);
        std::vector<uint8_t> axg(n);
        for (unsigned t = 0; t < n; ++t) axg[t] = ag[t] ^ xg[t];
        double lhs = wn(zc, axg);
        double rhs = wn(detail::act_on_code(zc, ag, pi1, base, n), xg);
        ++rep.checked;
        if (std::abs(lhs - rhs) > tol) {
            rep.violation = "identity fails at a=" + std::to_string(ac) + " x=" +
                            std::to_string(xc) + " z=" + std::to_string(zc);
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline json leakage_to_json(const LeakageReport& rep) {
    json j;
    j["mode"] = mode_name(rep.mode);
    j["bound_bits"] = rep.bound_bits;
    j["bound_log2"] = finite_or_null(rep.bound_log2);
    if (rep.mode == WiretapMode::Weak) {
        j["components"] = {
            {"n_eps_n", {{"bits", rep.n_eps_term.bits}, {"log2", finite_or_null(rep.n_eps_term.log2)}}},
            {"h2_term", {{"bits", rep.h2_term.bits}, {"log2", finite_or_null(rep.h2_term.log2)}}},
            {"tail_term", {{"bits", rep.tail_term.bits}, {"log2", finite_or_null(rep.tail_term.log2)}}},
        };
    } else {
        j["components"] = {
            {"delta_log2", rep.delta_log2},
            {"poor_count", rep.poor_count},
        };
        j["vanishing_regime"] = rep.vanishing_regime;
    }
    if (rep.exact_bits) {
        j["exact_bits"] = *rep.exact_bits;
        if (rep.exact_stderr && *rep.exact_stderr > 0.0) j["exact_stderr"] = *rep.exact_stderr;
    }
    j["normalized"] = std::isfinite(rep.normalized) ? json(rep.normalized) : json();
    return j;
}

}  // namespace polarwt
