#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarwt/channel.hpp"
#include "polarwt/parallel.hpp"
#include "polarwt/sc.hpp"
#include "polarwt/transform.hpp"

namespace polarwt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kInvLn2 = 1.4426950408889634074;  // 1/ln 2

enum class StatsMethod { BecExact, DeBounds, MonteCarlo, BruteForce };

inline std::string stats_method_name(StatsMethod m) {
    switch (m) {
        case StatsMethod::BecExact: return "bec-exact";
        case StatsMethod::DeBounds: return "de-bounds";
        case StatsMethod::MonteCarlo: return "monte-carlo";
        case StatsMethod::BruteForce: return "brute-force";
    }
    return "?";
}

inline StatsMethod stats_method_from_name(const std::string& s) {
    if (s == "bec-exact") return StatsMethod::BecExact;
    if (s == "de-bounds") return StatsMethod::DeBounds;
    if (s == "monte-carlo") return StatsMethod::MonteCarlo;
    if (s == "brute-force") return StatsMethod::BruteForce;
    throw std::invalid_argument("unknown stats method \"" + s + "\"");
}

// Per-index certified intervals for the bit-channel Bhattacharyya parameter
// (log2 domain; thresholds at useful block lengths underflow linear doubles)
// and capacity (linear). For exact methods the intervals are points.
struct BitChannelRecord {
    double z_lo_log2 = -kInf;
    double z_hi_log2 = 0.0;
    double c_lo = 0.0;
    double c_hi = 1.0;
    // set when probability mass underflowed during evolution: the certified
    // value saturated below ~1e-300 and is reported as 0
    bool underflow = false;
};

struct BitChannelStats {
    std::size_t n = 0;
    StatsMethod method = StatsMethod::DeBounds;
    double base_capacity = 0.0;  // capacity of the underlying channel
    std::vector<BitChannelRecord> rec;

    void validate() const {
        if (rec.size() != n) throw std::logic_error("BitChannelStats: record count mismatch");
        for (const auto& r : rec) {
            if (!(r.z_lo_log2 <= r.z_hi_log2 + 1e-12) || !(r.c_lo <= r.c_hi + 1e-12))
                throw std::logic_error("BitChannelStats: inverted interval");
            if (r.z_hi_log2 > 1e-12 || r.c_lo < -1e-12 || r.c_hi > 1.0 + 1e-12)
                throw std::logic_error("BitChannelStats: value out of [0,1]");
        }
    }
};

struct QuantizationConfig {
    std::size_t mu = 128;    // max retained output pairs per evolution step
    unsigned threads = 1;    // 0 = hardware concurrency
};

// ---------------------------------------------------------------------------
// exact erasure-channel evolution, log2 domain
// ---------------------------------------------------------------------------

namespace detail {

// state of one erasure bit-channel: (log2 eps, log2(1-eps))
struct BecState {
    double le, l1me;
};

inline double log2_1p_exp2(double l) {  // log2(1 + 2^l) for l <= 0
    return std::log1p(std::exp2(l)) * kInvLn2;
}

inline BecState bec_minus(const BecState& s) {
    // eps' = 1 - (1-eps)^2 = eps (2 - eps)
    BecState r;
    r.l1me = 2.0 * s.l1me;
    r.le = s.le == -kInf ? -kInf : s.le + 1.0 + std::log1p(-0.5 * std::exp2(s.le)) * kInvLn2;
    return r;
}

inline BecState bec_plus(const BecState& s) {
    // eps' = eps^2
    BecState r;
    r.le = 2.0 * s.le;
    r.l1me = s.l1me == -kInf ? -kInf : s.l1me + log2_1p_exp2(s.le);
    return r;
}

inline void bec_rec(const BecState& s, unsigned depth, unsigned m, std::size_t base,
                    std::vector<BecState>& out) {
    if (depth == m) {
        out[base] = s;
        return;
    }
    std::size_t half = std::size_t{1} << (m - depth - 1);
    bec_rec(bec_minus(s), depth + 1, m, base, out);
    bec_rec(bec_plus(s), depth + 1, m, base + half, out);
}

}  // namespace detail

// Exact per-index erasure probabilities of the n bit-channels of a BEC.
// Z(W_i) = eps_i and C(W_i) = 1 - eps_i; both tails tracked in log2 domain.
inline BitChannelStats bec_evolve(double eps, unsigned m) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("bec_evolve: eps must be in [0,1]");
    std::size_t n = std::size_t{1} << m;
    detail::BecState init;
    init.le = eps <= 0.0 ? -kInf : std::log2(eps);
    init.l1me = eps >= 1.0 ? -kInf : std::log2(1.0 - eps);
    std::vector<detail::BecState> states(n);
    detail::bec_rec(init, 0, m, 0, states);
    BitChannelStats st;
    st.n = n;
    st.method = StatsMethod::BecExact;
    st.base_capacity = 1.0 - eps;
    st.rec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double c = states[i].l1me == -kInf ? 0.0 : std::exp2(states[i].l1me);
        st.rec[i].z_lo_log2 = st.rec[i].z_hi_log2 = states[i].le;
        st.rec[i].c_lo = st.rec[i].c_hi = c;
    }
    return st;
}

// ---------------------------------------------------------------------------
// brute-force bit-channel (small n oracle)
// ---------------------------------------------------------------------------

// Column layout of the returned table: column = y_code * 2^{i-1} + prefix_code
// with y_code = sum_t y_t * |Z|^{n-1-t} and prefix_code = sum_j v_j 2^{j-1}.
inline std::size_t brute_force_column(const std::vector<std::size_t>& y,
                                      const std::vector<uint8_t>& prefix, std::size_t base) {
    std::size_t yc = 0;
    for (std::size_t t = 0; t < y.size(); ++t) yc = yc * base + y[t];
    std::size_t pc = 0;
    for (std::size_t j = 0; j < prefix.size(); ++j) pc |= std::size_t{prefix[j]} << j;
    return yc * (std::size_t{1} << prefix.size()) + pc;
}

// Direct summation of the bit-channel transition table: the channel seen by
// input bit i given the full output block and all earlier input bits, with
// later inputs marginalized uniformly.
inline DiscreteChannel brute_force_bit_channel(const DiscreteChannel& w, unsigned n, unsigned i) {
    if (n != 1 && n != 2 && n != 4 && n != 8)
        throw std::invalid_argument("brute_force_bit_channel: n must be 1, 2, 4 or 8");
    if (i < 1 || i > n) throw std::invalid_argument("brute_force_bit_channel: index out of range");
    unsigned m = log2_exact(n);
    std::size_t base = w.output_count();
    double cols_d = std::pow(static_cast<double>(base), static_cast<double>(n)) *
                    std::exp2(static_cast<double>(i - 1));
    if (cols_d > 4.0e6) throw std::invalid_argument("brute_force_bit_channel: table too large");
    std::size_t ycount = 1;
    for (unsigned t = 0; t < n; ++t) ycount *= base;
    std::size_t pcount = std::size_t{1} << (i - 1);
    std::vector<double> row0(ycount * pcount, 0.0), row1(ycount * pcount, 0.0);

    double scale = std::exp2(-static_cast<double>(n - 1));
    std::vector<uint8_t> v(n), x(n);
    std::vector<std::size_t> y(n, 0);
    std::vector<double> pp(n + 1);  // prefix products over y positions
    for (std::size_t vc = 0; vc < (std::size_t{1} << n); ++vc) {
        for (unsigned t = 0; t < n; ++t) v[t] = static_cast<uint8_t>((vc >> t) & 1);
        x = v;
        polar_transform_inplace(x);
        std::size_t pc = 0;
        for (unsigned j = 0; j + 1 < i; ++j) pc |= std::size_t{v[j]} << j;
        std::vector<double>& row = v[i - 1] == 0 ? row0 : row1;

        // odometer over y (last position fastest) with running prefix products
        std::fill(y.begin(), y.end(), 0);
        pp[0] = scale;
        for (unsigned t = 0; t < n; ++t) pp[t + 1] = pp[t] * w.prob(x[t], 0);
        for (std::size_t yc = 0; yc < ycount; ++yc) {
            row[yc * pcount + pc] += pp[n];
            int t = static_cast<int>(n) - 1;
            while (t >= 0) {
                if (++y[static_cast<std::size_t>(t)] < base) break;
                y[static_cast<std::size_t>(t)] = 0;
                --t;
            }
            if (t < 0) break;  // wrapped: enumeration complete
            for (unsigned q = static_cast<unsigned>(t); q < n; ++q)
                pp[q + 1] = pp[q] * w.prob(x[q], y[q]);
        }
    }
    return DiscreteChannel(std::move(row0), std::move(row1), {}, 1e-10);
}

// exact Z and C of all bit-channels at tiny n (test oracle)
inline BitChannelStats brute_force_stats(const DiscreteChannel& w, unsigned n) {
    BitChannelStats st;
    st.n = n;
    st.method = StatsMethod::BruteForce;
    st.base_capacity = capacity(w);
    st.rec.resize(n);
    for (unsigned i = 1; i <= n; ++i) {
        DiscreteChannel bc = brute_force_bit_channel(w, n, i);
        double z = bhattacharyya(bc);
        double c = capacity(bc);
        st.rec[i - 1].z_lo_log2 = st.rec[i - 1].z_hi_log2 = z > 0.0 ? std::log2(z) : -kInf;
        st.rec[i - 1].c_lo = st.rec[i - 1].c_hi = c;
    }
    return st;
}

// ---------------------------------------------------------------------------
// degrading / upgrading quantized evolution
// ---------------------------------------------------------------------------

enum class QuantMode { Degrading, Upgrading };

namespace detail {

// Canonical symmetrized representation: each entry stands for the conjugate
// output pair {y, y~} with rows (a, b) and (b, a), a >= b. Balanced outputs
// are split into two half-mass entries so everything lives in pairs.
// key caches a/b for sorting; ties are settled in extended precision.
struct PairSym {
    double a, b;
    double key;
};

inline double ratio_key(double a, double b) { return b > 0.0 ? a / b : kInf; }

struct PairChannel {
    std::vector<PairSym> syms;  // descending likelihood ratio
    bool underflow = false;
};

// x log2(2x/s); the log1p form cancels catastrophically when x/s is tiny,
// so small ratios go through direct logs instead
inline double pair_cap_contrib(double x, double s) {
    if (x <= 0.0) return 0.0;
    double r = x / s;
    if (r > 0.375) return x * std::log1p((2.0 * x - s) / s) * kInvLn2;
    return x * (1.0 + std::log2(x) - std::log2(s));
}

// capacity contribution of one conjugate pair
inline double pair_cap(double a, double b) {
    double s = a + b;
    if (s <= 0.0) return 0.0;
    return pair_cap_contrib(a, s) + pair_cap_contrib(b, s);
}

inline double pair_channel_capacity(const PairChannel& ch) {
    double sum = 0.0, comp = 0.0;
    for (const auto& s : ch.syms) {
        double y = pair_cap(s.a, s.b) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline double pair_channel_z_log2(const PairChannel& ch) {
    // Z = sum over pairs of 2 sqrt(a b), accumulated in log2 domain
    double hi = -kInf;
    for (const auto& s : ch.syms)
        if (s.b > 0.0) hi = std::max(hi, 1.0 + 0.5 * (std::log2(s.a) + std::log2(s.b)));
    if (hi == -kInf) return -kInf;
    double acc = 0.0;
    for (const auto& s : ch.syms) {
        if (s.b <= 0.0) continue;
        acc += std::exp2(1.0 + 0.5 * (std::log2(s.a) + std::log2(s.b)) - hi);
    }
    double r = hi + std::log2(acc);
    return r > 0.0 ? 0.0 : r;
}

// Ratio comparisons: double keys settle almost everything; exact ties fall
// back to cross products in extended precision, where products of doubles
// cannot underflow.
inline bool lr_less(const PairSym& x, const PairSym& y) {
    if (x.key != y.key) return x.key > y.key;
    return static_cast<long double>(x.a) * y.b > static_cast<long double>(y.a) * x.b;
}

inline bool lr_equal(const PairSym& x, const PairSym& y) {
    return static_cast<long double>(x.a) * y.b == static_cast<long double>(y.a) * x.b;
}

// Ratios within a 2^-44 relative window collapse in one pass. The merge used
// is certified in either mode regardless of the gap; the window only bounds
// the tightness loss, which is negligible at this width.
inline bool lr_near(const PairSym& x, const PairSym& y) {
    if (x.key == y.key) return true;  // covers both infinite
    return std::abs(x.key - y.key) <= x.key * 0x1p-44;
}

// plain merge: valid degrading move always, lossless when ratios are equal
inline PairSym merge_sum(const PairSym& x, const PairSym& y) {
    double a = x.a + y.a, b = x.b + y.b;
    return {a, b, ratio_key(a, b)};
}

// Promote the lower-ratio symbol into the higher-ratio one, preserving the
// target ratio; always a valid upgrading move. Written without forming the
// ratio itself, which overflows for subnormal b.
inline PairSym merge_promote(const PairSym& hi, const PairSym& lo) {
    double t = lo.a + lo.b;
    if (hi.b <= 0.0) return {hi.a + t, 0.0, kInf};
    double s = hi.a + hi.b;
    double a = hi.a + t * (hi.a / s);
    double b = hi.b + t * (hi.b / s);
    return {a, b, ratio_key(a, b)};
}

struct MergeScratch {
    std::vector<PairSym> entries;
    std::vector<double> caps;  // cached pair_cap per alive node
    std::vector<int> nxt, prv;
    std::vector<uint32_t> stamp;
};

// sort, collapse equal ratios, then greedily merge adjacent pairs with the
// smallest capacity perturbation until at most mu pairs remain
inline void reduce(std::vector<PairSym>& entries, std::size_t mu, QuantMode mode,
                   MergeScratch& sc) {
    for (auto& e : entries) {
        if (e.a < e.b) std::swap(e.a, e.b);
        e.key = ratio_key(e.a, e.b);
    }
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [](const PairSym& e) { return e.a + e.b <= 0.0; }),
                  entries.end());
    std::sort(entries.begin(), entries.end(), lr_less);
    // collapse runs with (near-)identical ratio; the run head has the highest
    // ratio, so promotion into it is always admissible
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries.size();) {
        PairSym acc = entries[i];
        std::size_t j = i + 1;
        while (j < entries.size() && lr_near(entries[i], entries[j])) {
            acc = mode == QuantMode::Degrading ? merge_sum(acc, entries[j])
                                               : merge_promote(acc, entries[j]);
            ++j;
        }
        entries[out++] = acc;
        i = j;
    }
    entries.resize(out);
    if (entries.size() <= mu) return;

    std::size_t k = entries.size();
    sc.nxt.assign(k + 1, 0);
    sc.prv.assign(k + 1, 0);
    sc.stamp.assign(k, 0);
    sc.caps.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        sc.nxt[i] = static_cast<int>(i + 1 == k ? -1 : i + 1);
        sc.prv[i] = static_cast<int>(i == 0 ? -1 : i - 1);
        sc.caps[i] = pair_cap(entries[i].a, entries[i].b);
    }
    struct Cand {
        double cost;
        int left, right;
        uint32_t sl, sr;
    };
    auto cmp = [](const Cand& x, const Cand& y) { return x.cost > y.cost; };
    std::priority_queue<Cand, std::vector<Cand>, decltype(cmp)> heap(cmp);
    auto push_cand = [&](int l) {
        int r = sc.nxt[l];
        if (l < 0 || r < 0) return;
        PairSym merged = mode == QuantMode::Degrading ? merge_sum(entries[l], entries[r])
                                                      : merge_promote(entries[l], entries[r]);
        double delta = pair_cap(merged.a, merged.b) - sc.caps[l] - sc.caps[r];
        if (mode == QuantMode::Degrading) delta = -delta;
        heap.push({std::max(0.0, delta), l, r, sc.stamp[l], sc.stamp[r]});
    };
    for (std::size_t i = 0; i + 1 < k; ++i) push_cand(static_cast<int>(i));
    std::size_t alive = k;
    while (alive > mu && !heap.empty()) {
        Cand c = heap.top();
        heap.pop();
        if (sc.stamp[c.left] != c.sl || sc.stamp[c.right] != c.sr) continue;
        if (sc.nxt[c.left] != c.right) continue;
        entries[c.left] = mode == QuantMode::Degrading
                              ? merge_sum(entries[c.left], entries[c.right])
                              : merge_promote(entries[c.left], entries[c.right]);
        sc.caps[c.left] = pair_cap(entries[c.left].a, entries[c.left].b);
        ++sc.stamp[c.left];
        ++sc.stamp[c.right];
        int r2 = sc.nxt[c.right];
        sc.nxt[c.left] = r2;
        if (r2 >= 0) sc.prv[r2] = c.left;
        --alive;
        if (sc.prv[c.left] >= 0) push_cand(sc.prv[c.left]);
        push_cand(c.left);
    }
    std::vector<PairSym> kept;
    kept.reserve(alive);
    for (int i = 0; i >= 0; i = sc.nxt[i]) kept.push_back(entries[i]);
    entries.swap(kept);
}

inline PairChannel combine_minus(const PairChannel& ch, std::size_t mu, QuantMode mode,
                                 MergeScratch& sc) {
    const auto& p = ch.syms;
    std::size_t n = p.size();
    PairChannel out;
    out.underflow = ch.underflow;
    out.syms.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.syms.push_back({p[i].a * p[i].a + p[i].b * p[i].b, 2.0 * p[i].a * p[i].b, 0.0});
        for (std::size_t j = i + 1; j < n; ++j) {
            double a = 2.0 * (p[i].a * p[j].a + p[i].b * p[j].b);
            double b = 2.0 * (p[i].a * p[j].b + p[j].a * p[i].b);
            out.syms.push_back({a, b, 0.0});
        }
    }
    reduce(out.syms, mu, mode, sc);
    return out;
}

inline PairChannel combine_plus(const PairChannel& ch, std::size_t mu, QuantMode mode,
                                MergeScratch& sc) {
    const auto& p = ch.syms;
    std::size_t n = p.size();
    PairChannel out;
    out.underflow = ch.underflow;
    out.syms.reserve(2 * n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double a1 = p[i].a * p[j].a, b1 = p[i].b * p[j].b;
            if (b1 == 0.0 && p[i].b > 0.0 && p[j].b > 0.0) out.underflow = true;
            out.syms.push_back({a1, b1, 0.0});
            double a2 = p[i].a * p[j].b, b2 = p[i].b * p[j].a;
            if ((a2 == 0.0 && p[i].a > 0.0 && p[j].b > 0.0) ||
                (b2 == 0.0 && p[i].b > 0.0 && p[j].a > 0.0))
                out.underflow = true;
            out.syms.push_back({a2, b2, 0.0});
        }
    reduce(out.syms, mu, mode, sc);
    return out;
}

inline PairChannel to_pairs(const DiscreteChannel& w) {
    SymmetryWitness wit = is_symmetric(w);
    if (!wit.symmetric)
        throw std::invalid_argument("quantized evolution requires a symmetric channel");
    PairChannel ch;
    std::vector<bool> seen(w.output_count(), false);
    for (std::size_t z = 0; z < w.output_count(); ++z) {
        if (seen[z]) continue;
        std::size_t zp = wit.pairing[z];
        if (zp == z) {
            double c = 0.5 * (w.prob(0, z) + w.prob(1, z));
            ch.syms.push_back({0.5 * c, 0.5 * c, 0.0});  // split balanced symbol in half
        } else {
            double a = w.prob(0, z), b = w.prob(1, z);
            if (a < b) std::swap(a, b);
            ch.syms.push_back({a, b, 0.0});
        }
        seen[z] = true;
        seen[zp] = true;
    }
    MergeScratch sc;
    reduce(ch.syms, SIZE_MAX, QuantMode::Degrading, sc);  // canonicalize only
    return ch;
}

struct EvolveLeaf {
    double z_log2, cap;
    bool underflow;
};

inline void evolve_rec(const PairChannel& ch, unsigned depth, unsigned m, std::size_t base,
                       std::size_t mu, QuantMode mode, MergeScratch& sc,
                       std::vector<EvolveLeaf>& out) {
    if (depth == m) {
        out[base] = {pair_channel_z_log2(ch), pair_channel_capacity(ch), ch.underflow};
        return;
    }
    std::size_t half = std::size_t{1} << (m - depth - 1);
    evolve_rec(combine_minus(ch, mu, mode, sc), depth + 1, m, base, mu, mode, sc, out);
    evolve_rec(combine_plus(ch, mu, mode, sc), depth + 1, m, base + half, mu, mode, sc, out);
}

inline std::vector<EvolveLeaf> evolve_quantized(const PairChannel& start, unsigned m,
                                                std::size_t mu, QuantMode mode,
                                                unsigned threads) {
    std::size_t n = std::size_t{1} << m;
    std::vector<EvolveLeaf> out(n);
    threads = resolve_threads(threads);
    unsigned d = 0;
    while ((std::size_t{1} << d) < 2 * threads && d + 1 < m) ++d;
    if (threads <= 1 || m < 2) d = 0;
    if (d == 0) {
        MergeScratch sc;
        evolve_rec(start, 0, m, 0, mu, mode, sc, out);
        return out;
    }
    // materialize the 2^d prefix channels, then run subtrees in parallel
    struct Task {
        PairChannel ch;
        std::size_t base;
    };
    std::vector<Task> tasks;
    MergeScratch sc0;
    std::vector<std::pair<PairChannel, std::size_t>> frontier{{start, 0}};
    for (unsigned lvl = 0; lvl < d; ++lvl) {
        std::vector<std::pair<PairChannel, std::size_t>> next;
        std::size_t half = std::size_t{1} << (m - lvl - 1);
        for (auto& [ch, base] : frontier) {
            next.emplace_back(combine_minus(ch, mu, mode, sc0), base);
            next.emplace_back(combine_plus(ch, mu, mode, sc0), base + half);
        }
        frontier.swap(next);
    }
    for (auto& [ch, base] : frontier) tasks.push_back({std::move(ch), base});
    parallel_for(0, tasks.size(), threads, [&](std::size_t t) {
        MergeScratch sc;
        evolve_rec(tasks[t].ch, d, m, tasks[t].base, mu, mode, sc, out);
    });
    return out;
}

}  // namespace detail

// Certified per-index intervals: the degrading pass yields z_hi / c_lo, the
// upgrading pass z_lo / c_hi; the true bit-channel lies between them by the
// degradation ordering. Exact for the BEC (erasure alphabets never merge
// lossily).
inline BitChannelStats de_bounds(const DiscreteChannel& w, unsigned m,
                                 const QuantizationConfig& q = {}) {
    if (q.mu < 2) throw std::invalid_argument("de_bounds: mu must be >= 2");
    detail::PairChannel start = detail::to_pairs(w);
    auto deg = detail::evolve_quantized(start, m, q.mu, QuantMode::Degrading, q.threads);
    auto upg = detail::evolve_quantized(start, m, q.mu, QuantMode::Upgrading, q.threads);
    std::size_t n = std::size_t{1} << m;
    BitChannelStats st;
    st.n = n;
    st.method = StatsMethod::DeBounds;
    st.base_capacity = capacity(w);
    st.rec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BitChannelRecord& r = st.rec[i];
        r.z_hi_log2 = std::max(deg[i].z_log2, upg[i].z_log2);
        r.z_lo_log2 = std::min(deg[i].z_log2, upg[i].z_log2);
        r.c_lo = std::min(deg[i].cap, upg[i].cap);
        r.c_hi = std::max(deg[i].cap, upg[i].cap);
        r.underflow = deg[i].underflow || upg[i].underflow;
    }
    return st;
}

// Single-pass variant: only the chosen side of the interval is informative
// (z_hi/c_lo from the degrading pass, z_lo/c_hi from the upgrading pass); the
// other side is the trivial bound. Halves the cost when only one certified
// set membership is needed.
inline BitChannelStats de_bounds_one_sided(const DiscreteChannel& w, unsigned m, QuantMode mode,
                                           const QuantizationConfig& q = {}) {
    if (q.mu < 2) throw std::invalid_argument("de_bounds_one_sided: mu must be >= 2");
    detail::PairChannel start = detail::to_pairs(w);
    auto leaves = detail::evolve_quantized(start, m, q.mu, mode, q.threads);
    std::size_t n = std::size_t{1} << m;
    BitChannelStats st;
    st.n = n;
    st.method = StatsMethod::DeBounds;
    st.base_capacity = capacity(w);
    st.rec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BitChannelRecord& r = st.rec[i];
        if (mode == QuantMode::Degrading) {
            r.z_hi_log2 = leaves[i].z_log2;
            r.c_lo = leaves[i].cap;
        } else {
            r.z_lo_log2 = leaves[i].z_log2;
            r.c_hi = leaves[i].cap;
        }
        r.underflow = leaves[i].underflow;
    }
    return st;
}

// ---------------------------------------------------------------------------
// Monte-Carlo Bhattacharyya estimates (diagnostic; never used for certified
// set membership)
// ---------------------------------------------------------------------------

inline BitChannelStats monte_carlo_z(const DiscreteChannel& w, unsigned m, std::size_t trials,
                                     uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("monte_carlo_z: trials must be >= 1");
    std::size_t n = std::size_t{1} << m;
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    std::vector<double> llrs(n);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng vr = derive_rng(seed, t, 0);
        Rng cr = derive_rng(seed, t, 1);
        std::vector<uint8_t> v(n);
        for (auto& b : v) b = vr.next_bit();
        std::vector<uint8_t> x = v;
        polar_transform_inplace(x);
        for (std::size_t j = 0; j < n; ++j) llrs[j] = w.llr(w.sample(x[j], cr));
        ScEngine eng(llrs);
        for (std::size_t i = 0; i < n; ++i) {
            double l = eng.next_llr();
            // genie-aided per-bit error weight, ties counted half
            double weight;
            if (l == 0.0) weight = 0.5;
            else weight = ((l > 0.0) == (v[i] == 0)) ? 0.0 : 1.0;
            sum[i] += weight;
            sumsq[i] += weight * weight;
            eng.feed(v[i]);
        }
    }
    BitChannelStats st;
    st.n = n;
    st.method = StatsMethod::MonteCarlo;
    st.base_capacity = capacity(w);
    st.rec.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double mean = sum[i] / static_cast<double>(trials);
        double var = std::max(0.0, sumsq[i] / static_cast<double>(trials) - mean * mean);
        double se = std::sqrt(var / static_cast<double>(trials));
        double est = 2.0 * mean;  // error-rate proxy; exact in the erasure case
        double lo = std::max(0.0, est - 3.0 * 2.0 * se);
        double hi = std::min(1.0, est + 3.0 * 2.0 * se);
        st.rec[i].z_lo_log2 = lo > 0.0 ? std::log2(lo) : -kInf;
        st.rec[i].z_hi_log2 = hi > 0.0 ? std::log2(hi) : -kInf;
        st.rec[i].c_lo = 0.0;
        st.rec[i].c_hi = 1.0;
    }
    return st;
}

// ---------------------------------------------------------------------------
// polarization index sets and finite-n analysis quantities
// ---------------------------------------------------------------------------

inline double good_threshold_log2(std::size_t n, double beta) {
    // log2 of 2^{-n^beta} / n
    return -std::pow(static_cast<double>(n), beta) - std::log2(static_cast<double>(n));
}

// certified membership: strict comparison on the Bhattacharyya upper bound
inline std::vector<uint32_t> good_set(const BitChannelStats& st, double beta) {
    if (beta <= 0.0 || beta >= 0.5) throw std::invalid_argument("good_set: beta must be in (0, 1/2)");
    double thr = good_threshold_log2(st.n, beta);
    std::vector<uint32_t> out;
    for (std::size_t i = 0; i < st.n; ++i)
        if (st.rec[i].z_hi_log2 < thr) out.push_back(static_cast<uint32_t>(i));
    return out;
}

inline std::vector<uint32_t> bad_set(const BitChannelStats& st, double beta) {
    if (beta <= 0.0 || beta >= 0.5) throw std::invalid_argument("bad_set: beta must be in (0, 1/2)");
    double thr = good_threshold_log2(st.n, beta);
    std::vector<uint32_t> out;
    for (std::size_t i = 0; i < st.n; ++i)
        if (!(st.rec[i].z_hi_log2 < thr)) out.push_back(static_cast<uint32_t>(i));
    return out;
}

// indices whose certified capacity upper bound is at most delta = 2^{delta_log2}
inline std::vector<uint32_t> poor_set_log2(const BitChannelStats& st, double delta_log2) {
    if (!(delta_log2 < 0.0))
        throw std::invalid_argument("poor_set: delta must be in (0, 1)");
    double delta = std::exp2(delta_log2);  // 0 on underflow: only exact-0 bounds qualify
    std::vector<uint32_t> out;
    for (std::size_t i = 0; i < st.n; ++i)
        if (st.rec[i].c_hi <= delta) out.push_back(static_cast<uint32_t>(i));
    return out;
}

inline std::vector<uint32_t> poor_set(const BitChannelStats& st, double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("poor_set: delta must be in (0, 1)");
    return poor_set_log2(st, std::log2(delta));
}

// indices with certified Z lower bound at least 1 - gamma
inline std::vector<uint32_t> poor_set_bhattacharyya(const BitChannelStats& st, double gamma) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("poor_set_bhattacharyya: gamma must be in (0, 1)");
    double thr = std::log1p(-gamma) * kInvLn2;  // log2(1 - gamma)
    std::vector<uint32_t> out;
    for (std::size_t i = 0; i < st.n; ++i)
        if (st.rec[i].z_lo_log2 >= thr) out.push_back(static_cast<uint32_t>(i));
    return out;
}

// C(W) - |good|/n: the shortfall of the certified good fraction
inline double capacity_gap(const BitChannelStats& st, double beta) {
    return st.base_capacity -
           static_cast<double>(good_set(st, beta).size()) / static_cast<double>(st.n);
}

// smallest a with sum_{i=a}^m C(m,i) <= xi 2^m; exact integer arithmetic
inline unsigned binomial_split_index(unsigned m, double xi) {
    if (m < 1 || m > 63) throw std::invalid_argument("binomial_split_index: m must be in [1, 63]");
    if (xi <= 0.0 || xi >= 1.0) throw std::invalid_argument("binomial_split_index: xi in (0,1)");
    long double target = std::ldexp(static_cast<long double>(xi), static_cast<int>(m));
    unsigned __int128 suffix = 0;
    unsigned a = m + 1;
    unsigned __int128 binom = 1;  // C(m, m)
    for (unsigned i = m; i >= 1; --i) {
        unsigned __int128 s2 = suffix + binom;
        if (static_cast<long double>(s2) <= target) {
            suffix = s2;
            a = i;
        } else {
            break;
        }
        // C(m, i-1) = C(m, i) * i / (m - i + 1)
        binom = binom * i / (m - i + 1);
    }
    return a;
}

inline double alpha_exponent(unsigned m, double xi) {
    return static_cast<double>(binomial_split_index(m, xi)) / static_cast<double>(m);
}

inline double default_gamma_f(unsigned m) { return std::pow(static_cast<double>(m), -0.75); }

// log2 of the threshold 2^{-n^{alpha(m,xi)(1+f)}}
inline double gamma_n_log2(unsigned m, double xi, double f) {
    if (f <= 0.0 || f >= 1.0) throw std::invalid_argument("gamma_n_log2: f(m) must be in (0,1)");
    double expo = static_cast<double>(m) * alpha_exponent(m, xi) * (1.0 + f);
    return -std::exp2(expo);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double null_or_double(const json& j, double if_null) {
    return j.is_null() ? if_null : j.get<double>();
}

inline json stats_to_json(const BitChannelStats& st, const json& channel = json()) {
    json j;
    j["n"] = st.n;
    j["method"] = stats_method_name(st.method);
    j["base_capacity"] = st.base_capacity;
    if (!channel.is_null() && !channel.empty()) j["channel"] = channel;
    json recs = json::array();
    for (std::size_t i = 0; i < st.n; ++i) {
        const auto& r = st.rec[i];
        json e;
        e["i"] = i + 1;  // reports are 1-based
        e["z_lo_log2"] = finite_or_null(r.z_lo_log2);
        e["z_hi_log2"] = finite_or_null(r.z_hi_log2);
        e["c_lo"] = r.c_lo;
        e["c_hi"] = r.c_hi;
        if (r.underflow) e["underflow"] = true;
        recs.push_back(std::move(e));
    }
    j["records"] = std::move(recs);
    return j;
}

inline BitChannelStats stats_from_json(const json& j) {
    BitChannelStats st;
    st.n = j.at("n").get<std::size_t>();
    st.method = stats_method_from_name(j.at("method").get<std::string>());
    st.base_capacity = j.at("base_capacity").get<double>();
    st.rec.resize(st.n);
    for (const auto& e : j.at("records")) {
        std::size_t i = e.at("i").get<std::size_t>();
        if (i < 1 || i > st.n) throw std::invalid_argument("stats: record index out of range");
        BitChannelRecord& r = st.rec[i - 1];
        r.z_lo_log2 = null_or_double(e.at("z_lo_log2"), -kInf);
        r.z_hi_log2 = null_or_double(e.at("z_hi_log2"), -kInf);
        r.c_lo = e.at("c_lo").get<double>();
        r.c_hi = e.at("c_hi").get<double>();
        r.underflow = e.value("underflow", false);
    }
    st.validate();
    return st;
}

inline std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline std::string stats_hash(const BitChannelStats& st) { return fnv1a_hex(stats_to_json(st).dump()); }

}  // namespace polarwt
