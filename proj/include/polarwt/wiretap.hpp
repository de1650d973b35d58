#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarwt/bitvec.hpp"
#include "polarwt/channel.hpp"
#include "polarwt/construction.hpp"
#include "polarwt/sc.hpp"

namespace polarwt {

enum class WiretapMode { Weak, Strong };

inline std::string mode_name(WiretapMode m) { return m == WiretapMode::Weak ? "weak" : "strong"; }
inline WiretapMode mode_from_name(const std::string& s) {
    if (s == "weak") return WiretapMode::Weak;
    if (s == "strong") return WiretapMode::Strong;
    throw std::invalid_argument("unknown mode \"" + s + "\"");
}

// Raised when a requested construction is impossible; carries the offending
// indices (0-based) for diagnostics.
class construction_error : public std::runtime_error {
public:
    construction_error(const std::string& what, std::vector<uint32_t> indices)
        : std::runtime_error(what), offending(std::move(indices)) {}
    std::vector<uint32_t> offending;
};

// Index sets of a wiretap code. R carries the uniform randomizer, A the
// message, B is frozen to zero. In strong mode X/Y split R by Bob's good set.
// All sets are sorted and 0-based internally; serialized 1-based.
struct WiretapCode {
    std::size_t n = 0;
    WiretapMode mode = WiretapMode::Weak;
    double beta = 0.0;
    double delta_log2 = 0.0;       // strong mode only
    bool delta_window_ok = true;   // strong mode: delta inside the admissible window
    std::vector<uint32_t> set_r, set_a, set_b, set_x, set_y;
    std::string stats_bob_hash, stats_eve_hash;

    std::size_t k() const { return set_a.size(); }
    std::size_t r() const { return set_r.size(); }
    double rate() const { return static_cast<double>(k()) / static_cast<double>(n); }

    void validate() const {
        std::vector<uint8_t> seen(n, 0);
        auto mark = [&](const std::vector<uint32_t>& s) {
            for (uint32_t i : s) {
                if (i >= n || seen[i]) throw std::logic_error("WiretapCode: sets must partition [n]");
                seen[i] = 1;
            }
        };
        mark(set_r);
        mark(set_a);
        mark(set_b);
        for (uint8_t s : seen)
            if (!s) throw std::logic_error("WiretapCode: sets must partition [n]");
        if (mode == WiretapMode::Strong) {
            std::vector<uint32_t> xy;
            xy.insert(xy.end(), set_x.begin(), set_x.end());
            xy.insert(xy.end(), set_y.begin(), set_y.end());
            std::sort(xy.begin(), xy.end());
            if (xy != set_r) throw std::logic_error("WiretapCode: X and Y must partition R");
        }
    }
};

namespace detail {

inline std::vector<uint32_t> set_difference_sorted(const std::vector<uint32_t>& a,
                                                   const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<uint32_t> set_intersection_sorted(const std::vector<uint32_t>& a,
                                                     const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<uint32_t> full_range(std::size_t n) {
    std::vector<uint32_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<uint32_t>(i);
    return out;
}

}  // namespace detail

// Weak scheme: randomize everything Eve decodes well, send the message where
// only Bob decodes well, freeze the rest. Requires the certified good sets to
// nest; refuses construction otherwise.
inline WiretapCode build_weak(const BitChannelStats& bob, const BitChannelStats& eve,
                              double beta) {
    if (bob.n != eve.n) throw std::invalid_argument("build_weak: stats block lengths differ");
    std::vector<uint32_t> good_bob = good_set(bob, beta);
    std::vector<uint32_t> good_eve = good_set(eve, beta);
    std::vector<uint32_t> leak = detail::set_difference_sorted(good_eve, good_bob);
    if (!leak.empty())
        throw construction_error(
            "build_weak: tap good set is not contained in the main good set (" +
                std::to_string(leak.size()) + " offending indices)",
            leak);
    WiretapCode code;
    code.n = bob.n;
    code.mode = WiretapMode::Weak;
    code.beta = beta;
    code.delta_log2 = 0.0;
    code.set_r = good_eve;
    code.set_a = detail::set_difference_sorted(good_bob, good_eve);
    code.set_b = detail::set_difference_sorted(detail::full_range(bob.n), good_bob);
    code.stats_bob_hash = stats_hash(bob);
    code.stats_eve_hash = stats_hash(eve);
    code.validate();
    return code;
}

// Strong scheme: randomize everything that is not certifiably delta-poor for
// Eve. delta outside [c1 2^{-n^beta}, 1 - c2] is flagged but not refused.
inline WiretapCode build_strong(const BitChannelStats& bob, const BitChannelStats& eve,
                                double beta, double delta_log2, double c1 = 1.0,
                                double c2 = 0.5) {
    if (bob.n != eve.n) throw std::invalid_argument("build_strong: stats block lengths differ");
    std::size_t n = bob.n;
    std::vector<uint32_t> good_bob = good_set(bob, beta);
    std::vector<uint32_t> poor_eve = poor_set_log2(eve, delta_log2);
    WiretapCode code;
    code.n = n;
    code.mode = WiretapMode::Strong;
    code.beta = beta;
    code.delta_log2 = delta_log2;
    double lo_log2 = std::log2(c1) - std::pow(static_cast<double>(n), beta);
    code.delta_window_ok =
        delta_log2 >= lo_log2 && std::exp2(delta_log2) <= 1.0 - c2;
    code.set_r = detail::set_difference_sorted(detail::full_range(n), poor_eve);
    code.set_a = detail::set_intersection_sorted(poor_eve, good_bob);
    code.set_b = detail::set_difference_sorted(poor_eve, good_bob);
    code.set_x = detail::set_difference_sorted(code.set_r, good_bob);
    code.set_y = detail::set_intersection_sorted(code.set_r, good_bob);
    code.stats_bob_hash = stats_hash(bob);
    code.stats_eve_hash = stats_hash(eve);
    code.validate();
    return code;
}

// v_R = e, v_A = u, v_B = 0 (or a fixed fill), then the polar transform.
inline BitVector wiretap_encode(const WiretapCode& code, const BitVector& u, const BitVector& e,
                                const BitVector* frozen_fill = nullptr) {
    if (u.size() != code.k()) throw std::invalid_argument("encode: message length mismatch");
    if (e.size() != code.r()) throw std::invalid_argument("encode: randomizer length mismatch");
    if (frozen_fill && frozen_fill->size() != code.set_b.size())
        throw std::invalid_argument("encode: frozen fill length mismatch");
    BitVector v(code.n);
    for (std::size_t j = 0; j < code.set_r.size(); ++j) v.set(code.set_r[j], e[j]);
    for (std::size_t j = 0; j < code.set_a.size(); ++j) v.set(code.set_a[j], u[j]);
    if (frozen_fill)
        for (std::size_t j = 0; j < code.set_b.size(); ++j) v.set(code.set_b[j], (*frozen_fill)[j]);
    return polar_encode(v);
}

// convenience wrapper: draw the randomizer from a seeded stream
inline BitVector draw_randomizer(const WiretapCode& code, uint64_t seed) {
    Rng rng = derive_rng(seed, 0x72616e64ULL);
    return BitVector::random(code.r(), rng);
}

struct DecodeConfig {
    enum class TieBreak { Random, Zero };
    TieBreak tie_break = TieBreak::Random;
    uint64_t seed = 0;          // tie-break stream
    std::size_t branch_limit = 1;  // max simultaneous paths in the branching decoder
};

namespace detail {

inline std::vector<double> channel_llrs(const std::vector<std::size_t>& y,
                                        const DiscreteChannel& w, std::size_t n) {
    if (y.size() != n) throw std::invalid_argument("decode: output length mismatch");
    std::vector<double> llrs(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (y[t] >= w.output_count()) throw std::invalid_argument("decode: output symbol out of range");
        llrs[t] = w.llr(y[t]);
    }
    return llrs;
}

inline uint8_t decide(double llr, DecodeConfig::TieBreak tie, Rng& rng) {
    if (llr > 0.0) return 0;
    if (llr < 0.0) return 1;
    return tie == DecodeConfig::TieBreak::Zero ? 0 : rng.next_bit();
}

enum class Role : uint8_t { Decide, Frozen, Pinned };

}  // namespace detail

// Successive cancellation over the main channel: B frozen, decisions on A and
// R, returns the message estimate v_A.
inline BitVector sc_decode(const WiretapCode& code, const std::vector<std::size_t>& y,
                           const DiscreteChannel& wmain, const DecodeConfig& cfg = {},
                           const BitVector* frozen_fill = nullptr) {
    std::vector<uint8_t> frozen(code.n, 0);
    std::vector<uint8_t> is_frozen(code.n, 0);
    for (std::size_t j = 0; j < code.set_b.size(); ++j) {
        is_frozen[code.set_b[j]] = 1;
        frozen[code.set_b[j]] = frozen_fill ? (*frozen_fill)[j] : 0;
    }
    ScEngine eng(detail::channel_llrs(y, wmain, code.n));
    Rng tie_rng = derive_rng(cfg.seed, 0x74696542ULL);
    std::vector<uint8_t> vhat(code.n);
    for (std::size_t i = 0; i < code.n; ++i) {
        double l = eng.next_llr();
        uint8_t b = is_frozen[i] ? frozen[i] : detail::decide(l, cfg.tie_break, tie_rng);
        vhat[i] = b;
        eng.feed(b);
    }
    BitVector u(code.k());
    for (std::size_t j = 0; j < code.set_a.size(); ++j) u.set(j, vhat[code.set_a[j]]);
    return u;
}

// Genie-aided variant: every index outside R is pinned (A to the supplied
// true values, B to zero); decisions happen only on R. Returns v_R.
inline BitVector sc_decode_genie(const WiretapCode& code, const std::vector<std::size_t>& y,
                                 const DiscreteChannel& w, const BitVector& known_a,
                                 const DecodeConfig& cfg = {}) {
    if (known_a.size() != code.k())
        throw std::invalid_argument("sc_decode_genie: genie information incomplete");
    std::vector<uint8_t> pinned(code.n, 0), is_pinned(code.n, 0);
    for (uint32_t i : code.set_b) is_pinned[i] = 1;
    for (std::size_t j = 0; j < code.set_a.size(); ++j) {
        is_pinned[code.set_a[j]] = 1;
        pinned[code.set_a[j]] = known_a[j];
    }
    ScEngine eng(detail::channel_llrs(y, w, code.n));
    Rng tie_rng = derive_rng(cfg.seed, 0x74696542ULL);
    std::vector<uint8_t> vhat(code.n);
    for (std::size_t i = 0; i < code.n; ++i) {
        double l = eng.next_llr();
        uint8_t b = is_pinned[i] ? pinned[i] : detail::decide(l, cfg.tie_break, tie_rng);
        vhat[i] = b;
        eng.feed(b);
    }
    BitVector e(code.r());
    for (std::size_t j = 0; j < code.set_r.size(); ++j) e.set(j, vhat[code.set_r[j]]);
    return e;
}

// Branching decoder for strong-mode codes: follows both alternatives at every
// index of X, keeps at most branch_limit paths ranked by accumulated decision
// log-likelihood, and returns the best path's message. Identical to sc_decode
// when X is empty.
inline BitVector sc_decode_branching(const WiretapCode& code, const std::vector<std::size_t>& y,
                                     const DiscreteChannel& wmain, const DecodeConfig& cfg) {
    if (cfg.branch_limit < 1) throw std::invalid_argument("branch_limit must be >= 1");
    std::vector<uint8_t> is_frozen(code.n, 0), is_branch(code.n, 0);
    for (uint32_t i : code.set_b) is_frozen[i] = 1;
    for (uint32_t i : code.set_x) is_branch[i] = 1;

    struct Path {
        ScEngine eng;
        Rng tie_rng;
        double score;
        std::vector<uint8_t> vhat;
    };
    std::vector<Path> paths;
    paths.push_back({ScEngine(detail::channel_llrs(y, wmain, code.n)),
                     derive_rng(cfg.seed, 0x74696542ULL), 0.0, std::vector<uint8_t>()});
    paths[0].vhat.reserve(code.n);

    for (std::size_t i = 0; i < code.n; ++i) {
        std::vector<Path> next;
        next.reserve(2 * paths.size());
        for (Path& p : paths) {
            double l = p.eng.next_llr();
            if (is_branch[i] && cfg.branch_limit > 1) {
                Path q = p;  // fork
                p.score += llr_logprob(l, 0);
                p.vhat.push_back(0);
                p.eng.feed(0);
                q.score += llr_logprob(l, 1);
                q.vhat.push_back(1);
                q.eng.feed(1);
                next.push_back(std::move(p));
                next.push_back(std::move(q));
            } else {
                uint8_t b = is_frozen[i] ? 0 : detail::decide(l, cfg.tie_break, p.tie_rng);
                p.score += llr_logprob(l, b);
                p.vhat.push_back(b);
                p.eng.feed(b);
                next.push_back(std::move(p));
            }
        }
        if (next.size() > cfg.branch_limit) {
            std::stable_sort(next.begin(), next.end(),
                             [](const Path& a, const Path& b) { return a.score > b.score; });
            next.erase(next.begin() + static_cast<long>(cfg.branch_limit), next.end());
        }
        paths = std::move(next);
    }
    const Path* best = &paths[0];
    for (const Path& p : paths)
        if (p.score > best->score) best = &p;
    BitVector u(code.k());
    for (std::size_t j = 0; j < code.set_a.size(); ++j) u.set(j, best->vhat[code.set_a[j]]);
    return u;
}

// ---------------------------------------------------------------------------
// serialization (1-based index arrays)
// ---------------------------------------------------------------------------

namespace detail {

inline json indices_to_json(const std::vector<uint32_t>& v) {
    json a = json::array();
    for (uint32_t i : v) a.push_back(i + 1);
    return a;
}

inline std::vector<uint32_t> indices_from_json(const json& a, std::size_t n) {
    std::vector<uint32_t> v;
    for (const auto& e : a) {
        std::size_t i = e.get<std::size_t>();
        if (i < 1 || i > n) throw std::invalid_argument("code: index out of range");
        v.push_back(static_cast<uint32_t>(i - 1));
    }
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

inline json code_to_json(const WiretapCode& code) {
    json j;
    j["n"] = code.n;
    j["mode"] = mode_name(code.mode);
    j["beta"] = code.beta;
    if (code.mode == WiretapMode::Strong) {
        j["delta_log2"] = code.delta_log2;
        j["delta_window_ok"] = code.delta_window_ok;
    } else {
        j["delta_log2"] = nullptr;
    }
    j["k"] = code.k();
    j["r"] = code.r();
    j["R"] = detail::indices_to_json(code.set_r);
    j["A"] = detail::indices_to_json(code.set_a);
    j["B"] = detail::indices_to_json(code.set_b);
    if (code.mode == WiretapMode::Strong) {
        j["X"] = detail::indices_to_json(code.set_x);
        j["Y"] = detail::indices_to_json(code.set_y);
    }
    j["stats_bob_hash"] = code.stats_bob_hash;
    j["stats_eve_hash"] = code.stats_eve_hash;
    return j;
}

inline WiretapCode code_from_json(const json& j) {
    WiretapCode code;
    code.n = j.at("n").get<std::size_t>();
    code.mode = mode_from_name(j.at("mode").get<std::string>());
    code.beta = j.at("beta").get<double>();
    code.delta_log2 = j.at("delta_log2").is_null() ? 0.0 : j.at("delta_log2").get<double>();
    code.delta_window_ok = j.value("delta_window_ok", true);
    code.set_r = detail::indices_from_json(j.at("R"), code.n);
    code.set_a = detail::indices_from_json(j.at("A"), code.n);
    code.set_b = detail::indices_from_json(j.at("B"), code.n);
    if (code.mode == WiretapMode::Strong) {
        code.set_x = detail::indices_from_json(j.at("X"), code.n);
        code.set_y = detail::indices_from_json(j.at("Y"), code.n);
    }
    code.stats_bob_hash = j.value("stats_bob_hash", "");
    code.stats_eve_hash = j.value("stats_eve_hash", "");
    code.validate();
    return code;
}

}  // namespace polarwt
