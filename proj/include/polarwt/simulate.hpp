#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarwt/channel.hpp"
#include "polarwt/construction.hpp"
#include "polarwt/parallel.hpp"
#include "polarwt/security.hpp"
#include "polarwt/wiretap.hpp"

namespace polarwt {

enum class MessageDist { Uniform, Fixed };

struct CampaignSpec {
    json main_channel;  // channel descriptors, kept as JSON for round-tripping
    json tap_channel;
    unsigned m = 10;
    double beta = 0.3;                      // any exponent below 1/2 is admissible
    WiretapMode mode = WiretapMode::Weak;
    std::optional<double> delta_log2;       // strong mode; default -n^beta
    std::size_t trials = 10000;
    uint64_t seed = 1;
    unsigned threads = 1;
    MessageDist u_dist = MessageDist::Uniform;
    std::string u_fixed;                    // hex/binary, used when u_dist == Fixed
    DecodeConfig decoder;
    std::size_t mu = 128;
    std::string out;

    double resolved_delta_log2() const {
        if (delta_log2) return *delta_log2;
        return -std::pow(std::exp2(static_cast<double>(m)), beta);
    }
};

inline CampaignSpec campaign_from_json(const json& j) {
    CampaignSpec s;
    s.main_channel = j.at("main_channel");
    s.tap_channel = j.at("tap_channel");
    s.m = j.at("m").get<unsigned>();
    s.beta = j.value("beta", 0.3);
    s.mode = mode_from_name(j.value("mode", "weak"));
    if (j.contains("delta_log2") && !j.at("delta_log2").is_null())
        s.delta_log2 = j.at("delta_log2").get<double>();
    s.trials = j.value("trials", std::size_t{10000});
    if (s.trials < 1) throw std::invalid_argument("campaign: trials must be >= 1");
    if (!j.contains("seed")) throw std::invalid_argument("campaign: seed is required");
    s.seed = j.at("seed").get<uint64_t>();
    s.threads = j.value("threads", 1u);
    std::string ud = j.value("u_dist", "uniform");
    if (ud == "uniform") s.u_dist = MessageDist::Uniform;
    else if (ud == "fixed") s.u_dist = MessageDist::Fixed;
    else throw std::invalid_argument("campaign: u_dist must be uniform or fixed");
    s.u_fixed = j.value("u_fixed", "");
    if (j.contains("decoder")) {
        const json& d = j.at("decoder");
        std::string tie = d.value("tie_break", "random");
        s.decoder.tie_break = tie == "zero" ? DecodeConfig::TieBreak::Zero
                                            : DecodeConfig::TieBreak::Random;
        s.decoder.branch_limit = d.value("branch_limit", std::size_t{1});
    }
    s.mu = j.value("mu", std::size_t{128});
    s.out = j.value("out", "");
    return s;
}

inline json campaign_to_json(const CampaignSpec& s) {
    json j;
    j["main_channel"] = s.main_channel;
    j["tap_channel"] = s.tap_channel;
    j["m"] = s.m;
    j["beta"] = s.beta;
    j["mode"] = mode_name(s.mode);
    j["delta_log2"] = s.delta_log2 ? json(*s.delta_log2) : json();
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["threads"] = s.threads;
    j["u_dist"] = s.u_dist == MessageDist::Uniform ? "uniform" : "fixed";
    if (!s.u_fixed.empty()) j["u_fixed"] = s.u_fixed;
    j["decoder"] = {{"tie_break", s.decoder.tie_break == DecodeConfig::TieBreak::Zero ? "zero" : "random"},
                    {"branch_limit", s.decoder.branch_limit}};
    j["mu"] = s.mu;
    if (!s.out.empty()) j["out"] = s.out;
    return j;
}

// build certified stats for an arbitrary symmetric channel descriptor,
// using the exact recursion for erasure channels
inline BitChannelStats build_stats(const json& channel_desc, unsigned m, std::size_t mu,
                                   unsigned threads) {
    if (channel_desc.value("kind", "") == "bec")
        return bec_evolve(channel_desc.at("eps").get<double>(), m);
    DiscreteChannel w = channel_from_json(channel_desc);
    QuantizationConfig q;
    q.mu = mu;
    q.threads = threads;
    return de_bounds(w, m, q);
}

inline WiretapCode build_code(const CampaignSpec& s, const BitChannelStats& bob,
                              const BitChannelStats& eve) {
    if (s.mode == WiretapMode::Weak) return build_weak(bob, eve, s.beta);
    return build_strong(bob, eve, s.beta, s.resolved_delta_log2());
}

struct WilsonInterval {
    double lo = 0.0, hi = 1.0;
};

// 95% score interval for a binomial proportion
inline WilsonInterval wilson95(std::size_t errors, std::size_t trials) {
    double z = 1.959963984540054;
    double nn = static_cast<double>(trials);
    double p = static_cast<double>(errors) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// sum of certified Bhattacharyya upper bounds over the unfrozen indices
inline double bler_bound_log2(const WiretapCode& code, const BitChannelStats& bob) {
    std::vector<double> ls;
    for (uint32_t i : code.set_a) ls.push_back(bob.rec[i].z_hi_log2);
    for (uint32_t i : code.set_r) ls.push_back(bob.rec[i].z_hi_log2);
    return logsumexp2(ls);
}

struct CampaignResult {
    // code summary
    std::size_t n = 0, k = 0, r = 0, x_size = 0;
    double rate = 0.0;
    double secrecy_cap = 0.0;
    double rate_over_cs = 0.0;
    // reliability
    std::size_t trials = 0, errors = 0;
    double bler = 0.0;
    WilsonInterval wilson;
    double bound_log2 = -kInf;  // certified analytic BLER bound
    // security
    LeakageReport leakage;
    // bookkeeping
    uint64_t seed = 0;
    double wall_seconds = 0.0;  // reported on the console, not in the file
};

// One reliability campaign: per-trial independent streams for the message,
// the randomizer, the channel noise, and tie-breaking, so the result is
// invariant under the thread partition.
inline CampaignResult run_campaign(const CampaignSpec& spec, const WiretapCode& code,
                                   const BitChannelStats& bob, const BitChannelStats& eve) {
    auto t0 = std::chrono::steady_clock::now();
    DiscreteChannel wmain = channel_from_json(spec.main_channel);
    DiscreteChannel wtap = channel_from_json(spec.tap_channel);
    CampaignResult res;
    res.n = code.n;
    res.k = code.k();
    res.r = code.r();
    res.x_size = code.set_x.size();
    res.rate = code.rate();
    res.secrecy_cap = secrecy_capacity(wmain, wtap);
    res.rate_over_cs = res.secrecy_cap > 0.0
                           ? res.rate / res.secrecy_cap
                           : std::numeric_limits<double>::quiet_NaN();
    res.trials = spec.trials;
    res.seed = spec.seed;
    res.bound_log2 = bler_bound_log2(code, bob);
    res.leakage = code.mode == WiretapMode::Weak ? weak_leakage_bound(code, eve)
                                                 : strong_leakage_bound(code, eve);

    BitVector fixed_u;
    if (spec.u_dist == MessageDist::Fixed)
        fixed_u = spec.u_fixed.empty() ? BitVector(code.k())
                                       : BitVector::parse(spec.u_fixed, code.k());

    std::vector<uint8_t> error_flags(spec.trials, 0);
    bool branching = code.mode == WiretapMode::Strong && !code.set_x.empty() &&
                     spec.decoder.branch_limit > 1;
    parallel_for(0, spec.trials, spec.threads, [&](std::size_t t) {
        Rng u_rng = derive_rng(spec.seed, t, 0);
        Rng e_rng = derive_rng(spec.seed, t, 1);
        Rng ch_rng = derive_rng(spec.seed, t, 2);
        BitVector u = spec.u_dist == MessageDist::Uniform ? BitVector::random(code.k(), u_rng)
                                                          : fixed_u;
        BitVector e = BitVector::random(code.r(), e_rng);
        BitVector x = wiretap_encode(code, u, e);
        std::vector<std::size_t> y(code.n);
        for (std::size_t j = 0; j < code.n; ++j) y[j] = wmain.sample(x[j], ch_rng);
        DecodeConfig cfg = spec.decoder;
        cfg.seed = derive_rng(spec.seed, t, 3).next_u64();
        BitVector uhat = branching ? sc_decode_branching(code, y, wmain, cfg)
                                   : sc_decode(code, y, wmain, cfg);
        error_flags[t] = uhat != u ? 1 : 0;
    });
    for (uint8_t f : error_flags) res.errors += f;
    res.bler = static_cast<double>(res.errors) / static_cast<double>(res.trials);
    res.wilson = wilson95(res.errors, res.trials);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// wall-clock deliberately excluded: identical spec + seed must give
// byte-identical files
inline json result_to_json(const CampaignResult& r) {
    json j;
    j["code"] = {{"n", r.n},           {"k", r.k},
                 {"r", r.r},           {"x_size", r.x_size},
                 {"rate", r.rate},     {"secrecy_capacity", r.secrecy_cap},
                 {"rate_over_cs", std::isfinite(r.rate_over_cs) ? json(r.rate_over_cs) : json()}};
    j["reliability"] = {{"trials", r.trials},
                        {"errors", r.errors},
                        {"bler", r.bler},
                        {"wilson_lo", r.wilson.lo},
                        {"wilson_hi", r.wilson.hi},
                        {"bound_log2", finite_or_null(r.bound_log2)},
                        {"bound", std::exp2(r.bound_log2)}};
    j["security"] = leakage_to_json(r.leakage);
    j["seed"] = r.seed;
    return j;
}

// ---------------------------------------------------------------------------
// rate table sweep (strong scheme across tap parameters)
// ---------------------------------------------------------------------------

struct TableRow {
    double p2 = 0.0;
    bool failed = false;
    std::string error;
    std::size_t n = 0, k = 0, r = 0, x_size = 0;
    double rate = 0.0, cs = 0.0, pct = 0.0;
};

struct TableSpec {
    json main_channel;
    std::vector<double> tap_ps;  // BSC crossover probabilities of the tap
    unsigned m = 16;
    double beta = 0.3;
    std::optional<double> delta_log2;
    std::size_t mu = 64;
    unsigned threads = 1;

    double resolved_delta_log2() const {
        if (delta_log2) return *delta_log2;
        return -std::pow(std::exp2(static_cast<double>(m)), beta);
    }
};

inline TableSpec table_from_json(const json& j) {
    TableSpec s;
    s.main_channel = j.at("main_channel");
    s.tap_ps = j.at("tap_ps").get<std::vector<double>>();
    s.m = j.at("m").get<unsigned>();
    s.beta = j.value("beta", 0.3);
    if (j.contains("delta_log2") && !j.at("delta_log2").is_null())
        s.delta_log2 = j.at("delta_log2").get<double>();
    s.mu = j.value("mu", std::size_t{64});
    s.threads = j.value("threads", 1u);
    return s;
}

// one strong-mode construction per tap parameter, sorted by descending p2
inline std::vector<TableRow> table_sweep(const TableSpec& spec) {
    BitChannelStats bob = build_stats(spec.main_channel, spec.m, spec.mu, spec.threads);
    DiscreteChannel wmain = channel_from_json(spec.main_channel);
    double c_main = capacity(wmain);
    std::vector<double> ps = spec.tap_ps;
    std::sort(ps.begin(), ps.end(), std::greater<double>());
    std::vector<TableRow> rows;
    for (double p2 : ps) {
        TableRow row;
        row.p2 = p2;
        try {
            BitChannelStats eve = build_stats(json{{"kind", "bsc"}, {"p", p2}}, spec.m, spec.mu,
                                              spec.threads);
            WiretapCode code =
                build_strong(bob, eve, spec.beta, spec.resolved_delta_log2());
            row.n = code.n;
            row.k = code.k();
            row.r = code.r();
            row.x_size = code.set_x.size();
            row.rate = code.rate();
            row.cs = c_main - eve.base_capacity;
            row.pct = row.cs > 0.0 ? 100.0 * row.rate / row.cs
                                   : std::numeric_limits<double>::quiet_NaN();
        } catch (const std::exception& ex) {
            row.failed = true;
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string table_to_csv(const std::vector<TableRow>& rows) {
    std::string csv = "p2,rate,secrecy_capacity,pct_of_cs,x_size,n,k,r,status\n";
    char buf[256];
    for (const auto& r : rows) {
        if (r.failed) {
            std::snprintf(buf, sizeof buf, "%.6g,,,,,,,,failed\n", r.p2);
        } else if (std::isfinite(r.pct)) {
            std::snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f,%.2f,%zu,%zu,%zu,%zu,ok\n", r.p2,
                          r.rate, r.cs, r.pct, r.x_size, r.n, r.k, r.r);
        } else {
            std::snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f,undefined,%zu,%zu,%zu,%zu,ok\n", r.p2,
                          r.rate, r.cs, r.x_size, r.n, r.k, r.r);
        }
        csv += buf;
    }
    return csv;
}

inline json table_to_json(const std::vector<TableRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json e;
        e["p2"] = r.p2;
        if (r.failed) {
            e["status"] = "failed";
            e["error"] = r.error;
        } else {
            e["status"] = "ok";
            e["rate"] = r.rate;
            e["secrecy_capacity"] = r.cs;
            e["pct_of_cs"] = std::isfinite(r.pct) ? json(r.pct) : json();
            e["x_size"] = r.x_size;
            e["n"] = r.n;
            e["k"] = r.k;
            e["r"] = r.r;
        }
        arr.push_back(std::move(e));
    }
    return arr;
}

}  // namespace polarwt
