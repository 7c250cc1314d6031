#pragma once

// Experiment driver and verification suites.
//
// run() fans an ExperimentConfig out over (horizon, replication) cells, each
// with a seed derived from the master seed by a fixed splitting rule, and
// aggregates regret/budget statistics plus an OLS slope on
// (log T, log mean-regret) — horizons below 256 are excluded from the fit as
// transient-dominated. verify_*() re-run the library's inequality and
// structure checks with fixed seeds and report both sides of every
// inequality; a suite passes only if every line passes.
//
// Persistence: sequences and traces as CSV, summaries and aggregates as
// JSON. Floats are serialized with 17 significant digits so that re-reading
// an emitted file reproduces the exact double.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bilat/adversaries.hpp"
#include "bilat/benchmarks.hpp"
#include "bilat/core.hpp"
#include "bilat/gftmax.hpp"
#include "bilat/grids.hpp"
#include "bilat/learners.hpp"
#include "bilat/rng.hpp"

namespace bilat
{

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_sequence_csv(std::ostream &os, const ValuationSequence &seq)
{
    os << "s,b\n";
    for (const Valuation &v : seq)
        os << format_double(v.s) << ',' << format_double(v.b) << '\n';
}

inline ValuationSequence load_sequence_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("s,b", 0) != 0)
        throw std::runtime_error("sequence CSV: missing 's,b' header");
    ValuationSequence seq;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ','))
            throw std::runtime_error("sequence CSV: malformed row");
        double s = std::stod(cell);
        if (!std::getline(row, cell, ','))
            throw std::runtime_error("sequence CSV: malformed row");
        double b = std::stod(cell);
        if (!(s >= 0.0 && s <= 1.0 && b >= 0.0 && b <= 1.0))
            throw std::runtime_error("sequence CSV: valuation outside [0,1]");
        seq.push_back(Valuation{s, b});
    }
    return seq;
}

inline void write_trace_csv(std::ostream &os, const RunTrace &trace)
{
    os << "t,phase,p,q,s,b,gft,rev,budget\n";
    for (const TraceRow &r : trace.rows)
        os << r.t << ',' << r.phase << ',' << format_double(r.pq.p) << ','
           << format_double(r.pq.q) << ',' << format_double(r.v.s) << ','
           << format_double(r.v.b) << ',' << format_double(r.gft) << ','
           << format_double(r.rev) << ',' << format_double(r.budget) << '\n';
}

inline nlohmann::json config_to_json(const GftMaxConfig &c)
{
    return {{"feedback", c.feedback == FeedbackModel::full ? "full" : "one-bit"},
            {"T", c.T},
            {"beta", c.beta},
            {"K", c.K},
            {"blocks", c.blocks},
            {"eta_scale", c.eta_scale},
            {"anytime", c.anytime},
            {"seed", c.seed}};
}

inline nlohmann::json run_summary_json(const GftMaxConfig &config,
                                       const ValuationSequence &seq,
                                       const RunTrace &trace)
{
    FixedPriceResult best = best_fixed_price(seq);
    double total = trace.total_gft();
    BoundValue bound = config.feedback == FeedbackModel::full
                           ? full_feedback_bound(config.T)
                           : one_bit_bound(config.T);
    nlohmann::json j;
    j["config"] = config_to_json(config);
    if (trace.tau.has_value())
        j["tau"] = *trace.tau;
    else
        j["tau"] = "phase II unreached";
    j["total_gft"] = total;
    j["best_fixed_price"] = best.price;
    j["best_fixed_price_value"] = best.value;
    j["regret"] = regret(best.value, total);
    j["budget_final"] = trace.final_budget();
    j["bound_value"] = bound.value;
    j["bound_vacuous"] = bound.vacuous;
    return j;
}

// ---------------------------------------------------------------------------
// Slope fit
// ---------------------------------------------------------------------------

struct SlopeFit
{
    double slope = 0.0;
    double stderr_ = 0.0;
    long points_used = 0;
};

// OLS on (log T, log y), excluding horizons below min_T.
inline std::optional<SlopeFit>
fit_loglog_slope(const std::vector<RegretPoint> &curve, long min_T = 256)
{
    std::vector<double> xs, ys;
    for (const RegretPoint &p : curve)
    {
        if (p.T < min_T || p.mean_regret <= 0.0)
            continue;
        xs.push_back(std::log(static_cast<double>(p.T)));
        ys.push_back(std::log(p.mean_regret));
    }
    std::size_t n = xs.size();
    if (n < 2)
        return std::nullopt;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double e = ys[i] - my - slope * (xs[i] - mx);
        rss += e * e;
    }
    SlopeFit f;
    f.slope = slope;
    f.stderr_ = n > 2 ? std::sqrt(rss / (static_cast<double>(n) - 2) / sxx) : 0.0;
    f.points_used = static_cast<long>(n);
    return f;
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

struct AdversarySpec
{
    std::string family = "iid-uniform"; // iid-uniform | full-lb | gap | twobit-lb
    double epsilon = 0.05;              // gap sequence
    long N = 64;                        // twobit-lb
    long k = 0;                         // twobit-lb
};

inline ValuationSequence make_sequence(const AdversarySpec &a, long T, Rng &rng)
{
    if (a.family == "iid-uniform")
        return iid_uniform_sequence(T, rng);
    if (a.family == "full-lb")
        return iid_sequence(full_lb_distribution(), T, rng);
    if (a.family == "gap")
        return benchmark_gap_sequence(a.epsilon, T % 2 == 0 ? T : T + 1);
    if (a.family == "twobit-lb")
        return iid_sequence(twobit_lb_distribution(TwoBitLBParams(a.N, a.k)),
                            T, rng);
    throw std::invalid_argument("unknown adversary family: " + a.family);
}

struct ExperimentConfig
{
    std::string preset = "full"; // full | onebit
    AdversarySpec adversary;
    std::vector<long> horizons;
    long replications = 1;
    std::uint64_t master_seed = 0;
    std::string out_dir;       // empty: nothing persisted
    bool write_traces = false; // one trace CSV per (T, replication)

    void validate() const
    {
        if (preset != "full" && preset != "onebit")
            throw std::invalid_argument("preset must be 'full' or 'onebit'");
        if (horizons.empty())
            throw std::invalid_argument("at least one horizon required");
        for (std::size_t i = 1; i < horizons.size(); ++i)
            if (horizons[i] <= horizons[i - 1])
                throw std::invalid_argument("horizons must be strictly increasing");
        if (replications < 1)
            throw std::invalid_argument("replications must be >= 1");
    }

    GftMaxConfig algo_config(long T, std::uint64_t seed) const
    {
        return preset == "full" ? GftMaxConfig::full_preset(T, seed)
                                : GftMaxConfig::one_bit_preset(T, seed);
    }
};

struct HorizonAggregate
{
    long T = 0;
    double mean_regret = 0.0;
    double std_regret = 0.0;
    double mean_budget = 0.0;
    double frac_phase2_unreached = 0.0;
    long replications = 0;
};

struct AggregateResult
{
    std::vector<HorizonAggregate> per_horizon;
    std::optional<SlopeFit> slope; // present only with >= 4 horizons
};

inline AggregateResult run(const ExperimentConfig &config)
{
    config.validate();
    AggregateResult agg;
    for (long T : config.horizons)
    {
        double sum = 0, sumsq = 0, bsum = 0;
        long unreached = 0;
        for (long rep = 0; rep < config.replications; ++rep)
        {
            std::uint64_t seed = derive_seed(config.master_seed, T, rep);
            Rng seq_rng(splitmix64(seed));
            ValuationSequence seq = make_sequence(config.adversary, T, seq_rng);
            GftMaxConfig cfg = config.algo_config(static_cast<long>(seq.size()),
                                                  seed);
            RunTrace trace = gft_max(cfg, seq);
            double r = regret(best_fixed_price(seq).value, trace.total_gft());
            sum += r;
            sumsq += r * r;
            bsum += trace.final_budget();
            unreached += trace.tau.has_value() ? 0 : 1;
            if (!config.out_dir.empty() && config.write_traces)
            {
                std::ofstream os(config.out_dir + "/trace_T" +
                                 std::to_string(T) + "_rep" +
                                 std::to_string(rep) + ".csv");
                write_trace_csv(os, trace);
            }
        }
        double n = static_cast<double>(config.replications);
        double mean = sum / n;
        HorizonAggregate h;
        h.T = T;
        h.mean_regret = mean;
        h.std_regret = std::sqrt(std::max(0.0, sumsq / n - mean * mean));
        h.mean_budget = bsum / n;
        h.frac_phase2_unreached = static_cast<double>(unreached) / n;
        h.replications = config.replications;
        agg.per_horizon.push_back(h);
    }
    if (config.horizons.size() >= 4)
    {
        std::vector<RegretPoint> pts;
        for (const HorizonAggregate &h : agg.per_horizon)
            pts.push_back({h.T, h.mean_regret, h.std_regret, h.replications});
        agg.slope = fit_loglog_slope(pts);
    }
    if (!config.out_dir.empty())
    {
        std::ofstream os(config.out_dir + "/curve.csv");
        os << "T,mean_regret,std_regret,mean_budget\n";
        for (const HorizonAggregate &h : agg.per_horizon)
            os << h.T << ',' << format_double(h.mean_regret) << ','
               << format_double(h.std_regret) << ','
               << format_double(h.mean_budget) << '\n';
    }
    return agg;
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

struct CheckLine
{
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct VerifyReport
{
    std::string suite;
    std::vector<CheckLine> lines;

    bool passed() const
    {
        for (const CheckLine &l : lines)
            if (!l.pass)
                return false;
        return !lines.empty();
    }
};

namespace detail
{

inline ValuationSequence random_sequence(long T, Rng &rng)
{
    return iid_uniform_sequence(T, rng);
}

} // namespace detail

// Prop-style grid inequalities on random sequences.
inline VerifyReport verify_discretization(std::uint64_t seed = 20240901,
                                          long sequences_per_cell = 500)
{
    VerifyReport rep;
    rep.suite = "discretization";
    Rng rng(seed);
    const std::vector<std::pair<long, int>> cells = {{64, 4}, {100, 7}, {200, 10}};
    for (auto [T, K] : cells)
    {
        long add_fail = 0, dbl_fail = 0, mul_fail = 0;
        for (long i = 0; i < sequences_per_cell; ++i)
        {
            ValuationSequence seq = detail::random_sequence(T, rng);
            if (!additive_gap_report(seq, K).holds)
                ++add_fail;
            if (!doubled_price_gap_report(seq, K).holds)
                ++dbl_fail;
            if (!multiplicative_gap_report(seq, K, T).holds)
                ++mul_fail;
        }
        std::string cell = "T=" + std::to_string(T) + ",K=" + std::to_string(K);
        rep.lines.push_back({"additive holds [" + cell + "]",
                             static_cast<double>(add_fail), 0.0, add_fail == 0});
        rep.lines.push_back({"doubled-price holds [" + cell + "]",
                             static_cast<double>(dbl_fail), 0.0, dbl_fail == 0});
        rep.lines.push_back({"multiplicative holds [" + cell + "]",
                             static_cast<double>(mul_fail), 0.0, mul_fail == 0});
    }
    return rep;
}

// One-bit estimator: closed-form bias bound, plus Monte Carlo agreement with
// the closed form at a reduced lattice (the full lattice is the acceptance
// gate's job).
inline VerifyReport verify_estimator(std::uint64_t seed = 20240902,
                                     long mc_samples = 20000)
{
    VerifyReport rep;
    rep.suite = "estimator";
    Rng rng(seed);
    double worst_bias = 0.0;
    double worst_sigmas = 0.0;
    for (int K : {4, 10})
    {
        double invK = 1.0 / K;
        for (int pi = 0; pi < K; ++pi)
        {
            double p = static_cast<double>(pi) / K;
            for (int si = 0; si <= 10; si += 2)
                for (int bi = 0; bi <= 10; bi += 2)
                {
                    Valuation v{si / 10.0, bi / 10.0};
                    double mean = gft_est_mean(p, K, v);
                    double target = gft(PricePair{p + invK, p}, v);
                    worst_bias = std::max(worst_bias,
                                          std::abs(mean - target) * K / 2.0);
                    double acc = 0.0;
                    for (long n = 0; n < mc_samples; ++n)
                        acc += gft_est(p, K, v, rng).value;
                    double phat = acc / static_cast<double>(mc_samples);
                    double se = std::sqrt(
                        std::max(phat * (1.0 - phat), 1e-12) /
                        static_cast<double>(mc_samples));
                    worst_sigmas =
                        std::max(worst_sigmas, std::abs(phat - mean) / se);
                }
        }
        rep.lines.push_back({"bias*K/2 <= 1 so far (K=" + std::to_string(K) + ")",
                             worst_bias, 1.0, worst_bias <= 1.0});
    }
    rep.lines.push_back({"MC deviation (std errors) <= 4", worst_sigmas, 4.0,
                         worst_sigmas <= 4.0});
    return rep;
}

// Global budget balance over seeded runs of both presets.
inline VerifyReport verify_budget(std::uint64_t seed = 20240903, long runs = 50,
                                  long T = 2000)
{
    VerifyReport rep;
    rep.suite = "budget";
    for (const char *preset : {"full", "onebit"})
    {
        double min_budget = 0.0;
        bool first = true;
        long violations = 0;
        for (long i = 0; i < runs; ++i)
        {
            std::uint64_t s = derive_seed(seed, T, i);
            Rng r(splitmix64(s));
            ValuationSequence seq = iid_uniform_sequence(T, r);
            GftMaxConfig cfg = std::string(preset) == "full"
                                   ? GftMaxConfig::full_preset(T, s)
                                   : GftMaxConfig::one_bit_preset(T, s);
            RunTrace trace = gft_max(cfg, seq);
            double b = trace.final_budget();
            if (first || b < min_budget)
                min_budget = b;
            first = false;
            if (b < -1e-9)
                ++violations;
        }
        rep.lines.push_back({std::string("min final budget (") + preset + ")",
                             min_budget, -1e-9, violations == 0});
    }
    return rep;
}

// Hindsight oracles: ratio bounds and hull-vs-brute-force agreement.
inline VerifyReport verify_benchmarks(std::uint64_t seed = 20240904,
                                      long random_sequences = 200)
{
    VerifyReport rep;
    rep.suite = "benchmarks";
    Rng rng(seed);
    double max_ratio = 0.0;
    for (long i = 0; i < random_sequences; ++i)
    {
        long T = 5 + static_cast<long>(uniform01(rng) * 95);
        ValuationSequence seq = detail::random_sequence(T, rng);
        HindsightReport h = hindsight_report(seq);
        if (h.ratio.has_value())
            max_ratio = std::max(max_ratio, *h.ratio);
    }
    rep.lines.push_back({"distribution/fixed-price ratio <= 2", max_ratio,
                         2.0 + 1e-9, max_ratio <= 2.0 + 1e-9});

    double min_gap_ratio = 1e9;
    for (double eps : {0.1, 0.05, 0.01})
    {
        ValuationSequence seq = benchmark_gap_sequence(eps, 40);
        HindsightReport h = hindsight_report(seq);
        double want = 2.0 - 8.0 * eps;
        double got = h.ratio.value_or(0.0);
        min_gap_ratio = std::min(min_gap_ratio, got - want);
        rep.lines.push_back({"gap-sequence ratio >= 2-8eps (eps=" +
                                 std::to_string(eps) + ")",
                             got, want, got >= want});
    }

    long mismatches = 0;
    for (long i = 0; i < 100; ++i)
    {
        long T = 2 + static_cast<long>(uniform01(rng) * 10);
        ValuationSequence seq = detail::random_sequence(T, rng);
        MixedPriceStrategy hull = best_feasible_distribution(seq);
        MixedPriceStrategy brute = best_feasible_distribution_bruteforce(seq);
        if (std::abs(hull.value - brute.value) > 1e-9)
            ++mismatches;
    }
    rep.lines.push_back({"hull oracle == brute force (mismatches)",
                         static_cast<double>(mismatches), 0.0, mismatches == 0});
    return rep;
}

// Exact structure of the two-bit hard family.
inline VerifyReport verify_lb_structure(long N = 64)
{
    VerifyReport rep;
    rep.suite = "lb-structure";
    long checked = 0, failed = 0;
    for (long k = 0; k <= N - 2; ++k)
    {
        TwoBitLBParams P(N, k);
        TwoBitLBStructureReport r = twobit_lb_structure_report(P);
        ++checked;
        if (!r.all_hold())
            ++failed;
        if (k == 1)
        {
            rep.lines.push_back({"argmax margin >= rho*eps (k=1)",
                                 r.best_value - r.second_value,
                                 r.required_margin, r.argmax_ok});
        }
    }
    rep.lines.push_back({"instances with all checks holding (N=" +
                             std::to_string(N) + ")",
                         static_cast<double>(checked - failed),
                         static_cast<double>(checked), failed == 0});
    return rep;
}

inline std::vector<VerifyReport> verify_all(std::uint64_t seed = 20240905)
{
    return {verify_discretization(seed), verify_estimator(seed + 1),
            verify_budget(seed + 2), verify_benchmarks(seed + 3),
            verify_lb_structure(64)};
}

} // namespace bilat
