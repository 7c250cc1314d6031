#pragma once

// Two-phase budget-balanced trading algorithm.
//
// Phase I (Revenue-Max): run a learner over the revenue grid F_K — whose
// pairs never lose money — until the accumulated revenue reaches the
// threshold beta, banking a budget. Phase II: spend at most 1/K per round
// chasing gain from trade on the adjacent-pairs grid H_K. With
// beta = K = ceil(sqrt T) the final budget satisfies
// B_T >= beta - (T - tau)/K >= 0 exactly.
//
// Presets:
//   full:    Hedge in both phases (anytime rate 2*sqrt(ln n / t)); Phase II
//            rewards are the whole GFT vector over H_K, range [-1/K, 1].
//   one-bit: EXP3.P over F_K fed only the realized revenue of the chosen
//            arm; Phase II uses the block decomposition with the randomized
//            one-bit GFT estimator; beta = ceil(T^{3/4}), K = ceil(T^{1/4}),
//            N = ceil(sqrt T) blocks.
//
// Every round asserts feasibility p_t - q_t <= B_{t-1}; a violation is a
// hard error, not a recoverable condition.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bilat/benchmarks.hpp"
#include "bilat/core.hpp"
#include "bilat/grids.hpp"
#include "bilat/learners.hpp"
#include "bilat/rng.hpp"

namespace bilat
{

// Smallest c >= 1 with c^den >= T^num (exact integer arithmetic).
inline long ceil_power(long T, int num, int den)
{
    if (T < 1 || num < 1 || den < 1)
        throw std::invalid_argument("ceil_power: positive arguments required");
    unsigned __int128 target = 1;
    for (int i = 0; i < num; ++i)
        target *= static_cast<unsigned __int128>(T);
    long c = static_cast<long>(
        std::ceil(std::pow(static_cast<double>(T),
                           static_cast<double>(num) / den)));
    auto pow_ok = [&](long x) {
        if (x < 1)
            return false;
        unsigned __int128 v = 1;
        for (int i = 0; i < den; ++i)
            v *= static_cast<unsigned __int128>(x);
        return v >= target;
    };
    while (!pow_ok(c))
        ++c;
    while (c > 1 && pow_ok(c - 1))
        --c;
    return c;
}

struct GftMaxConfig
{
    FeedbackModel feedback = FeedbackModel::full;
    long T = 0;
    long beta = 0;
    int K = 0;
    long blocks = 0;          // Phase II block count (one-bit only)
    double eta_scale = 1.0;   // Hedge tuning (both phases in the full preset)
    bool anytime = false;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (T < 1)
            throw std::invalid_argument("GftMaxConfig: T must be >= 1");
        if (beta <= 0)
            throw std::invalid_argument("GftMaxConfig: beta must be positive");
        if (K < 1)
            throw std::invalid_argument("GftMaxConfig: K must be >= 1");
        if (feedback == FeedbackModel::one_bit && blocks < 1)
            throw std::invalid_argument(
                "GftMaxConfig: one-bit preset needs a positive block count");
        if (feedback == FeedbackModel::two_bit)
            throw std::invalid_argument(
                "GftMaxConfig: no two-bit variant exists");
    }

    static GftMaxConfig full_preset(long T, std::uint64_t seed)
    {
        GftMaxConfig c;
        c.feedback = FeedbackModel::full;
        c.T = T;
        c.beta = ceil_power(T, 1, 2);
        c.K = static_cast<int>(ceil_power(T, 1, 2));
        c.eta_scale = 2.0;
        c.anytime = true;
        c.seed = seed;
        c.validate();
        return c;
    }

    static GftMaxConfig one_bit_preset(long T, std::uint64_t seed)
    {
        GftMaxConfig c;
        c.feedback = FeedbackModel::one_bit;
        c.T = T;
        c.beta = ceil_power(T, 3, 4);
        c.K = static_cast<int>(ceil_power(T, 1, 4));
        c.blocks = ceil_power(T, 1, 2);
        c.seed = seed;
        c.validate();
        return c;
    }
};

struct TraceRow
{
    long t = 0;
    int phase = 1; // 1 or 2
    PricePair pq{};
    Valuation v{};
    double gft = 0.0;
    double rev = 0.0;
    double budget = 0.0;
};

struct RunTrace
{
    std::vector<TraceRow> rows;
    std::optional<long> tau; // last Phase I round; empty if never reached

    bool phase2_reached() const { return tau.has_value(); }

    double total_gft() const
    {
        double s = 0.0, c = 0.0;
        for (const TraceRow &r : rows)
        {
            double y = r.gft - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return s;
    }

    double final_budget() const
    {
        return rows.empty() ? 0.0 : rows.back().budget;
    }
};

namespace detail
{

inline void post_round(RunTrace &trace, BudgetLedger &ledger, long t, int phase,
                       const PricePair &pq, const Valuation &v)
{
    if (!feasible(pq, ledger))
        throw std::runtime_error(
            "gft_max: infeasible post at round " + std::to_string(t) +
            " (deficit " + std::to_string(pq.p - pq.q) + " > budget " +
            std::to_string(ledger.current()) + ")");
    double g = gft(pq, v);
    double r = rev(pq, v);
    ledger.add(r);
    trace.rows.push_back({t, phase, pq, v, g, r, ledger.current()});
}

} // namespace detail

// Phase I: learn over the revenue grid until the budget reaches beta.
// Returns the stopping round tau (the round where B_tau >= beta first
// holds), or nullopt if the threshold is never reached. Rounds are appended
// to the trace; `start` is the first round index to play (1-based).
template <typename Learner>
inline std::optional<long>
revenue_max(long beta, const PriceGrid &gridF, Learner &learner,
            const ValuationSequence &seq, FeedbackModel fb, Rng &rng,
            RunTrace &trace, BudgetLedger &ledger, long start = 1)
{
    if (gridF.kind != GridKind::revenue)
        throw std::invalid_argument("revenue_max: expected the revenue grid");
    const long T = static_cast<long>(seq.size());
    std::vector<double> rewards(gridF.points.size());
    for (long t = start; t <= T; ++t)
    {
        const Valuation &v = seq[static_cast<std::size_t>(t - 1)];
        std::size_t arm = learner.sample(rng);
        const PricePair &pq = gridF.points[arm];
        detail::post_round(trace, ledger, t, 1, pq, v);

        if constexpr (requires(Learner &l) { l.update(std::vector<double>{}); })
        {
            if (fb != FeedbackModel::full)
                throw std::invalid_argument(
                    "revenue_max: vector-feedback learner needs full feedback");
            for (std::size_t i = 0; i < gridF.points.size(); ++i)
                rewards[i] = rev(gridF.points[i], v);
            learner.update(rewards);
        }
        else
        {
            if (fb != FeedbackModel::one_bit)
                throw std::invalid_argument(
                    "revenue_max: bandit learner needs one-bit feedback");
            learner.update(arm, trace.rows.back().rev);
        }

        if (ledger.current() >= static_cast<double>(beta))
            return t;
    }
    return std::nullopt;
}

inline RunTrace gft_max(const GftMaxConfig &config, const ValuationSequence &seq)
{
    config.validate();
    if (static_cast<long>(seq.size()) != config.T)
        throw std::invalid_argument("gft_max: sequence length != T");

    Rng rng(config.seed);
    RunTrace trace;
    trace.rows.reserve(seq.size());
    BudgetLedger ledger;

    // The revenue grid is defined for horizons >= 2; the degenerate T = 1
    // run uses the T = 2 grid (a superset differing only in probe distances).
    PriceGrid gridF = revenue_grid(config.K, std::max(config.T, 2L));
    PriceGrid gridH = adjacent_pairs(config.K);

    // Phase I.
    if (config.feedback == FeedbackModel::full)
    {
        Hedge ar(gridF.size(), config.T, 0.0, 1.0, config.eta_scale,
                 config.anytime);
        trace.tau = revenue_max(config.beta, gridF, ar, seq,
                                FeedbackModel::full, rng, trace, ledger);
    }
    else
    {
        Exp3P ar(gridF.size(), config.T);
        trace.tau = revenue_max(config.beta, gridF, ar, seq,
                                FeedbackModel::one_bit, rng, trace, ledger);
    }
    if (!trace.tau.has_value())
        return trace; // ran out of rounds banking revenue

    const long tau = *trace.tau;
    const long remaining = config.T - tau;
    if (remaining == 0)
        return trace;

    // Phase II.
    if (config.feedback == FeedbackModel::full)
    {
        // Rewards are the full GFT vector over H_K; each pair's per-round
        // GFT lies in [-1/K, 1] (a trade can lose at most the 1/K spread).
        double invK = 1.0 / config.K;
        Hedge ag(gridH.size(), config.T, -invK, 1.0, config.eta_scale,
                 config.anytime);
        std::vector<double> rewards(gridH.size());
        for (long t = tau + 1; t <= config.T; ++t)
        {
            const Valuation &v = seq[static_cast<std::size_t>(t - 1)];
            std::size_t arm = ag.sample(rng);
            detail::post_round(trace, ledger, t, 2, gridH.points[arm], v);
            for (std::size_t i = 0; i < gridH.size(); ++i)
                rewards[i] = gft(gridH.points[i], v);
            ag.update(rewards);
        }
    }
    else
    {
        // Block decomposition over H_K, fed by the one-bit GFT estimator.
        // Blocks are aligned to start at tau + 1. If too few rounds remain
        // for the configured block count (each block needs K exploration
        // rounds), shrink the block count to fit; if fewer than K rounds
        // remain, no learning is possible and the safest adjacent pair
        // (the one at 0, costing at most 1/K) is posted.
        long blocks = config.blocks;
        if (remaining / blocks < config.K)
            blocks = remaining / config.K;
        if (blocks < 1)
        {
            for (long t = tau + 1; t <= config.T; ++t)
                detail::post_round(trace, ledger, t, 2, gridH.points[0],
                                   seq[static_cast<std::size_t>(t - 1)]);
            return trace;
        }
        BlockLearner ag(remaining, blocks, config.K, config.eta_scale,
                        config.anytime);
        const long complete = blocks * ag.block_size();
        for (long t = tau + 1; t <= config.T; ++t)
        {
            if (t - tau == complete + 1)
                ag.enter_final_partial();
            const Valuation &v = seq[static_cast<std::size_t>(t - 1)];
            BlockLearner::Action a = ag.next_action(rng);
            double estimate = 0.0;
            if (a.explore)
            {
                double p = static_cast<double>(a.pair_index) / config.K;
                GftEstimate e = gft_est(p, config.K, v, rng);
                estimate = e.value;
                detail::post_round(trace, ledger, t, 2, e.posted, v);
            }
            else
            {
                detail::post_round(
                    trace, ledger, t, 2,
                    gridH.points[static_cast<std::size_t>(a.pair_index)], v);
            }
            ag.finish_round(a, estimate);
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Regret curves
// ---------------------------------------------------------------------------

struct RegretPoint
{
    long T = 0;
    double mean_regret = 0.0;
    double stddev = 0.0;
    long replications = 0;
};

// Adversary: callable (long T, Rng&) -> ValuationSequence.
// ConfigMaker: callable (long T, std::uint64_t seed) -> GftMaxConfig.
template <typename ConfigMaker, typename Adversary>
inline std::vector<RegretPoint>
regret_curve(ConfigMaker make_config, Adversary adversary,
             const std::vector<long> &horizons, long replications,
             std::uint64_t master_seed)
{
    if (replications < 1)
        throw std::invalid_argument("regret_curve: need >= 1 replication");
    std::vector<RegretPoint> out;
    out.reserve(horizons.size());
    for (long T : horizons)
    {
        double sum = 0.0, sumsq = 0.0;
        for (long rep = 0; rep < replications; ++rep)
        {
            std::uint64_t seed = derive_seed(master_seed, T, rep);
            Rng seq_rng(splitmix64(seed));
            ValuationSequence seq = adversary(T, seq_rng);
            GftMaxConfig cfg = make_config(T, seed);
            RunTrace trace = gft_max(cfg, seq);
            double bench = best_fixed_price(seq).value;
            double r = regret(bench, trace.total_gft());
            sum += r;
            sumsq += r * r;
        }
        double n = static_cast<double>(replications);
        double mean = sum / n;
        double var = std::max(0.0, sumsq / n - mean * mean);
        out.push_back({T, mean, std::sqrt(var), replications});
    }
    return out;
}

// Explicit regret bounds from the analysis; at small T they exceed T and
// carry no information, which the vacuous flag records.
struct BoundValue
{
    double value = 0.0;
    bool vacuous = true;
};

inline BoundValue full_feedback_bound(long T)
{
    double lt = std::log(static_cast<double>(T));
    double v = 92.0 * std::pow(lt, 1.5) * std::sqrt(static_cast<double>(T));
    return {v, v >= static_cast<double>(T)};
}

inline BoundValue one_bit_bound(long T)
{
    double lt = std::log(static_cast<double>(T));
    double v = 1282.0 * std::pow(static_cast<double>(T), 0.75) * lt * lt;
    return {v, v >= static_cast<double>(T)};
}

} // namespace bilat
