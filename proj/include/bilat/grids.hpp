#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "bilat/benchmarks.hpp"
#include "bilat/core.hpp"

// Price discretizations and their gap guarantees.
//
// Three grids over [0,1]:
//   uniform_grid(K)    G_K: diagonal pairs (i/K, i/K), i = 0..K.
//   adjacent_pairs(K)  H_K: pairs ((i+1)/K, i/K), i = 0..K-1. Posting one of
//                      these runs a deficit of exactly 1/K when it trades.
//   revenue_grid(K,T)  F_K: pairs (x - 2^-i, x) and (x, x + 2^-i) for x in
//                      G_K and i = 0..floor(log2 T), clipped to [0,1]^2.
//                      Every pair has q >= p, so revenue is never negative.
//
// The gap reports check the discretization guarantees on a concrete sequence:
//   additive:        max_p sum GFT_t(p) <= max_{H_K} sum GFT_t + T/K,
//                    and min_{H_K} sum REV_t >= -T/K.
//   doubled-price:   max_p sum GFT_t(p) <= 2 max_{G_K} sum GFT_t + T/K.
//   multiplicative:  max_p sum GFT_t(p) <= 8 log(T) max_{F_K} sum REV_t + 5T/K.
// The log base in the multiplicative bound is not fixed by the guarantee's
// statement; reports carry both the natural-log and the base-2 value.

namespace bilat
{

enum class GridKind
{
    uniform,
    adjacent_pairs,
    revenue
};

struct PriceGrid
{
    GridKind kind;
    int K = 0;
    long T = 0; // only meaningful for the revenue grid
    std::vector<PricePair> points;

    std::size_t size() const { return points.size(); }
};

inline PriceGrid uniform_grid(int K)
{
    if (K < 1)
        throw std::invalid_argument("uniform_grid: K must be >= 1");
    PriceGrid g{GridKind::uniform, K, 0, {}};
    g.points.reserve(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i)
    {
        double x = static_cast<double>(i) / K;
        g.points.push_back({x, x});
    }
    return g;
}

inline PriceGrid adjacent_pairs(int K)
{
    if (K < 1)
        throw std::invalid_argument("adjacent_pairs: K must be >= 1");
    PriceGrid g{GridKind::adjacent_pairs, K, 0, {}};
    g.points.reserve(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
    {
        g.points.push_back({static_cast<double>(i + 1) / K, static_cast<double>(i) / K});
    }
    return g;
}

inline int floor_log2(long T)
{
    if (T < 1)
        throw std::invalid_argument("floor_log2: T must be >= 1");
    int e = 0;
    while ((T >> (e + 1)) > 0)
        ++e;
    return e;
}

inline PriceGrid revenue_grid(int K, long T)
{
    if (K < 1)
        throw std::invalid_argument("revenue_grid: K must be >= 1");
    if (T < 2)
        throw std::invalid_argument("revenue_grid: T must be >= 2");
    PriceGrid g{GridKind::revenue, K, T, {}};
    int imax = floor_log2(T);
    for (int j = 0; j <= K; ++j)
    {
        double x = static_cast<double>(j) / K;
        for (int i = 0; i <= imax; ++i)
        {
            double d = std::ldexp(1.0, -i);
            if (x - d >= 0.0)
                g.points.push_back({x - d, x});
            if (x + d <= 1.0)
                g.points.push_back({x, x + d});
        }
    }
    // Pairs generated from different anchors can coincide (e.g. K=2: (0,0.5)
    // arises from x=0 side +1 and from x=0.5 side -1). Coinciding pairs are
    // built from identical anchor doubles and identical dyadic offsets, so
    // they are bit-equal and exact comparison is a sound dedup key.
    std::sort(g.points.begin(), g.points.end(),
              [](const PricePair &a, const PricePair &b)
              { return std::tie(a.p, a.q) < std::tie(b.p, b.q); });
    g.points.erase(std::unique(g.points.begin(), g.points.end(),
                               [](const PricePair &a, const PricePair &b)
                               { return a.p == b.p && a.q == b.q; }),
                   g.points.end());
    return g;
}

struct DiscretizationReport
{
    double lhs = 0.0;   // best-fixed-price total GFT
    double rhs = 0.0;   // grid-side bound value (asserted form)
    double slack = 0.0; // rhs - lhs
    int K = 0;
    long T = 0;
    bool holds = false;
    // Multiplicative report only: the bound under the alternate log base.
    double rhs_log2 = 0.0;
    bool holds_log2 = false;
};

// max over a pair set of the summed per-round payoff.
template <typename Payoff>
inline double best_grid_total(const PriceGrid &grid, const ValuationSequence &seq, Payoff payoff)
{
    double best = -static_cast<double>(seq.size()) - 1.0;
    for (const PricePair &pq : grid.points)
    {
        double total = 0.0;
        for (const Valuation &v : seq)
            total += payoff(pq, v);
        best = std::max(best, total);
    }
    return best;
}

inline double min_grid_total_rev(const PriceGrid &grid, const ValuationSequence &seq)
{
    double worst = static_cast<double>(seq.size()) + 1.0;
    for (const PricePair &pq : grid.points)
    {
        double total = 0.0;
        for (const Valuation &v : seq)
            total += rev(pq, v);
        worst = std::min(worst, total);
    }
    return worst;
}

inline DiscretizationReport additive_gap_report(const ValuationSequence &seq, int K)
{
    if (seq.empty())
        throw std::invalid_argument("additive_gap_report: empty sequence");
    long T = static_cast<long>(seq.size());
    PriceGrid h = adjacent_pairs(K);
    DiscretizationReport r;
    r.K = K;
    r.T = T;
    r.lhs = best_fixed_price(seq).value;
    double grid_best = best_grid_total(h, seq, [](const PricePair &pq, const Valuation &v)
                                       { return gft(pq, v); });
    r.rhs = grid_best + static_cast<double>(T) / K;
    r.slack = r.rhs - r.lhs;
    // The adjacent-pair deficit (i/K - (i+1)/K) is not exactly -1/K in
    // floating point, so the revenue floor carries a small absolute slack.
    double worst_rev = min_grid_total_rev(h, seq);
    r.holds = r.lhs <= r.rhs && worst_rev >= -static_cast<double>(T) / K - 1e-9;
    return r;
}

inline DiscretizationReport doubled_price_gap_report(const ValuationSequence &seq, int K)
{
    if (seq.empty())
        throw std::invalid_argument("doubled_price_gap_report: empty sequence");
    long T = static_cast<long>(seq.size());
    PriceGrid g = uniform_grid(K);
    DiscretizationReport r;
    r.K = K;
    r.T = T;
    r.lhs = best_fixed_price(seq).value;
    double grid_best = best_grid_total(g, seq, [](const PricePair &pq, const Valuation &v)
                                       { return gft(pq, v); });
    r.rhs = 2.0 * grid_best + static_cast<double>(T) / K;
    r.slack = r.rhs - r.lhs;
    r.holds = r.lhs <= r.rhs;
    return r;
}

inline DiscretizationReport multiplicative_gap_report(const ValuationSequence &seq, int K, long T)
{
    if (seq.empty())
        throw std::invalid_argument("multiplicative_gap_report: empty sequence");
    if (K > T)
        throw std::invalid_argument("multiplicative_gap_report: K must be <= T");
    PriceGrid f = revenue_grid(K, T);
    DiscretizationReport r;
    r.K = K;
    r.T = T;
    r.lhs = best_fixed_price(seq).value;
    double best_rev = best_grid_total(f, seq, [](const PricePair &pq, const Valuation &v)
                                      { return rev(pq, v); });
    double tk = 5.0 * static_cast<double>(T) / K;
    r.rhs = 8.0 * std::log(static_cast<double>(T)) * best_rev + tk;
    r.rhs_log2 = 8.0 * std::log2(static_cast<double>(T)) * best_rev + tk;
    r.slack = r.rhs - r.lhs;
    r.holds = r.lhs <= r.rhs;
    r.holds_log2 = r.lhs <= r.rhs_log2;
    return r;
}

} // namespace bilat
