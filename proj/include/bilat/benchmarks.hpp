#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bilat/core.hpp"

// Hindsight oracles.
//
// best_fixed_price: max_p sum_t GFT_t(p) for a single price posted to both
// sides. The objective is piecewise constant in p with inclusive jumps at the
// valuations, so the max is attained on the breakpoint set {0,1} u {s_t} u
// {b_t}; ties break to the smallest price.
//
// best_feasible_distribution: the best distribution over price pairs whose
// expected total revenue is nonnegative. Restricting support to the valuation
// grid G = {0,1,s_t} x {0,1,b_t} is lossless, and an optimum uses at most two
// support points: map each grid pair to (g, f) = (total REV, total GFT); the
// answer is the value at g >= 0 of the upper concave envelope of that cloud,
// i.e. either a single point with g >= 0 or a two-point mix of A (g_A > 0)
// and B (g_B < 0) weighted to make expected revenue exactly zero:
//   w_A = -g_B / (g_A - g_B),  value = w_A f_A + (1 - w_A) f_B.
// A hull walk finds the crossing edge; an O(M^2) pairwise scan is kept as a
// verification oracle.

namespace bilat
{

struct FixedPriceResult
{
    double price = 0.0;
    double value = 0.0;
};

inline std::vector<double> fixed_price_breakpoints(const ValuationSequence &seq)
{
    std::vector<double> bps{0.0, 1.0};
    bps.reserve(2 * seq.size() + 2);
    for (const Valuation &v : seq)
    {
        bps.push_back(v.s);
        bps.push_back(v.b);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

inline FixedPriceResult best_fixed_price(const ValuationSequence &seq)
{
    if (seq.empty())
        throw std::invalid_argument("best_fixed_price: empty sequence");
    FixedPriceResult best{0.0, -std::numeric_limits<double>::infinity()};
    for (double p : fixed_price_breakpoints(seq))
    {
        double total = 0.0;
        for (const Valuation &v : seq)
            if (v.s <= p && p <= v.b)
                total += v.b - v.s;
        if (total > best.value) // strict: ties keep the smallest price
        {
            best.price = p;
            best.value = total;
        }
    }
    return best;
}

enum class Objective
{
    gft,
    rev
};

struct GridPairResult
{
    PricePair pair;
    double value = 0.0;
};

inline GridPairResult best_pair_on_grid(const ValuationSequence &seq,
                                        const std::vector<PricePair> &pairs,
                                        Objective objective)
{
    if (pairs.empty())
        throw std::invalid_argument("best_pair_on_grid: empty grid");
    GridPairResult best{pairs.front(), -std::numeric_limits<double>::infinity()};
    for (const PricePair &pq : pairs)
    {
        double total = 0.0;
        for (const Valuation &v : seq)
            total += objective == Objective::gft ? gft(pq, v) : rev(pq, v);
        if (total > best.value) // pairs are pre-sorted lexicographically
        {
            best.pair = pq;
            best.value = total;
        }
    }
    return best;
}

struct MixedPriceStrategy
{
    std::vector<PricePair> support; // 1 or 2 pairs
    std::vector<double> weights;    // matching probabilities, sum to 1
    double value = 0.0;             // expected total GFT
    double expected_revenue = 0.0;  // expected total REV (>= 0 by feasibility)
};

namespace detail
{

struct CloudPoint
{
    double g; // total revenue of the pair over the sequence
    double f; // total GFT of the pair over the sequence
    PricePair pq;
};

inline std::vector<CloudPoint> valuation_grid_cloud(const ValuationSequence &seq)
{
    std::vector<double> ss{0.0, 1.0}, bs{0.0, 1.0};
    for (const Valuation &v : seq)
    {
        ss.push_back(v.s);
        bs.push_back(v.b);
    }
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    std::vector<CloudPoint> cloud;
    cloud.reserve(ss.size() * bs.size());
    for (double p : ss)
        for (double q : bs)
        {
            PricePair pq{p, q};
            double f = 0.0, g = 0.0;
            for (const Valuation &v : seq)
                if (trades(pq, v))
                {
                    f += v.b - v.s;
                    g += q - p;
                }
            cloud.push_back({g, f, pq});
        }
    return cloud;
}

inline MixedPriceStrategy mix_to_zero(const CloudPoint &a, const CloudPoint &b)
{
    // a.g > 0, b.g < 0; weights put expected revenue exactly at 0.
    double wa = -b.g / (a.g - b.g);
    double wb = 1.0 - wa;
    MixedPriceStrategy m;
    m.support = {a.pq, b.pq};
    m.weights = {wa, wb};
    m.value = wa * a.f + wb * b.f;
    m.expected_revenue = wa * a.g + wb * b.g;
    return m;
}

inline MixedPriceStrategy single(const CloudPoint &a)
{
    MixedPriceStrategy m;
    m.support = {a.pq};
    m.weights = {1.0};
    m.value = a.f;
    m.expected_revenue = a.g;
    return m;
}

} // namespace detail

inline MixedPriceStrategy best_feasible_distribution(const ValuationSequence &seq)
{
    if (seq.empty())
        throw std::invalid_argument("best_feasible_distribution: empty sequence");
    std::vector<detail::CloudPoint> cloud = detail::valuation_grid_cloud(seq);

    // Best single feasible point (covers every fixed price, which has g = 0).
    const detail::CloudPoint *best_single = nullptr;
    for (const detail::CloudPoint &c : cloud)
        if (c.g >= 0.0 && (!best_single || c.f > best_single->f))
            best_single = &c;
    MixedPriceStrategy best = detail::single(*best_single); // g=0 points always exist

    // Upper hull in the (g, f) plane; the edge crossing g = 0 (from g < 0 to
    // g > 0) is the only two-point mix that can beat every single point.
    std::sort(cloud.begin(), cloud.end(),
              [](const detail::CloudPoint &x, const detail::CloudPoint &y)
              { return x.g < y.g || (x.g == y.g && x.f < y.f); });
    std::vector<const detail::CloudPoint *> hull;
    for (const detail::CloudPoint &c : cloud)
    {
        while (hull.size() >= 2)
        {
            const detail::CloudPoint *u = hull[hull.size() - 2];
            const detail::CloudPoint *v = hull[hull.size() - 1];
            // pop v if it is under or on the segment u-c
            if ((v->f - u->f) * (c.g - u->g) <= (c.f - u->f) * (v->g - u->g))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(&c);
    }
    for (std::size_t i = 0; i + 1 < hull.size(); ++i)
    {
        const detail::CloudPoint *u = hull[i];
        const detail::CloudPoint *v = hull[i + 1];
        if (u->g < 0.0 && v->g > 0.0)
        {
            MixedPriceStrategy m = detail::mix_to_zero(*v, *u);
            if (m.value > best.value)
                best = m;
        }
    }
    return best;
}

// O(M^2) verification oracle: identical search space, pairwise scan.
inline MixedPriceStrategy best_feasible_distribution_bruteforce(const ValuationSequence &seq)
{
    if (seq.empty())
        throw std::invalid_argument("best_feasible_distribution_bruteforce: empty sequence");
    std::vector<detail::CloudPoint> cloud = detail::valuation_grid_cloud(seq);
    const detail::CloudPoint *best_single = nullptr;
    for (const detail::CloudPoint &c : cloud)
        if (c.g >= 0.0 && (!best_single || c.f > best_single->f))
            best_single = &c;
    MixedPriceStrategy best = detail::single(*best_single);
    for (const detail::CloudPoint &a : cloud)
    {
        if (a.g <= 0.0)
            continue;
        for (const detail::CloudPoint &b : cloud)
        {
            if (b.g >= 0.0)
                continue;
            MixedPriceStrategy m = detail::mix_to_zero(a, b);
            if (m.value > best.value)
                best = m;
        }
    }
    return best;
}

struct HindsightReport
{
    FixedPriceResult best_fixed;
    MixedPriceStrategy best_distribution;
    std::optional<double> ratio; // undefined when the fixed-price value is 0
};

inline HindsightReport hindsight_report(const ValuationSequence &seq)
{
    HindsightReport r;
    r.best_fixed = best_fixed_price(seq);
    r.best_distribution = best_feasible_distribution(seq);
    if (r.best_fixed.value > 0.0)
        r.ratio = r.best_distribution.value / r.best_fixed.value;
    return r;
}

// Benchmark value minus realized total GFT; alpha scales the algorithm side
// (alpha-regret), alpha = 1 gives plain regret.
inline double regret(double benchmark_value, double total_gft, double alpha = 1.0)
{
    return benchmark_value - alpha * total_gft;
}

} // namespace bilat
