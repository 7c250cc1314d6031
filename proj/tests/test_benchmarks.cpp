#include <doctest.h>

#include <cmath>
#include <vector>

#include "bilat/adversaries.hpp"
#include "bilat/benchmarks.hpp"
#include "bilat/grids.hpp"
#include "bilat/rng.hpp"

using namespace bilat;

namespace
{
ValuationSequence random_sequence(Rng &rng, long T)
{
    ValuationSequence seq;
    seq.reserve(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t)
        seq.push_back({uniform01(rng), uniform01(rng)});
    return seq;
}
} // namespace

TEST_SUITE("benchmarks")
{
    TEST_CASE("best fixed price on hand-checked sequences")
    {
        // Single round (0.2, 0.8): every price in [0.2, 0.8] earns 0.6; ties
        // break to the smallest breakpoint, which is s = 0.2.
        FixedPriceResult r1 = best_fixed_price({{0.2, 0.8}});
        CHECK(r1.price == doctest::Approx(0.2));
        CHECK(r1.value == doctest::Approx(0.6));

        // Two disjoint trading windows: [0.1,0.3] worth 0.2, [0.6,0.9] worth
        // 0.3; the second window wins.
        FixedPriceResult r2 = best_fixed_price({{0.1, 0.3}, {0.6, 0.9}});
        CHECK(r2.price == doctest::Approx(0.6));
        CHECK(r2.value == doctest::Approx(0.3));

        // No round can trade: value 0, smallest breakpoint 0 wins the tie.
        FixedPriceResult r3 = best_fixed_price({{0.9, 0.1}, {0.7, 0.2}});
        CHECK(r3.price == 0.0);
        CHECK(r3.value == 0.0);

        CHECK_THROWS_AS(best_fixed_price({}), std::invalid_argument);
    }

    TEST_CASE("best fixed price dominates every off-grid price")
    {
        Rng rng(20240819);
        for (int rep = 0; rep < 50; ++rep)
        {
            ValuationSequence seq = random_sequence(rng, 30);
            FixedPriceResult best = best_fixed_price(seq);
            for (int i = 0; i <= 100; ++i)
            {
                double p = i / 100.0;
                double total = 0.0;
                for (const Valuation &v : seq)
                    if (v.s <= p && p <= v.b)
                        total += v.b - v.s;
                CHECK(total <= best.value + 1e-12);
            }
        }
    }

    TEST_CASE("best pair on a grid matches a direct scan")
    {
        Rng rng(2);
        ValuationSequence seq = random_sequence(rng, 25);
        PriceGrid h = adjacent_pairs(6);
        GridPairResult g = best_pair_on_grid(seq, h.points, Objective::gft);
        for (const PricePair &pq : h.points)
        {
            double total = 0.0;
            for (const Valuation &v : seq)
                total += gft(pq, v);
            CHECK(total <= g.value + 1e-12);
        }
        CHECK_THROWS_AS(best_pair_on_grid(seq, {}, Objective::rev), std::invalid_argument);
    }

    TEST_CASE("feasible distribution: hull walk agrees with the pairwise oracle")
    {
        Rng rng(20240820);
        for (int rep = 0; rep < 100; ++rep)
        {
            long T = 2 + static_cast<long>(rng() % 11); // up to 12 rounds
            ValuationSequence seq = random_sequence(rng, T);
            MixedPriceStrategy fast = best_feasible_distribution(seq);
            MixedPriceStrategy slow = best_feasible_distribution_bruteforce(seq);
            CHECK(fast.value == doctest::Approx(slow.value).epsilon(1e-9));
            CHECK(fast.expected_revenue >= -1e-12);
            double wsum = 0.0;
            for (double w : fast.weights)
                wsum += w;
            CHECK(wsum == doctest::Approx(1.0));
        }
    }

    TEST_CASE("distribution-vs-fixed-price ratio never exceeds two")
    {
        Rng rng(20240821);
        for (int rep = 0; rep < 200; ++rep)
        {
            long T = 2 + static_cast<long>(rng() % 40);
            ValuationSequence seq = random_sequence(rng, T);
            HindsightReport r = hindsight_report(seq);
            CHECK(r.best_distribution.value >= r.best_fixed.value - 1e-12);
            if (r.ratio)
                CHECK(*r.ratio <= 2.0 + 1e-9);
        }
    }

    TEST_CASE("alternating-gap sequence: exact values and a ratio approaching two")
    {
        for (double eps : {0.1, 0.05, 0.01})
        {
            const long T = 40;
            ValuationSequence seq = benchmark_gap_sequence(eps, T);
            HindsightReport r = hindsight_report(seq);
            // No single price can serve both valuation clusters: the best
            // fixed price trades only in the T/2 rounds of one cluster, each
            // worth 1/2 - eps.
            CHECK(r.best_fixed.value ==
                  doctest::Approx((T / 2) * (0.5 - eps)));
            REQUIRE(r.ratio.has_value());
            CHECK(*r.ratio >= 2.0 - 8.0 * eps - 1e-9);
            CHECK(*r.ratio <= 2.0 + 1e-9);
        }
    }

    TEST_CASE("the near-optimal mixture on the gap sequence has zero expected revenue")
    {
        // Mixing (1/2 + eps, 1/2 - eps) with weight a = (1-2e)/(1+6e) and
        // (0, 1/2 - eps) with weight 1 - a makes expected revenue exactly 0:
        // the first pair loses 2e per trading round, the second gains
        // (1/2 - eps) in half the rounds.
        const double eps = 0.05;
        const long T = 40;
        ValuationSequence seq = benchmark_gap_sequence(eps, T);
        double a = (1.0 - 2.0 * eps) / (1.0 + 6.0 * eps);
        PricePair wide{0.5 + eps, 0.5 - eps};
        PricePair low{0.0, 0.5 - eps};
        double rev_total = 0.0, gft_total = 0.0;
        for (const Valuation &v : seq)
        {
            rev_total += a * rev(wide, v) + (1.0 - a) * rev(low, v);
            gft_total += a * gft(wide, v) + (1.0 - a) * gft(low, v);
        }
        CHECK(std::abs(rev_total) <= 1e-9);
        double fixed = best_fixed_price(seq).value;
        CHECK(gft_total / fixed >=
              doctest::Approx((2.0 + 4.0 * eps) / (1.0 + 6.0 * eps)).epsilon(1e-9));
    }

    TEST_CASE("ratio is undefined when the fixed-price benchmark is zero")
    {
        ValuationSequence seq{{0.9, 0.1}, {0.8, 0.2}};
        HindsightReport r = hindsight_report(seq);
        CHECK(r.best_fixed.value == 0.0);
        CHECK_FALSE(r.ratio.has_value());
    }

    TEST_CASE("regret helper")
    {
        CHECK(regret(10.0, 7.0) == doctest::Approx(3.0));
        CHECK(regret(10.0, 7.0, 0.5) == doctest::Approx(6.5));
        CHECK(regret(5.0, 8.0) == doctest::Approx(-3.0));
    }
}
