#include <doctest.h>

#include <cmath>
#include <map>

#include "bilat/adversaries.hpp"
#include "bilat/benchmarks.hpp"
#include "bilat/rng.hpp"

using namespace bilat;

TEST_SUITE("adversaries")
{
    TEST_CASE("iid sampling from a point mass and validation")
    {
        FiniteValuationDistribution pm{{{0.3, 0.7}}, {1.0}};
        Rng rng(1);
        ValuationSequence seq = iid_sequence(pm, 5, rng);
        REQUIRE(seq.size() == 5);
        for (const Valuation &v : seq)
        {
            CHECK(v.s == 0.3);
            CHECK(v.b == 0.7);
        }

        FiniteValuationDistribution bad{{{0.3, 0.7}}, {0.5}};
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        FiniteValuationDistribution bad2{{{0.3, 1.7}}, {1.0}};
        CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
        FiniteValuationDistribution bad3{{}, {}};
        CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);
    }

    TEST_CASE("iid sampling hits empirical frequencies (chi-square style, 4 sigma)")
    {
        FiniteValuationDistribution d{
            {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}}, {0.5, 0.3, 0.2}};
        Rng rng(20240822);
        const long T = 100000;
        ValuationSequence seq = iid_sequence(d, T, rng);
        std::map<double, long> counts;
        for (const Valuation &v : seq)
            ++counts[v.s];
        for (std::size_t i = 0; i < d.probs.size(); ++i)
        {
            double p = d.probs[i];
            double se = std::sqrt(p * (1.0 - p) * T);
            CHECK(std::abs(counts[d.support[i].s] - p * T) <= 4.0 * se);
        }
    }

    TEST_CASE("seeded generators are deterministic")
    {
        Rng a(42), b(42);
        ValuationSequence s1 = iid_uniform_sequence(100, a);
        ValuationSequence s2 = iid_uniform_sequence(100, b);
        REQUIRE(s1.size() == s2.size());
        for (std::size_t i = 0; i < s1.size(); ++i)
        {
            CHECK(s1[i].s == s2[i].s);
            CHECK(s1[i].b == s2[i].b);
        }
        CHECK_THROWS_AS(iid_uniform_sequence(-1, a), std::invalid_argument);
    }

    TEST_CASE("three-point hard instance: support and closed-form expected gain")
    {
        FiniteValuationDistribution d = full_lb_distribution();
        d.validate();
        REQUIRE(d.support.size() == 3);
        CHECK(d.probs[0] == doctest::Approx(1.0 / 3.0));

        // Four indicator cases.
        CHECK(full_lb_expected_gft({0.5, 0.5}) == doctest::Approx(0.0));
        CHECK(full_lb_expected_gft({0.1, 0.2}) == doctest::Approx(1.0 / 12.0));
        CHECK(full_lb_expected_gft({0.8, 0.9}) == doctest::Approx(1.0 / 12.0));
        CHECK(full_lb_expected_gft({0.8, 0.2}) == doctest::Approx(0.0));
        CHECK(full_lb_round_ceiling() == doctest::Approx(1.0 / 12.0));

        // The ceiling really is a ceiling over a dense scan of pairs.
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j)
                CHECK(full_lb_expected_gft({i / 20.0, j / 20.0}) <=
                      full_lb_round_ceiling() + 1e-15);
    }

    TEST_CASE("alternating-gap sequence: exact layout and input checks")
    {
        ValuationSequence seq = benchmark_gap_sequence(0.05, 4);
        REQUIRE(seq.size() == 4);
        CHECK(seq[0].s == 0.0);
        CHECK(seq[0].b == doctest::Approx(0.45));
        CHECK(seq[1].s == doctest::Approx(0.55));
        CHECK(seq[1].b == 1.0);
        CHECK(seq[2].s == seq[0].s);
        CHECK(seq[3].b == seq[1].b);

        CHECK_THROWS_AS(benchmark_gap_sequence(0.05, 5), std::invalid_argument);
        CHECK_THROWS_AS(benchmark_gap_sequence(0.2, 4), std::invalid_argument);
        CHECK_THROWS_AS(benchmark_gap_sequence(0.0, 4), std::invalid_argument);
    }

    TEST_CASE("paired sequences share a prefix and split after halfway")
    {
        Rng rng(20240823);
        const long T = 40;
        auto [s1, s2] = alpha_lb_sequences(T, rng);
        REQUIRE(s1.size() == static_cast<std::size_t>(T));
        REQUIRE(s2.size() == static_cast<std::size_t>(T));
        for (long t = 0; t < T / 2; ++t)
        {
            CHECK(s1[t].s == s2[t].s);
            CHECK(s1[t].b == s2[t].b);
            bool low = s1[t].s == 0.0 && s1[t].b == doctest::Approx(1.0 / 3.0);
            bool high = s1[t].s == doctest::Approx(2.0 / 3.0) && s1[t].b == 1.0;
            CHECK((low || high));
        }
        long low_count = 0;
        for (long t = 0; t < T / 2; ++t)
            low_count += s1[t].s == 0.0 ? 1 : 0;
        Valuation mode = (2 * low_count >= T / 2) ? Valuation{0.0, 1.0 / 3.0}
                                                  : Valuation{2.0 / 3.0, 1.0};
        for (long t = T / 2; t < T; ++t)
        {
            CHECK(s1[t].s == 0.0);
            CHECK(s1[t].b == 0.0);
            CHECK(s2[t].s == mode.s);
            CHECK(s2[t].b == mode.b);
        }
        CHECK_THROWS_AS(alpha_lb_sequences(10, rng), std::invalid_argument);
    }

    TEST_CASE("reference mixture on the mode-continuation sequence")
    {
        // Mix 4/7 on the mode pair (s_hat, b_hat) and 3/7 on (2/3, 1/3).
        // Against S2 this earns expected GFT >= (1/3)(4/7)(3T/2) = 2T/7 and
        // keeps expected revenue nonnegative. Verified in exact rationals over
        // the realized sequence, conditioning out sampling noise via counts.
        Rng rng(7);
        const long T = 400;
        auto [s1, s2] = alpha_lb_sequences(T, rng);
        (void)s1;
        long low_count = 0;
        for (long t = 0; t < T / 2; ++t)
            low_count += s2[t].s == 0.0 ? 1 : 0;
        bool mode_low = 2 * low_count >= T / 2;
        Rational third(1, 3);
        Rational mode_s = mode_low ? Rational(0) : 2 * third;
        Rational mode_b = mode_low ? third : Rational(1);
        Rational w1(4, 7), w2(3, 7);

        auto exact_payoffs = [&](Rational p, Rational q) {
            Rational gft_sum = 0, rev_sum = 0;
            for (const Valuation &v : s2)
            {
                Rational s = v.s == 0.0 ? Rational(0)
                             : v.s < 0.5 ? third
                                         : 2 * third;
                Rational b = v.b == 0.0 ? Rational(0)
                             : v.b < 0.5 ? third
                                         : Rational(1);
                if (s <= p && q <= b)
                {
                    gft_sum += b - s;
                    rev_sum += q - p;
                }
            }
            return std::pair<Rational, Rational>{gft_sum, rev_sum};
        };
        auto [g1, r1] = exact_payoffs(mode_s, mode_b);
        auto [g2, r2] = exact_payoffs(2 * third, third);
        Rational egft = w1 * g1 + w2 * g2;
        Rational erev = w1 * r1 + w2 * r2;
        CHECK(erev >= 0);
        // The mode valuation appears in at least half of the first half and
        // in all of the second half; each such round is worth 1/3 under the
        // mode pair.
        CHECK(egft >= Rational(2 * T, 7) - Rational(1)); // integer-count slack
    }

    TEST_CASE("two-bit family parameters: invariants and rejections")
    {
        CHECK_THROWS_AS(TwoBitLBParams(32, 0), std::invalid_argument);
        CHECK_THROWS_AS(TwoBitLBParams(64, -1), std::invalid_argument);
        CHECK_THROWS_AS(TwoBitLBParams(64, 64), std::invalid_argument);
        CHECK_THROWS_AS(TwoBitLBParams(64, 63), std::invalid_argument);
        CHECK_THROWS_AS(TwoBitLBParams(64, 1, Rational(1, 2)),
                        std::invalid_argument);

        TwoBitLBParams p(64, 3);
        CHECK(p.l == Rational(1, 12));
        CHECK(p.rho == Rational(1, 32));
        CHECK(p.Delta == Rational(1, 12 * 63));
        CHECK(p.delta == Rational(1, 24 * 63));
        CHECK(p.gamma1 == Rational(1, 64 * 64 * 64));
        CHECK(p.epsilon == p.gamma1 / 2);
        CHECK(p.gamma5 == Rational(1, 64));
        CHECK(p.gamma4 == 4 * p.gamma1 * (13 * 64 - 14));
        CHECK(p.gamma6 >= Rational(1, 32));
        for (const Rational &g : p.gamma3)
        {
            CHECK(g > 0);
            CHECK(g < 2 * p.gamma1);
        }

        for (long N : {33L, 50L, 100L, 256L})
        {
            TwoBitLBParams q(N, 1);
            CHECK(q.gamma6 >= Rational(1, 32));
        }
    }

    TEST_CASE("two-bit family masses on concrete instances")
    {
        // N = 64: gamma1 = 1/262144 ~= 3.8147e-6. In instance k = 3 the
        // ladder point w1_3 gains epsilon = gamma1/2 and w2_3 loses it.
        TwoBitLBParams base(64, 0);
        TwoBitLBParams inst(64, 3);
        auto pb = detail::twobit_lb_support(base);
        auto pi = detail::twobit_lb_support(inst);
        REQUIRE(pb.size() == pi.size());
        CHECK(pb[3].mass == base.gamma1);
        CHECK(static_cast<double>(base.gamma1) ==
              doctest::Approx(3.81469726562e-6));
        CHECK(pi[3].mass == inst.gamma1 + inst.epsilon);
        CHECK(pi[4].mass == inst.gamma1 - inst.epsilon);
        CHECK(pi[64 + 3].mass == inst.gamma1 - inst.epsilon);
        CHECK(pi[64 + 4].mass == inst.gamma1 + inst.epsilon);
        // All other masses coincide with the base instance.
        for (std::size_t i = 0; i < pb.size(); ++i)
        {
            if (i == 3 || i == 4 || i == 64 + 3 || i == 64 + 4)
                continue;
            CHECK(pb[i].mass == pi[i].mass);
        }

        FiniteValuationDistribution d = twobit_lb_distribution(inst);
        d.validate();
        CHECK(d.support.size() == 4 * 64 + 5);
    }

    TEST_CASE("two-bit structure report certifies a perturbed instance")
    {
        TwoBitLBParams p(64, 1);
        TwoBitLBStructureReport rep = twobit_lb_structure_report(p);
        CHECK(rep.valid_distribution);
        CHECK(rep.argmax_ok);
        CHECK(rep.lower_triangle_dominated);
        CHECK(rep.exploration_cost_ok);
        CHECK(rep.feedback_equality_ok);
        CHECK(rep.all_hold());
        CHECK(rep.best_value - rep.second_value >=
              rep.required_margin * (1.0 - 1e-9));
    }

    TEST_CASE("two-bit structure report on the base instance: flat plateau, no bonus")
    {
        TwoBitLBParams p(64, 0);
        TwoBitLBStructureReport rep = twobit_lb_structure_report(p);
        CHECK(rep.all_hold());
        CHECK(rep.best_value == doctest::Approx(rep.plateau_value));
    }
}
