// Payoff model, budget ledger, and feedback channel.

#include <doctest.h>

#include <variant>

#include "bilat/core.hpp"
#include "bilat/rng.hpp"

using namespace bilat;

TEST_SUITE_BEGIN("core");

TEST_CASE("gain from trade: indicators inclusive, ties trade")
{
    CHECK(gft({0.5, 0.5}, {0.3, 0.8}) == doctest::Approx(0.5));
    CHECK(gft({0.2, 0.5}, {0.3, 0.8}) == 0.0); // seller rejects
    CHECK(gft({0.9, 0.1}, {0.5, 0.5}) == 0.0); // trade happens, b - s = 0
    // boundary: s == p and q == b both accept
    CHECK(gft({0.3, 0.8}, {0.3, 0.8}) == doctest::Approx(0.5));
}

TEST_CASE("revenue: spread collected only when the trade occurs")
{
    CHECK(rev({0.9, 0.1}, {0.5, 0.5}) == doctest::Approx(-0.8));
    CHECK(rev({0.5, 0.5}, {0.3, 0.8}) == 0.0); // single price: zero revenue
    CHECK(rev({0.5, 0.5}, {0.9, 0.1}) == 0.0);
    CHECK(rev({0.25, 0.5}, {0.2, 0.7}) == doctest::Approx(0.25));
}

TEST_CASE("negative gain implies inverted valuations")
{
    Rng rng(11);
    for (int i = 0; i < 2000; ++i)
    {
        PricePair pq{uniform01(rng), uniform01(rng)};
        Valuation v{uniform01(rng), uniform01(rng)};
        double g = gft(pq, v);
        if (g < 0.0)
            CHECK(v.s > v.b);
        if (rev(pq, v) != 0.0)
            CHECK(g == v.b - v.s);
        // single price: trade iff s <= x <= b, revenue always zero
        double x = uniform01(rng);
        CHECK(rev({x, x}, v) == 0.0);
        double expect = (v.s <= x && x <= v.b) ? v.b - v.s : 0.0;
        CHECK(gft({x, x}, v) == expect);
    }
}

TEST_CASE("validation rejects out-of-range coordinates")
{
    CHECK_THROWS_AS(validate(Valuation{-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Valuation{0.5, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PricePair{2.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(validate(Valuation{0.9, 0.1})); // s > b is allowed
}

TEST_CASE("budget ledger: feasibility is an exact comparison")
{
    BudgetLedger ledger;
    ledger.add(0.2);
    CHECK(feasible({0.6, 0.5}, ledger));
    BudgetLedger tight;
    tight.add(0.05);
    CHECK_FALSE(feasible({0.6, 0.5}, tight));
    BudgetLedger zero;
    CHECK(feasible({0.3, 0.7}, zero)); // q >= p always feasible
    // exact boundary: deficit equal to the budget is allowed
    BudgetLedger exact;
    exact.add(0.25);
    CHECK(feasible({0.75, 0.5}, exact));
}

TEST_CASE("budget ledger: compensated sum matches exact accumulation")
{
    // Sum many values whose naive float sum drifts; compare against a
    // long-double reference.
    BudgetLedger ledger;
    long double reference = 0.0L;
    Rng rng(7);
    for (int i = 0; i < 1000000; ++i)
    {
        double r = (uniform01(rng) - 0.5) * 0.02; // small signed revenues
        ledger.add(r);
        reference += static_cast<long double>(r);
    }
    CHECK(std::abs(ledger.current() - static_cast<double>(reference)) < 1e-9);
    CHECK(ledger.rounds() == 1000000u);
}

TEST_CASE("feedback channels")
{
    Feedback fb = observe({0.5, 0.5}, {0.3, 0.4}, FeedbackModel::two_bit);
    auto two = std::get<TwoBitFeedback>(fb);
    CHECK(two.seller_accepts);
    CHECK_FALSE(two.buyer_accepts);

    fb = observe({0.5, 0.5}, {0.3, 0.8}, FeedbackModel::one_bit);
    CHECK(std::get<OneBitFeedback>(fb).trade_happened);

    fb = observe({0.1, 0.9}, {0.3, 0.8}, FeedbackModel::full);
    auto full = std::get<FullFeedback>(fb);
    CHECK(full.s == 0.3);
    CHECK(full.b == 0.8);

    // one-bit is the product of the two-bit indicators
    Rng rng(3);
    for (int i = 0; i < 500; ++i)
    {
        PricePair pq{uniform01(rng), uniform01(rng)};
        Valuation v{uniform01(rng), uniform01(rng)};
        auto tb = std::get<TwoBitFeedback>(observe(pq, v, FeedbackModel::two_bit));
        auto ob = std::get<OneBitFeedback>(observe(pq, v, FeedbackModel::one_bit));
        CHECK(ob.trade_happened == (tb.seller_accepts && tb.buyer_accepts));
    }
}

TEST_SUITE_END();
