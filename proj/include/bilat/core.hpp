#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Payoff model for repeated bilateral trade with posted prices.
//
// Each round a seller with valuation s and a buyer with valuation b arrive.
// The learner posts a price p to the seller and q to the buyer. The trade
// happens iff s <= p and q <= b (both comparisons inclusive; ties trade).
// When the trade happens:
//   gain from trade  GFT = b - s      (can be negative when s > b)
//   learner revenue  REV = q - p      (negative when the pair runs a deficit)
// The cumulative revenue B_t is the learner's budget; the protocol requires
// p - q <= B_{t-1} at every round (global budget balance at the end follows
// from B_T >= 0).

namespace bilat
{

struct Valuation
{
    double s = 0.0; // seller valuation in [0,1]
    double b = 0.0; // buyer valuation in [0,1]; s > b is allowed
};

struct PricePair
{
    double p = 0.0; // price posted to the seller, in [0,1]
    double q = 0.0; // price posted to the buyer, in [0,1]
};

inline void validate_unit(double x, const char *what)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must be in [0,1]");
}

inline void validate(const Valuation &v)
{
    validate_unit(v.s, "seller valuation");
    validate_unit(v.b, "buyer valuation");
}

inline void validate(const PricePair &pq)
{
    validate_unit(pq.p, "seller price");
    validate_unit(pq.q, "buyer price");
}

// 1{s <= p} * 1{q <= b}
inline bool trades(const PricePair &pq, const Valuation &v)
{
    return v.s <= pq.p && pq.q <= v.b;
}

// Gain from trade: 1{s <= p} * 1{q <= b} * (b - s), in [-1, 1].
inline double gft(const PricePair &pq, const Valuation &v)
{
    return trades(pq, v) ? (v.b - v.s) : 0.0;
}

// Learner revenue: 1{s <= p} * 1{q <= b} * (q - p), in [-1, 1].
inline double rev(const PricePair &pq, const Valuation &v)
{
    return trades(pq, v) ? (pq.q - pq.p) : 0.0;
}

// Cumulative-revenue ledger using Kahan-compensated summation so that
// B_T >= 0 assertions are not polluted by float drift over long horizons.
class BudgetLedger
{
public:
    BudgetLedger() = default;

    void add(double revenue)
    {
        double y = revenue - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
        history_.push_back(revenue);
    }

    double current() const { return sum_; }
    const std::vector<double> &history() const { return history_; }
    std::size_t rounds() const { return history_.size(); }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::vector<double> history_;
};

// Feasibility: the protocol allows posting (p,q) only when the potential
// deficit p - q is covered by the current budget. Exact comparison, no slack:
// an infeasible post is a bug in the caller, never silently clamped.
inline bool feasible(const PricePair &pq, const BudgetLedger &ledger)
{
    return pq.p - pq.q <= ledger.current();
}

enum class FeedbackModel
{
    full,
    two_bit,
    one_bit
};

struct FullFeedback
{
    double s;
    double b;
};

struct TwoBitFeedback
{
    bool seller_accepts; // 1{s <= p}
    bool buyer_accepts;  // 1{q <= b}
};

struct OneBitFeedback
{
    bool trade_happened; // product of the two bits
};

using Feedback = std::variant<FullFeedback, TwoBitFeedback, OneBitFeedback>;

inline Feedback observe(const PricePair &pq, const Valuation &v, FeedbackModel model)
{
    switch (model)
    {
    case FeedbackModel::full:
        return FullFeedback{v.s, v.b};
    case FeedbackModel::two_bit:
        return TwoBitFeedback{v.s <= pq.p, pq.q <= v.b};
    case FeedbackModel::one_bit:
        return OneBitFeedback{trades(pq, v)};
    }
    throw std::logic_error("unknown feedback model");
}

using ValuationSequence = std::vector<Valuation>;

} // namespace bilat
