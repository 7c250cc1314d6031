#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bilat/core.hpp"
#include "bilat/rng.hpp"

// Regret-minimizer primitives.
//
// Hedge: full-feedback exponential weights. Weights are kept in log space
// (cumulative rescaled reward times the learning rate) so horizons of 10^6
// rounds neither overflow nor underflow. Rewards declared in [lo,hi] are
// affinely mapped to [0,1] before the update.
//
// EXP3.P: adversarial bandit with high-probability guarantees (Auer et al.
// 2002 parameterization). Sampling mixes a gamma-uniform floor, and the
// importance-weighted estimate carries the optimistic beta bonus:
//   ghat_i = (g_i 1{I=i} + beta) / p_i.
//
// GftEstimator: unbiased-up-to-2/K one-bit estimate of GFT(p + 1/K, p).
// With probability (p + 1/K)/(1 + 1/K) it posts (ptilde, p) with
// ptilde ~ U[0, p + 1/K] and records 1{s <= ptilde} 1{p <= b}; otherwise it
// posts (p, ptilde) with ptilde ~ U[p, 1] and records
// 1{s <= p + 1/K} 1{ptilde <= b} (the seller indicator at p + 1/K, not at the
// posted p, is what makes the two branches telescope to the closed form
// below; with 1{s <= p} the bias bound fails for s in (p, p + 1/K]).
// Closed-form mean: (b - s + 1/K)/(1 + 1/K) * 1{s <= p + 1/K} * 1{p <= b}.
//
// BlockLearner: converts full-feedback Hedge over the adjacent-pairs grid
// into a one-bit learner. The horizon is split into N blocks; each block
// dedicates |H_K| uniformly drawn rounds (a random bijection) to one
// estimator probe per grid pair, plays the current Hedge distribution on the
// rest, and feeds the assembled reward vector to Hedge at block end.

namespace bilat
{

struct ActionDistribution
{
    std::vector<double> weights; // nonnegative, sums to 1
};

class Hedge
{
public:
    // eta_scale multiplies the default rate sqrt(ln n / T); the anytime flag
    // switches to the horizon-free schedule eta_t = scale * sqrt(ln n / t).
    Hedge(std::size_t n, long T, double lo, double hi, double eta_scale = 1.0,
          bool anytime = false)
        : n_(n), lo_(lo), hi_(hi), scale_(eta_scale), anytime_(anytime), score_(n, 0.0)
    {
        if (n_ < 1)
            throw std::invalid_argument("Hedge: need at least one action");
        if (T < 1)
            throw std::invalid_argument("Hedge: T must be >= 1");
        if (!(lo_ < hi_))
            throw std::invalid_argument("Hedge: degenerate reward range");
        double logn = std::log(static_cast<double>(std::max<std::size_t>(n_, 2)));
        eta_ = scale_ * std::sqrt(logn / static_cast<double>(T));
        logn_ = logn;
    }

    std::size_t actions() const { return n_; }
    double eta() const { return eta_; }

    ActionDistribution recommend() const
    {
        ActionDistribution d;
        d.weights.resize(n_);
        double m = *std::max_element(score_.begin(), score_.end());
        double total = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
        {
            d.weights[i] = std::exp(score_[i] - m);
            total += d.weights[i];
        }
        for (double &w : d.weights)
            w /= total;
        return d;
    }

    std::size_t sample(Rng &rng) const
    {
        scratch_.resize(n_);
        double m = *std::max_element(score_.begin(), score_.end());
        double total = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
        {
            scratch_[i] = std::exp(score_[i] - m);
            total += scratch_[i];
        }
        return sample_index(rng, scratch_, total);
    }

    void update(const std::vector<double> &rewards)
    {
        if (rewards.size() != n_)
            throw std::invalid_argument("Hedge: reward vector length mismatch");
        ++updates_;
        double eta = eta_;
        if (anytime_)
            eta = scale_ * std::sqrt(logn_ / static_cast<double>(updates_));
        double span = hi_ - lo_;
        for (std::size_t i = 0; i < n_; ++i)
        {
            double r = rewards[i];
            if (r < lo_ - 1e-12 || r > hi_ + 1e-12)
                throw std::invalid_argument("Hedge: reward outside declared range");
            score_[i] += eta * (r - lo_) / span;
        }
    }

private:
    std::size_t n_;
    double lo_, hi_;
    double scale_;
    bool anytime_;
    double eta_;
    double logn_;
    long updates_ = 0;
    std::vector<double> score_; // eta-weighted cumulative rescaled reward
    mutable std::vector<double> scratch_; // sampling buffer, no round-to-round state
};

class Exp3P
{
public:
    // Classic high-probability EXP3.P parameterization:
    //   alpha = 2 sqrt(ln(nT/delta)),  gamma = min(3/5, 2 sqrt(3 n ln n / (5T))),
    //   initial log-weights (alpha*gamma/3) sqrt(T/n),
    //   update logw_j += (gamma/(3n)) (xhat_j + alpha / (p_j sqrt(nT))).
    // delta defaults to 1/T, matching the "with probability 1 - 1/T" regime.
    Exp3P(std::size_t n, long T, double delta = -1.0)
        : n_(n)
    {
        if (n_ < 1)
            throw std::invalid_argument("Exp3P: need at least one action");
        if (T < 1)
            throw std::invalid_argument("Exp3P: T must be >= 1");
        if (delta <= 0.0)
            delta = 1.0 / static_cast<double>(T);
        double dn = static_cast<double>(n_);
        double dT = static_cast<double>(T);
        double logn = std::log(std::max(dn, 2.0));
        alpha_ = 2.0 * std::sqrt(std::log(dn * dT / delta));
        gamma_ = std::min(3.0 / 5.0, 2.0 * std::sqrt(3.0 * dn * logn / (5.0 * dT)));
        sqrt_nT_ = std::sqrt(dn * dT);
        score_.assign(n_, (alpha_ * gamma_ / 3.0) * std::sqrt(dT / dn));
    }

    std::size_t actions() const { return n_; }
    double gamma() const { return gamma_; }

    std::vector<double> probs() const { return current_probs(); }

    std::size_t sample(Rng &rng) const
    {
        return sample_index(rng, current_probs(), 1.0);
    }

    // reward01 must already be rescaled to [0,1].
    void update(std::size_t action, double reward01)
    {
        if (action >= n_)
            throw std::out_of_range("Exp3P: action index out of range");
        if (reward01 < -1e-12 || reward01 > 1.0 + 1e-12)
            throw std::invalid_argument("Exp3P: reward outside [0,1]");
        const std::vector<double> &p = current_probs();
        double step = gamma_ / (3.0 * static_cast<double>(n_));
        for (std::size_t i = 0; i < n_; ++i)
        {
            double ghat = alpha_ / (p[i] * sqrt_nT_);
            if (i == action)
                ghat += reward01 / p[i];
            score_[i] += step * ghat;
        }
        probs_fresh_ = false;
    }

private:
    const std::vector<double> &current_probs() const
    {
        if (!probs_fresh_)
        {
            probs_.resize(n_);
            double m = *std::max_element(score_.begin(), score_.end());
            double total = 0.0;
            for (std::size_t i = 0; i < n_; ++i)
            {
                probs_[i] = std::exp(score_[i] - m);
                total += probs_[i];
            }
            for (std::size_t i = 0; i < n_; ++i)
                probs_[i] = (1.0 - gamma_) * probs_[i] / total +
                            gamma_ / static_cast<double>(n_);
            probs_fresh_ = true;
        }
        return probs_;
    }

    std::size_t n_;
    double alpha_, gamma_, sqrt_nT_;
    std::vector<double> score_;
    mutable std::vector<double> probs_; // cache, invalidated by update()
    mutable bool probs_fresh_ = false;
};

enum class GftEstBranch
{
    seller_probe, // posted (ptilde, p)
    buyer_probe   // posted (p, ptilde)
};

struct GftEstimate
{
    double value = 0.0; // binary {0,1}
    PricePair posted;   // what actually went out, for budget accounting
    GftEstBranch branch = GftEstBranch::seller_probe;
};

// One probe of the estimator for the adjacent pair (p + 1/K, p).
inline GftEstimate gft_est(double p, int K, const Valuation &v, Rng &rng)
{
    if (K < 1)
        throw std::invalid_argument("gft_est: K must be >= 1");
    double invK = 1.0 / K;
    if (p < 0.0 || p + invK > 1.0 + 1e-12)
        throw std::invalid_argument("gft_est: pair not in the adjacent-pairs grid");
    GftEstimate e;
    double z = uniform01(rng);
    if (z < (p + invK) / (1.0 + invK))
    {
        double ptilde = uniform(rng, 0.0, p + invK);
        e.branch = GftEstBranch::seller_probe;
        e.posted = {ptilde, p};
        e.value = (v.s <= ptilde && p <= v.b) ? 1.0 : 0.0;
    }
    else
    {
        double ptilde = uniform(rng, p, 1.0);
        e.branch = GftEstBranch::buyer_probe;
        e.posted = {p, ptilde};
        e.value = (v.s <= p + invK && ptilde <= v.b) ? 1.0 : 0.0;
    }
    return e;
}

// Closed-form expectation of the estimate (exactly derivable by conditioning
// on the branch): (b - s + 1/K)/(1 + 1/K) * 1{s <= p + 1/K} * 1{p <= b}.
inline double gft_est_mean(double p, int K, const Valuation &v)
{
    double invK = 1.0 / K;
    if (v.s <= p + invK && p <= v.b)
        return (v.b - v.s + invK) / (1.0 + invK);
    return 0.0;
}

// Block-decomposition wrapper around Hedge over the adjacent-pairs grid.
// Drive with next_action() per round and finish_round() after the
// environment reveals the outcome of the posted pair.
class BlockLearner
{
public:
    BlockLearner(long horizon, long blocks, int K, double eta_scale = 1.0,
                 bool anytime = false)
        : K_(K), block_size_(horizon / blocks),
          hedge_(static_cast<std::size_t>(K), std::max(blocks, 1L), 0.0, 1.0 + 1.0 / K,
                 eta_scale, anytime)
    {
        if (horizon < 1 || blocks < 1)
            throw std::invalid_argument("BlockLearner: horizon and blocks must be >= 1");
        if (block_size_ < K_)
            throw std::invalid_argument("BlockLearner: block too small for one probe per pair");
    }

    long block_size() const { return block_size_; }

    struct Action
    {
        bool explore = false;
        int pair_index = 0; // meaningful when explore; index i of ((i+1)/K, i/K)
    };

    // Which action the learner takes at the next round. Rounds past the last
    // complete block keep playing the current distribution without updates.
    Action next_action(Rng &rng)
    {
        if (pos_ == 0 && !final_partial_)
            start_block(rng);
        Action a;
        long idx = final_partial_ ? -1 : probe_index_[static_cast<std::size_t>(pos_)];
        if (idx >= 0)
        {
            a.explore = true;
            a.pair_index = static_cast<int>(idx);
        }
        else
        {
            a.explore = false;
            a.pair_index = static_cast<int>(hedge_.sample(rng));
        }
        return a;
    }

    // Report the estimator value for an exploration round (ignored for
    // exploitation rounds), then advance the block clock.
    void finish_round(const Action &a, double estimate_value)
    {
        if (a.explore)
            rhat_[static_cast<std::size_t>(a.pair_index)] = (1.0 + 1.0 / K_) * estimate_value;
        ++pos_;
        if (pos_ == block_size_ && !final_partial_)
        {
            hedge_.update(rhat_);
            pos_ = 0;
            ++block_;
        }
    }

    // The driver calls this when fewer than block_size_ rounds remain: the
    // final partial block plays the latest distribution and never updates.
    void enter_final_partial()
    {
        final_partial_ = true;
        pos_ = 0;
    }

    const Hedge &inner() const { return hedge_; }

private:
    void start_block(Rng &rng)
    {
        // Draw K distinct rounds of the block uniformly without replacement
        // (partial Fisher-Yates over round offsets), then assign pair i to
        // the i-th drawn round: a uniform random bijection H_K -> S_j.
        probe_index_.assign(static_cast<std::size_t>(block_size_), -1);
        std::vector<long> offsets(static_cast<std::size_t>(block_size_));
        std::iota(offsets.begin(), offsets.end(), 0L);
        for (int i = 0; i < K_; ++i)
        {
            std::size_t j = static_cast<std::size_t>(i) +
                            static_cast<std::size_t>(uniform01(rng) *
                                                     static_cast<double>(block_size_ - i));
            if (j >= offsets.size())
                j = offsets.size() - 1;
            std::swap(offsets[static_cast<std::size_t>(i)], offsets[j]);
            probe_index_[static_cast<std::size_t>(offsets[static_cast<std::size_t>(i)])] = i;
        }
        rhat_.assign(static_cast<std::size_t>(K_), 0.0);
    }

    int K_;
    long block_size_;
    Hedge hedge_;
    long pos_ = 0;
    long block_ = 0;
    bool final_partial_ = false;
    std::vector<long> probe_index_; // per round offset: pair index or -1
    std::vector<double> rhat_;
};

} // namespace bilat
