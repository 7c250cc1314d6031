#pragma once

// Valuation-sequence generators: i.i.d. samplers over finite supports, the
// hard instance families used by the lower-bound experiments, and the
// benchmark-separation sequences.
//
// The two-bit hard family is a distribution mu_k over a finite support
// W_1..W_6 built in exact rational arithmetic: two ladders of trades at
// buyer values 1-l and 1-l-rho (masses gamma_1, with a +/- epsilon
// perturbation at ladder indices k and k+1 when k >= 1), a set of balancing
// valuations chosen so the expected gain from trade of posting a single
// price is flat across the ladder, a ladder of zero-gain trades, one
// isolated buyer valuation that rewards probing with a small spread, and
// four corner points absorbing the leftover mass. The structure report
// certifies, by exact enumeration over the grid generated by the support:
// (a) the distribution is valid with corner mass >= 1/32, (b) the unique
// best budget-balanced grid pair is (p_k*, p_k* + delta) with margin
// rho*epsilon, (c) deficit-running pairs are dominated, (d) probing with a
// wide spread costs at least gamma_5/3, and (e) the two-bit feedback
// distribution is identical to the base instance outside one strip of pairs.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bilat/core.hpp"
#include "bilat/rng.hpp"

namespace bilat
{

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Finite distributions and i.i.d. sampling
// ---------------------------------------------------------------------------

struct FiniteValuationDistribution
{
    std::vector<Valuation> support;
    std::vector<double> probs;

    void validate() const
    {
        if (support.empty() || support.size() != probs.size())
            throw std::invalid_argument(
                "FiniteValuationDistribution: support/probs size mismatch");
        double total = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i)
        {
            bilat::validate(support[i]);
            if (probs[i] < 0.0)
                throw std::invalid_argument(
                    "FiniteValuationDistribution: negative probability");
            total += probs[i];
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument(
                "FiniteValuationDistribution: probabilities do not sum to 1");
    }
};

inline Valuation sample(const FiniteValuationDistribution &dist, Rng &rng)
{
    std::size_t i = sample_index(rng, dist.probs, 1.0);
    return dist.support[i];
}

inline ValuationSequence iid_sequence(const FiniteValuationDistribution &dist,
                                      long T, Rng &rng)
{
    dist.validate();
    if (T < 0)
        throw std::invalid_argument("iid_sequence: negative horizon");
    ValuationSequence seq;
    seq.reserve(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t)
        seq.push_back(sample(dist, rng));
    return seq;
}

// Seller and buyer values drawn independently and uniformly from [0,1].
inline ValuationSequence iid_uniform_sequence(long T, Rng &rng)
{
    if (T < 0)
        throw std::invalid_argument("iid_uniform_sequence: negative horizon");
    ValuationSequence seq;
    seq.reserve(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t)
    {
        double s = uniform01(rng);
        double b = uniform01(rng);
        seq.push_back(Valuation{s, b});
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Full-feedback hard instance: uniform over three points
// ---------------------------------------------------------------------------

inline FiniteValuationDistribution full_lb_distribution()
{
    FiniteValuationDistribution d;
    d.support = {Valuation{0.0, 0.25}, Valuation{0.75, 1.0},
                 Valuation{0.75, 0.25}};
    d.probs = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return d;
}

// Closed-form per-round expected GFT of a fixed pair against the three-point
// distribution. Four cases by the indicators q <= 1/4 and p >= 3/4:
//   neither: 0;   q <= 1/4 only: 1/12;   p >= 3/4 only: 1/12;   both: 0
// (the third point trades with loss 1/2 exactly when both hold).
inline double full_lb_expected_gft(const PricePair &pq)
{
    validate(pq);
    double e = 0.0;
    if (pq.q <= 0.25)
        e += 0.25;
    if (pq.p >= 0.75)
        e += 0.25;
    if (pq.p >= 0.75 && pq.q <= 0.25)
        e -= 0.5;
    return e / 3.0;
}

inline constexpr double full_lb_round_ceiling() { return 1.0 / 12.0; }

// ---------------------------------------------------------------------------
// Benchmark-separation sequences
// ---------------------------------------------------------------------------

// Alternates (0, 1/2-eps) and (1/2+eps, 1). No single price trades with
// both halves, while a two-point distribution of pairs can.
inline ValuationSequence benchmark_gap_sequence(double epsilon, long T)
{
    if (!(epsilon > 0.0 && epsilon < 0.125))
        throw std::invalid_argument(
            "benchmark_gap_sequence: epsilon must lie in (0, 1/8)");
    if (T < 2 || T % 2 != 0)
        throw std::invalid_argument(
            "benchmark_gap_sequence: horizon must be even and positive");
    ValuationSequence seq;
    seq.reserve(static_cast<std::size_t>(T));
    for (long t = 1; t <= T; ++t)
    {
        if (t % 2 == 1)
            seq.push_back(Valuation{0.0, 0.5 - epsilon});
        else
            seq.push_back(Valuation{0.5 + epsilon, 1.0});
    }
    return seq;
}

// Two sequences that differ only after the halfway point: the first half is
// uniform over {(0,1/3), (2/3,1)} in both; the second half is all-(0,0) in
// S1, and constant at the most frequent first-half valuation in S2 (ties
// broken toward (0,1/3)).
inline std::pair<ValuationSequence, ValuationSequence>
alpha_lb_sequences(long T, Rng &rng)
{
    if (T < 4 || T % 4 != 0)
        throw std::invalid_argument(
            "alpha_lb_sequences: horizon must be a positive multiple of 4");
    const Valuation low{0.0, 1.0 / 3.0};
    const Valuation high{2.0 / 3.0, 1.0};
    ValuationSequence first_half;
    first_half.reserve(static_cast<std::size_t>(T / 2));
    long low_count = 0;
    for (long t = 0; t < T / 2; ++t)
    {
        bool pick_low = uniform01(rng) < 0.5;
        low_count += pick_low ? 1 : 0;
        first_half.push_back(pick_low ? low : high);
    }
    Valuation mode = (low_count * 2 >= T / 2) ? low : high;

    ValuationSequence s1 = first_half;
    ValuationSequence s2 = first_half;
    for (long t = 0; t < T / 2; ++t)
    {
        s1.push_back(Valuation{0.0, 0.0});
        s2.push_back(mode);
    }
    return {std::move(s1), std::move(s2)};
}

// ---------------------------------------------------------------------------
// Two-bit hard instance family (exact rational construction)
// ---------------------------------------------------------------------------

struct TwoBitLBParams
{
    long N = 0;
    long k = 0;
    Rational epsilon;

    // Derived constants, all exact.
    Rational l, rho, Delta, delta;
    Rational gamma1, gamma4, gamma5, gamma6;
    std::vector<Rational> gamma3; // per balancing point, index 0..N-1
    Rational gamma3_total;

    // epsilon < 0 selects the default gamma1 / 2.
    TwoBitLBParams(long n, long instance, Rational eps = Rational(-1))
        : N(n), k(instance)
    {
        if (N <= 32)
            throw std::invalid_argument("TwoBitLBParams: N must exceed 32");
        if (k < 0 || k >= N)
            throw std::invalid_argument(
                "TwoBitLBParams: instance index out of range");
        if (k == N - 1)
            throw std::invalid_argument(
                "TwoBitLBParams: instance N-1 would perturb the nonexistent "
                "ladder index N; valid perturbed instances are 1..N-2");
        l = Rational(1, 12);
        rho = Rational(1, 32);
        Delta = l / (N - 1);
        delta = Delta / 2;
        gamma1 = Rational(1, 64 * N * N);
        gamma5 = Rational(1, 64);
        gamma4 = 4 * gamma1 * (13 * N - 14);
        if (eps < 0)
            epsilon = gamma1 / 2;
        else
            epsilon = eps;
        if (epsilon > gamma1)
            throw std::invalid_argument(
                "TwoBitLBParams: epsilon must not exceed gamma1");

        gamma3.reserve(static_cast<std::size_t>(N));
        gamma3_total = 0;
        for (long i = 0; i < N; ++i)
        {
            Rational num = 1 - l - rho - 2 * i * Delta;
            Rational den = (1 - l) / 2 - delta + i * Delta;
            Rational g = gamma1 * num / den;
            if (!(g > 0 && g < 2 * gamma1))
                throw std::invalid_argument(
                    "TwoBitLBParams: balancing mass outside (0, 2*gamma1)");
            gamma3.push_back(g);
            gamma3_total += g;
        }
        gamma6 =
            (1 - (2 * gamma1 * N + gamma3_total +
                  4 * gamma1 * N * (13 * N - 14) + gamma5)) /
            4;
        if (gamma6 < Rational(1, 32))
            throw std::invalid_argument("TwoBitLBParams: corner mass < 1/32");
    }

    // s-coordinate of ladder index i.
    Rational ladder_price(long i) const { return (1 - l) / 2 + i * Delta; }
    // b-coordinate of balancing point i (also the probe price ladder).
    Rational probe_price(long i) const
    {
        return (1 - l) / 2 - delta + i * Delta;
    }
};

namespace detail
{

struct ExactPoint
{
    Rational s, b, mass;
};

// Full support with exact masses; layout:
//   [0..N-1]   ladder at buyer value 1-l       (mass gamma1, +/- eps at k,k+1)
//   [N..2N-1]  ladder at buyer value 1-l-rho   (mass gamma1, -/+ eps at k,k+1)
//   [2N..3N-1] balancing points (0, probe_price(i))
//   [3N..4N-1] zero-gain ladder (ladder_price(i), probe_price(i))
//   [4N]       isolated buyer point (0, (1+l)/2)
//   [4N+1..]   four corners
inline std::vector<ExactPoint> twobit_lb_support(const TwoBitLBParams &P)
{
    std::vector<ExactPoint> pts;
    pts.reserve(static_cast<std::size_t>(4 * P.N + 5));
    for (long i = 0; i < P.N; ++i)
    {
        Rational m = P.gamma1;
        if (P.k >= 1 && i == P.k)
            m += P.epsilon;
        if (P.k >= 1 && i == P.k + 1)
            m -= P.epsilon;
        pts.push_back({P.ladder_price(i), 1 - P.l, m});
    }
    for (long i = 0; i < P.N; ++i)
    {
        Rational m = P.gamma1;
        if (P.k >= 1 && i == P.k)
            m -= P.epsilon;
        if (P.k >= 1 && i == P.k + 1)
            m += P.epsilon;
        pts.push_back({P.ladder_price(i), 1 - P.l - P.rho, m});
    }
    for (long i = 0; i < P.N; ++i)
        pts.push_back({Rational(0), P.probe_price(i),
                       P.gamma3[static_cast<std::size_t>(i)]});
    for (long i = 0; i < P.N; ++i)
        pts.push_back({P.ladder_price(i), P.probe_price(i), P.gamma4});
    pts.push_back({Rational(0), (1 + P.l) / 2, P.gamma5});
    pts.push_back({Rational(0), Rational(0), P.gamma6});
    pts.push_back({Rational(0), Rational(1), P.gamma6});
    pts.push_back({Rational(1), Rational(1), P.gamma6});
    pts.push_back({Rational(1), Rational(0), P.gamma6});
    return pts;
}

} // namespace detail

inline FiniteValuationDistribution
twobit_lb_distribution(const TwoBitLBParams &params)
{
    std::vector<detail::ExactPoint> pts = detail::twobit_lb_support(params);
    Rational total = 0;
    for (const detail::ExactPoint &pt : pts)
    {
        if (pt.mass <= 0)
            throw std::invalid_argument(
                "twobit_lb_distribution: nonpositive mass");
        total += pt.mass;
    }
    if (total != 1)
        throw std::invalid_argument(
            "twobit_lb_distribution: masses do not sum to 1 exactly");
    FiniteValuationDistribution d;
    d.support.reserve(pts.size());
    d.probs.reserve(pts.size());
    for (const detail::ExactPoint &pt : pts)
    {
        d.support.push_back(Valuation{static_cast<double>(pt.s),
                                      static_cast<double>(pt.b)});
        d.probs.push_back(static_cast<double>(pt.mass));
    }
    return d;
}

struct TwoBitLBStructureReport
{
    long N = 0;
    long k = 0;

    bool valid_distribution = false;  // (a) positivity, exact sum, corner mass
    bool argmax_ok = false;           // (b) best pair and its margin
    bool lower_triangle_dominated = false; // (c)
    bool exploration_cost_ok = false; // (d)
    bool feedback_equality_ok = false; // (e) vs the base instance

    // Diagnostics (double approximations of exact values).
    double best_value = 0.0;
    double second_value = 0.0;
    double required_margin = 0.0;
    double plateau_value = 0.0;

    std::vector<std::string> findings;

    bool all_hold() const
    {
        return valid_distribution && argmax_ok && lower_triangle_dominated &&
               exploration_cost_ok && feedback_equality_ok;
    }
};

inline TwoBitLBStructureReport
twobit_lb_structure_report(const TwoBitLBParams &P)
{
    TwoBitLBStructureReport rep;
    rep.N = P.N;
    rep.k = P.k;

    std::vector<detail::ExactPoint> pts = detail::twobit_lb_support(P);

    // (a) validity in exact arithmetic.
    {
        Rational total = 0;
        bool positive = true;
        for (const detail::ExactPoint &pt : pts)
        {
            positive = positive && pt.mass > 0;
            total += pt.mass;
        }
        rep.valid_distribution =
            positive && total == 1 && P.gamma6 >= Rational(1, 32);
        if (!rep.valid_distribution)
            rep.findings.push_back("distribution validity failed");
    }

    // Price grid generated by the support coordinates.
    std::vector<Rational> grid_s, grid_b;
    for (const detail::ExactPoint &pt : pts)
    {
        grid_s.push_back(pt.s);
        grid_b.push_back(pt.b);
    }
    auto dedup = [](std::vector<Rational> &v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(grid_s);
    dedup(grid_b);

    // Exact expected-GFT table E[(p, q)] over grid_s x grid_b. Points enter
    // as p sweeps upward; per p, each point deposits its contribution at the
    // largest grid q not exceeding its buyer value, and a suffix sum yields
    // all pairs sharing that p.
    std::vector<detail::ExactPoint> by_s = pts;
    std::sort(by_s.begin(), by_s.end(),
              [](const detail::ExactPoint &a, const detail::ExactPoint &b) {
                  return a.s < b.s;
              });
    const std::size_t ns = grid_s.size(), nb = grid_b.size();
    std::vector<std::vector<Rational>> table(
        ns, std::vector<Rational>(nb, Rational(0)));
    {
        std::vector<Rational> deposit(nb, Rational(0));
        std::size_t next = 0;
        for (std::size_t si = 0; si < ns; ++si)
        {
            while (next < by_s.size() && by_s[next].s <= grid_s[si])
            {
                const detail::ExactPoint &pt = by_s[next];
                auto it = std::upper_bound(grid_b.begin(), grid_b.end(), pt.b);
                std::size_t j = static_cast<std::size_t>(
                    std::distance(grid_b.begin(), it));
                // pt.b >= grid_b[0] always (0 is on the grid), so j >= 1.
                deposit[j - 1] += pt.mass * (pt.b - pt.s);
                ++next;
            }
            Rational suffix = 0;
            for (std::size_t j = nb; j-- > 0;)
            {
                suffix += deposit[j];
                table[si][j] = suffix;
            }
        }
    }

    // (b) unique argmax over budget-balanced pairs (q >= p) at
    // (p_k*, p_k* + delta) with margin >= rho * epsilon; at k = 0 the
    // plateau is exactly flat and nothing beats it.
    Rational best = 0, second = 0;
    std::size_t best_si = 0, best_bj = 0;
    bool have_best = false;
    for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t bj = 0; bj < nb; ++bj)
        {
            if (grid_b[bj] < grid_s[si])
                continue;
            const Rational &v = table[si][bj];
            if (!have_best || v > best)
            {
                best = v;
                best_si = si;
                best_bj = bj;
                have_best = true;
            }
        }
    // Runner-up: best budget-balanced pair other than the argmax.
    bool have_second = false;
    for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t bj = 0; bj < nb; ++bj)
        {
            if (grid_b[bj] < grid_s[si])
                continue;
            if (si == best_si && bj == best_bj)
                continue;
            if (!have_second || table[si][bj] > second)
            {
                second = table[si][bj];
                have_second = true;
            }
        }

    // Plateau value: E[(s_i, s_i + delta)] at any unperturbed index.
    auto grid_index = [](const std::vector<Rational> &v, const Rational &x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x)
            throw std::logic_error("expected grid coordinate missing");
        return static_cast<std::size_t>(std::distance(v.begin(), it));
    };
    auto plateau_pair_value = [&](long i) {
        return table[grid_index(grid_s, P.ladder_price(i))]
                    [grid_index(grid_b, P.probe_price(i + 1))];
    };
    Rational plateau = plateau_pair_value(0);
    rep.plateau_value = static_cast<double>(plateau);
    rep.best_value = static_cast<double>(best);
    rep.second_value = static_cast<double>(second);
    rep.required_margin = static_cast<double>(P.rho * P.epsilon);

    if (P.k == 0)
    {
        // Flat plateau across all indices, and the plateau is the maximum.
        bool flat = true;
        for (long i = 0; i + 1 < P.N; ++i)
            flat = flat && plateau_pair_value(i) == plateau;
        rep.argmax_ok = flat && best == plateau;
        if (!rep.argmax_ok)
            rep.findings.push_back("base-instance plateau not flat-maximal");
    }
    else
    {
        std::size_t want_si = grid_index(grid_s, P.ladder_price(P.k));
        std::size_t want_bj = grid_index(grid_b, P.probe_price(P.k + 1));
        rep.argmax_ok = best_si == want_si && best_bj == want_bj &&
                        have_second && best - second >= P.rho * P.epsilon;
        if (!rep.argmax_ok)
            rep.findings.push_back("argmax pair or margin mismatch");
    }

    // (c) every deficit-running pair (q < p) is weakly dominated by the best
    // budget-balanced pair.
    {
        bool ok = true;
        for (std::size_t si = 0; si < ns && ok; ++si)
            for (std::size_t bj = 0; bj < nb; ++bj)
            {
                if (grid_b[bj] >= grid_s[si])
                    continue;
                if (table[si][bj] > best)
                {
                    ok = false;
                    break;
                }
            }
        rep.lower_triangle_dominated = ok;
        if (!ok)
            rep.findings.push_back("a deficit pair beats the best balanced pair");
    }

    // (d) probing cost: for p on the ladder inside [(1-l)/2, (1+l)/2), the
    // narrow probe (p, p + delta) beats any wide probe (p, q) with
    // q > (1+l)/2 by at least gamma_5 / 3.
    {
        bool ok = true;
        Rational band_lo = (1 - P.l) / 2, band_hi = (1 + P.l) / 2;
        for (long i = 0; i < P.N && ok; ++i)
        {
            Rational p = P.ladder_price(i);
            if (p < band_lo || p >= band_hi)
                continue;
            Rational narrow = plateau_pair_value(i);
            std::size_t si = grid_index(grid_s, p);
            for (std::size_t bj = 0; bj < nb; ++bj)
            {
                if (grid_b[bj] <= band_hi)
                    continue;
                if (narrow < table[si][bj] + P.gamma5 / 3)
                {
                    ok = false;
                    break;
                }
            }
        }
        rep.exploration_cost_ok = ok;
        if (!ok)
            rep.findings.push_back("wide probe too cheap somewhere in the band");
    }

    // (e) feedback equality: the two-bit outcome distribution under mu_k
    // matches the base instance mu_0 for every grid pair outside the strip
    // [s_k, s_{k+1}) x (1-l-rho, 1-l]. Only the four perturbed masses differ
    // between mu_k and mu_0, so the exact difference per outcome cell is the
    // signed epsilon sum over those four points.
    if (P.k == 0)
    {
        rep.feedback_equality_ok = true;
    }
    else
    {
        struct Perturbed
        {
            Rational s, b;
            int sign;
        };
        const std::array<Perturbed, 4> perturbed = {
            Perturbed{P.ladder_price(P.k), 1 - P.l, +1},
            Perturbed{P.ladder_price(P.k + 1), 1 - P.l, -1},
            Perturbed{P.ladder_price(P.k), 1 - P.l - P.rho, -1},
            Perturbed{P.ladder_price(P.k + 1), 1 - P.l - P.rho, +1}};
        Rational strip_lo_s = P.ladder_price(P.k);
        Rational strip_hi_s = P.ladder_price(P.k + 1);
        Rational strip_lo_b = 1 - P.l - P.rho;
        Rational strip_hi_b = 1 - P.l;
        bool ok = true;
        for (std::size_t si = 0; si < ns && ok; ++si)
            for (std::size_t bj = 0; bj < nb; ++bj)
            {
                const Rational &p = grid_s[si];
                const Rational &q = grid_b[bj];
                bool in_strip = p >= strip_lo_s && p < strip_hi_s &&
                                q > strip_lo_b && q <= strip_hi_b;
                int cell_delta[4] = {0, 0, 0, 0};
                for (const Perturbed &w : perturbed)
                {
                    int cell = (w.s <= p ? 2 : 0) + (q <= w.b ? 1 : 0);
                    cell_delta[cell] += w.sign;
                }
                bool equal = cell_delta[0] == 0 && cell_delta[1] == 0 &&
                             cell_delta[2] == 0 && cell_delta[3] == 0;
                if (equal == in_strip)
                {
                    // Outside the strip the distributions must match; inside
                    // they must differ (epsilon > 0 by construction).
                    ok = false;
                    break;
                }
            }
        rep.feedback_equality_ok = ok;
        if (!ok)
            rep.findings.push_back("feedback distribution mismatch pattern");
    }

    return rep;
}

} // namespace bilat
