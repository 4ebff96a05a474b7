#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dirstep/distributions.hpp"
#include "dirstep/stepwise.hpp"

namespace dirstep {

namespace detail {

// Kahan compensated accumulator; the closed-form FWER terms span many orders
// of magnitude for large n.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

inline double log_binom(std::size_t n, std::size_t r) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(r) + 1.0) -
           std::lgamma(static_cast<double>(n - r) + 1.0);
}

inline double binom(std::size_t n, std::size_t r) {
    if (n > 30) return std::exp(log_binom(n, r));
    double v = 1.0;
    for (std::size_t k = 0; k < r; ++k)
        v = v * static_cast<double>(n - k) / static_cast<double>(k + 1);
    return v;
}

}  // namespace detail

// Exact familywise error rate of the two-stage procedure at theta -> 0:
//   sum_{r=0}^{n-1} C(n,r) (a/n)^r [ (1 - a/n)^{n-r} - (1 - a/n - a/(n-r))^{n-r} ].
// Requires every bracketed base to be nonnegative, i.e. a + a/n <= 1.
inline double proc1_exact_fwer(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    const double nd = static_cast<double>(n);
    if (alpha + alpha / nd > 1.0)
        throw std::invalid_argument("alpha too large for the closed form: need alpha*(1+1/n) <= 1");
    const double a_over_n = alpha / nd;
    detail::KahanSum acc;
    for (std::size_t r = 0; r < n; ++r) {
        const double nr = nd - static_cast<double>(r);
        const double base1 = 1.0 - a_over_n;
        const double base2 = 1.0 - a_over_n - alpha / nr;
        const double bracket = std::pow(base1, nr) - std::pow(base2, nr);
        double term;
        if (n > 30) {
            const double logw = detail::log_binom(n, r) +
                                static_cast<double>(r) * std::log(a_over_n);
            term = std::exp(logw) * bracket;
        } else {
            term = detail::binom(n, r) * std::pow(a_over_n, static_cast<double>(r)) * bracket;
        }
        acc.add(term);
    }
    return acc.sum;
}

// Finite-sample FWER bound of the two-stage procedure: alpha / (1 - alpha/n).
inline double proc1_fwer_bound(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (alpha >= static_cast<double>(n))
        throw std::invalid_argument("bound requires alpha < n");
    return alpha / (1.0 - alpha / static_cast<double>(n));
}

// Definitional stepwise executors: exhaustive max-index scan with no early
// exit. Canonical reference for equivalence tests against the fast versions;
// intended for small inputs.
inline StepwiseOutcome stepdown_bruteforce(std::span<const double> p,
                                           const CriticalSchedule& sched) {
    detail::validate_stepwise_input(p, sched);
    const auto order = detail::sorted_order(p);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= sched.constants.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < i; ++j)
            if (!(p[order[j]] <= sched.constants[j])) all = false;
        if (all) best = i;
    }
    return detail::take_prefix(order, best);
}

inline StepwiseOutcome stepup_bruteforce(std::span<const double> p,
                                         const CriticalSchedule& sched) {
    detail::validate_stepwise_input(p, sched);
    const auto order = detail::sorted_order(p);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= sched.constants.size(); ++i)
        if (p[order[i - 1]] <= sched.constants[i - 1]) best = i;
    return detail::take_prefix(order, best);
}

struct A2CheckResult {
    bool holds = false;
    double margin = 0.0;
};

// Numerical check of the conditional p-value condition
//   Pr_theta{ P <= p | P <= p' } <= Pr_0{ P <= p | P <= p' } = p/p'
// for the location-shift family of `dist`, with the convention P = F0(T)
// (the p-value that rejects for small T). The left side is the ratio of the
// shifted CDF at the null quantiles x = F0^{-1}(p), x' = F0^{-1}(p').
// Diagnostic only: procedures never gate on it.
inline A2CheckResult a2_condition_check(const NullDistribution& dist, double theta, double p,
                                        double p_prime) {
    if (!(p > 0.0 && p <= p_prime && p_prime <= 1.0))
        throw std::invalid_argument("a2 check requires 0 < p <= p' <= 1");
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    const double x = dist.quantile(p);
    const double num = dist.cdf(x - theta);
    const double den = p_prime >= 1.0 ? 1.0 : dist.cdf(dist.quantile(p_prime) - theta);
    const double left = den > 0.0 ? num / den
                                  : std::numeric_limits<double>::quiet_NaN();
    const double right = p / p_prime;
    A2CheckResult r;
    r.margin = right - left;
    r.holds = std::isfinite(r.margin) && r.margin >= -1e-12;
    return r;
}

}  // namespace dirstep
