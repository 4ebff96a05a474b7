#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dirstep/distributions.hpp"
#include "dirstep/hypotheses.hpp"

namespace dirstep {

struct StatisticVector {
    std::vector<double> t;
    NullDistribution dist;
};

inline void validate_statistics(const StatisticVector& stats) {
    if (stats.t.empty()) throw std::invalid_argument("statistics must have length >= 1");
    for (double v : stats.t)
        if (!std::isfinite(v)) throw std::invalid_argument("statistics must be finite");
}

// One-sided p-values in F1 layout: p[i] for H_i1 and p[n+i] for H_i2, with
// p[i] computed as 1 - p[n+i] from a single CDF evaluation so that
// p[i] + p[n+i] == 1 holds exactly in floating point.
struct PairedPValues {
    std::vector<double> p;

    std::size_t pairs() const { return p.size() / 2; }
};

inline void validate_paired(const PairedPValues& pp) {
    if (pp.p.empty() || pp.p.size() % 2 != 0)
        throw std::invalid_argument("paired p-values must have even positive length");
    for (double v : pp.p)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("p-values must lie in [0,1]");
}

// (p for H_i1, p for H_i2/H_i3) = (1 - F0(t), F0(t)). The first component
// rejects for large t, the second for small t; they sum to one exactly.
inline std::pair<double, double> one_sided_pair(const NullDistribution& dist, double t) {
    const double ph2 = dist.cdf(t);
    return {1.0 - ph2, ph2};
}

// Two-sided p-value 2*min(F0(t), 1-F0(t)).
inline double two_sided(const NullDistribution& dist, double t) {
    auto [ph1, ph2] = one_sided_pair(dist, t);
    return 2.0 * std::min(ph1, ph2);
}

inline PairedPValues paired_pvalues(const StatisticVector& stats) {
    validate_statistics(stats);
    const std::size_t n = stats.t.size();
    PairedPValues pp;
    pp.p.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [ph1, ph2] = one_sided_pair(stats.dist, stats.t[i]);
        pp.p[i] = ph1;
        pp.p[n + i] = ph2;
    }
    return pp;
}

inline std::vector<double> two_sided_pvalues(const StatisticVector& stats) {
    validate_statistics(stats);
    std::vector<double> out(stats.t.size());
    for (std::size_t i = 0; i < stats.t.size(); ++i) out[i] = two_sided(stats.dist, stats.t[i]);
    return out;
}

// P-value vector of one family:
//   F1       -> (p_H11..p_Hn1, p_H12..p_Hn2), length 2n
//   F2       -> (F0(t_1)..F0(t_n)), length n
//   F        -> F1 block followed by the F2 block, length 3n
//   F1Prime  -> (p_H11..p_Hn1), length n
//   F2Prime  -> per-parameter duplicated (F0(t_1), F0(t_1), ...), length 2n
inline std::vector<double> family_pvalues(const StatisticVector& stats, Family family) {
    validate_statistics(stats);
    const std::size_t n = stats.t.size();
    const PairedPValues pp = paired_pvalues(stats);
    std::vector<double> out;
    switch (family) {
        case Family::F1:
            return pp.p;
        case Family::F2:
            out.assign(pp.p.begin() + static_cast<std::ptrdiff_t>(n), pp.p.end());
            return out;
        case Family::F:
            out = pp.p;
            out.insert(out.end(), pp.p.begin() + static_cast<std::ptrdiff_t>(n), pp.p.end());
            return out;
        case Family::F1Prime:
            out.assign(pp.p.begin(), pp.p.begin() + static_cast<std::ptrdiff_t>(n));
            return out;
        case Family::F2Prime:
            out.resize(2 * n);
            for (std::size_t i = 0; i < n; ++i) out[2 * i] = out[2 * i + 1] = pp.p[n + i];
            return out;
    }
    throw std::invalid_argument("unknown family tag");
}

// Probability-integral-transform mode: builds the F1 pairing directly from
// uniforms, bypassing any CDF; u_i plays the role of F0(t_i).
inline PairedPValues paired_from_uniforms(const std::vector<double>& u) {
    if (u.empty()) throw std::invalid_argument("uniform vector must have length >= 1");
    const std::size_t n = u.size();
    PairedPValues pp;
    pp.p.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] >= 0.0 && u[i] <= 1.0))
            throw std::invalid_argument("uniform draws must lie in [0,1]");
        pp.p[i] = 1.0 - u[i];
        pp.p[n + i] = u[i];
    }
    return pp;
}

// Sign of the underlying statistic recovered from the pairing:
// F0(t) > 1/2 iff t > 0 for a continuous symmetric null.
inline int statistic_sign(const PairedPValues& pp, std::size_t i) {
    const double ph2 = pp.p[pp.pairs() + i];
    if (ph2 > 0.5) return 1;
    if (ph2 < 0.5) return -1;
    return 0;
}

}  // namespace dirstep
