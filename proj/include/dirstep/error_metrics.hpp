#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirstep/hypotheses.hpp"

namespace dirstep {

// Error counts of one decision set against the true parameter vector.
//
// The checked quantities view decisions per parameter: v_check counts
// parameters with theta_i = 0 that received any claim (type 1), s_check
// counts sign errors on nonzero parameters (type 3), r_check counts claimed
// parameters. The family counts view decisions per hypothesis: v_family /
// r_family are true-null rejections and total rejections in the decision's
// family, split into the F1 part (kinds 1 and 2) and the F2 part (kind 3).
struct ErrorTally {
    std::uint32_t v_check = 0;
    std::uint32_t s_check = 0;
    std::uint32_t u_check = 0;
    std::uint32_t r_check = 0;
    std::uint32_t v_family = 0;
    std::uint32_t r_family = 0;
    std::uint32_t v1 = 0;
    std::uint32_t r1 = 0;
    std::uint32_t v2 = 0;
    std::uint32_t r2 = 0;
};

inline ErrorTally tally(const DecisionSet& decisions, const std::vector<double>& theta) {
    validate_theta(theta);
    if (decisions.n != theta.size())
        throw std::invalid_argument("decision set and theta have different dimensions");
    ErrorTally t;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const Direction d = decisions.directions[i];
        if (d == Direction::None) continue;
        ++t.r_check;
        if (theta[i] == 0.0)
            ++t.v_check;
        else if ((theta[i] > 0.0 && d == Direction::Negative) ||
                 (theta[i] < 0.0 && d == Direction::Positive))
            ++t.s_check;
    }
    t.u_check = t.v_check + t.s_check;
    for (std::size_t idx : decisions.rejected) {
        const bool truenull = is_true_null(decisions.family, decisions.n, idx, theta);
        const bool f2part = hypothesis_kind(decisions.family, decisions.n, idx) == 3;
        ++t.r_family;
        if (f2part)
            ++t.r2;
        else
            ++t.r1;
        if (truenull) {
            ++t.v_family;
            if (f2part)
                ++t.v2;
            else
                ++t.v1;
        }
    }
    return t;
}

// Per-replication structural checks. Every rejected true null induces a
// distinct erroneous claim, so v_family <= u_check; for pure F1 decisions
// with no zero parameter the two error accountings coincide exactly; and the
// family FDR obeys the split inequality
//   (v1+v2)/max(r1+r2,1) <= v1/max(r1,1) + v2/max(r2,1),
// verified here in exact integer arithmetic.
inline bool tally_consistent(const ErrorTally& t, Family family, bool theta_has_zero) {
    if (t.u_check != t.v_check + t.s_check) return false;
    if (t.u_check > t.r_check) return false;
    if (t.v_family != t.v1 + t.v2 || t.r_family != t.r1 + t.r2) return false;
    if (t.v_family > t.u_check) return false;
    if ((family == Family::F1 || family == Family::F1Prime) && !theta_has_zero &&
        t.v_family != t.u_check)
        return false;
    const std::uint64_t m1 = t.r1 > 0 ? t.r1 : 1;
    const std::uint64_t m2 = t.r2 > 0 ? t.r2 : 1;
    const std::uint64_t m = t.r_family > 0 ? t.r_family : 1;
    if (static_cast<std::uint64_t>(t.v_family) * m1 * m2 >
        (static_cast<std::uint64_t>(t.v1) * m2 + static_cast<std::uint64_t>(t.v2) * m1) * m)
        return false;
    return true;
}

enum class Metric { MdFwer, MdFdr, FwerFamily, FdrFamily };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::MdFwer: return "mdFWER";
        case Metric::MdFdr: return "mdFDR";
        case Metric::FwerFamily: return "FWER_family";
        case Metric::FdrFamily: return "FDR_family";
    }
    throw std::invalid_argument("unknown metric");
}

inline constexpr Metric kAllMetrics[] = {Metric::MdFwer, Metric::MdFdr, Metric::FwerFamily,
                                         Metric::FdrFamily};

// Per-replication value whose mean estimates the metric.
inline double metric_value(const ErrorTally& t, Metric m) {
    switch (m) {
        case Metric::MdFwer: return t.u_check >= 1 ? 1.0 : 0.0;
        case Metric::MdFdr:
            return static_cast<double>(t.u_check) / static_cast<double>(std::max<std::uint32_t>(t.r_check, 1));
        case Metric::FwerFamily: return t.v_family >= 1 ? 1.0 : 0.0;
        case Metric::FdrFamily:
            return static_cast<double>(t.v_family) / static_cast<double>(std::max<std::uint32_t>(t.r_family, 1));
    }
    throw std::invalid_argument("unknown metric");
}

// Single-pass mean/variance accumulator with an associative merge, so
// replication streams accumulated in fixed-size chunks combine to the same
// result regardless of which thread ran which chunk.
struct RunningStat {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStat& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(other.count);
        const double delta = other.mean - mean;
        const double total = na + nb;
        mean += delta * nb / total;
        m2 += other.m2 + delta * delta * na * nb / total;
        count += other.count;
    }

    // Sample standard deviation; zero for fewer than two observations.
    double sample_sd() const {
        if (count < 2) return 0.0;
        return std::sqrt(std::max(0.0, m2 / static_cast<double>(count - 1)));
    }

    double standard_error() const {
        if (count == 0) return 0.0;
        return sample_sd() / std::sqrt(static_cast<double>(count));
    }
};

struct ErrorRateEstimate {
    Metric metric = Metric::MdFwer;
    double estimate = 0.0;
    double se = 0.0;
    std::uint64_t reps = 0;
};

inline ErrorRateEstimate estimate(const std::vector<ErrorTally>& tallies, Metric metric) {
    if (tallies.empty()) throw std::invalid_argument("no replications to estimate from");
    RunningStat acc;
    for (const auto& t : tallies) acc.add(metric_value(t, metric));
    return {metric, acc.mean, acc.standard_error(), acc.count};
}

struct UnionBoundResult {
    bool pass = false;
    double slack = 0.0;
};

// Checks est_F <= est_F1 + est_F2 up to three combined Monte Carlo standard
// errors. All three estimates must come from the same replication stream.
inline UnionBoundResult union_bound_check(const ErrorRateEstimate& est_f1,
                                          const ErrorRateEstimate& est_f2,
                                          const ErrorRateEstimate& est_f) {
    if (est_f1.reps != est_f2.reps || est_f1.reps != est_f.reps)
        throw std::invalid_argument("union bound check requires matching replication counts");
    UnionBoundResult r;
    r.slack = est_f1.estimate + est_f2.estimate - est_f.estimate;
    const double se = std::sqrt(est_f1.se * est_f1.se + est_f2.se * est_f2.se +
                                est_f.se * est_f.se);
    r.pass = r.slack >= -3.0 * se;
    return r;
}

}  // namespace dirstep
