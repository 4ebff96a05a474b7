#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirstep {

enum class ScheduleKind { Holm, Hochberg, Proc3, BH, Proc5, Bonferroni, Custom };

inline const char* schedule_kind_name(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::Holm: return "holm";
        case ScheduleKind::Hochberg: return "hochberg";
        case ScheduleKind::Proc3: return "proc3";
        case ScheduleKind::BH: return "bh";
        case ScheduleKind::Proc5: return "proc5";
        case ScheduleKind::Bonferroni: return "bonferroni";
        case ScheduleKind::Custom: return "custom";
    }
    throw std::invalid_argument("unknown schedule kind");
}

inline ScheduleKind schedule_kind_from_name(const std::string& s) {
    if (s == "holm") return ScheduleKind::Holm;
    if (s == "hochberg") return ScheduleKind::Hochberg;
    if (s == "proc3") return ScheduleKind::Proc3;
    if (s == "bh") return ScheduleKind::BH;
    if (s == "proc5") return ScheduleKind::Proc5;
    if (s == "bonferroni") return ScheduleKind::Bonferroni;
    throw std::invalid_argument("unknown schedule kind: " + s +
                                " (expected holm, hochberg, proc3, bh, proc5 or bonferroni)");
}

// Nondecreasing critical constants 0 < c_1 <= ... <= c_m < 1.
struct CriticalSchedule {
    std::vector<double> constants;
    ScheduleKind kind = ScheduleKind::Custom;
};

inline void validate_schedule(const CriticalSchedule& sched) {
    if (sched.constants.empty()) throw std::invalid_argument("schedule must be nonempty");
    double prev = 0.0;
    for (double c : sched.constants) {
        if (!(c > 0.0 && c < 1.0))
            throw std::invalid_argument("critical constants must lie in (0,1)");
        if (c < prev) throw std::invalid_argument("critical constants must be nondecreasing");
        prev = c;
    }
}

// Critical-constant formulas, all at level `level` over n hypotheses (pairs
// for proc5, which yields 2n constants):
//   holm, hochberg : level / (n - i + 1)
//   proc3          : level / (n - i + 1 + level)
//   bh             : i * level / n
//   proc5          : level / (n - floor((i+1)/2) + 1), i = 1..2n
//   bonferroni     : level / n for every i
inline CriticalSchedule make_schedule(ScheduleKind kind, std::size_t n, double level) {
    if (n == 0) throw std::invalid_argument("schedule requires n >= 1");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0,1)");
    CriticalSchedule sched;
    sched.kind = kind;
    const double nd = static_cast<double>(n);
    switch (kind) {
        case ScheduleKind::Holm:
        case ScheduleKind::Hochberg:
            for (std::size_t i = 1; i <= n; ++i)
                sched.constants.push_back(level / (nd - static_cast<double>(i) + 1.0));
            break;
        case ScheduleKind::Proc3:
            for (std::size_t i = 1; i <= n; ++i)
                sched.constants.push_back(level / (nd - static_cast<double>(i) + 1.0 + level));
            break;
        case ScheduleKind::BH:
            for (std::size_t i = 1; i <= n; ++i)
                sched.constants.push_back(static_cast<double>(i) * level / nd);
            break;
        case ScheduleKind::Proc5:
            for (std::size_t i = 1; i <= 2 * n; ++i) {
                const std::size_t half = (i + 1) / 2;
                sched.constants.push_back(level / (nd - static_cast<double>(half) + 1.0));
            }
            break;
        case ScheduleKind::Bonferroni:
            sched.constants.assign(n, level / nd);
            break;
        case ScheduleKind::Custom:
            throw std::invalid_argument("custom schedules are built directly from constants");
    }
    validate_schedule(sched);
    return sched;
}

// Result of one stepwise run. rejected_indices are the positions (in the
// input vector) of the rejected_count smallest p-values; ties between equal
// p-values are broken by original index, so the output is deterministic.
struct StepwiseOutcome {
    std::size_t rejected_count = 0;
    std::vector<std::size_t> rejected_indices;  // sorted ascending
};

inline bool operator==(const StepwiseOutcome& a, const StepwiseOutcome& b) {
    return a.rejected_count == b.rejected_count && a.rejected_indices == b.rejected_indices;
}

namespace detail {

inline void validate_stepwise_input(std::span<const double> p, const CriticalSchedule& sched) {
    validate_schedule(sched);
    if (p.size() < sched.constants.size())
        throw std::invalid_argument("need at least as many p-values as critical constants");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("p-values must lie in [0,1]");
}

// Index order of ascending p-values, stable on the original index.
inline std::vector<std::size_t> sorted_order(std::span<const double> p) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    return order;
}

inline StepwiseOutcome take_prefix(const std::vector<std::size_t>& order, std::size_t count) {
    StepwiseOutcome out;
    out.rejected_count = count;
    out.rejected_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(out.rejected_indices.begin(), out.rejected_indices.end());
    return out;
}

}  // namespace detail

// Stepdown: rejects the largest prefix i such that p_(j) <= c_j for all j <= i.
// Only the first |sched| order statistics are compared; comparisons are
// non-strict.
inline StepwiseOutcome stepdown(std::span<const double> p, const CriticalSchedule& sched) {
    detail::validate_stepwise_input(p, sched);
    const auto order = detail::sorted_order(p);
    std::size_t count = 0;
    for (std::size_t j = 0; j < sched.constants.size(); ++j) {
        if (p[order[j]] <= sched.constants[j])
            count = j + 1;
        else
            break;
    }
    return detail::take_prefix(order, count);
}

// Stepup: rejects the i* smallest p-values where i* = max{i : p_(i) <= c_i}.
inline StepwiseOutcome stepup(std::span<const double> p, const CriticalSchedule& sched) {
    detail::validate_stepwise_input(p, sched);
    const auto order = detail::sorted_order(p);
    std::size_t count = 0;
    for (std::size_t j = sched.constants.size(); j-- > 0;) {
        if (p[order[j]] <= sched.constants[j]) {
            count = j + 1;
            break;
        }
    }
    return detail::take_prefix(order, count);
}

}  // namespace dirstep
