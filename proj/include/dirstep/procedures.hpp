#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirstep/hypotheses.hpp"
#include "dirstep/pvalues.hpp"
#include "dirstep/stepwise.hpp"

namespace dirstep {

// Every procedure maps paired one-sided p-values (plus a level and, for the
// block procedures, a layout) to a DecisionSet. Levels are restricted to
// (0, 1/2): below 1/2 every critical constant stays below 1/2, so at most one
// member of each p-value pair can ever be rejected and the n-constant
// schedules over 2n p-values are well defined.
enum class ProcedureId {
    P1,
    P1Prime,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    BauerBonferroni,
    DirectionalHolm,
    ConventionalHolm2n,
    CombinedFRemark3,
};

inline const char* procedure_name(ProcedureId id) {
    switch (id) {
        case ProcedureId::P1: return "P1";
        case ProcedureId::P1Prime: return "P1prime";
        case ProcedureId::P2: return "P2";
        case ProcedureId::P3: return "P3";
        case ProcedureId::P4: return "P4";
        case ProcedureId::P5: return "P5";
        case ProcedureId::P6: return "P6";
        case ProcedureId::P7: return "P7";
        case ProcedureId::P8: return "P8";
        case ProcedureId::P9: return "P9";
        case ProcedureId::BauerBonferroni: return "bauer_bonferroni";
        case ProcedureId::DirectionalHolm: return "directional_holm";
        case ProcedureId::ConventionalHolm2n: return "conventional_holm_2n";
        case ProcedureId::CombinedFRemark3: return "combined_F_remark3";
    }
    throw std::invalid_argument("unknown procedure id");
}

inline ProcedureId procedure_from_name(const std::string& s) {
    if (s == "P1") return ProcedureId::P1;
    if (s == "P1prime") return ProcedureId::P1Prime;
    if (s == "P2") return ProcedureId::P2;
    if (s == "P3") return ProcedureId::P3;
    if (s == "P4") return ProcedureId::P4;
    if (s == "P5") return ProcedureId::P5;
    if (s == "P6") return ProcedureId::P6;
    if (s == "P7") return ProcedureId::P7;
    if (s == "P8") return ProcedureId::P8;
    if (s == "P9") return ProcedureId::P9;
    if (s == "bauer_bonferroni") return ProcedureId::BauerBonferroni;
    if (s == "directional_holm") return ProcedureId::DirectionalHolm;
    if (s == "conventional_holm_2n") return ProcedureId::ConventionalHolm2n;
    if (s == "combined_F_remark3") return ProcedureId::CombinedFRemark3;
    throw std::invalid_argument("unknown procedure id: " + s);
}

inline bool requires_layout(ProcedureId id) {
    return id == ProcedureId::P4 || id == ProcedureId::P7 || id == ProcedureId::P8;
}

// Family the procedure's decisions live in.
inline Family decision_family(ProcedureId id) {
    switch (id) {
        case ProcedureId::P5:
        case ProcedureId::DirectionalHolm:
        case ProcedureId::CombinedFRemark3:
            return Family::F;
        default:
            return Family::F1;
    }
}

struct ProcedureSpec {
    ProcedureId id = ProcedureId::P3;
    double alpha = 0.05;
    std::optional<FamilyLayout> layout;
};

namespace detail {

inline void validate_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("alpha must lie in (0, 0.5)");
}

inline void validate_layout_for(const PairedPValues& pp, const FamilyLayout& layout) {
    if (auto err = validate_layout(layout))
        throw std::invalid_argument("invalid layout: " + *err);
    if (layout.n != pp.pairs())
        throw std::invalid_argument("layout covers " + std::to_string(layout.n) +
                                    " parameters but " + std::to_string(pp.pairs()) +
                                    " pairs of p-values were given");
}

// Paired sub-vector of one block: (p_j for j in block, then p_{n+j}).
inline std::vector<double> block_pvalues(const PairedPValues& pp,
                                         const std::vector<std::size_t>& block) {
    const std::size_t n = pp.pairs();
    std::vector<double> q;
    q.reserve(2 * block.size());
    for (std::size_t j : block) q.push_back(pp.p[j]);
    for (std::size_t j : block) q.push_back(pp.p[n + j]);
    return q;
}

// Local F1 index within a block mapped back to the global F1 index.
inline std::size_t unblock_index(const std::vector<std::size_t>& block, std::size_t n,
                                 std::size_t local) {
    const std::size_t nb = block.size();
    return local < nb ? block[local] : n + block[local - nb];
}

}  // namespace detail

// Two-stage procedure: a single-step pass at alpha/n over all 2n hypotheses,
// then (unless all n pairs produced a rejection) a second pass at
// alpha/(n - r) over the rest.
inline DecisionSet proc1_two_stage(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const double stage1 = alpha / static_cast<double>(n);
    std::vector<std::size_t> rejected;
    std::vector<bool> taken(2 * n, false);
    for (std::size_t i = 0; i < 2 * n; ++i)
        if (pp.p[i] <= stage1) {
            rejected.push_back(i);
            taken[i] = true;
        }
    const std::size_t r = rejected.size();
    if (r < n) {
        const double stage2 = alpha / static_cast<double>(n - r);
        for (std::size_t i = 0; i < 2 * n; ++i)
            if (!taken[i] && pp.p[i] <= stage2) rejected.push_back(i);
    }
    return make_decision_set(Family::F1, n, std::move(rejected));
}

inline double rescaled_level(double alpha, std::size_t n) {
    return alpha / (1.0 + alpha / static_cast<double>(n));
}

// Two-stage procedure with every constant rescaled to alpha/(1 + alpha/n).
inline DecisionSet proc1_prime(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    return proc1_two_stage(pp, rescaled_level(alpha, pp.pairs()));
}

// Modified two-stage procedure: stage 1 keeps alpha/n, stage 2 uses
// beta/(n - r) with beta = alpha/(1 + alpha/n).
inline DecisionSet proc2_modified_two_stage(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const double stage1 = alpha / static_cast<double>(n);
    const double beta = rescaled_level(alpha, n);
    std::vector<std::size_t> rejected;
    std::vector<bool> taken(2 * n, false);
    for (std::size_t i = 0; i < 2 * n; ++i)
        if (pp.p[i] <= stage1) {
            rejected.push_back(i);
            taken[i] = true;
        }
    const std::size_t r = rejected.size();
    if (r < n) {
        const double stage2 = beta / static_cast<double>(n - r);
        for (std::size_t i = 0; i < 2 * n; ++i)
            if (!taken[i] && pp.p[i] <= stage2) rejected.push_back(i);
    }
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// Stepdown over all 2n paired p-values with the n constants
// alpha/(n - i + 1 + alpha). No explicit padding is needed: at most n of the
// paired p-values lie below 1/2, so constants beyond index n could never fire.
inline DecisionSet proc3_stepdown(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const auto outcome = stepdown(pp.p, make_schedule(ScheduleKind::Proc3, n, alpha));
    return make_decision_set(Family::F1, n, outcome.rejected_indices);
}

// Holm-type block procedure: proc3 within each block at level n_i*alpha/n.
inline DecisionSet proc4_block(const PairedPValues& pp, double alpha, const FamilyLayout& layout) {
    detail::validate_level(alpha);
    validate_paired(pp);
    detail::validate_layout_for(pp, layout);
    const std::size_t n = pp.pairs();
    std::vector<std::size_t> rejected;
    for (const auto& block : layout.blocks) {
        const std::size_t nb = block.size();
        const double level = static_cast<double>(nb) * alpha / static_cast<double>(n);
        const auto q = detail::block_pvalues(pp, block);
        const auto outcome = stepdown(q, make_schedule(ScheduleKind::Proc3, nb, level));
        for (std::size_t local : outcome.rejected_indices)
            rejected.push_back(detail::unblock_index(block, n, local));
    }
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// Hochberg-type procedure under positive dependence, deciding over F:
// stepup at level alpha/2 on the H_i1 p-values, and a stepup with constants
// (alpha/2)/(n - floor((i+1)/2) + 1) on the 2n duplicated H_i2/H_i3 p-values.
inline DecisionSet proc5_hochberg_directional(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const double half = alpha / 2.0;

    std::vector<double> f1p(pp.p.begin(), pp.p.begin() + static_cast<std::ptrdiff_t>(n));
    const auto k1 = stepup(f1p, make_schedule(ScheduleKind::Hochberg, n, half));

    std::vector<double> dup(2 * n);
    for (std::size_t i = 0; i < n; ++i) dup[2 * i] = dup[2 * i + 1] = pp.p[n + i];
    const auto k2 = stepup(dup, make_schedule(ScheduleKind::Proc5, n, half));

    std::vector<std::size_t> rejected(k1.rejected_indices);
    for (std::size_t d : k2.rejected_indices) {
        const std::size_t param = d / 2;
        rejected.push_back(n + param);       // H_i2
        rejected.push_back(2 * n + param);   // H_i3
    }
    return make_decision_set(Family::F, n, std::move(rejected));
}

// BH stepup over all 2n paired p-values. Constants are i*alpha/n for i <= n,
// padded with the top constant (= alpha up to rounding) beyond index n; the
// padding is inert for alpha < 1/2 because n of the paired p-values are
// always >= 1/2.
inline DecisionSet proc6_bh(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    CriticalSchedule sched = make_schedule(ScheduleKind::BH, n, alpha);
    sched.constants.resize(2 * n, sched.constants.back());
    const auto outcome = stepup(pp.p, sched);
    return make_decision_set(Family::F1, n, outcome.rejected_indices);
}

// BH-type procedure under between-block dependence: proc6 within each block
// at level n_i*alpha/n.
inline DecisionSet proc7_between_block_bh(const PairedPValues& pp, double alpha,
                                          const FamilyLayout& layout) {
    detail::validate_level(alpha);
    validate_paired(pp);
    detail::validate_layout_for(pp, layout);
    const std::size_t n = pp.pairs();
    std::vector<std::size_t> rejected;
    for (const auto& block : layout.blocks) {
        const std::size_t nb = block.size();
        const double level = static_cast<double>(nb) * alpha / static_cast<double>(n);
        const auto q = detail::block_pvalues(pp, block);
        CriticalSchedule sched = make_schedule(ScheduleKind::BH, nb, level);
        sched.constants.resize(2 * nb, sched.constants.back());
        const auto outcome = stepup(q, sched);
        for (std::size_t local : outcome.rejected_indices)
            rejected.push_back(detail::unblock_index(block, n, local));
    }
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// BH-type procedure under within-block dependence: a stepup over the per-block
// minimum p-values determines B, then every p-value <= B*alpha/n is rejected.
inline DecisionSet proc8_within_block_bh(const PairedPValues& pp, double alpha,
                                         const FamilyLayout& layout) {
    detail::validate_level(alpha);
    validate_paired(pp);
    detail::validate_layout_for(pp, layout);
    const std::size_t n = pp.pairs();
    const std::size_t b = layout.blocks.size();

    std::vector<double> minima;
    minima.reserve(b);
    for (const auto& block : layout.blocks) {
        double m = 1.0;
        for (std::size_t j : block) m = std::min({m, pp.p[j], pp.p[n + j]});
        minima.push_back(m);
    }
    std::sort(minima.begin(), minima.end());
    std::size_t big_b = 0;
    for (std::size_t i = 1; i <= b; ++i)
        if (minima[i - 1] <= static_cast<double>(i) * alpha / static_cast<double>(n)) big_b = i;

    std::vector<std::size_t> rejected;
    if (big_b > 0) {
        const double thr = static_cast<double>(big_b) * alpha / static_cast<double>(n);
        for (std::size_t i = 0; i < 2 * n; ++i)
            if (pp.p[i] <= thr) rejected.push_back(i);
    }
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// BH-type procedure under positive dependence: BH at full level alpha run
// separately on the H_i1 p-values and on the H_i2 p-values.
inline DecisionSet proc9_positive_dep_bh(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const CriticalSchedule bh = make_schedule(ScheduleKind::BH, n, alpha);
    std::vector<double> low(pp.p.begin(), pp.p.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> high(pp.p.begin() + static_cast<std::ptrdiff_t>(n), pp.p.end());
    const auto k1 = stepup(low, bh);
    const auto k2 = stepup(high, bh);
    std::vector<std::size_t> rejected(k1.rejected_indices);
    for (std::size_t i : k2.rejected_indices) rejected.push_back(n + i);
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// Single-step procedure with critical constant alpha/n over all 2n hypotheses.
inline DecisionSet bauer_bonferroni(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const double thr = alpha / static_cast<double>(n);
    std::vector<std::size_t> rejected;
    for (std::size_t i = 0; i < 2 * n; ++i)
        if (pp.p[i] <= thr) rejected.push_back(i);
    return make_decision_set(Family::F1, n, std::move(rejected));
}

// Holm stepdown on the n two-sided p-values 2*min(p_i, 1-p_i); the direction
// of each rejection is the sign of the underlying statistic. Represented over
// F: a positive claim rejects H_i1, a negative claim rejects H_i2 and H_i3.
inline DecisionSet directional_holm(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    std::vector<double> twosided(n);
    for (std::size_t i = 0; i < n; ++i)
        twosided[i] = 2.0 * std::min(pp.p[i], pp.p[n + i]);
    const auto outcome = stepdown(twosided, make_schedule(ScheduleKind::Holm, n, alpha));
    std::vector<std::size_t> rejected;
    for (std::size_t i : outcome.rejected_indices) {
        if (statistic_sign(pp, i) > 0) {
            rejected.push_back(i);
        } else {
            rejected.push_back(n + i);
            rejected.push_back(2 * n + i);
        }
    }
    return make_decision_set(Family::F, n, std::move(rejected));
}

// Conventional Holm stepdown over the 2n hypotheses with constants
// alpha/(2n - i + 1), i = 1..2n.
inline DecisionSet conventional_holm_2n(const PairedPValues& pp, double alpha) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const auto outcome = stepdown(pp.p, make_schedule(ScheduleKind::Holm, 2 * n, alpha));
    return make_decision_set(Family::F1, n, outcome.rejected_indices);
}

// Separate testing of F as F1 plus F2, each at level alpha/2. f1_proc runs on
// the 2n paired p-values, f2_proc on the n point-null p-values F0(t_i); the
// rejection sets are merged into one decision over F.
inline DecisionSet combine_F(
    const PairedPValues& pp, double alpha,
    const std::function<DecisionSet(const PairedPValues&, double)>& f1_proc,
    const std::function<StepwiseOutcome(const std::vector<double>&, double)>& f2_proc) {
    detail::validate_level(alpha);
    validate_paired(pp);
    const std::size_t n = pp.pairs();
    const double half = alpha / 2.0;
    const DecisionSet d1 = f1_proc(pp, half);
    std::vector<double> f2p(pp.p.begin() + static_cast<std::ptrdiff_t>(n), pp.p.end());
    const StepwiseOutcome d2 = f2_proc(f2p, half);
    std::vector<std::size_t> rejected(d1.rejected);
    for (std::size_t i : d2.rejected_indices) rejected.push_back(2 * n + i);
    return make_decision_set(Family::F, n, std::move(rejected));
}

// Separate stepdown testing of F1 and F2 at level alpha/2 each, both with the
// proc3 constant formula.
inline DecisionSet combined_F_remark3(const PairedPValues& pp, double alpha) {
    return combine_F(
        pp, alpha, [](const PairedPValues& q, double level) { return proc3_stepdown(q, level); },
        [](const std::vector<double>& q, double level) {
            return stepdown(q, make_schedule(ScheduleKind::Proc3, q.size(), level));
        });
}

inline DecisionSet run_procedure(const ProcedureSpec& spec, const PairedPValues& pp) {
    if (requires_layout(spec.id) && !spec.layout)
        throw std::invalid_argument(std::string(procedure_name(spec.id)) +
                                    " requires a block layout");
    switch (spec.id) {
        case ProcedureId::P1: return proc1_two_stage(pp, spec.alpha);
        case ProcedureId::P1Prime: return proc1_prime(pp, spec.alpha);
        case ProcedureId::P2: return proc2_modified_two_stage(pp, spec.alpha);
        case ProcedureId::P3: return proc3_stepdown(pp, spec.alpha);
        case ProcedureId::P4: return proc4_block(pp, spec.alpha, *spec.layout);
        case ProcedureId::P5: return proc5_hochberg_directional(pp, spec.alpha);
        case ProcedureId::P6: return proc6_bh(pp, spec.alpha);
        case ProcedureId::P7: return proc7_between_block_bh(pp, spec.alpha, *spec.layout);
        case ProcedureId::P8: return proc8_within_block_bh(pp, spec.alpha, *spec.layout);
        case ProcedureId::P9: return proc9_positive_dep_bh(pp, spec.alpha);
        case ProcedureId::BauerBonferroni: return bauer_bonferroni(pp, spec.alpha);
        case ProcedureId::DirectionalHolm: return directional_holm(pp, spec.alpha);
        case ProcedureId::ConventionalHolm2n: return conventional_holm_2n(pp, spec.alpha);
        case ProcedureId::CombinedFRemark3: return combined_F_remark3(pp, spec.alpha);
    }
    throw std::invalid_argument("unknown procedure id");
}

inline DecisionSet run_procedure(const ProcedureSpec& spec, const StatisticVector& stats) {
    return run_procedure(spec, paired_pvalues(stats));
}

}  // namespace dirstep
