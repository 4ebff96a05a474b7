#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirstep {

// Hypothesis families over n parameters theta_1..theta_n.
//
//   F1      : the n pairs { H_i1: theta_i <= 0 , H_i2: theta_i > 0 }.
//             2n hypotheses, exactly n of which are true nulls for any theta.
//   F2      : the n point nulls { H_i3: theta_i = 0 } with alternative theta_i < 0.
//   F       : F1 together with F2 (3n hypotheses).
//   F1Prime : { H_i1 } alone (n hypotheses).
//   F2Prime : { H_i2, H_i3 } interleaved per parameter (2n hypotheses);
//             both members of a pair share the same p-value.
enum class Family { F1, F2, F, F1Prime, F2Prime };

enum class Direction { None, Positive, Negative };

inline std::size_t family_size(Family f, std::size_t n) {
    switch (f) {
        case Family::F1: return 2 * n;
        case Family::F2: return n;
        case Family::F: return 3 * n;
        case Family::F1Prime: return n;
        case Family::F2Prime: return 2 * n;
    }
    throw std::invalid_argument("unknown family tag");
}

inline const char* family_name(Family f) {
    switch (f) {
        case Family::F1: return "F1";
        case Family::F2: return "F2";
        case Family::F: return "F";
        case Family::F1Prime: return "F1_prime";
        case Family::F2Prime: return "F2_prime";
    }
    throw std::invalid_argument("unknown family tag");
}

inline Family family_from_name(const std::string& s) {
    if (s == "F1") return Family::F1;
    if (s == "F2") return Family::F2;
    if (s == "F") return Family::F;
    if (s == "F1_prime") return Family::F1Prime;
    if (s == "F2_prime") return Family::F2Prime;
    throw std::invalid_argument("unknown family tag: " + s);
}

// Parameter index (0-based) of hypothesis `idx` in family-local indexing.
inline std::size_t hypothesis_param(Family f, std::size_t n, std::size_t idx) {
    if (idx >= family_size(f, n)) throw std::out_of_range("hypothesis index out of range");
    switch (f) {
        case Family::F1: return idx < n ? idx : idx - n;
        case Family::F2: return idx;
        case Family::F: return idx % n;
        case Family::F1Prime: return idx;
        case Family::F2Prime: return idx / 2;
    }
    throw std::invalid_argument("unknown family tag");
}

// Kind j in {1,2,3} of hypothesis `idx`: H_ij.
inline int hypothesis_kind(Family f, std::size_t n, std::size_t idx) {
    if (idx >= family_size(f, n)) throw std::out_of_range("hypothesis index out of range");
    switch (f) {
        case Family::F1: return idx < n ? 1 : 2;
        case Family::F2: return 3;
        case Family::F: return static_cast<int>(idx / n) + 1;
        case Family::F1Prime: return 1;
        case Family::F2Prime: return idx % 2 == 0 ? 2 : 3;
    }
    throw std::invalid_argument("unknown family tag");
}

// Rejecting H_i1 claims theta_i > 0; rejecting H_i2 or H_i3 claims theta_i < 0.
inline Direction claim_direction(int kind) {
    return kind == 1 ? Direction::Positive : Direction::Negative;
}

// Label "H_<param>_<kind>" with 1-based parameter index.
inline std::string hypothesis_label(Family f, std::size_t n, std::size_t idx) {
    return "H_" + std::to_string(hypothesis_param(f, n, idx) + 1) + "_" +
           std::to_string(hypothesis_kind(f, n, idx));
}

inline void validate_theta(const std::vector<double>& theta) {
    if (theta.empty()) throw std::invalid_argument("theta must have length >= 1");
    for (double v : theta)
        if (!std::isfinite(v)) throw std::invalid_argument("theta entries must be finite");
}

// True-null membership under the family definitions:
// H_i1 true iff theta_i <= 0, H_i2 true iff theta_i > 0, H_i3 true iff theta_i = 0.
// The boundary theta_i = 0 makes H_i1 true and H_i2 false.
inline bool is_true_null(Family f, std::size_t n, std::size_t idx, const std::vector<double>& theta) {
    const double th = theta.at(hypothesis_param(f, n, idx));
    switch (hypothesis_kind(f, n, idx)) {
        case 1: return th <= 0.0;
        case 2: return th > 0.0;
        default: return th == 0.0;
    }
}

// Sorted family-local indices of the true null hypotheses.
inline std::vector<std::size_t> true_null_set(const std::vector<double>& theta, Family family) {
    validate_theta(theta);
    const std::size_t n = theta.size();
    std::vector<std::size_t> out;
    for (std::size_t idx = 0; idx < family_size(family, n); ++idx)
        if (is_true_null(family, n, idx, theta)) out.push_back(idx);
    return out;
}

// A partition of the parameter indices {0..n-1} into blocks.
struct FamilyLayout {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> blocks;

    static FamilyLayout single_block(std::size_t n) {
        FamilyLayout l;
        l.n = n;
        l.blocks.emplace_back();
        for (std::size_t i = 0; i < n; ++i) l.blocks.back().push_back(i);
        return l;
    }

    static FamilyLayout singletons(std::size_t n) {
        FamilyLayout l;
        l.n = n;
        for (std::size_t i = 0; i < n; ++i) l.blocks.push_back({i});
        return l;
    }

    bool equal_block_sizes() const {
        for (const auto& b : blocks)
            if (b.size() != blocks.front().size()) return false;
        return true;
    }
};

// Returns std::nullopt when the layout is a valid partition, otherwise a
// description of the first violation found.
inline std::optional<std::string> validate_layout(const FamilyLayout& layout) {
    if (layout.n == 0) return "n must be >= 1";
    if (layout.blocks.empty()) return "layout has no blocks";
    std::vector<int> seen(layout.n, 0);
    for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
        if (layout.blocks[b].empty())
            return "block " + std::to_string(b + 1) + " is empty";
        for (std::size_t i : layout.blocks[b]) {
            if (i >= layout.n)
                return "index " + std::to_string(i + 1) + " out of range in block " +
                       std::to_string(b + 1);
            if (seen[i]++)
                return "overlap at index " + std::to_string(i + 1);
        }
    }
    for (std::size_t i = 0; i < layout.n; ++i)
        if (!seen[i]) return "index " + std::to_string(i + 1) + " uncovered";
    return std::nullopt;
}

// Rejected hypotheses of one family plus the per-parameter directional claims
// they induce. Immutable value; build through make_decision_set.
struct DecisionSet {
    Family family = Family::F1;
    std::size_t n = 0;
    std::vector<std::size_t> rejected;     // sorted family-local indices
    std::vector<Direction> directions;     // length n

    std::size_t rejected_count() const { return rejected.size(); }
};

// Central direction mapping used by every procedure. Throws if a parameter
// would carry both claims, which cannot happen while every critical constant
// is below 1/2.
inline std::vector<Direction> directions_from_rejections(Family family, std::size_t n,
                                                         const std::vector<std::size_t>& rejected) {
    std::vector<Direction> dir(n, Direction::None);
    for (std::size_t idx : rejected) {
        const std::size_t i = hypothesis_param(family, n, idx);
        const Direction d = claim_direction(hypothesis_kind(family, n, idx));
        if (dir[i] != Direction::None && dir[i] != d)
            throw std::logic_error("conflicting directional claims for parameter " +
                                   std::to_string(i + 1));
        dir[i] = d;
    }
    return dir;
}

inline DecisionSet make_decision_set(Family family, std::size_t n, std::vector<std::size_t> rejected) {
    std::sort(rejected.begin(), rejected.end());
    rejected.erase(std::unique(rejected.begin(), rejected.end()), rejected.end());
    if (!rejected.empty() && rejected.back() >= family_size(family, n))
        throw std::out_of_range("rejected hypothesis index out of range");
    DecisionSet d;
    d.family = family;
    d.n = n;
    d.directions = directions_from_rejections(family, n, rejected);
    d.rejected = std::move(rejected);
    return d;
}

inline bool operator==(const DecisionSet& a, const DecisionSet& b) {
    return a.family == b.family && a.n == b.n && a.rejected == b.rejected &&
           a.directions == b.directions;
}

}  // namespace dirstep
