#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lotmatch/dates.hpp"
#include "lotmatch/features.hpp"

namespace lotmatch {

struct TreatedLot {
    std::string id;
    double score = 0;
    Date greening_date;
};

struct ControlLot {
    std::string id;
    double score = 0;
};

struct MatchedPair {
    std::string treated_id;
    std::string control_id;
    double treated_score = 0;
    double control_score = 0;
    double gap = 0;          // |treated_score - control_score|
    Date anchor_date;        // the treated lot's greening date, transferred
};

struct MatchOptions {
    bool with_replacement = false;
    std::optional<double> caliper;  // pairs with gap above this are dropped
};

struct MatchResult {
    std::vector<MatchedPair> pairs;            // ordered by treated id
    std::vector<std::string> unmatched_treated;
    size_t dropped_by_caliper = 0;
};

// Greedy 1:1 nearest-score matching. Treated lots pick in descending score
// order (ties by ascending id); each takes the available control minimizing
// the score gap, gap ties resolving to the smaller control id. Without
// replacement each control is used at most once. Deterministic and invariant
// to input row order. Throws when the control list is empty.
MatchResult match_pairs(std::vector<TreatedLot> treated, std::vector<ControlLot> controls,
                        const MatchOptions& opts = {});

struct Smd {
    double value = 0;
    bool defined = true;  // false when the pooled SD is zero
};

// Pooled SD over the two (unmatched) groups: sqrt((var_t + var_c) / 2),
// sample variance convention.
double pooled_sd(std::span<const double> values_t, std::span<const double> values_c);

// (mean_t - mean_c) / sd_pool. Throws on an empty group.
Smd smd(std::span<const double> values_t, std::span<const double> values_c, double sd_pool);

struct BalanceRow {
    std::string covariate;
    double smd_unmatched = 0;
    double smd_matched = 0;
    bool defined = true;
};

// One row per covariate: SMD over all treated vs all controls, and over the
// paired subsets, sharing the unmatched pooled-SD denominator so both dots in
// a balance plot live on one scale.
std::vector<BalanceRow> balance_report(const CovariateTable& covariates,
                                       const std::vector<std::string>& treated_ids,
                                       const std::vector<std::string>& control_ids,
                                       const std::vector<MatchedPair>& pairs);

}  // namespace lotmatch
