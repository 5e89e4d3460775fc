#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lotmatch/did.hpp"
#include "lotmatch/features.hpp"
#include "lotmatch/matcher.hpp"

namespace lotmatch {

enum class SubgroupKind { Pooled, LandUseQuartile, BusinessPresence };
enum class SubgroupSelector { All, TopQuartile, BottomQuartile, Present, Absent };

std::string_view subgroup_kind_name(SubgroupKind k);
std::string_view subgroup_selector_name(SubgroupSelector s);

struct SubgroupSpec {
    SubgroupKind kind = SubgroupKind::Pooled;
    int dimension = -1;  // ZoningType or BusinessType index; -1 for pooled
    SubgroupSelector selector = SubgroupSelector::All;
};

// Per-pair inputs precomputed once: the total-crime DID, the treated before
// count, the pair-mean land-use exposures and the joint business presence.
enum class Presence { Present, Absent, Mixed };

struct PairExposure {
    std::string treated_id;
    double did_total = 0;
    double pre_total = 0;
    std::array<double, kNamedZoningTypes> land_exposure{};  // mean of treated and control
    std::array<Presence, kBusinessTypes> business{};
};

// Exposure for one pair: covariate mean of the two lots; business presence is
// Present only when both lots have the indicator, Absent only when neither
// does, otherwise Mixed (excluded from presence subsets). Throws when either
// lot has no covariates.
PairExposure pair_exposure(const MatchedPair& pair, const CovariateTable& covariates, double did_total,
                           double pre_total);

// Quartile policy. Caption mode contrasts the top 25% against the bottom 25%;
// text mode widens "top" to the top 75%. Cut points use nearest-rank
// quantiles of the exposure distribution over all pairs.
enum class QuartileMode { Caption, Text };

struct SubsetResult {
    std::vector<size_t> indices;  // into the exposure list
    bool degenerate = false;      // all exposures equal: both quartile subsets = full set
};

double nearest_rank_quantile(std::vector<double> values, double p);

SubsetResult subset_pairs(const std::vector<PairExposure>& exposures, const SubgroupSpec& spec,
                          QuartileMode mode);

struct ModerationRow {
    SubgroupSpec spec;
    std::string dimension_name;
    size_t n_pairs = 0;
    size_t n_excluded = 0;  // pairs outside the subset (incl. Mixed)
    DidEstimate estimate;
    bool significant = false;  // two-sided p < 0.05
    bool degenerate = false;
};

// One row per (land-use type x Top/Bottom) and (business type x
// Present/Absent), plus the pooled all-pairs reference row first. Rows whose
// subset holds fewer than 2 pairs are omitted and reported.
struct ModerationReport {
    std::vector<ModerationRow> rows;
    std::vector<std::string> omitted;  // "kind/dimension/selector" labels
};

ModerationReport moderation_report(const std::vector<PairExposure>& exposures, QuartileMode mode);

}  // namespace lotmatch
