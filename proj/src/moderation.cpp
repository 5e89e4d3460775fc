#include "lotmatch/moderation.hpp"

#include <algorithm>
#include <cmath>

#include "lotmatch/error.hpp"

namespace lotmatch {

std::string_view subgroup_kind_name(SubgroupKind k) {
    switch (k) {
        case SubgroupKind::Pooled: return "pooled";
        case SubgroupKind::LandUseQuartile: return "landuse_quartile";
        default: return "business_presence";
    }
}

std::string_view subgroup_selector_name(SubgroupSelector s) {
    switch (s) {
        case SubgroupSelector::All: return "all";
        case SubgroupSelector::TopQuartile: return "top_quartile";
        case SubgroupSelector::BottomQuartile: return "bottom_quartile";
        case SubgroupSelector::Present: return "present";
        default: return "absent";
    }
}

PairExposure pair_exposure(const MatchedPair& pair, const CovariateTable& covariates, double did_total,
                           double pre_total) {
    const int t = covariates.find(pair.treated_id);
    const int c = covariates.find(pair.control_id);
    if (t < 0 || c < 0)
        throw data_error("pair_exposure: missing covariates for pair " + pair.treated_id + "/" + pair.control_id);
    const auto& vt = covariates.values[static_cast<size_t>(t)];
    const auto& vc = covariates.values[static_cast<size_t>(c)];
    PairExposure e;
    e.treated_id = pair.treated_id;
    e.did_total = did_total;
    e.pre_total = pre_total;
    for (int i = 0; i < kNamedZoningTypes; ++i) {
        const size_t col = static_cast<size_t>(cov::land_first + i);
        e.land_exposure[static_cast<size_t>(i)] = (vt[col] + vc[col]) / 2.0;
    }
    for (int i = 0; i < kBusinessTypes; ++i) {
        const size_t col = static_cast<size_t>(cov::biz_first + i);
        const bool bt = vt[col] != 0.0, bc = vc[col] != 0.0;
        e.business[static_cast<size_t>(i)] = bt && bc ? Presence::Present : (!bt && !bc ? Presence::Absent : Presence::Mixed);
    }
    return e;
}

double nearest_rank_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw data_error("quantile of empty list");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    size_t rank = static_cast<size_t>(std::ceil(p * n));
    if (rank == 0) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

SubsetResult subset_pairs(const std::vector<PairExposure>& exposures, const SubgroupSpec& spec,
                          QuartileMode mode) {
    SubsetResult result;
    if (spec.kind == SubgroupKind::Pooled) {
        result.indices.resize(exposures.size());
        for (size_t i = 0; i < exposures.size(); ++i) result.indices[i] = i;
        return result;
    }
    if (spec.kind == SubgroupKind::BusinessPresence) {
        const Presence want = spec.selector == SubgroupSelector::Present ? Presence::Present : Presence::Absent;
        for (size_t i = 0; i < exposures.size(); ++i)
            if (exposures[i].business[static_cast<size_t>(spec.dimension)] == want) result.indices.push_back(i);
        return result;
    }
    // Land-use quartiles.
    std::vector<double> vals;
    vals.reserve(exposures.size());
    for (const auto& e : exposures) vals.push_back(e.land_exposure[static_cast<size_t>(spec.dimension)]);
    const double q1 = nearest_rank_quantile(vals, 0.25);
    const double q3 = nearest_rank_quantile(vals, 0.75);
    const double lo = *std::min_element(vals.begin(), vals.end());
    const double hi = *std::max_element(vals.begin(), vals.end());
    result.degenerate = lo == hi;
    for (size_t i = 0; i < exposures.size(); ++i) {
        const double v = vals[i];
        bool in = false;
        if (spec.selector == SubgroupSelector::BottomQuartile) {
            in = v <= q1;
        } else {
            // Caption mode: top quartile. Text mode: the largest 75%.
            in = mode == QuartileMode::Caption ? v >= q3 : v >= q1;
        }
        if (in) result.indices.push_back(i);
    }
    return result;
}

namespace {
ModerationRow make_row(const std::vector<PairExposure>& exposures, const SubgroupSpec& spec,
                       std::string dimension_name, const SubsetResult& subset, size_t total) {
    std::vector<double> dids, pres;
    dids.reserve(subset.indices.size());
    pres.reserve(subset.indices.size());
    for (size_t i : subset.indices) {
        dids.push_back(exposures[i].did_total);
        pres.push_back(exposures[i].pre_total);
    }
    ModerationRow row;
    row.spec = spec;
    row.dimension_name = std::move(dimension_name);
    row.n_pairs = subset.indices.size();
    row.n_excluded = total - subset.indices.size();
    row.degenerate = subset.degenerate;
    row.estimate = did_estimate(dids, pres, EffectCategory::Total);
    row.significant = !row.estimate.degenerate_variance && row.estimate.p_value < 0.05;
    return row;
}
}  // namespace

ModerationReport moderation_report(const std::vector<PairExposure>& exposures, QuartileMode mode) {
    if (exposures.size() < 2) throw data_error("moderation_report: need at least 2 pairs");
    // Canonical order by treated id keeps every reduction deterministic.
    std::vector<PairExposure> ordered = exposures;
    std::sort(ordered.begin(), ordered.end(),
              [](const PairExposure& a, const PairExposure& b) { return a.treated_id < b.treated_id; });

    ModerationReport report;
    const size_t total = ordered.size();

    report.rows.push_back(make_row(ordered, SubgroupSpec{SubgroupKind::Pooled, -1, SubgroupSelector::All}, "all",
                                   subset_pairs(ordered, {SubgroupKind::Pooled, -1, SubgroupSelector::All}, mode),
                                   total));

    // Land-use rows first, alphabetical by type name, then business rows.
    std::array<int, kNamedZoningTypes> land_order;
    for (int i = 0; i < kNamedZoningTypes; ++i) land_order[static_cast<size_t>(i)] = i;
    std::sort(land_order.begin(), land_order.end(),
              [](int a, int b) { return kZoningNames[static_cast<size_t>(a)] < kZoningNames[static_cast<size_t>(b)]; });

    auto emit = [&](const SubgroupSpec& spec, std::string name) {
        const SubsetResult subset = subset_pairs(ordered, spec, mode);
        if (subset.indices.size() < 2) {
            report.omitted.push_back(std::string(subgroup_kind_name(spec.kind)) + "/" + name + "/" +
                                     std::string(subgroup_selector_name(spec.selector)));
            return;
        }
        report.rows.push_back(make_row(ordered, spec, std::move(name), subset, total));
    };

    for (int t : land_order) {
        const std::string name(kZoningNames[static_cast<size_t>(t)]);
        emit({SubgroupKind::LandUseQuartile, t, SubgroupSelector::TopQuartile}, name);
        emit({SubgroupKind::LandUseQuartile, t, SubgroupSelector::BottomQuartile}, name);
    }
    for (int t = 0; t < kBusinessTypes; ++t) {
        const std::string name(kBusinessNames[static_cast<size_t>(t)]);
        emit({SubgroupKind::BusinessPresence, t, SubgroupSelector::Present}, name);
        emit({SubgroupKind::BusinessPresence, t, SubgroupSelector::Absent}, name);
    }
    return report;
}

}  // namespace lotmatch
