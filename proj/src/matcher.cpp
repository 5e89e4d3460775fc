#include "lotmatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lotmatch/error.hpp"

namespace lotmatch {

MatchResult match_pairs(std::vector<TreatedLot> treated, std::vector<ControlLot> controls,
                        const MatchOptions& opts) {
    if (controls.empty()) throw data_error("match_pairs: no controls");

    // Canonical processing order: hardest-to-match (highest score) first.
    std::sort(treated.begin(), treated.end(), [](const TreatedLot& a, const TreatedLot& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });

    // Available controls ordered by (score, id); within one score value the
    // first element is the smallest id, which the tie rule wants.
    std::set<std::pair<double, std::string>> pool;
    for (const auto& c : controls) pool.emplace(c.score, c.id);

    MatchResult result;
    result.pairs.reserve(treated.size());

    for (const auto& t : treated) {
        if (pool.empty()) {
            result.unmatched_treated.push_back(t.id);
            continue;
        }
        auto above = pool.lower_bound({t.score, std::string()});
        std::optional<std::pair<double, std::string>> pick;

        // First element of the score group at-or-above is already minimal id.
        std::optional<std::pair<double, std::string>> cand_above;
        if (above != pool.end()) cand_above = *above;
        std::optional<std::pair<double, std::string>> cand_below;
        if (above != pool.begin()) {
            double below_score = std::prev(above)->first;
            cand_below = *pool.lower_bound({below_score, std::string()});
        }

        if (cand_above && cand_below) {
            const double gap_above = cand_above->first - t.score;
            const double gap_below = t.score - cand_below->first;
            if (gap_below < gap_above)
                pick = cand_below;
            else if (gap_above < gap_below)
                pick = cand_above;
            else
                pick = cand_below->second < cand_above->second ? cand_below : cand_above;
        } else {
            pick = cand_above ? cand_above : cand_below;
        }

        const double gap = std::abs(t.score - pick->first);
        if (opts.caliper && gap > *opts.caliper) {
            ++result.dropped_by_caliper;
            result.unmatched_treated.push_back(t.id);
            continue;
        }
        result.pairs.push_back({t.id, pick->second, t.score, pick->first, gap, t.greening_date});
        if (!opts.with_replacement) pool.erase(*pick);
    }

    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.treated_id < b.treated_id; });
    std::sort(result.unmatched_treated.begin(), result.unmatched_treated.end());
    return result;
}

namespace {
double mean_of(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}
}  // namespace

double pooled_sd(std::span<const double> values_t, std::span<const double> values_c) {
    return std::sqrt((sample_var(values_t) + sample_var(values_c)) / 2.0);
}

Smd smd(std::span<const double> values_t, std::span<const double> values_c, double sd_pool) {
    if (values_t.empty() || values_c.empty()) throw data_error("smd: empty group");
    if (!(sd_pool > 0)) return {0.0, false};
    return {(mean_of(values_t) - mean_of(values_c)) / sd_pool, true};
}

std::vector<BalanceRow> balance_report(const CovariateTable& covariates,
                                       const std::vector<std::string>& treated_ids,
                                       const std::vector<std::string>& control_ids,
                                       const std::vector<MatchedPair>& pairs) {
    auto rows_for = [&](const std::vector<std::string>& ids) {
        std::vector<int> out;
        out.reserve(ids.size());
        for (const auto& id : ids) {
            const int idx = covariates.find(id);
            if (idx < 0) throw data_error("balance_report: no covariates for lot " + id);
            out.push_back(idx);
        }
        return out;
    };
    const std::vector<int> t_all = rows_for(treated_ids);
    const std::vector<int> c_all = rows_for(control_ids);
    std::vector<std::string> pt_ids, pc_ids;
    pt_ids.reserve(pairs.size());
    pc_ids.reserve(pairs.size());
    for (const auto& p : pairs) {
        pt_ids.push_back(p.treated_id);
        pc_ids.push_back(p.control_id);
    }
    const std::vector<int> t_pair = rows_for(pt_ids);
    const std::vector<int> c_pair = rows_for(pc_ids);

    std::vector<BalanceRow> report;
    report.reserve(kNumCovariates);
    std::vector<double> vt, vc, pvt, pvc;
    for (int k = 0; k < kNumCovariates; ++k) {
        auto fill = [&](const std::vector<int>& rows, std::vector<double>& out) {
            out.clear();
            out.reserve(rows.size());
            for (int r : rows) out.push_back(covariates.values[static_cast<size_t>(r)][static_cast<size_t>(k)]);
        };
        fill(t_all, vt);
        fill(c_all, vc);
        fill(t_pair, pvt);
        fill(c_pair, pvc);
        const double sd = pooled_sd(vt, vc);  // fixed denominator for both columns
        BalanceRow row;
        row.covariate = covariate_names()[static_cast<size_t>(k)];
        const Smd u = smd(vt, vc, sd);
        const Smd m = smd(pvt, pvc, sd);
        row.defined = u.defined && m.defined;
        row.smd_unmatched = u.defined ? u.value : std::nan("");
        row.smd_matched = m.defined ? m.value : std::nan("");
        report.push_back(std::move(row));
    }
    return report;
}

}  // namespace lotmatch
