#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lotmatch/dates.hpp"
#include "lotmatch/geo.hpp"
#include "lotmatch/matcher.hpp"
#include "lotmatch/types.hpp"

namespace lotmatch {

// Before/after windows around an anchor date, in whole days. The defaults
// give [anchor-548, anchor-183) and (anchor+183, anchor+548], each spanning
// exactly 365 calendar days.
struct WindowSpec {
    int near_days = 183;
    int far_days = 548;
    Date coverage_lo = kCrimeLo;
    Date coverage_hi = kCrimeHiExclusive - 1;  // last covered day, inclusive
};

struct WindowCounts {
    std::string lot_id;
    Date anchor;
    double radius = 0;
    long before_serious = 0, before_other = 0;
    long after_serious = 0, after_other = 0;
    bool truncated = false;  // a window exits crime-data coverage

    long before_total() const { return before_serious + before_other; }
    long after_total() const { return after_serious + after_other; }
};

// Membership is decided on the crime's calendar date; Excluded crimes never
// count.
WindowCounts window_counts(const std::string& lot_id, double x, double y, Date anchor,
                           const GridIndex& crime_index, const std::vector<CrimeEvent>& crimes, double r,
                           const WindowSpec& spec = {});

enum class EffectCategory { Serious = 0, Other = 1, Total = 2 };

inline std::string_view effect_category_name(EffectCategory c) {
    switch (c) {
        case EffectCategory::Serious: return "serious";
        case EffectCategory::Other: return "other";
        default: return "total";
    }
}

// Within-pair DID per category: (after_t - before_t) - (after_c - before_c).
// Total is Serious + Other by linearity. Throws on anchor mismatch.
std::array<double, 3> pair_did(const WindowCounts& treated, const WindowCounts& control);

double window_change(const WindowCounts& wc, EffectCategory cat);
double window_before(const WindowCounts& wc, EffectCategory cat);

struct DidEstimate {
    EffectCategory category = EffectCategory::Total;
    size_t n = 0;             // pairs (or lots for the unmatched path)
    double pre_rate = 0;      // mean before-window count among treated lots
    double did_mean = 0;
    double se = 0;
    double t_stat = 0;
    double p_value = 0;
    double pct_of_pre = 0;    // 100 * did_mean / pre_rate
    bool degenerate_variance = false;  // se == 0; t and p are NaN
};

// Derived-quantity formulas, exposed because published tables are checked
// against exactly these.
inline double t_from_mean_se(double mean, double se) { return mean / se; }
inline double pct_from_mean_pre(double mean, double pre_rate) { return 100.0 * mean / pre_rate; }

// Mean of within-pair DIDs with the sample-SD standard error and a two-sided
// Student-t p-value at df = n-1. Throws when fewer than 2 values.
DidEstimate did_estimate(std::span<const double> pair_dids, std::span<const double> pre_rates,
                         EffectCategory category);

struct UnmatchedDid {
    EffectCategory category = EffectCategory::Total;
    size_t n_greened = 0, n_ungreened = 0;
    double mean_change_greened = 0;
    double mean_change_ungreened = 0;
    double did = 0;  // mean_change_greened - mean_change_ungreened
    double se = 0;   // two-sample (Welch)
    double t_stat = 0;
    double p_value = 0;
    double df = 0;
};

UnmatchedDid unmatched_did(std::span<const double> changes_greened, std::span<const double> changes_ungreened,
                           EffectCategory category);

// Student-t lower-tail CDF via the regularized incomplete beta function.
double t_cdf(double t, double df);
double two_sided_p(double t, double df);

double incomplete_beta(double a, double b, double x);

// Batch window counts for a lot list (parallel; slot-per-lot writes).
struct AnchoredLot {
    std::string id;
    double x = 0, y = 0;
    Date anchor;
};

std::vector<WindowCounts> batch_window_counts(const std::vector<AnchoredLot>& lots, const GridIndex& crime_index,
                                              const std::vector<CrimeEvent>& crimes, double r,
                                              const WindowSpec& spec = {});

}  // namespace lotmatch
