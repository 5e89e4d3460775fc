#include "lotmatch/did.hpp"

#include <cmath>

#include "lotmatch/error.hpp"
#include "lotmatch/parallel.hpp"

namespace lotmatch {

WindowCounts window_counts(const std::string& lot_id, double x, double y, Date anchor,
                           const GridIndex& crime_index, const std::vector<CrimeEvent>& crimes, double r,
                           const WindowSpec& spec) {
    WindowCounts wc;
    wc.lot_id = lot_id;
    wc.anchor = anchor;
    wc.radius = r;
    wc.truncated = (anchor.days - spec.far_days < spec.coverage_lo.days) ||
                   (anchor.days + spec.far_days > spec.coverage_hi.days);
    crime_index.for_each_within(x, y, r, [&](const IndexedPoint& p) {
        const CrimeEvent& ev = crimes[p.id];
        if (ev.category == CrimeCategory::Excluded) return;
        const int d = ev.when.date.days - anchor.days;
        if (d >= -spec.far_days && d < -spec.near_days) {
            if (ev.category == CrimeCategory::Serious)
                ++wc.before_serious;
            else
                ++wc.before_other;
        } else if (d > spec.near_days && d <= spec.far_days) {
            if (ev.category == CrimeCategory::Serious)
                ++wc.after_serious;
            else
                ++wc.after_other;
        }
    });
    return wc;
}

std::array<double, 3> pair_did(const WindowCounts& treated, const WindowCounts& control) {
    if (treated.anchor != control.anchor)
        throw data_error("pair_did: anchor mismatch between " + treated.lot_id + " and " + control.lot_id);
    const double ds = static_cast<double>(treated.after_serious - treated.before_serious) -
                      static_cast<double>(control.after_serious - control.before_serious);
    const double do_ = static_cast<double>(treated.after_other - treated.before_other) -
                       static_cast<double>(control.after_other - control.before_other);
    return {ds, do_, ds + do_};
}

double window_change(const WindowCounts& wc, EffectCategory cat) {
    switch (cat) {
        case EffectCategory::Serious: return static_cast<double>(wc.after_serious - wc.before_serious);
        case EffectCategory::Other: return static_cast<double>(wc.after_other - wc.before_other);
        default: return static_cast<double>(wc.after_total() - wc.before_total());
    }
}

double window_before(const WindowCounts& wc, EffectCategory cat) {
    switch (cat) {
        case EffectCategory::Serious: return static_cast<double>(wc.before_serious);
        case EffectCategory::Other: return static_cast<double>(wc.before_other);
        default: return static_cast<double>(wc.before_total());
    }
}

namespace {
double mean_of(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double mean) {
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}
}  // namespace

DidEstimate did_estimate(std::span<const double> pair_dids, std::span<const double> pre_rates,
                         EffectCategory category) {
    if (pair_dids.size() < 2) throw data_error("did_estimate: need at least 2 pairs");
    DidEstimate est;
    est.category = category;
    est.n = pair_dids.size();
    est.did_mean = mean_of(pair_dids);
    est.pre_rate = pre_rates.empty() ? std::nan("") : mean_of(pre_rates);
    const double var = sample_var(pair_dids, est.did_mean);
    est.se = std::sqrt(var / static_cast<double>(est.n));
    if (est.se == 0.0) {
        est.degenerate_variance = true;
        est.t_stat = std::nan("");
        est.p_value = std::nan("");
    } else {
        est.t_stat = t_from_mean_se(est.did_mean, est.se);
        est.p_value = two_sided_p(est.t_stat, static_cast<double>(est.n - 1));
    }
    est.pct_of_pre = pct_from_mean_pre(est.did_mean, est.pre_rate);
    return est;
}

UnmatchedDid unmatched_did(std::span<const double> changes_greened, std::span<const double> changes_ungreened,
                           EffectCategory category) {
    if (changes_greened.size() < 2 || changes_ungreened.size() < 2)
        throw data_error("unmatched_did: need at least 2 lots per group");
    UnmatchedDid u;
    u.category = category;
    u.n_greened = changes_greened.size();
    u.n_ungreened = changes_ungreened.size();
    u.mean_change_greened = mean_of(changes_greened);
    u.mean_change_ungreened = mean_of(changes_ungreened);
    u.did = u.mean_change_greened - u.mean_change_ungreened;
    const double vg = sample_var(changes_greened, u.mean_change_greened) / static_cast<double>(u.n_greened);
    const double vu = sample_var(changes_ungreened, u.mean_change_ungreened) / static_cast<double>(u.n_ungreened);
    u.se = std::sqrt(vg + vu);
    if (u.se > 0) {
        u.t_stat = u.did / u.se;
        // Welch-Satterthwaite degrees of freedom.
        const double denom = vg * vg / static_cast<double>(u.n_greened - 1) +
                             vu * vu / static_cast<double>(u.n_ungreened - 1);
        u.df = denom > 0 ? (vg + vu) * (vg + vu) / denom : static_cast<double>(u.n_greened + u.n_ungreened - 2);
        u.p_value = two_sided_p(u.t_stat, u.df);
    } else {
        u.t_stat = std::nan("");
        u.p_value = std::nan("");
        u.df = static_cast<double>(u.n_greened + u.n_ungreened - 2);
    }
    return u;
}

// ---------------------------------------------------------------------------
// Student t CDF
// ---------------------------------------------------------------------------

namespace {

// Continued fraction for the incomplete beta (Lentz's algorithm).
double betacf(double a, double b, double x) {
    constexpr int kMaxIt = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIt; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
    if (!(df >= 1.0)) throw data_error("t_cdf: df must be >= 1");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    return t < 0 ? tail : 1.0 - tail;
}

double two_sided_p(double t, double df) { return 2.0 * t_cdf(-std::abs(t), df); }

std::vector<WindowCounts> batch_window_counts(const std::vector<AnchoredLot>& lots, const GridIndex& crime_index,
                                              const std::vector<CrimeEvent>& crimes, double r,
                                              const WindowSpec& spec) {
    std::vector<WindowCounts> out(lots.size());
    parallel_for(lots.size(), [&](size_t i) {
        out[i] = window_counts(lots[i].id, lots[i].x, lots[i].y, lots[i].anchor, crime_index, crimes, r, spec);
    });
    return out;
}

}  // namespace lotmatch
