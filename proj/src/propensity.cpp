#include "lotmatch/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lotmatch/error.hpp"

namespace lotmatch {

namespace {

constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 100;
constexpr double kRidgeFallback = 1e-6;
constexpr double kProbClamp = 1e-15;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Cholesky solve of the symmetric positive definite system A x = b.
// Returns false when a pivot collapses.
bool cholesky_solve(std::vector<double>& A, std::vector<double>& b, size_t n) {
    for (size_t j = 0; j < n; ++j) {
        double d = A[j * n + j];
        for (size_t k = 0; k < j; ++k) d -= A[j * n + k] * A[j * n + k];
        if (!(d > 1e-300)) return false;
        d = std::sqrt(d);
        A[j * n + j] = d;
        for (size_t i = j + 1; i < n; ++i) {
            double s = A[i * n + j];
            for (size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            A[i * n + j] = s / d;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= A[k * n + i] * b[k];
        b[i] = s / A[i * n + i];
    }
    return true;
}

double linear_predictor(const Matrix& X, const std::vector<double>& beta, size_t row) {
    double z = beta[0];
    for (size_t c = 0; c < X.cols; ++c) z += beta[c + 1] * X.at(row, c);
    return z;
}

struct FitOutcome {
    std::vector<double> beta;
    FitReport report;
    bool diverged = false;
};

FitOutcome irls(const Matrix& X, const std::vector<int>& y, double ridge) {
    const size_t n = X.rows, p = X.cols + 1;
    FitOutcome out;
    out.beta.assign(p, 0.0);
    std::vector<double> grad(p), step(p), hess(p * p), cand(p);

    double ll = logistic_loglik(X, y, out.beta, ridge);
    out.report.ll_trace.push_back(ll);

    for (int iter = 1; iter <= kMaxIter; ++iter) {
        logistic_gradient(X, y, out.beta, grad, ridge);
        double gnorm = 0;
        for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
        out.report.iterations = iter - 1;
        out.report.final_grad_norm = gnorm;
        if (gnorm < kGradTol) {
            out.report.converged = true;
            return out;
        }

        // Hessian of the negative log-likelihood: X'WX with W = p(1-p),
        // plus the ridge on slope diagonals. Upper triangle accumulated,
        // then mirrored.
        std::fill(hess.begin(), hess.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            double zi = linear_predictor(X, out.beta, i);
            double pi = sigmoid(zi);
            double w = std::max(pi * (1.0 - pi), 1e-12);
            hess[0] += w;
            for (size_t a = 0; a < X.cols; ++a) {
                const double xa = X.at(i, a) * w;
                hess[a + 1] += xa;  // (0, a+1)
                for (size_t b = a; b < X.cols; ++b) hess[(a + 1) * p + (b + 1)] += xa * X.at(i, b);
            }
        }
        for (size_t a = 0; a < p; ++a)
            for (size_t b = a + 1; b < p; ++b) hess[b * p + a] = hess[a * p + b];
        for (size_t a = 1; a < p; ++a) hess[a * p + a] += ridge;

        step = grad;
        std::vector<double> hess_copy = hess;
        if (!cholesky_solve(hess_copy, step, p)) {
            out.diverged = true;
            return out;
        }

        // Step-halving keeps the log-likelihood nondecreasing.
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            for (size_t a = 0; a < p; ++a) cand[a] = out.beta[a] + scale * step[a];
            double cand_ll = logistic_loglik(X, y, cand, ridge);
            if (std::isfinite(cand_ll) && cand_ll >= ll) {
                out.beta = cand;
                ll = cand_ll;
                out.report.ll_trace.push_back(ll);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            out.diverged = true;
            return out;
        }
        if (std::abs(out.beta[0]) > 1e3 || std::any_of(out.beta.begin(), out.beta.end(),
                                                       [](double b) { return std::abs(b) > 1e4; })) {
            out.diverged = true;  // runaway coefficients, typically separation
            return out;
        }
    }
    out.diverged = true;  // no convergence within the iteration budget
    return out;
}

}  // namespace

Standardization standardize(const Matrix& design, const std::vector<std::string>& names, Matrix& out) {
    if (design.rows < 2) throw data_error("standardize requires at least 2 rows");
    if (names.size() != design.cols) throw data_error("standardize: name/column mismatch");
    Standardization s;
    const double n = static_cast<double>(design.rows);
    std::vector<double> means(design.cols), sds(design.cols);
    for (size_t c = 0; c < design.cols; ++c) {
        double sum = 0;
        for (size_t r = 0; r < design.rows; ++r) sum += design.at(r, c);
        means[c] = sum / n;
        double ss = 0;
        for (size_t r = 0; r < design.rows; ++r) {
            const double d = design.at(r, c) - means[c];
            ss += d * d;
        }
        sds[c] = std::sqrt(ss / (n - 1.0));
    }
    for (size_t c = 0; c < design.cols; ++c) {
        if (sds[c] > 0) {
            s.kept.push_back(static_cast<int>(c));
            s.kept_names.push_back(names[c]);
            s.mean.push_back(means[c]);
            s.sd.push_back(sds[c]);
        } else {
            s.dropped.push_back(names[c]);
        }
    }
    if (s.kept.empty()) throw data_error("standardize: all columns are degenerate");
    out = Matrix(design.rows, s.kept.size());
    for (size_t r = 0; r < design.rows; ++r)
        for (size_t k = 0; k < s.kept.size(); ++k)
            out.at(r, k) = (design.at(r, static_cast<size_t>(s.kept[k])) - s.mean[k]) / s.sd[k];
    return s;
}

double logistic_loglik(const Matrix& X, const std::vector<int>& y, const std::vector<double>& beta, double ridge) {
    double ll = 0;
    for (size_t i = 0; i < X.rows; ++i) {
        const double z = linear_predictor(X, beta, i);
        ll += y[i] * z - softplus(z);
    }
    if (ridge > 0)
        for (size_t a = 1; a < beta.size(); ++a) ll -= 0.5 * ridge * beta[a] * beta[a];
    return ll;
}

void logistic_gradient(const Matrix& X, const std::vector<int>& y, const std::vector<double>& beta,
                       std::vector<double>& grad, double ridge) {
    grad.assign(X.cols + 1, 0.0);
    for (size_t i = 0; i < X.rows; ++i) {
        const double resid = y[i] - sigmoid(linear_predictor(X, beta, i));
        grad[0] += resid;
        for (size_t c = 0; c < X.cols; ++c) grad[c + 1] += resid * X.at(i, c);
    }
    if (ridge > 0)
        for (size_t a = 1; a < grad.size(); ++a) grad[a] -= ridge * beta[a];
}

PropensityModel fit_logistic(const Matrix& X, const std::vector<int>& y, Standardization stdz) {
    if (X.rows != y.size()) throw data_error("fit_logistic: label/row mismatch");
    const long pos = std::count(y.begin(), y.end(), 1);
    if (pos == 0 || pos == static_cast<long>(y.size()))
        throw data_error("fit_logistic: both classes must be present");
    for (double v : X.data)
        if (std::isnan(v)) throw data_error("fit_logistic: design contains NaN");

    FitOutcome outcome = irls(X, y, 0.0);
    if (outcome.diverged) {
        FitOutcome ridged = irls(X, y, kRidgeFallback);
        ridged.report.ridged = true;
        outcome = std::move(ridged);
    }

    PropensityModel model;
    if (stdz.kept.empty() && stdz.mean.empty()) {
        // Identity standardization for callers fitting a pre-scaled design.
        for (size_t c = 0; c < X.cols; ++c) {
            stdz.kept.push_back(static_cast<int>(c));
            stdz.kept_names.push_back("x" + std::to_string(c));
            stdz.mean.push_back(0.0);
            stdz.sd.push_back(1.0);
        }
    }
    model.stdz = std::move(stdz);
    model.beta = std::move(outcome.beta);
    model.report = std::move(outcome.report);
    return model;
}

PropensityModel fit_propensity(const Matrix& raw_design, const std::vector<std::string>& names,
                               const std::vector<int>& y) {
    Matrix X;
    Standardization stdz = standardize(raw_design, names, X);
    return fit_logistic(X, y, std::move(stdz));
}

static double predict_z(const PropensityModel& model, const double* raw, size_t stride_count) {
    double z = model.beta[0];
    for (size_t k = 0; k < model.stdz.kept.size(); ++k) {
        const size_t col = static_cast<size_t>(model.stdz.kept[k]);
        if (col >= stride_count) throw data_error("predict: covariate index out of range");
        const double v = raw[col];
        if (std::isnan(v)) throw data_error("predict: missing covariate " + model.stdz.kept_names[k]);
        z += model.beta[k + 1] * (v - model.stdz.mean[k]) / model.stdz.sd[k];
    }
    return z;
}

double predict(const PropensityModel& model, const std::array<double, kNumCovariates>& raw) {
    const double p = sigmoid(predict_z(model, raw.data(), raw.size()));
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double predict_row(const PropensityModel& model, const Matrix& raw_design, size_t row) {
    const double p = sigmoid(predict_z(model, raw_design.data.data() + row * raw_design.cols, raw_design.cols));
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

namespace {

// Orients scores and labels toward the declared positive class so the same
// rank/threshold machinery serves either convention.
struct Oriented {
    std::vector<double> score;  // higher = more positive
    std::vector<int> pos;       // 1 when the true class is positive
    double threshold = 0;
    size_t n_pos = 0, n_neg = 0;
};

Oriented orient(const std::vector<double>& scores, const std::vector<LotStatus>& labels, double threshold,
                LotStatus positive_class) {
    if (scores.size() != labels.size()) throw data_error("evaluate: score/label mismatch");
    Oriented o;
    o.score.reserve(scores.size());
    o.pos.reserve(scores.size());
    const bool pos_is_greened = positive_class == LotStatus::Greened;
    o.threshold = pos_is_greened ? threshold : 1.0 - threshold;
    for (size_t i = 0; i < scores.size(); ++i) {
        o.score.push_back(pos_is_greened ? scores[i] : 1.0 - scores[i]);
        const bool is_pos = (labels[i] == positive_class);
        o.pos.push_back(is_pos ? 1 : 0);
        if (is_pos)
            ++o.n_pos;
        else
            ++o.n_neg;
    }
    if (o.n_pos == 0 || o.n_neg == 0) throw data_error("evaluate: both classes must be present");
    return o;
}

// Rank-statistic AUC, ties get half credit. The numerator is a half-integer,
// so the pairwise oracle reproduces it bit for bit.
double rank_auc(const Oriented& o) {
    const size_t n = o.score.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return o.score[a] < o.score[b]; });
    double rank_sum_pos = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && o.score[idx[j]] == o.score[idx[i]]) ++j;
        const double midrank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (size_t k = i; k < j; ++k)
            if (o.pos[idx[k]]) rank_sum_pos += midrank;
        i = j;
    }
    const double P = static_cast<double>(o.n_pos), N = static_cast<double>(o.n_neg);
    return (rank_sum_pos - P * (P + 1.0) / 2.0) / (P * N);
}

}  // namespace

ClassifierMetrics evaluate(const std::vector<double>& scores, const std::vector<LotStatus>& labels,
                           double threshold, LotStatus positive_class) {
    Oriented o = orient(scores, labels, threshold, positive_class);
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (size_t i = 0; i < o.score.size(); ++i) {
        const bool pred_pos = o.score[i] >= o.threshold;  // tie at the boundary is positive
        if (o.pos[i]) {
            (pred_pos ? tp : fn) += 1.0;
        } else {
            (pred_pos ? fp : tn) += 1.0;
        }
    }
    const double n = tp + fp + tn + fn;
    ClassifierMetrics m;
    m.threshold = threshold;
    m.roc_auc = rank_auc(o);
    m.accuracy = (tp + tn) / n;
    m.sensitivity = tp / (tp + fn);
    m.specificity = tn / (tn + fp);
    m.balanced_accuracy = (m.sensitivity + m.specificity) / 2.0;
    m.ppv = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    m.npv = (tn + fn) > 0 ? tn / (tn + fn) : 0.0;
    const double p_obs = m.accuracy;
    const double p_chance = ((tp + fp) * (tp + fn) + (tn + fn) * (tn + fp)) / (n * n);
    m.kappa = p_chance < 1.0 ? (p_obs - p_chance) / (1.0 - p_chance) : 0.0;
    return m;
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<LotStatus>& labels,
                                LotStatus positive_class) {
    Oriented o = orient(scores, labels, /*threshold=*/0.5, positive_class);
    const size_t n = o.score.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return o.score[a] > o.score[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0});
    double tp = 0, fp = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && o.score[idx[j]] == o.score[idx[i]]) ++j;
        for (size_t k = i; k < j; ++k) {
            if (o.pos[idx[k]])
                tp += 1.0;
            else
                fp += 1.0;
        }
        curve.push_back({fp / static_cast<double>(o.n_neg), tp / static_cast<double>(o.n_pos)});
        i = j;
    }
    return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
    double area = 0;
    for (size_t i = 1; i < curve.size(); ++i)
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    return area;
}

std::string_view ablation_name(AblationSet set) {
    switch (set) {
        case AblationSet::All: return "all";
        case AblationSet::Economic: return "economic";
        case AblationSet::Demographic: return "demographic";
        case AblationSet::LandUse: return "landuse";
        default: return "business";
    }
}

std::vector<int> ablation_columns(AblationSet set, bool drop_collinear) {
    std::vector<int> cols;
    auto add_demo = [&] {
        for (int c : {cov::pop_total, cov::frac_white, cov::frac_black, cov::frac_hispanic, cov::frac_asian})
            cols.push_back(c);
    };
    auto add_econ = [&] {
        cols.push_back(cov::per_capita_income);
        const int last = drop_collinear ? kPovertyBrackets - 1 : kPovertyBrackets;
        for (int i = 0; i < last; ++i) cols.push_back(cov::pov_b1 + i);
    };
    auto add_land = [&] {
        for (int i = 0; i < kNamedZoningTypes; ++i) cols.push_back(cov::land_first + i);
    };
    auto add_biz = [&] {
        for (int i = 0; i < kBusinessTypes; ++i) cols.push_back(cov::biz_first + i);
        cols.push_back(cov::business_count);
    };
    switch (set) {
        case AblationSet::All:
            add_demo();
            add_econ();
            add_land();
            add_biz();
            break;
        case AblationSet::Economic: add_econ(); break;
        case AblationSet::Demographic: add_demo(); break;
        case AblationSet::LandUse: add_land(); break;
        case AblationSet::Business: add_biz(); break;
    }
    return cols;
}

}  // namespace lotmatch
