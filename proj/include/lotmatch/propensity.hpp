#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lotmatch/features.hpp"
#include "lotmatch/types.hpp"

namespace lotmatch {

struct Matrix {
    size_t rows = 0, cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

struct Standardization {
    std::vector<int> kept;              // column indices into the input design
    std::vector<std::string> kept_names;
    std::vector<double> mean, sd;       // per kept column, sample SD (n-1)
    std::vector<std::string> dropped;   // zero-variance columns, reported
};

// Centers and scales each column to mean 0, SD 1 (sample SD convention);
// zero-variance columns are dropped. Throws when fewer than 2 rows or when
// every column is degenerate.
Standardization standardize(const Matrix& design, const std::vector<std::string>& names, Matrix& out);

struct FitReport {
    int iterations = 0;
    double final_grad_norm = 0;
    bool converged = false;
    bool ridged = false;                // refit with a small ridge after divergence
    std::vector<double> ll_trace;       // log-likelihood after each accepted step
};

struct PropensityModel {
    Standardization stdz;
    std::vector<double> beta;  // [intercept, slopes over stdz.kept...]
    FitReport report;
};

// Bernoulli log-likelihood of standardized design X (no intercept column)
// under coefficients beta = [intercept, slopes...].
double logistic_loglik(const Matrix& X, const std::vector<int>& y, const std::vector<double>& beta,
                       double ridge = 0.0);
void logistic_gradient(const Matrix& X, const std::vector<int>& y, const std::vector<double>& beta,
                       std::vector<double>& grad, double ridge = 0.0);

// IRLS (Newton with step-halving) until the gradient max-norm drops below
// 1e-8 or 100 iterations. On divergence the fit restarts with ridge 1e-6 on
// the slopes (never the intercept) and is flagged. Throws on single-class
// labels or NaN input.
PropensityModel fit_logistic(const Matrix& X_standardized, const std::vector<int>& y,
                             Standardization stdz = {});

// Convenience: standardize a raw design and fit.
PropensityModel fit_propensity(const Matrix& raw_design, const std::vector<std::string>& names,
                               const std::vector<int>& y);

// Sigmoid of the standardized linear predictor, clamped inside (0, 1).
// Throws when a required covariate is NaN.
double predict(const PropensityModel& model, const std::array<double, kNumCovariates>& raw);
double predict_row(const PropensityModel& model, const Matrix& raw_design, size_t row);

struct ClassifierMetrics {
    double roc_auc = 0;
    double accuracy = 0;
    double balanced_accuracy = 0;
    double kappa = 0;
    double sensitivity = 0;
    double specificity = 0;
    double ppv = 0;
    double npv = 0;
    double threshold = 0;
};

// Scores are P(greened). The positive class for the confusion metrics
// defaults to Ungreened elsewhere in the pipeline; scores and threshold are
// re-oriented internally so "score >= threshold" always predicts the positive
// class (ties classify as positive). AUC uses the rank statistic with half
// credit for ties. Throws when only one label is present.
ClassifierMetrics evaluate(const std::vector<double>& scores, const std::vector<LotStatus>& labels,
                           double threshold, LotStatus positive_class);

struct RocPoint {
    double fpr = 0, tpr = 0;
};

// Monotone staircase from (0,0) to (1,1); trapezoidal area equals evaluate's
// rank AUC (ties appear as diagonal segments).
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<LotStatus>& labels,
                                LotStatus positive_class);

double trapezoid_area(const std::vector<RocPoint>& curve);

// Table S1-style covariate groupings.
enum class AblationSet { All, Economic, Demographic, LandUse, Business };

inline constexpr std::array<AblationSet, 5> kAblationSets{AblationSet::All, AblationSet::Economic,
                                                          AblationSet::Demographic, AblationSet::LandUse,
                                                          AblationSet::Business};

std::string_view ablation_name(AblationSet set);

// Covariate indices for a group. With drop_collinear the [2,inf) poverty
// bracket is removed (the land-use vector has no "other" column to drop by
// construction).
std::vector<int> ablation_columns(AblationSet set, bool drop_collinear);

}  // namespace lotmatch
