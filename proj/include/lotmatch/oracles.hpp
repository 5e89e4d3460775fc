#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lotmatch::oracle {

// Brute-force reference implementations. These deliberately share no
// arithmetic helpers with the modules they check; each is a plain independent
// code path kept simple enough to audit by eye.

struct Point {
    double x = 0, y = 0;
    double weight = 1.0;
};

// Linear scan, closed ball (distance <= r).
size_t naive_radius_count(std::span<const Point> points, double cx, double cy, double r);
double naive_radius_weighted_sum(std::span<const Point> points, double cx, double cy, double r);

// Maximum-likelihood logistic fit by damped Newton with backtracking line
// search from the zero vector, with a finite-difference gradient check at the
// optimum. Intended for small instances (<= 100 rows, <= 5 covariates).
// X is row-major without an intercept column; the returned vector is
// [intercept, slopes...].
struct MleResult {
    std::vector<double> beta;
    bool converged = false;
    bool separated = false;     // coefficients ran away; caller should regenerate
    double grad_check = 0;      // max |analytic - central difference|, scaled
};

MleResult mle_oracle(const std::vector<std::vector<double>>& X, const std::vector<int>& y);

// Mean over all (positive, negative) pairs of [1 if pos > neg, 1/2 if equal].
double auc_oracle(std::span<const double> scores, std::span<const int> is_positive);

// Minimal total |score gap| over all injections treated -> controls, by exact
// subset dynamic programming (equivalent to exhaustive enumeration). Intended
// for <= 8 treated, <= 12 controls; hard limit 20 controls.
double optimal_match_oracle(std::span<const double> treated_scores, std::span<const double> control_scores);

// Student-t lower tail by adaptive Simpson quadrature of the density.
double t_cdf_oracle(double t, double df);

}  // namespace lotmatch::oracle
