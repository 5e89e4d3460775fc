#include "lotmatch/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lotmatch::oracle {

size_t naive_radius_count(std::span<const Point> points, double cx, double cy, double r) {
    size_t n = 0;
    for (const auto& p : points) {
        const double dx = p.x - cx, dy = p.y - cy;
        if (dx * dx + dy * dy <= r * r) ++n;
    }
    return n;
}

double naive_radius_weighted_sum(std::span<const Point> points, double cx, double cy, double r) {
    double s = 0;
    for (const auto& p : points) {
        const double dx = p.x - cx, dy = p.y - cy;
        if (dx * dx + dy * dy <= r * r) s += p.weight;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Logistic MLE by damped Newton, fully self-contained.
// ---------------------------------------------------------------------------

namespace {

double oracle_loglik(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                     const std::vector<double>& beta) {
    double ll = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        double z = beta[0];
        for (size_t c = 0; c < X[i].size(); ++c) z += beta[c + 1] * X[i][c];
        // y*z - log(1 + exp(z)), split for large |z|
        const double sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        ll += y[i] * z - sp;
    }
    return ll;
}

void oracle_grad(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                 const std::vector<double>& beta, std::vector<double>& g) {
    const size_t p = beta.size();
    g.assign(p, 0.0);
    for (size_t i = 0; i < X.size(); ++i) {
        double z = beta[0];
        for (size_t c = 0; c < X[i].size(); ++c) z += beta[c + 1] * X[i][c];
        const double mu = 1.0 / (1.0 + std::exp(-z));
        const double r = y[i] - mu;
        g[0] += r;
        for (size_t c = 0; c < X[i].size(); ++c) g[c + 1] += r * X[i][c];
    }
}

// Gauss-Jordan with partial pivoting; returns false on singular systems.
bool solve_dense(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-250) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        const double inv = 1.0 / A[col][col];
        for (size_t c = col; c < n; ++c) A[col][c] *= inv;
        b[col] *= inv;
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col];
            if (f == 0) continue;
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    x = b;
    return true;
}

}  // namespace

MleResult mle_oracle(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
    const size_t n = X.size();
    const size_t k = n ? X[0].size() : 0;
    const size_t p = k + 1;
    MleResult res;
    res.beta.assign(p, 0.0);

    double ll = oracle_loglik(X, y, res.beta);
    std::vector<double> g;
    for (int iter = 0; iter < 200; ++iter) {
        oracle_grad(X, y, res.beta, g);
        double gmax = 0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < 1e-10) {
            res.converged = true;
            break;
        }
        // Newton system: (X'WX) step = grad
        std::vector<std::vector<double>> H(p, std::vector<double>(p, 0.0));
        for (size_t i = 0; i < n; ++i) {
            double z = res.beta[0];
            for (size_t c = 0; c < k; ++c) z += res.beta[c + 1] * X[i][c];
            const double mu = 1.0 / (1.0 + std::exp(-z));
            const double w = mu * (1.0 - mu);
            std::vector<double> xi(p);
            xi[0] = 1.0;
            for (size_t c = 0; c < k; ++c) xi[c + 1] = X[i][c];
            for (size_t a = 0; a < p; ++a)
                for (size_t b = 0; b < p; ++b) H[a][b] += w * xi[a] * xi[b];
        }
        std::vector<double> step;
        if (!solve_dense(H, g, step)) {
            res.separated = true;
            break;
        }
        // Backtracking line search on the log-likelihood.
        double scale = 1.0;
        bool moved = false;
        for (int h = 0; h < 60; ++h) {
            std::vector<double> cand(p);
            for (size_t a = 0; a < p; ++a) cand[a] = res.beta[a] + scale * step[a];
            const double cll = oracle_loglik(X, y, cand);
            if (std::isfinite(cll) && cll >= ll) {
                res.beta = cand;
                ll = cll;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!moved) break;
        for (double b : res.beta)
            if (std::abs(b) > 1e3) {
                res.separated = true;
                return res;
            }
    }

    // Central finite-difference gradient check at the returned point, scaled
    // by max(1, |gradient|).
    oracle_grad(X, y, res.beta, g);
    double worst = 0;
    const double h = 1e-5;
    for (size_t a = 0; a < p; ++a) {
        std::vector<double> up = res.beta, dn = res.beta;
        up[a] += h;
        dn[a] -= h;
        const double fd = (oracle_loglik(X, y, up) - oracle_loglik(X, y, dn)) / (2 * h);
        double scale = std::max(1.0, std::max(std::abs(g[a]), std::abs(fd)));
        worst = std::max(worst, std::abs(g[a] - fd) / scale);
    }
    res.grad_check = worst;
    return res;
}

double auc_oracle(std::span<const double> scores, std::span<const int> is_positive) {
    double num = 0;
    double n_pos = 0, n_neg = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!is_positive[i]) continue;
        n_pos += 1.0;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (is_positive[j]) continue;
            if (scores[i] > scores[j])
                num += 1.0;
            else if (scores[i] == scores[j])
                num += 0.5;
        }
    }
    for (size_t j = 0; j < scores.size(); ++j)
        if (!is_positive[j]) n_neg += 1.0;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc_oracle: both classes required");
    return num / (n_pos * n_neg);
}

double optimal_match_oracle(std::span<const double> treated_scores, std::span<const double> control_scores) {
    const size_t nt = treated_scores.size(), nc = control_scores.size();
    if (nc > 20) throw std::invalid_argument("optimal_match_oracle: too many controls");
    if (nt > nc) throw std::invalid_argument("optimal_match_oracle: more treated than controls");
    const size_t masks = size_t{1} << nc;
    const double inf = std::numeric_limits<double>::infinity();
    // best[m] = minimal cost of assigning the first popcount(m)-consistent
    // treated units using exactly the controls in m.
    std::vector<double> best(masks, inf), next(masks, inf);
    best[0] = 0.0;
    for (size_t t = 0; t < nt; ++t) {
        std::fill(next.begin(), next.end(), inf);
        for (size_t m = 0; m < masks; ++m) {
            if (best[m] == inf) continue;
            if (static_cast<size_t>(std::popcount(m)) != t) continue;
            for (size_t c = 0; c < nc; ++c) {
                if (m & (size_t{1} << c)) continue;
                const size_t m2 = m | (size_t{1} << c);
                const double cost = best[m] + std::abs(treated_scores[t] - control_scores[c]);
                if (cost < next[m2]) next[m2] = cost;
            }
        }
        best.swap(next);
    }
    double opt = inf;
    for (size_t m = 0; m < masks; ++m)
        if (static_cast<size_t>(std::popcount(m)) == nt) opt = std::min(opt, best[m]);
    return opt;
}

// ---------------------------------------------------------------------------
// Student t by quadrature
// ---------------------------------------------------------------------------

namespace {

double t_pdf(double x, double df) {
    const double ln = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                      0.5 * std::log(df * 3.14159265358979323846) -
                      (df + 1.0) / 2.0 * std::log1p(x * x / df);
    return std::exp(ln);
}

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb, double whole, double df, double eps,
                int depth) {
    const double m = (a + b) / 2.0;
    const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    const double flm = t_pdf(lm, df), frm = t_pdf(rm, df);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, m, fa, flm, fm, left, df, eps / 2.0, depth - 1) +
           adaptive(m, b, fm, frm, fb, right, df, eps / 2.0, depth - 1);
}

double integrate_pdf(double a, double b, double df, double eps) {
    const double m = (a + b) / 2.0;
    const double fa = t_pdf(a, df), fm = t_pdf(m, df), fb = t_pdf(b, df);
    const double whole = simpson(a, b, fa, fm, fb);
    return adaptive(a, b, fa, fm, fb, whole, df, eps, 60);
}

}  // namespace

double t_cdf_oracle(double t, double df) {
    if (t == 0.0) return 0.5;
    if (t > 0.0) return 1.0 - t_cdf_oracle(-t, df);
    // Integrate the lower tail from a point where the density is negligible.
    // For df >= 1 the density at t-80 multiplied by the interval is far below
    // double precision for the |t| ranges exercised here.
    const double lo = t - 80.0;
    return integrate_pdf(lo, t, df, 1e-14);
}

}  // namespace lotmatch::oracle
