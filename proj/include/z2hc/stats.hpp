#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "z2hc/errors.hpp"

namespace z2hc {

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0;
    int n = 0;
};

// Two-parameter least squares via centered sums.
inline OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw invalid_argument("ols: size mismatch");
    std::size_t n = x.size();
    if (n < 2) throw invalid_argument("ols: need at least 2 points");
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw invalid_argument("ols: degenerate regressor (all x equal)");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.n = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.rss += r * r;
    }
    return fit;
}

// Continued-fraction part of the regularized incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-16;
    const double fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw numeric_error("incomplete beta continued fraction did not converge");
}

// Regularized incomplete beta I_x(a, b).
inline double betai(double a, double b, double x) {
    if (!(a > 0) || !(b > 0)) throw invalid_argument("betai: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                         b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Ranks with ties sharing the average of their positions (1-based).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

struct SpearmanResult {
    double rho = 0.0;
    double p_one_sided = 1.0; // P(rank correlation >= observed) under no association
    int n = 0;
};

// Spearman rank correlation with a one-sided p-value for positive trend,
// from the t approximation t = rho sqrt((n-2)/(1-rho^2)) on n-2 degrees of
// freedom.
inline SpearmanResult spearman_trend(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw invalid_argument("spearman: size mismatch");
    std::size_t n = x.size();
    if (n < 4) throw invalid_argument("spearman: need at least 4 points");
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
        sxy += (rx[i] - mx) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw invalid_argument("spearman: a variable is constant, correlation undefined");
    SpearmanResult r;
    r.n = static_cast<int>(n);
    r.rho = sxy / std::sqrt(sxx * syy);
    double nu = static_cast<double>(n - 2);
    double denom = 1.0 - r.rho * r.rho;
    if (denom < 1e-15) {
        r.p_one_sided = r.rho > 0 ? 0.0 : 1.0;
        return r;
    }
    double t = r.rho * std::sqrt(nu / denom);
    double tail = 0.5 * betai(0.5 * nu, 0.5, nu / (nu + t * t));
    r.p_one_sided = t >= 0 ? tail : 1.0 - tail;
    return r;
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw invalid_argument("mean of empty set");
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

// Standard error of the mean; defined only for n >= 2.
inline double stderr_of(const std::vector<double>& v) {
    std::size_t n = v.size();
    if (n < 2) throw invalid_argument("stderr needs at least 2 values");
    double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
}

} // namespace z2hc
