#pragma once

#include "armax/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace armax::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("variance needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

/// Ordinal ranks 1..n; ties broken by position so the result is deterministic.
inline std::vector<std::size_t> ordinal_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<std::size_t> rank(x.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
    return rank;
}

/// Order statistic at sorted position floor(p (n-1)).
inline double empirical_quantile(std::span<const double> x, double p) {
    if (x.empty()) throw DomainError("empirical_quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("empirical_quantile: p must lie in [0,1]");
    std::vector<double> v(x.begin(), x.end());
    const auto pos = static_cast<std::size_t>(std::floor(p * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(pos), v.end());
    return v[pos];
}

/// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
inline double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw DomainError("ks_distance of an empty sample");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_distance of an empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0, k = 0;
    double d = 0.0;
    while (i < x.size() && k < y.size()) {
        const double t = std::min(x[i], y[k]);
        while (i < x.size() && x[i] <= t) ++i;
        while (k < y.size() && y[k] <= t) ++k;
        d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(k) / y.size()));
    }
    return d;
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
inline double kolmogorov_pvalue(double distance, double n) {
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Kendall's tau-a, O(n^2).
inline double kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("kendall_tau: need two equal-length samples");
    long long score = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t k = i + 1; k < x.size(); ++k) {
            const double s = (x[i] - x[k]) * (y[i] - y[k]);
            score += (s > 0) - (s < 0);
        }
    }
    const double pairs = 0.5 * static_cast<double>(x.size()) * static_cast<double>(x.size() - 1);
    return static_cast<double>(score) / pairs;
}

struct NormalityTest {
    double statistic = 0.0;  // A*^2, small-sample adjusted
    double p_value = 1.0;
};

/// Anderson-Darling test of normality with mean and variance estimated from
/// the sample (D'Agostino & Stephens p-value approximation).
inline NormalityTest anderson_darling_normal(std::span<const double> x) {
    if (x.size() < 8) throw DomainError("anderson_darling_normal needs at least 8 values");
    const double m = mean(x);
    const double sd = std::sqrt(variance(x));
    if (!(sd > 0.0)) throw UndefinedResult("anderson_darling_normal: zero variance sample");
    std::vector<double> z(x.begin(), x.end());
    std::sort(z.begin(), z.end());
    const boost::math::normal_distribution<double> phi;
    const double n = static_cast<double>(z.size());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double lo = boost::math::cdf(phi, (z[i] - m) / sd);
        const double hi = boost::math::cdf(boost::math::complement(phi, (z[z.size() - 1 - i] - m) / sd));
        s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
    }
    const double a2 = -n - s / n;
    const double a = a2 * (1.0 + 0.75 / n + 2.25 / (n * n));
    double p;
    if (a >= 0.6) {
        p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
    } else if (a >= 0.34) {
        p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
    } else if (a >= 0.2) {
        p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
    } else {
        p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
    }
    return {a, std::clamp(p, 0.0, 1.0)};
}

/// Two-sided standard normal quantile z_{(1+level)/2}.
inline double normal_two_sided_z(double level) {
    if (!(level >= 0.0 && level < 1.0)) throw DomainError("confidence level must lie in [0,1)");
    if (level == 0.0) return 0.0;
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
}

}  // namespace armax::stats
