#pragma once

#include "armax/errors.hpp"
#include "armax/stats.hpp"
#include "armax/taildep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace armax {

enum class EstimateFlag { ok, misfit, boundary };

inline const char* flag_name(EstimateFlag f) {
    switch (f) {
        case EstimateFlag::ok: return "ok";
        case EstimateFlag::misfit: return "misfit";
        case EstimateFlag::boundary: return "boundary";
    }
    return "unknown";
}

struct MomentEstimate {
    double c_hat = std::numeric_limits<double>::quiet_NaN();
    double u_bar = 0.0;
    EstimateFlag flag = EstimateFlag::ok;
};

struct LebedevEstimate {
    double c_hat = std::numeric_limits<double>::quiet_NaN();
    double p_tilde = 0.0;
    EstimateFlag flag = EstimateFlag::ok;
};

namespace detail {
/// 2 - 1/p when p lies in (1/2,1), flagged NaN otherwise.
inline std::pair<double, EstimateFlag> invert_two_minus_reciprocal(double p) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(p > 0.5)) return {nan, EstimateFlag::misfit};
    if (p >= 1.0) return {nan, EstimateFlag::boundary};
    return {2.0 - 1.0 / p, EstimateFlag::ok};
}
}  // namespace detail

/// c = 2 - 1/U_bar with U_bar the mean of exp(-1/X); nonpositive X count as 0.
inline MomentEstimate estimate_c_moment(std::span<const double> series) {
    if (series.empty()) throw DomainError("estimate_c_moment: empty series");
    double sum = 0.0;
    for (double x : series) sum += x > 0.0 ? std::exp(-1.0 / x) : 0.0;
    MomentEstimate out;
    out.u_bar = sum / static_cast<double>(series.size());
    std::tie(out.c_hat, out.flag) = detail::invert_two_minus_reciprocal(out.u_bar);
    return out;
}

/// c = 2 - 1/p_tilde with p_tilde the share of steps with X_{i+1} <= X_i.
inline LebedevEstimate estimate_c_lebedev(std::span<const double> series) {
    if (series.size() < 2) throw DomainError("estimate_c_lebedev: need at least two values");
    std::size_t descents = 0;
    for (std::size_t i = 1; i < series.size(); ++i) descents += series[i] <= series[i - 1];
    LebedevEstimate out;
    out.p_tilde = static_cast<double>(descents) / static_cast<double>(series.size() - 1);
    std::tie(out.c_hat, out.flag) = detail::invert_two_minus_reciprocal(out.p_tilde);
    return out;
}

namespace detail {
/// a / b rounded toward +inf (a, b > 0).
inline double ratio_up(double a, double b) {
    const double q = a / b;
    return std::fma(-q, b, a) > 0.0 ? std::nextafter(q, std::numeric_limits<double>::infinity()) : q;
}
}  // namespace detail

/// Minimum consecutive ratio X_i / X_{i-1}. Ratios are rounded upward, so a
/// path produced by X_i = max(c X_{i-1}, Y_i) in floating point never yields
/// an estimate below c.
inline double estimate_c_davis_resnick(std::span<const double> series) {
    if (series.size() < 2) throw DomainError("estimate_c_davis_resnick: need at least two values");
    for (double x : series) {
        if (!(x > 0.0)) throw DomainError("estimate_c_davis_resnick: entries must be positive");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < series.size(); ++i) best = std::min(best, detail::ratio_up(series[i], series[i - 1]));
    return best;
}

namespace detail {
inline void check_open_unit_c(double c, const char* who) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError(std::string(who) + ": c must lie in (0,1)");
}
}  // namespace detail

/// (1-c^r) / ((2-c)(2-c-c^r-c^(r+1))), the closed form for E(exp(-1/X_0 - 1/X_r))
/// under unit Frechet innovations as published.
inline double cross_moment(double c, std::size_t r) {
    detail::check_open_unit_c(c, "cross_moment");
    if (r == 0) throw DomainError("cross_moment: lag must be positive");
    const double cr = std::pow(c, static_cast<double>(r));
    return (1.0 - cr) / ((2.0 - c) * (2.0 - c - cr - cr * c));
}

/// E(exp(-1/X_0 - 1/X_r)) for the stationary unit-Frechet ARMAX, computed
/// from X_r = max(c^r X_0, Z_r) with Z_r independent of X_0 and
/// -log P(Z_r <= x) = s_r / x:
///   s / ((s_r+1)(s+1+c^-r (1+s_r))) + s s_r / ((s_r+1)(s+1)),
/// s = 1/(1-c), s_r = (1-c^r)/(1-c).
inline double cross_moment_exact(double c, std::size_t r) {
    detail::check_open_unit_c(c, "cross_moment_exact");
    if (r == 0) throw DomainError("cross_moment_exact: lag must be positive");
    const double cr = std::pow(c, static_cast<double>(r));
    const double s = 1.0 / (1.0 - c);
    const double sr = (1.0 - cr) / (1.0 - c);
    return s / ((sr + 1.0) * (s + 1.0 + (1.0 + sr) / cr)) + s * sr / ((sr + 1.0) * (s + 1.0));
}

inline constexpr double kVarianceTruncTol = 1e-14;
inline constexpr std::size_t kVarianceMaxLag = 10000;

namespace detail {
template <class Cross>
double long_run_variance(double c, double trunc_tol, Cross cross) {
    const double m = 1.0 / (2.0 - c);
    double sum = 1.0 / (3.0 - 2.0 * c) - m * m;
    for (std::size_t r = 1; r <= kVarianceMaxLag; ++r) {
        const double term = cross(c, r) - m * m;
        sum += 2.0 * term;
        if (std::abs(term) < trunc_tol) break;
    }
    return sum;
}
}  // namespace detail

/// sigma^2 = 1/(3-2c) - 1/(2-c)^2 + 2 sum_r [cross_moment(c,r) - 1/(2-c)^2].
inline double asymptotic_variance(double c, double trunc_tol = kVarianceTruncTol) {
    detail::check_open_unit_c(c, "asymptotic_variance");
    return detail::long_run_variance(c, trunc_tol, [](double cc, std::size_t r) { return cross_moment(cc, r); });
}

/// Same series with cross_moment_exact.
inline double asymptotic_variance_exact(double c, double trunc_tol = kVarianceTruncTol) {
    detail::check_open_unit_c(c, "asymptotic_variance_exact");
    return detail::long_run_variance(c, trunc_tol,
                                     [](double cc, std::size_t r) { return cross_moment_exact(cc, r); });
}

enum class VarianceConvention { delta_pow4, paper_3m2c };

inline const char* convention_name(VarianceConvention v) {
    return v == VarianceConvention::delta_pow4 ? "delta_pow4" : "paper_3m2c";
}

/// Asymptotic variance V of sqrt(n)(c_hat - c) given sigma^2.
inline double ci_variance(double sigma2, double c, VarianceConvention convention) {
    if (convention == VarianceConvention::delta_pow4) return sigma2 * std::pow(2.0 - c, 4.0);
    return sigma2 * (3.0 - 2.0 * c);
}

/// c_hat -+ z sqrt(V/n) with V from asymptotic_variance(c_hat).
inline Interval confidence_interval(double c_hat, std::size_t n, VarianceConvention convention, double level) {
    detail::check_open_unit_c(c_hat, "confidence_interval");
    if (n == 0) throw DomainError("confidence_interval: n must be positive");
    const double z = stats::normal_two_sided_z(level);
    const double v = ci_variance(asymptotic_variance(c_hat), c_hat, convention);
    const double half = z * std::sqrt(v / static_cast<double>(n));
    return {c_hat - half, c_hat + half};
}

/// Hill estimate alpha = k / sum_{i<k} log(X_(i) / X_(k)), order statistics descending.
inline double hill_tail_index(std::span<const double> series, std::size_t k) {
    if (k == 0 || k >= series.size()) throw DomainError("hill_tail_index: k must satisfy 0 < k < n");
    std::vector<double> v(series.begin(), series.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
    const double ref = v[k];
    if (!(ref > 0.0)) throw DomainError("hill_tail_index: top order statistics must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(v[i] / ref);
    if (!(sum > 0.0)) throw UndefinedResult("hill_tail_index: tied top order statistics");
    return static_cast<double>(k) / sum;
}

inline std::size_t default_hill_k(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

struct EstimateOptions {
    VarianceConvention convention = VarianceConvention::delta_pow4;
    double level = 0.95;
    std::optional<std::size_t> hill_k;  // default ceil(sqrt n)
};

/// Estimates for one margin. Invalid estimates are NaN and flagged.
struct EstimateReport {
    std::size_t margin = 0;
    std::size_t n = 0;
    double u_bar = 0.0;
    double c_moment = std::numeric_limits<double>::quiet_NaN();
    EstimateFlag moment_flag = EstimateFlag::ok;
    double p_tilde = 0.0;
    double c_lebedev = std::numeric_limits<double>::quiet_NaN();
    EstimateFlag lebedev_flag = EstimateFlag::ok;
    double c_davis_resnick = std::numeric_limits<double>::quiet_NaN();
    bool davis_resnick_valid = false;
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    Interval ci{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    VarianceConvention convention = VarianceConvention::delta_pow4;
    double level = 0.95;
    std::optional<double> alpha_hill;
    std::size_t hill_k = 0;

    bool valid() const noexcept {
        return moment_flag == EstimateFlag::ok && lebedev_flag == EstimateFlag::ok && davis_resnick_valid &&
               alpha_hill.has_value();
    }
};

inline EstimateReport estimate_margin(std::span<const double> series, std::size_t margin,
                                      const EstimateOptions& opt = {}) {
    if (series.size() < 2) throw DomainError("estimate_margin: need at least two values");
    EstimateReport rep;
    rep.margin = margin;
    rep.n = series.size();
    rep.convention = opt.convention;
    rep.level = opt.level;

    const auto moment = estimate_c_moment(series);
    rep.u_bar = moment.u_bar;
    rep.c_moment = moment.c_hat;
    rep.moment_flag = moment.flag;
    if (moment.flag == EstimateFlag::ok && moment.c_hat > 0.0) {
        rep.sigma2 = asymptotic_variance(moment.c_hat);
        rep.ci = confidence_interval(moment.c_hat, rep.n, opt.convention, opt.level);
    }

    const auto leb = estimate_c_lebedev(series);
    rep.p_tilde = leb.p_tilde;
    rep.c_lebedev = leb.c_hat;
    rep.lebedev_flag = leb.flag;

    if (std::all_of(series.begin(), series.end(), [](double x) { return x > 0.0; })) {
        rep.c_davis_resnick = estimate_c_davis_resnick(series);
        rep.davis_resnick_valid = true;
    }

    rep.hill_k = opt.hill_k.value_or(default_hill_k(rep.n));
    try {
        rep.alpha_hill = hill_tail_index(series, rep.hill_k);
    } catch (const DomainError&) {
    } catch (const UndefinedResult&) {
    }
    return rep;
}

}  // namespace armax
