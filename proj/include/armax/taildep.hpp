#pragma once

#include "armax/errors.hpp"
#include "armax/margins.hpp"
#include "armax/process.hpp"
#include "armax/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace armax {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// [0, c^(alpha r)]: range of the lag-r TDC towards a Frechet(alpha) coordinate.
inline Interval tdc_bounds(double c, double alpha, std::size_t r) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("tdc_bounds: c must lie in (0,1)");
    if (!(alpha > 0.0)) throw DomainError("tdc_bounds: alpha must be positive");
    return {0.0, std::pow(c, alpha * static_cast<double>(r))};
}

/// Numeric limit of the lag-r TDC expression together with the grid it was
/// read from.
struct TdcLimit {
    double value = 0.0;      // clamped to the Frechet-Hoeffding envelope (and Frechet bound)
    double raw = 0.0;        // Richardson extrapolation before clamping
    Interval envelope;       // extrapolated lower/upper envelope limits
    std::vector<double> t_grid;
    std::vector<double> middle;  // the TDC expression at each t
    std::vector<double> lower;   // 1 - (1-t)/v
    std::vector<double> upper;   // 2 - (1 - (1-t)^2/v)/t
};

inline const std::array<double, 4> kDefaultTdcGrid{1e-2, 1e-3, 1e-4, 1e-5};

namespace detail {
inline double richardson_last(std::span<const double> t, std::span<const double> v) {
    const std::size_t k = t.size() - 1;
    return v[k] + (v[k] - v[k - 1]) * t[k] / (t[k - 1] - t[k]);
}
}  // namespace detail

/// Lag-r tail dependence coefficient between X_{1,j} and X_{1+r,jp} (zero-based
/// coordinates), evaluated as
///   2 - (1/t) (1 - C(1-t, v_t) (1-t) / v_t),   v_t = F_jp(c_jp^{-r} F_jp^{-1}(1-t)),
/// along a decreasing t grid with one Richardson step on the last two points.
/// C is the stationary copula of (X_j, X_jp); v_t uses 1 - t c^(r alpha) when
/// the jp innovations are in the Frechet class and the numeric stationary
/// marginal otherwise.
inline TdcLimit theoretical_lag_tdc(const ProcessConfig& cfg, std::size_t j, std::size_t jp, std::size_t r,
                                    std::span<const double> t_grid = kDefaultTdcGrid) {
    const std::size_t d = cfg.dimension();
    if (j >= d || jp >= d) throw DomainError("theoretical_lag_tdc: coordinate out of range");
    if (t_grid.size() < 2) throw DomainError("theoretical_lag_tdc: t grid needs at least two points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0 && t_grid[i] < 1.0) || (i > 0 && !(t_grid[i] < t_grid[i - 1]))) {
            throw DomainError("theoretical_lag_tdc: t grid must be decreasing inside (0,1)");
        }
    }
    require_stationary(cfg);

    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double trunc = 1e-15;
    const auto domain = attraction_domain(cfg.margins()[jp]);
    const double cr = std::pow(cfg.c()[jp], static_cast<double>(r));

    TdcLimit out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    for (double t : t_grid) {
        const double log_u = std::log1p(-t);
        double log_v = log_u;
        if (r > 0) {
            if (domain.is_frechet()) {
                log_v = std::log1p(-t * std::pow(cr, domain.alpha));
            } else {
                const double w = stationary_marginal_quantile_neglog(cfg, jp, -log_u);
                log_v = -stationary_marginal_neg_log_cdf(cfg, jp, w / cr, trunc);
            }
        }
        double log_c;
        if (j == jp) {
            log_c = std::min(log_u, log_v);
        } else if (log_v == 0.0) {
            log_c = log_u;
        } else {
            std::vector<double> x(d, inf);
            x[j] = stationary_marginal_quantile_neglog(cfg, j, -log_u);
            x[jp] = stationary_marginal_quantile_neglog(cfg, jp, -log_v);
            log_c = -stationary_joint_neg_log_cdf(cfg, x, trunc);
        }
        out.middle.push_back(2.0 + std::expm1(log_c + log_u - log_v) / t);
        out.lower.push_back(-std::expm1(log_u - log_v));
        out.upper.push_back(2.0 + std::expm1(2.0 * log_u - log_v) / t);
    }

    for (double v : out.middle) {
        if (!std::isfinite(v)) throw NumericLimitError("theoretical_lag_tdc: non-finite value on the t grid");
    }
    const std::size_t k = out.middle.size() - 1;
    if (k >= 2) {
        const double last = std::abs(out.middle[k] - out.middle[k - 1]);
        const double prev = std::abs(out.middle[k - 1] - out.middle[k - 2]);
        // rounding in log C is amplified by 1/t; increments below that are noise
        const double noise = 100.0 * (trunc + std::numeric_limits<double>::epsilon()) / t_grid.back();
        if (last > std::max(noise, 1e-12) && last > 10.0 * prev) {
            throw NumericLimitError("theoretical_lag_tdc: grid values oscillate instead of converging");
        }
    }

    out.raw = detail::richardson_last(out.t_grid, out.middle);
    out.envelope = {std::max(0.0, detail::richardson_last(out.t_grid, out.lower)),
                    std::min(1.0, detail::richardson_last(out.t_grid, out.upper))};
    double hi = out.envelope.hi;
    if (domain.is_frechet()) hi = std::min(hi, tdc_bounds(cfg.c()[jp], domain.alpha, r).hi);
    out.value = std::clamp(out.raw, out.envelope.lo, std::max(out.envelope.lo, hi));
    return out;
}

namespace detail {
struct LaggedRanks {
    std::size_t m = 0;
    std::vector<std::size_t> lead;  // ranks of X_{i,j}, i < n - r
    std::vector<std::size_t> lag;   // ranks of X_{i+r,jp}
};

inline LaggedRanks lagged_ranks(const SamplePath& path, std::size_t j, std::size_t jp, std::size_t r) {
    if (j >= path.d || jp >= path.d) throw DomainError("tail dependence: coordinate out of range");
    if (r >= path.n) throw DomainError("tail dependence: lag must be smaller than the path length");
    LaggedRanks out;
    out.m = path.n - r;
    std::vector<double> a(out.m), b(out.m);
    for (std::size_t i = 0; i < out.m; ++i) {
        a[i] = path.at(i, j);
        b[i] = path.at(i + r, jp);
    }
    out.lead = stats::ordinal_ranks(a);
    out.lag = stats::ordinal_ranks(b);
    return out;
}
}  // namespace detail

/// Finite-t estimate of the lag-r TDC from rank-transformed margins.
inline double empirical_tdc(const SamplePath& path, std::size_t j, std::size_t jp, std::size_t r, double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("empirical_tdc: t must lie in (0,1)");
    if (r >= path.n) throw DomainError("empirical_tdc: lag must be smaller than the path length");
    if (t * static_cast<double>(path.n - r) < 10.0) {
        throw DomainError("empirical_tdc: t (n - r) must be at least 10");
    }
    const auto ranks = detail::lagged_ranks(path, j, jp, r);
    const double cut = (1.0 - t) * static_cast<double>(ranks.m);
    std::size_t cond = 0;
    std::size_t joint = 0;
    for (std::size_t i = 0; i < ranks.m; ++i) {
        if (static_cast<double>(ranks.lead[i]) > cut) {
            ++cond;
            if (static_cast<double>(ranks.lag[i]) > cut) ++joint;
        }
    }
    if (cond == 0) throw UndefinedResult("empirical_tdc: empty conditioning set");
    return static_cast<double>(joint) / static_cast<double>(cond);
}

inline std::size_t default_eta_k(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
}

/// Ledford-Tawn coefficient: Hill estimate over the k largest values of
/// T = min(1/(1-U_lead), 1/(1-U_lag)) with U the rank-based uniforms
/// rank/(m+1). Clamped to (0,1].
inline double empirical_eta(const SamplePath& path, std::size_t j, std::size_t jp, std::size_t r, std::size_t k) {
    const auto ranks = detail::lagged_ranks(path, j, jp, r);
    if (k == 0 || k >= ranks.m) throw DomainError("empirical_eta: k must satisfy 0 < k < n - r");
    const double m1 = static_cast<double>(ranks.m + 1);
    std::vector<double> structure(ranks.m);
    for (std::size_t i = 0; i < ranks.m; ++i) {
        const double a = m1 / (m1 - static_cast<double>(ranks.lead[i]));
        const double b = m1 / (m1 - static_cast<double>(ranks.lag[i]));
        structure[i] = std::min(a, b);
    }
    std::sort(structure.begin(), structure.end(), std::greater<>());
    const double ref = structure[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(structure[i] / ref);
    const double eta = sum / static_cast<double>(k);
    if (!(eta > 0.0) || !std::isfinite(eta)) throw UndefinedResult("empirical_eta: degenerate structure sample");
    return std::min(eta, 1.0);
}

enum class TailRegime { dependent, positively_associated, near_independent, negatively_associated };

inline const char* regime_name(TailRegime r) {
    switch (r) {
        case TailRegime::dependent: return "dependent";
        case TailRegime::positively_associated: return "positively_associated";
        case TailRegime::near_independent: return "near_independent";
        case TailRegime::negatively_associated: return "negatively_associated";
    }
    return "unknown";
}

/// Width of the band around eta = 1/2 and eta = 1 treated as equality.
inline constexpr double kRegimeBand = 0.05;
/// lambda at or below this counts as zero.
inline constexpr double kLambdaZero = 1e-6;

inline TailRegime classify_tail_regime(std::optional<double> lambda, double eta, double band = kRegimeBand) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("classify_tail_regime: eta must lie in (0,1]");
    if (eta >= 1.0 - band) {
        return lambda && *lambda > kLambdaZero ? TailRegime::dependent : TailRegime::positively_associated;
    }
    if (std::abs(eta - 0.5) <= band) return TailRegime::near_independent;
    return eta > 0.5 ? TailRegime::positively_associated : TailRegime::negatively_associated;
}

struct TailDepResult {
    std::size_t j = 0;
    std::size_t jp = 0;
    std::size_t r = 0;
    std::optional<double> lambda;
    std::optional<double> eta;
    TailRegime regime = TailRegime::near_independent;
};

}  // namespace armax
