#pragma once

#include "armax/copulas.hpp"
#include "armax/errors.hpp"
#include "armax/margins.hpp"
#include "armax/process.hpp"
#include "armax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace armax {

/// Extremal index of a single coordinate: 1 - c^alpha in the Frechet class,
/// 1 (no clustering) in the Gumbel and Weibull classes.
inline double marginal_extremal_index(double c, const AttractionDomain& domain) {
    return domain.is_frechet() ? 1.0 - std::pow(c, domain.alpha) : 1.0;
}

struct ExtremalIndexResult {
    double theta = 1.0;
    std::vector<double> tau;
    std::vector<std::size_t> index_set;  // zero-based coordinates in the Frechet class
    std::vector<double> marginal_thetas;
};

namespace detail {
inline void check_tau(std::span<const double> tau) {
    bool any = false;
    for (double t : tau) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("tau entries must be finite and nonnegative");
        any = any || t > 0.0;
    }
    if (!any) throw DomainError("tau must not be identically zero");
}

/// tau_j c_j^alpha_j on Frechet coordinates, 0 elsewhere.
inline std::vector<double> shifted_levels(std::span<const AttractionDomain> domains, std::span<const double> c,
                                          std::span<const double> tau) {
    std::vector<double> y(tau.size(), 0.0);
    for (std::size_t j = 0; j < tau.size(); ++j) {
        if (domains[j].is_frechet()) y[j] = tau[j] * std::pow(c[j], domains[j].alpha);
    }
    return y;
}
}  // namespace detail

/// Multivariate extremal index
///   theta(tau) = 1 - log C_{H_I}(exp(-tau_j c_j^alpha_j), j in I) / log C_H(exp(-tau)),
/// where C_H is the attractor copula of the stationary law and I the Frechet
/// coordinates. The I-marginal of C_H is taken by setting the other
/// coordinates to 1.
inline ExtremalIndexResult theoretical_mv_extremal_index(const AnyCopula& attractor,
                                                         std::span<const AttractionDomain> domains,
                                                         std::span<const double> c, std::span<const double> tau) {
    if (domains.size() != tau.size() || c.size() != tau.size()) {
        throw DomainError("theoretical_mv_extremal_index: length mismatch");
    }
    detail::check_tau(tau);

    ExtremalIndexResult out;
    out.tau.assign(tau.begin(), tau.end());
    for (std::size_t j = 0; j < tau.size(); ++j) {
        if (domains[j].is_frechet()) out.index_set.push_back(j);
        out.marginal_thetas.push_back(marginal_extremal_index(c[j], domains[j]));
    }
    if (out.index_set.empty()) {
        out.theta = 1.0;
        return out;
    }
    const auto shifted = detail::shifted_levels(domains, c, tau);
    out.theta = 1.0 - stdf(attractor, shifted) / stdf(attractor, tau);
    return out;
}

/// Runs estimator: clusters are maximal groups of exceedances of `threshold`
/// separated by fewer than `run_gap` non-exceedances; returns
/// clusters / exceedances.
inline double empirical_extremal_index_runs(std::span<const double> series, double threshold,
                                            std::size_t run_gap = 1) {
    if (run_gap == 0) throw DomainError("runs estimator: run_gap must be positive");
    std::size_t exceedances = 0;
    std::size_t clusters = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i] > threshold)) continue;
        if (exceedances == 0 || i - last - 1 >= run_gap) ++clusters;
        ++exceedances;
        last = i;
    }
    if (exceedances == 0) throw UndefinedResult("runs estimator: no exceedances of the threshold");
    return static_cast<double>(clusters) / static_cast<double>(exceedances);
}

/// Empirical stable tail dependence function on rank-transformed margins:
///   l_hat(x) = (1/k) #{ i : R_ij > n + 1/2 - k x_j for some j in the subset }.
class EmpiricalStdf {
public:
    EmpiricalStdf(const SamplePath& path, std::size_t k) : n_(path.n), d_(path.d), k_(k) {
        if (k == 0 || k >= n_) throw DomainError("empirical stdf: k must satisfy 0 < k < n");
        ranks_.resize(n_ * d_);
        for (std::size_t j = 0; j < d_; ++j) {
            const auto col = path.column(j);
            const auto r = stats::ordinal_ranks(col);
            for (std::size_t i = 0; i < n_; ++i) ranks_[i * d_ + j] = r[i];
        }
    }

    /// Coordinates with x_j == 0 never contribute, so restricting to a subset
    /// is the same as zeroing the others.
    double operator()(std::span<const double> x) const {
        if (x.size() != d_) throw DomainError("empirical stdf: argument length mismatch");
        std::vector<double> cut(d_);
        for (std::size_t j = 0; j < d_; ++j) {
            cut[j] = static_cast<double>(n_) + 0.5 - static_cast<double>(k_) * x[j];
        }
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < d_; ++j) {
                if (x[j] > 0.0 && static_cast<double>(ranks_[i * d_ + j]) > cut[j]) {
                    ++count;
                    break;
                }
            }
        }
        return static_cast<double>(count) / static_cast<double>(k_);
    }

    std::size_t k() const noexcept { return k_; }

private:
    std::size_t n_;
    std::size_t d_;
    std::size_t k_;
    std::vector<std::size_t> ranks_;
};

inline std::size_t default_stdf_k(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

/// Plug-in estimate 1 - l_hat_I(tau_j c_j^alpha_j) / l_hat(tau), clamped to [0,1].
inline double empirical_mv_extremal_index(const SamplePath& path, std::span<const AttractionDomain> domains,
                                          std::span<const double> c_est, std::size_t k,
                                          std::span<const double> tau) {
    if (domains.size() != path.d || c_est.size() != path.d || tau.size() != path.d) {
        throw DomainError("empirical_mv_extremal_index: length mismatch");
    }
    detail::check_tau(tau);
    const EmpiricalStdf ell(path, k);
    const double den = ell(tau);
    if (den == 0.0) throw UndefinedResult("empirical_mv_extremal_index: no joint exceedances at this k");
    const auto shifted = detail::shifted_levels(domains, c_est, tau);
    return std::clamp(1.0 - ell(shifted) / den, 0.0, 1.0);
}

}  // namespace armax
