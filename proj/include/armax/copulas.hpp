#pragma once

#include "armax/errors.hpp"
#include "armax/margins.hpp"
#include "armax/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace armax {

namespace copula {
/// exp(-(sum (-log u_j)^gamma)^(1/gamma)), gamma >= 1.
struct Gumbel {
    double gamma;
    bool operator==(const Gumbel&) const = default;
};
struct Independence {
    bool operator==(const Independence&) const = default;
};
/// Minimum copula.
struct Comonotone {
    bool operator==(const Comonotone&) const = default;
};
}  // namespace copula

class CopulaSpec {
public:
    using Kind = std::variant<copula::Gumbel, copula::Independence, copula::Comonotone>;

    static CopulaSpec gumbel(double gamma) {
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw DomainError("gumbel gamma must be finite and >= 1");
        }
        return CopulaSpec{copula::Gumbel{gamma}};
    }
    static CopulaSpec independence() { return CopulaSpec{copula::Independence{}}; }
    static CopulaSpec comonotone() { return CopulaSpec{copula::Comonotone{}}; }

    const Kind& kind() const noexcept { return kind_; }
    bool operator==(const CopulaSpec&) const = default;

private:
    explicit CopulaSpec(Kind k) : kind_(k) {}
    Kind kind_;
};

inline const char* kind_name(const CopulaSpec& spec) {
    return std::visit(detail::overloaded{
                          [](const copula::Gumbel&) { return "gumbel"; },
                          [](const copula::Independence&) { return "independence"; },
                          [](const copula::Comonotone&) { return "comonotone"; },
                      },
                      spec.kind());
}

/// Stable tail dependence function l(x) = -log C(exp(-x_1), ..., exp(-x_d)).
/// Entries of x are nonnegative and may be +inf. All copula evaluation goes
/// through this log-space form.
inline double stdf(const CopulaSpec& spec, std::span<const double> x) {
    return std::visit(
        detail::overloaded{
            [&](const copula::Gumbel& g) {
                double peak = 0.0;
                for (double v : x) peak = std::max(peak, v);
                if (peak == 0.0 || std::isinf(peak)) return peak;
                if (g.gamma == 1.0) {
                    double s = 0.0;
                    for (double v : x) s += v;
                    return s;
                }
                double s = 0.0;
                for (double v : x) s += std::pow(v / peak, g.gamma);
                return peak * std::pow(s, 1.0 / g.gamma);
            },
            [&](const copula::Independence&) {
                double s = 0.0;
                for (double v : x) s += v;
                return s;
            },
            [&](const copula::Comonotone&) {
                double m = 0.0;
                for (double v : x) m = std::max(m, v);
                return m;
            },
        },
        spec.kind());
}

namespace detail {
inline std::vector<double> neg_logs(std::span<const double> u) {
    if (u.empty()) throw DomainError("copula evaluation needs a nonempty argument");
    std::vector<double> x(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!(u[j] >= 0.0 && u[j] <= 1.0)) throw DomainError("copula argument outside [0,1]");
        x[j] = u[j] == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(u[j]);
    }
    return x;
}

inline double exp_neg(double l) { return std::isinf(l) ? 0.0 : std::exp(-l); }

/// Keeps a copula coordinate strictly inside (0,1) so it can be fed to a
/// margin quantile.
inline double open_unit(double neg_log_u) {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - 0x1.0p-53;
    const double u = std::exp(-neg_log_u);
    return std::clamp(u, lo, hi);
}

/// Positive stable variate with Laplace transform exp(-s^a), 0 < a < 1
/// (Kanter's representation).
template <UniformSource R>
double positive_stable(double a, R& rng) {
    const double angle = std::numbers::pi * rng.uniform();
    const double w = -std::log(rng.uniform());
    const double lead = std::sin(a * angle) / std::pow(std::sin(angle), 1.0 / a);
    return lead * std::pow(std::sin((1.0 - a) * angle) / w, (1.0 - a) / a);
}
}  // namespace detail

inline double copula_eval(const CopulaSpec& spec, std::span<const double> u) {
    const auto x = detail::neg_logs(u);
    return detail::exp_neg(stdf(spec, x));
}

/// One draw from the copula. Independence consumes d uniforms, comonotone one,
/// Gumbel two for the frailty plus d.
template <UniformSource R>
std::vector<double> copula_sample(const CopulaSpec& spec, std::size_t d, R& rng) {
    if (d == 0) throw DomainError("copula_sample: dimension must be positive");
    std::vector<double> u(d);
    std::visit(detail::overloaded{
                   [&](const copula::Gumbel& g) {
                       if (g.gamma == 1.0) {
                           for (auto& v : u) v = rng.uniform();
                           return;
                       }
                       const double a = 1.0 / g.gamma;
                       const double frailty = detail::positive_stable(a, rng);
                       for (auto& v : u) {
                           const double e = -std::log(rng.uniform());
                           v = detail::open_unit(std::pow(e / frailty, a));
                       }
                   },
                   [&](const copula::Independence&) {
                       for (auto& v : u) v = rng.uniform();
                   },
                   [&](const copula::Comonotone&) { std::fill(u.begin(), u.end(), rng.uniform()); },
               },
               spec.kind());
    return u;
}

/// Copula obtained from a base MEV copula by the ratio rule
///   C_V(u) = C_H(u^(1/theta)) / C_H(u^(1/theta - 1)).
/// Validity as a copula depends on the (base, theta) pair and is checked by
/// the grid routines below rather than assumed.
class DerivedCopula {
public:
    DerivedCopula(CopulaSpec base, std::vector<double> theta) : base_(base), theta_(std::move(theta)) {
        if (theta_.empty()) throw DomainError("derived copula needs a nonempty theta");
        for (double t : theta_) {
            if (!(t > 0.0 && t <= 1.0)) throw DomainError("derived copula theta must lie in (0,1]");
        }
    }

    const CopulaSpec& base() const noexcept { return base_; }
    const std::vector<double>& theta() const noexcept { return theta_; }
    std::size_t dimension() const noexcept { return theta_.size(); }

    bool operator==(const DerivedCopula&) const = default;

private:
    CopulaSpec base_;
    std::vector<double> theta_;
};

inline double stdf(const DerivedCopula& dc, std::span<const double> x) {
    if (x.size() != dc.dimension()) throw DomainError("derived copula: argument length mismatch");
    std::vector<double> scaled(x.size());
    std::vector<double> excess(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double inv = 1.0 / dc.theta()[j];
        scaled[j] = x[j] * inv;
        // inv - 1 may be exactly zero; keep 0 * inf at 0.
        excess[j] = inv == 1.0 ? 0.0 : x[j] * (inv - 1.0);
    }
    const double num = stdf(dc.base(), scaled);
    if (std::isinf(num)) return num;
    return num - stdf(dc.base(), excess);
}

inline double derived_copula_eval(const DerivedCopula& dc, std::span<const double> u) {
    if (u.size() != dc.dimension()) throw DomainError("derived copula: argument length mismatch");
    const auto x = detail::neg_logs(u);
    for (double v : x) {
        if (std::isinf(v)) return 0.0;
    }
    return detail::exp_neg(stdf(dc, x));
}

/// Either an innovation-family copula or a ratio-rule copula.
using AnyCopula = std::variant<CopulaSpec, DerivedCopula>;

inline double stdf(const AnyCopula& c, std::span<const double> x) {
    return std::visit([&](const auto& cop) { return stdf(cop, x); }, c);
}

inline double evaluate(const AnyCopula& c, std::span<const double> u) {
    return std::visit(detail::overloaded{
                          [&](const CopulaSpec& s) { return copula_eval(s, u); },
                          [&](const DerivedCopula& dc) { return derived_copula_eval(dc, u); },
                      },
                      c);
}

/// Gumbel extremal coefficient of an m-subset: m^(1/gamma).
inline double extremal_coefficient(double gamma, std::size_t m) {
    if (m == 0) throw DomainError("extremal_coefficient: subset must be nonempty");
    if (!(gamma >= 1.0)) throw DomainError("extremal_coefficient: gamma must be >= 1");
    return std::pow(static_cast<double>(m), 1.0 / gamma);
}

/// Extremal coefficient of the ratio-rule Gumbel copula over the subset
/// carrying exponents `theta`.
inline double extremal_coefficient_derived(double gamma, std::span<const double> theta) {
    if (theta.empty()) throw DomainError("extremal_coefficient_derived: theta must be nonempty");
    if (!(gamma >= 1.0)) throw DomainError("extremal_coefficient_derived: gamma must be >= 1");
    double a = 0.0;
    double b = 0.0;
    for (double t : theta) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("extremal_coefficient_derived: theta in (0,1]");
        a += std::pow(1.0 / t, gamma);
        b += std::pow(1.0 / t - 1.0, gamma);
    }
    return std::pow(a, 1.0 / gamma) - std::pow(b, 1.0 / gamma);
}

/// Extremal coefficient of any supported copula over a subset J of
/// zero-based coordinates: l evaluated at the indicator of J.
inline double extremal_coefficient(const AnyCopula& c, std::size_t d, std::span<const std::size_t> subset) {
    if (subset.empty()) throw DomainError("extremal_coefficient: subset must be nonempty");
    std::vector<double> indicator(d, 0.0);
    for (auto j : subset) {
        if (j >= d) throw DomainError("extremal_coefficient: subset index out of range");
        indicator[j] = 1.0;
    }
    return stdf(c, indicator);
}

/// Outcome of a grid validity check: `worst` is the most negative rectangle
/// mass, or the largest deviation, seen on the grid.
struct GridCheck {
    bool passed = true;
    double worst = 0.0;
};

/// Rectangle masses of a bivariate copula over the cells of a regular
/// (points+1) x (points+1) grid on [0,1]^2.
inline GridCheck two_increasing_grid(const AnyCopula& c, std::size_t points, double tol = 1e-12) {
    std::vector<double> values((points + 1) * (points + 1));
    for (std::size_t i = 0; i <= points; ++i) {
        for (std::size_t k = 0; k <= points; ++k) {
            const std::array<double, 2> u{static_cast<double>(i) / points, static_cast<double>(k) / points};
            values[i * (points + 1) + k] = evaluate(c, u);
        }
    }
    GridCheck out;
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t k = 0; k < points; ++k) {
            const auto at = [&](std::size_t a, std::size_t b) { return values[a * (points + 1) + b]; };
            const double mass = at(i + 1, k + 1) - at(i, k + 1) - at(i + 1, k) + at(i, k);
            out.worst = std::min(out.worst, mass);
        }
    }
    out.passed = out.worst >= -tol;
    return out;
}

/// Rectangle mass of a bivariate copula on [a1,b1] x [a2,b2].
inline double rectangle_mass(const AnyCopula& c, double a1, double b1, double a2, double b2) {
    const std::array<double, 2> hh{b1, b2}, lh{a1, b2}, hl{b1, a2}, ll{a1, a2};
    return evaluate(c, hh) - evaluate(c, lh) - evaluate(c, hl) + evaluate(c, ll);
}

/// Checks C(u^t) = C(u)^t over a grid of (0,1]^2 for each power t.
inline GridCheck max_stability_grid(const AnyCopula& c, std::span<const double> powers, std::size_t points,
                                    double tol = 1e-10) {
    GridCheck out;
    for (std::size_t i = 1; i <= points; ++i) {
        for (std::size_t k = 1; k <= points; ++k) {
            const std::array<double, 2> u{static_cast<double>(i) / (points + 1),
                                          static_cast<double>(k) / (points + 1)};
            const double base = evaluate(c, u);
            for (double t : powers) {
                const std::array<double, 2> ut{std::pow(u[0], t), std::pow(u[1], t)};
                out.worst = std::max(out.worst, std::abs(evaluate(c, ut) - std::pow(base, t)));
            }
        }
    }
    out.passed = out.worst <= tol;
    return out;
}

/// Frechet-Hoeffding bounds max(sum u - d + 1, 0) <= C(u) <= min u on a
/// regular grid; `worst` is the largest violation.
inline GridCheck frechet_hoeffding_grid(const AnyCopula& c, std::size_t points, double tol = 1e-12) {
    GridCheck out;
    for (std::size_t i = 0; i <= points; ++i) {
        for (std::size_t k = 0; k <= points; ++k) {
            const std::array<double, 2> u{static_cast<double>(i) / points, static_cast<double>(k) / points};
            const double v = evaluate(c, u);
            const double lower = std::max(u[0] + u[1] - 1.0, 0.0);
            const double upper = std::min(u[0], u[1]);
            out.worst = std::max({out.worst, lower - v, v - upper});
        }
    }
    out.passed = out.worst <= tol;
    return out;
}

}  // namespace armax
