#pragma once

#include "armax/errors.hpp"
#include "armax/random.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>

namespace armax {

/// Innovation margin families. Parameters are validated by the MarginSpec
/// factories; the structs themselves are plain aggregates.
namespace margin {
struct Frechet {
    double alpha;
    bool operator==(const Frechet&) const = default;
};
struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
};
struct Uniform01 {
    bool operator==(const Uniform01&) const = default;
};
/// Generalized Pareto: 1 - (1 + shape*(x-location)/scale)^(-1/shape).
struct Gpd {
    double shape;
    double scale;
    double location = 0.0;
    bool operator==(const Gpd&) const = default;
};
/// Weibull of minima: 1 - exp(-x^k), x >= 0.
struct WeibullMin {
    double k;
    bool operator==(const WeibullMin&) const = default;
};
}  // namespace margin

/// |shape| below this is treated as the exponential branch of the GPD.
inline constexpr double kGpdExponentialBand = 1e-12;

class MarginSpec {
public:
    using Kind = std::variant<margin::Frechet, margin::Exponential, margin::Uniform01, margin::Gpd,
                              margin::WeibullMin>;

    static MarginSpec frechet(double alpha) {
        require_positive(alpha, "frechet alpha");
        return MarginSpec{margin::Frechet{alpha}};
    }
    static MarginSpec exponential(double rate) {
        require_positive(rate, "exponential rate");
        return MarginSpec{margin::Exponential{rate}};
    }
    static MarginSpec uniform01() { return MarginSpec{margin::Uniform01{}}; }
    static MarginSpec gpd(double shape, double scale, double location = 0.0) {
        require_positive(scale, "gpd scale");
        if (!std::isfinite(shape) || !std::isfinite(location)) {
            throw DomainError("gpd shape and location must be finite");
        }
        return MarginSpec{margin::Gpd{shape, scale, location}};
    }
    static MarginSpec weibull_min(double k) {
        require_positive(k, "weibull_min k");
        return MarginSpec{margin::WeibullMin{k}};
    }

    const Kind& kind() const noexcept { return kind_; }

    bool operator==(const MarginSpec&) const = default;

private:
    explicit MarginSpec(Kind k) : kind_(k) {}

    static void require_positive(double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string(what) + " must be a finite positive number");
        }
    }

    Kind kind_;
};

namespace detail {
template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

/// Upper tail (1 - F) of the GPD at standardized z >= 0.
inline double gpd_tail(double shape, double z) {
    if (std::abs(shape) < kGpdExponentialBand) return std::exp(-z);
    if (shape < 0.0 && z >= -1.0 / shape) return 0.0;
    return std::exp(-std::log1p(shape * z) / shape);
}
}  // namespace detail

/// -log F(x). Returns +inf where F(x) = 0 and 0 where F(x) = 1. Computed
/// without forming F so that values close to 1 keep full relative precision.
inline double margin_neg_log_cdf(const MarginSpec& spec, double x) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        detail::overloaded{
            [&](const margin::Frechet& m) { return x > 0.0 ? std::pow(x, -m.alpha) : inf; },
            [&](const margin::Exponential& m) {
                return x > 0.0 ? -std::log1p(-std::exp(-m.rate * x)) : inf;
            },
            [&](const margin::Uniform01&) {
                if (x <= 0.0) return inf;
                return x >= 1.0 ? 0.0 : -std::log(x);
            },
            [&](const margin::Gpd& m) {
                const double z = (x - m.location) / m.scale;
                if (z <= 0.0) return inf;
                return -std::log1p(-detail::gpd_tail(m.shape, z));
            },
            [&](const margin::WeibullMin& m) {
                return x > 0.0 ? -std::log1p(-std::exp(-std::pow(x, m.k))) : inf;
            },
        },
        spec.kind());
}

inline double margin_cdf(const MarginSpec& spec, double x) {
    return std::visit(
        detail::overloaded{
            [&](const margin::Frechet& m) { return x > 0.0 ? std::exp(-std::pow(x, -m.alpha)) : 0.0; },
            [&](const margin::Exponential& m) { return x > 0.0 ? -std::expm1(-m.rate * x) : 0.0; },
            [&](const margin::Uniform01&) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); },
            [&](const margin::Gpd& m) {
                const double z = (x - m.location) / m.scale;
                return z <= 0.0 ? 0.0 : 1.0 - detail::gpd_tail(m.shape, z);
            },
            [&](const margin::WeibullMin& m) { return x > 0.0 ? -std::expm1(-std::pow(x, m.k)) : 0.0; },
        },
        spec.kind());
}

inline double margin_quantile(const MarginSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("margin_quantile: p must lie in (0,1)");
    return std::visit(
        detail::overloaded{
            [&](const margin::Frechet& m) { return std::pow(-std::log(p), -1.0 / m.alpha); },
            [&](const margin::Exponential& m) { return -std::log1p(-p) / m.rate; },
            [&](const margin::Uniform01&) { return p; },
            [&](const margin::Gpd& m) {
                const double log_survival = std::log1p(-p);
                const double z = std::abs(m.shape) < kGpdExponentialBand
                                     ? -log_survival
                                     : std::expm1(-m.shape * log_survival) / m.shape;
                return m.location + m.scale * z;
            },
            [&](const margin::WeibullMin& m) { return std::pow(-std::log1p(-p), 1.0 / m.k); },
        },
        spec.kind());
}

/// Inverse-transform draw; consumes exactly one uniform.
template <UniformSource R>
double margin_sample(const MarginSpec& spec, R& rng) {
    return margin_quantile(spec, rng.uniform());
}

inline double right_endpoint(const MarginSpec& spec) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(detail::overloaded{
                          [](const margin::Frechet&) { return inf; },
                          [](const margin::Exponential&) { return inf; },
                          [](const margin::Uniform01&) { return 1.0; },
                          [](const margin::Gpd& m) {
                              if (m.shape < 0.0 && std::abs(m.shape) >= kGpdExponentialBand) {
                                  return m.location - m.scale / m.shape;
                              }
                              return inf;
                          },
                          [](const margin::WeibullMin&) { return inf; },
                      },
                      spec.kind());
}

enum class Attractor { frechet, gumbel, weibull };

/// Max-domain of attraction. `alpha` is the Frechet (or reversed-Weibull)
/// index and is meaningless for the Gumbel class.
struct AttractionDomain {
    Attractor type = Attractor::gumbel;
    double alpha = 0.0;

    bool is_frechet() const noexcept { return type == Attractor::frechet; }
    bool operator==(const AttractionDomain&) const = default;

    static AttractionDomain frechet(double a) { return {Attractor::frechet, a}; }
    static AttractionDomain gumbel() { return {Attractor::gumbel, 0.0}; }
    static AttractionDomain weibull(double a) { return {Attractor::weibull, a}; }
};

/// The Weibull-of-minima family has unbounded support with a tail of
/// exp(-x^k) and therefore belongs to the Gumbel class.
inline AttractionDomain attraction_domain(const MarginSpec& spec) {
    return std::visit(detail::overloaded{
                          [](const margin::Frechet& m) { return AttractionDomain::frechet(m.alpha); },
                          [](const margin::Exponential&) { return AttractionDomain::gumbel(); },
                          [](const margin::Uniform01&) { return AttractionDomain::weibull(1.0); },
                          [](const margin::Gpd& m) {
                              if (std::abs(m.shape) < kGpdExponentialBand) return AttractionDomain::gumbel();
                              return m.shape > 0.0 ? AttractionDomain::frechet(1.0 / m.shape)
                                                   : AttractionDomain::weibull(-1.0 / m.shape);
                          },
                          [](const margin::WeibullMin&) { return AttractionDomain::gumbel(); },
                      },
                      spec.kind());
}

inline const char* kind_name(const MarginSpec& spec) {
    return std::visit(detail::overloaded{
                          [](const margin::Frechet&) { return "frechet"; },
                          [](const margin::Exponential&) { return "exponential"; },
                          [](const margin::Uniform01&) { return "uniform01"; },
                          [](const margin::Gpd&) { return "gpd"; },
                          [](const margin::WeibullMin&) { return "weibull_min"; },
                      },
                      spec.kind());
}

}  // namespace armax
