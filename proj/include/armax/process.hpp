#pragma once

#include "armax/copulas.hpp"
#include "armax/errors.hpp"
#include "armax/format.hpp"
#include "armax/margins.hpp"
#include "armax/random.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace armax {

namespace init {
/// Row 0 drawn from the stationary marginals (Frechet innovations only).
struct ExactMarginal {
    bool operator==(const ExactMarginal&) const = default;
};
/// Row 0 reached by running the recursion `length` steps from an innovation draw.
struct BurnIn {
    std::size_t length = 1000;
    bool operator==(const BurnIn&) const = default;
};
}  // namespace init

using InitPolicy = std::variant<init::ExactMarginal, init::BurnIn>;

inline constexpr std::size_t kDefaultBurnIn = 1000;

/// d-variate ARMAX process X_{n,j} = max(c_j X_{n-1,j}, Y_{n,j}) with
/// innovations Y_n ~ copula(margins).
class ProcessConfig {
public:
    ProcessConfig(std::vector<double> c, std::vector<MarginSpec> margins, CopulaSpec copula,
                  std::optional<InitPolicy> init = std::nullopt)
        : c_(std::move(c)), margins_(std::move(margins)), copula_(copula) {
        if (c_.empty()) throw ConfigError("process dimension must be positive");
        if (margins_.size() != c_.size()) throw ConfigError("margins and c must have the same length");
        for (double cj : c_) {
            if (!(cj > 0.0 && cj < 1.0)) throw ConfigError("autoregressive coefficients must lie in (0,1)");
        }
        if (init) {
            init_ = *init;
        } else if (c_.size() == 1) {
            init_ = init::ExactMarginal{};
        } else {
            init_ = init::BurnIn{kDefaultBurnIn};
        }
        if (const auto* b = std::get_if<init::BurnIn>(&init_); b && b->length == 0) {
            throw ConfigError("burn-in length must be positive");
        }
    }

    std::size_t dimension() const noexcept { return c_.size(); }
    const std::vector<double>& c() const noexcept { return c_; }
    const std::vector<MarginSpec>& margins() const noexcept { return margins_; }
    const CopulaSpec& copula() const noexcept { return copula_; }
    const InitPolicy& init() const noexcept { return init_; }

    bool operator==(const ProcessConfig&) const = default;

private:
    std::vector<double> c_;
    std::vector<MarginSpec> margins_;
    CopulaSpec copula_;
    InitPolicy init_;
};

/// Simulated observations X_1..X_n (row-major n x d).
struct SamplePath {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> data;
    std::uint64_t seed = 0;
    std::string config_digest;

    double at(std::size_t row, std::size_t col) const { return data[row * d + col]; }

    std::vector<double> column(std::size_t col) const {
        if (col >= d) throw DomainError("SamplePath::column index out of range");
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = data[i * d + col];
        return out;
    }

    static SamplePath from_columns(std::span<const std::vector<double>> cols) {
        SamplePath p;
        p.d = cols.size();
        p.n = cols.empty() ? 0 : cols.front().size();
        p.data.resize(p.n * p.d);
        for (std::size_t j = 0; j < p.d; ++j) {
            if (cols[j].size() != p.n) throw DomainError("SamplePath::from_columns: ragged columns");
            for (std::size_t i = 0; i < p.n; ++i) p.data[i * p.d + j] = cols[j][i];
        }
        return p;
    }
};

/// Canonical one-line description; the digest is its FNV-1a hash.
inline std::string describe(const ProcessConfig& cfg) {
    std::string s = "armax;d=" + std::to_string(cfg.dimension()) + ";c=";
    for (double cj : cfg.c()) s += format_double(cj) + ",";
    s += ";margins=";
    for (const auto& m : cfg.margins()) {
        s += kind_name(m);
        std::visit(detail::overloaded{
                       [&](const margin::Frechet& f) { s += "(" + format_double(f.alpha) + ")"; },
                       [&](const margin::Exponential& e) { s += "(" + format_double(e.rate) + ")"; },
                       [&](const margin::Uniform01&) { s += "()"; },
                       [&](const margin::Gpd& g) {
                           s += "(" + format_double(g.shape) + "," + format_double(g.scale) + "," +
                                format_double(g.location) + ")";
                       },
                       [&](const margin::WeibullMin& w) { s += "(" + format_double(w.k) + ")"; },
                   },
                   m.kind());
        s += ",";
    }
    s += ";copula=";
    s += kind_name(cfg.copula());
    if (const auto* g = std::get_if<copula::Gumbel>(&cfg.copula().kind())) s += "(" + format_double(g->gamma) + ")";
    s += ";init=";
    std::visit(detail::overloaded{
                   [&](const init::ExactMarginal&) { s += "exact_marginal"; },
                   [&](const init::BurnIn& b) { s += "burn_in(" + std::to_string(b.length) + ")"; },
               },
               cfg.init());
    return s;
}

inline std::string config_digest(const ProcessConfig& cfg) { return hex64(fnv1a64(describe(cfg))); }

/// Runs the univariate recursion from x0 over the given innovations.
inline std::vector<double> armax_recursion(double c, double x0, std::span<const double> innovations) {
    std::vector<double> out(innovations.size());
    double prev = x0;
    for (std::size_t i = 0; i < innovations.size(); ++i) {
        prev = std::max(c * prev, innovations[i]);
        out[i] = prev;
    }
    return out;
}

/// -log G(x): joint innovation law evaluated through the copula's stdf.
inline double innovation_neg_log_cdf(const ProcessConfig& cfg, std::span<const double> x) {
    std::vector<double> t(cfg.dimension());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = margin_neg_log_cdf(cfg.margins()[j], x[j]);
    return stdf(cfg.copula(), t);
}

inline double innovation_cdf(const ProcessConfig& cfg, std::span<const double> x) {
    return detail::exp_neg(innovation_neg_log_cdf(cfg, x));
}

struct StationarityCheck {
    bool stationary = false;
    double series_value = 0.0;
    std::size_t terms = 0;
};

/// Evaluates sum_{i>=1} -log G(x / c^i) at the probe, stopping once a term
/// drops below `tol` or `max_terms` terms have been added.
inline StationarityCheck check_stationarity(const ProcessConfig& cfg, std::span<const double> probe,
                                            double tol = 1e-14, std::size_t max_terms = 10000) {
    const std::size_t d = cfg.dimension();
    if (probe.size() != d) throw DomainError("check_stationarity: probe length must equal d");
    for (double v : probe) {
        if (!(v > 0.0)) throw DomainError("check_stationarity: probe entries must be positive");
    }
    StationarityCheck out;
    std::vector<double> scaled(probe.begin(), probe.end());
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= max_terms; ++i) {
        for (std::size_t j = 0; j < d; ++j) scaled[j] /= cfg.c()[j];
        last = innovation_neg_log_cdf(cfg, scaled);
        out.series_value += last;
        out.terms = i;
        if (!std::isfinite(out.series_value) || last < tol) break;
    }
    bool endpoints_ok = true;
    for (const auto& m : cfg.margins()) endpoints_ok = endpoints_ok && right_endpoint(m) > 0.0;
    out.stationary =
        endpoints_ok && std::isfinite(out.series_value) && out.series_value > 0.0 && last < tol;
    return out;
}

/// Probe used when a whole configuration must be classified: c_j times the
/// innovation median where positive, else c_j times half the right end-point,
/// so the first series term sits inside the support.
inline std::vector<double> default_probe(const ProcessConfig& cfg) {
    std::vector<double> probe(cfg.dimension());
    for (std::size_t j = 0; j < probe.size(); ++j) {
        const auto& m = cfg.margins()[j];
        const double med = margin_quantile(m, 0.5);
        const double end = right_endpoint(m);
        probe[j] = cfg.c()[j] * (med > 0.0 ? med : (end > 0.0 ? 0.5 * end : 1.0));
    }
    return probe;
}

inline bool is_stationary(const ProcessConfig& cfg) {
    return check_stationarity(cfg, default_probe(cfg)).stationary;
}

inline void require_stationary(const ProcessConfig& cfg) {
    if (!is_stationary(cfg)) throw ConfigError("configuration does not admit a stationary distribution");
}

/// Stationary marginal for unit Frechet innovations: exp(-1/((1-c) x)).
inline double stationary_marginal_cdf(double c, double x) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("stationary_marginal_cdf: c must lie in (0,1)");
    if (!(x > 0.0)) return 0.0;
    return std::exp(-1.0 / ((1.0 - c) * x));
}

inline constexpr std::size_t kJointCdfMaxTerms = 1000000;

/// -log of the truncated product prod_{i>=0} G(x / c^i). Entries of x may be
/// +inf (coordinate marginalized out).
inline double stationary_joint_neg_log_cdf(const ProcessConfig& cfg, std::span<const double> x,
                                           double trunc_tol = 1e-12) {
    const std::size_t d = cfg.dimension();
    if (x.size() != d) throw DomainError("stationary_joint_cdf: argument length must equal d");
    for (double v : x) {
        if (!(v > 0.0)) throw DomainError("stationary_joint_cdf: arguments must be positive");
    }
    std::vector<double> scaled(x.begin(), x.end());
    double total = 0.0;
    for (std::size_t i = 0; i < kJointCdfMaxTerms; ++i) {
        const double term = innovation_neg_log_cdf(cfg, scaled);
        total += term;
        if (std::isinf(total) || term < trunc_tol) return total;
        for (std::size_t j = 0; j < d; ++j) scaled[j] /= cfg.c()[j];
    }
    throw NumericLimitError("stationary_joint_cdf: product did not reach the truncation tolerance");
}

inline double stationary_joint_cdf(const ProcessConfig& cfg, std::span<const double> x, double trunc_tol = 1e-12) {
    require_stationary(cfg);
    return detail::exp_neg(stationary_joint_neg_log_cdf(cfg, x, trunc_tol));
}

/// -log F_j(x) for the stationary marginal of coordinate j.
inline double stationary_marginal_neg_log_cdf(const ProcessConfig& cfg, std::size_t j, double x,
                                              double trunc_tol = 1e-14) {
    const auto& m = cfg.margins()[j];
    const double c = cfg.c()[j];
    if (const auto* f = std::get_if<margin::Frechet>(&m.kind())) {
        return x > 0.0 ? std::pow(x, -f->alpha) / (1.0 - std::pow(c, f->alpha))
                       : std::numeric_limits<double>::infinity();
    }
    if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
    double total = 0.0;
    double scaled = x;
    for (std::size_t i = 0; i < kJointCdfMaxTerms; ++i) {
        const double term = margin_neg_log_cdf(m, scaled);
        total += term;
        if (std::isinf(total) || term < trunc_tol) return total;
        scaled /= c;
    }
    throw NumericLimitError("stationary marginal series did not converge");
}

/// Quantile of the stationary marginal of coordinate j, given as the target
/// value L = -log p (so p close to 1 stays accurate). Closed form for Frechet
/// innovations, bisection otherwise.
inline double stationary_marginal_quantile_neglog(const ProcessConfig& cfg, std::size_t j, double target) {
    if (!(target > 0.0) || std::isinf(target)) throw DomainError("stationary quantile: p must lie in (0,1)");
    const auto& m = cfg.margins()[j];
    const double c = cfg.c()[j];
    if (const auto* f = std::get_if<margin::Frechet>(&m.kind())) {
        return std::pow(target * (1.0 - std::pow(c, f->alpha)), -1.0 / f->alpha);
    }
    const auto S = [&](double x) { return stationary_marginal_neg_log_cdf(cfg, j, x); };
    const double end = right_endpoint(m);
    double hi = std::isfinite(end) ? end : 1.0;
    while (S(hi) > target) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw NumericLimitError("stationary quantile: no upper bracket");
    }
    double lo = hi;
    while (S(lo) <= target) {
        lo *= 0.5;
        if (lo < 1e-300) return lo;
    }
    for (int it = 0; it < 300 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (S(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Level u with n (1 - F_j(u)) = tau for unit Frechet innovations.
inline double normalized_level(double c, std::size_t n, double tau) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("normalized_level: c must lie in (0,1)");
    if (n == 0) throw DomainError("normalized_level: n must be positive");
    if (!(tau >= 0.0)) throw DomainError("normalized_level: tau must be nonnegative");
    if (tau >= static_cast<double>(n)) throw DomainError("normalized_level: tau must be below n");
    if (tau == 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / ((1.0 - c) * std::log1p(-tau / static_cast<double>(n)));
}

namespace detail {
template <UniformSource R>
std::vector<double> draw_innovation(const ProcessConfig& cfg, R& rng) {
    auto u = copula_sample(cfg.copula(), cfg.dimension(), rng);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = margin_quantile(cfg.margins()[j], u[j]);
    return u;
}

inline bool all_frechet(const ProcessConfig& cfg) {
    for (const auto& m : cfg.margins()) {
        if (!std::holds_alternative<margin::Frechet>(m.kind())) return false;
    }
    return true;
}

inline void step(const ProcessConfig& cfg, std::vector<double>& state, std::span<const double> innovation) {
    for (std::size_t j = 0; j < state.size(); ++j) state[j] = std::max(cfg.c()[j] * state[j], innovation[j]);
}
}  // namespace detail

/// Simulates X_1..X_n. Row 0 (X_0) follows the config's init policy and is not
/// part of the output; exact_marginal silently falls back to burn-in when the
/// innovations are not Frechet.
template <UniformSource R>
SamplePath simulate_path(const ProcessConfig& cfg, std::size_t n, R& rng) {
    if (n == 0) throw DomainError("simulate_path: n must be positive");
    const std::size_t d = cfg.dimension();
    std::vector<double> state;

    const bool exact = std::holds_alternative<init::ExactMarginal>(cfg.init());
    if (exact) require_stationary(cfg);
    if (exact && detail::all_frechet(cfg)) {
        const auto u = copula_sample(cfg.copula(), d, rng);
        state.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            state[j] = stationary_marginal_quantile_neglog(cfg, j, -std::log(u[j]));
        }
    } else {
        const std::size_t burn = exact ? kDefaultBurnIn : std::get<init::BurnIn>(cfg.init()).length;
        state = detail::draw_innovation(cfg, rng);
        for (std::size_t i = 0; i < burn; ++i) detail::step(cfg, state, detail::draw_innovation(cfg, rng));
    }

    SamplePath path;
    path.n = n;
    path.d = d;
    path.data.resize(n * d);
    path.config_digest = config_digest(cfg);
    for (std::size_t i = 0; i < n; ++i) {
        detail::step(cfg, state, detail::draw_innovation(cfg, rng));
        std::copy(state.begin(), state.end(), path.data.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return path;
}

inline SamplePath simulate_path(const ProcessConfig& cfg, std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    auto path = simulate_path(cfg, n, rng);
    path.seed = seed;
    return path;
}

}  // namespace armax
