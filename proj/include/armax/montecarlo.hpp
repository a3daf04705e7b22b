#pragma once

#include "armax/errors.hpp"
#include "armax/estimation.hpp"
#include "armax/process.hpp"
#include "armax/random.hpp"
#include "armax/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace armax {

struct MonteCarloOptions {
    std::size_t n = 10000;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    std::size_t margin = 0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct ReplicateRow {
    std::size_t replicate = 0;
    std::size_t n = 0;
    double c_true = 0.0;
    double c_moment = 0.0;
    double c_lebedev = 0.0;
    double c_dr = 0.0;
    double u_bar = 0.0;
    EstimateFlag moment_flag = EstimateFlag::ok;
    EstimateFlag lebedev_flag = EstimateFlag::ok;
};

inline ReplicateRow run_replicate(const ProcessConfig& cfg, const MonteCarloOptions& opt, std::size_t index) {
    const auto path = simulate_path(cfg, opt.n, replicate_seed(opt.seed, index));
    const auto x = path.column(opt.margin);
    const auto moment = estimate_c_moment(x);
    const auto leb = estimate_c_lebedev(x);
    ReplicateRow row;
    row.replicate = index;
    row.n = opt.n;
    row.c_true = cfg.c()[opt.margin];
    row.c_moment = moment.c_hat;
    row.u_bar = moment.u_bar;
    row.moment_flag = moment.flag;
    row.c_lebedev = leb.c_hat;
    row.lebedev_flag = leb.flag;
    try {
        row.c_dr = estimate_c_davis_resnick(x);
    } catch (const DomainError&) {
        row.c_dr = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

/// Runs all replicates on a worker pool. Replicate i always uses
/// replicate_seed(seed, i), and rows come back in replicate order.
inline std::vector<ReplicateRow> run_replicates(const ProcessConfig& cfg, const MonteCarloOptions& opt) {
    if (opt.margin >= cfg.dimension()) throw ConfigError("montecarlo: margin index out of range");
    if (opt.n < 2) throw ConfigError("montecarlo: n must be at least 2");
    std::vector<ReplicateRow> rows(opt.replicates);
    unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(opt.replicates, 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < opt.replicates; i = next++) {
            try {
                rows[i] = run_replicate(cfg, opt, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

struct EstimatorSummary {
    std::size_t valid = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double bias = std::numeric_limits<double>::quiet_NaN();
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double var_sqrt_n = std::numeric_limits<double>::quiet_NaN();  // n * Var(c_hat)
};

struct MonteCarloSummary {
    std::size_t n = 0;
    std::size_t replicates = 0;
    double c_true = 0.0;
    EstimatorSummary moment;
    EstimatorSummary lebedev;
    EstimatorSummary davis_resnick;
    double dr_min = std::numeric_limits<double>::quiet_NaN();
    double var_sqrt_n_ubar = std::numeric_limits<double>::quiet_NaN();  // n * Var(U_bar)
    double sigma2_formula = 0.0;
    double sigma2_exact = 0.0;
    double v_delta_pow4 = 0.0;   // sigma2_formula (2-c)^4
    double v_paper_3m2c = 0.0;   // sigma2_formula (3-2c)
    double v_delta_pow4_exact = 0.0;
    double v_paper_3m2c_exact = 0.0;
    VarianceConvention matching_convention = VarianceConvention::delta_pow4;
    double normality_statistic = std::numeric_limits<double>::quiet_NaN();
    double normality_p_value = std::numeric_limits<double>::quiet_NaN();
};

inline EstimatorSummary summarize_estimator(std::span<const double> values, double c_true, std::size_t n) {
    std::vector<double> ok;
    for (double v : values) {
        if (std::isfinite(v)) ok.push_back(v);
    }
    EstimatorSummary s;
    s.valid = ok.size();
    if (ok.empty()) return s;
    s.mean = stats::mean(ok);
    s.bias = s.mean - c_true;
    double sq = 0.0;
    for (double v : ok) sq += (v - c_true) * (v - c_true);
    s.rmse = std::sqrt(sq / static_cast<double>(ok.size()));
    if (ok.size() >= 2) s.var_sqrt_n = static_cast<double>(n) * stats::variance(ok);
    return s;
}

/// Aggregates replicate rows. The matching convention is the one whose V,
/// computed from the published sigma^2 at the true c, is closest on a log
/// scale to the empirical n Var(c_moment).
inline MonteCarloSummary summarize(std::span<const ReplicateRow> rows) {
    if (rows.empty()) throw DomainError("montecarlo summary: no replicates");
    MonteCarloSummary s;
    s.n = rows.front().n;
    s.replicates = rows.size();
    s.c_true = rows.front().c_true;

    std::vector<double> cm, cl, cd, ub;
    for (const auto& r : rows) {
        cm.push_back(r.c_moment);
        cl.push_back(r.c_lebedev);
        cd.push_back(r.c_dr);
        ub.push_back(r.u_bar);
    }
    s.moment = summarize_estimator(cm, s.c_true, s.n);
    s.lebedev = summarize_estimator(cl, s.c_true, s.n);
    s.davis_resnick = summarize_estimator(cd, s.c_true, s.n);
    for (double v : cd) {
        if (std::isfinite(v) && !(v >= s.dr_min)) s.dr_min = v;
    }
    if (ub.size() >= 2) s.var_sqrt_n_ubar = static_cast<double>(s.n) * stats::variance(ub);

    s.sigma2_formula = asymptotic_variance(s.c_true);
    s.sigma2_exact = asymptotic_variance_exact(s.c_true);
    s.v_delta_pow4 = ci_variance(s.sigma2_formula, s.c_true, VarianceConvention::delta_pow4);
    s.v_paper_3m2c = ci_variance(s.sigma2_formula, s.c_true, VarianceConvention::paper_3m2c);
    s.v_delta_pow4_exact = ci_variance(s.sigma2_exact, s.c_true, VarianceConvention::delta_pow4);
    s.v_paper_3m2c_exact = ci_variance(s.sigma2_exact, s.c_true, VarianceConvention::paper_3m2c);

    const double emp = s.moment.var_sqrt_n;
    if (std::isfinite(emp) && emp > 0.0) {
        const double d_pow4 = std::abs(std::log(emp / s.v_delta_pow4));
        const double d_3m2c = std::abs(std::log(emp / s.v_paper_3m2c));
        s.matching_convention = d_pow4 <= d_3m2c ? VarianceConvention::delta_pow4 : VarianceConvention::paper_3m2c;
    }

    std::vector<double> valid;
    for (double v : cm) {
        if (std::isfinite(v)) valid.push_back(v);
    }
    if (valid.size() >= 8) {
        try {
            const auto ad = stats::anderson_darling_normal(valid);
            s.normality_statistic = ad.statistic;
            s.normality_p_value = ad.p_value;
        } catch (const UndefinedResult&) {
        }
    }
    return s;
}

}  // namespace armax
