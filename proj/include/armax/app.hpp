#pragma once

#include "armax/copulas.hpp"
#include "armax/errors.hpp"
#include "armax/estimation.hpp"
#include "armax/extremal.hpp"
#include "armax/format.hpp"
#include "armax/montecarlo.hpp"
#include "armax/process.hpp"
#include "armax/run_config.hpp"
#include "armax/stats.hpp"
#include "armax/taildep.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace armax::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericFailure = 3 };

/// Comma-separated rows with 17-significant-digit numbers.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    CsvWriter& cell(const std::string& s) {
        sep();
        os_ << s;
        return *this;
    }
    CsvWriter& cell(const char* s) { return cell(std::string(s)); }
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(std::size_t v) { return cell(std::to_string(v)); }
    void end() {
        os_ << '\n';
        first_ = true;
    }

private:
    void sep() {
        if (!first_) os_ << ',';
        first_ = false;
    }
    std::ostream& os_;
    bool first_ = true;
};

/// Destination for the primary CSV: a file, or stdout when no path is set.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw ConfigError("cannot write to '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

inline std::string sidecar_path(const std::string& out, const std::string& suffix) {
    std::filesystem::path p(out);
    p.replace_extension(suffix);
    return p.string();
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write to '" + path + "'");
    f << j.dump(2) << '\n';
}

/// Reads a numeric CSV. A non-numeric first line is a header; a leading
/// column named `t` is dropped.
inline SamplePath read_path_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    const auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            out.push_back(cell);
        }
        return out;
    };
    const auto parse = [](const std::string& s, double& v) {
        const char* b = s.data();
        const char* e = s.data() + s.size();
        if (!s.empty() && *b == '+') ++b;
        auto res = std::from_chars(b, e, v);
        return res.ec == std::errc{} && res.ptr == e;
    };

    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    bool drop_t = false;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split(line);
        if (first) {
            first = false;
            double probe;
            if (!parse(cells.front(), probe)) {
                drop_t = cells.front() == "t";
                continue;
            }
        }
        std::vector<double> row;
        for (std::size_t i = drop_t ? 1 : 0; i < cells.size(); ++i) {
            double v;
            if (!parse(cells[i], v)) throw ConfigError("non-numeric value '" + cells[i] + "' in " + path);
            row.push_back(v);
        }
        if (width == 0) width = row.size();
        if (row.size() != width || width == 0) throw ConfigError("ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ConfigError("input file needs at least two rows");
    SamplePath p;
    p.n = rows.size();
    p.d = width;
    for (const auto& r : rows) p.data.insert(p.data.end(), r.begin(), r.end());
    return p;
}

inline SamplePath obtain_path(const RunConfig& rc) {
    if (!rc.input_path.empty()) {
        auto p = read_path_csv(rc.input_path);
        if (rc.process && p.d != rc.process->dimension()) {
            throw ConfigError("input file width does not match the process dimension");
        }
        return p;
    }
    return simulate_path(*rc.process, rc.n, *rc.seed);
}

inline std::vector<AttractionDomain> domains_of(const ProcessConfig& cfg) {
    std::vector<AttractionDomain> out;
    for (const auto& m : cfg.margins()) out.push_back(attraction_domain(m));
    return out;
}

inline int cmd_simulate(const RunConfig& rc, std::ostream& log) {
    const auto& cfg = *rc.process;
    const auto path = simulate_path(cfg, rc.n, *rc.seed);
    {
        Output out(rc.output_path);
        CsvWriter csv(out.stream());
        csv.cell("t");
        for (std::size_t j = 0; j < path.d; ++j) csv.cell("x" + std::to_string(j + 1));
        csv.end();
        for (std::size_t i = 0; i < path.n; ++i) {
            csv.cell(i + 1);
            for (std::size_t j = 0; j < path.d; ++j) csv.cell(path.at(i, j));
            csv.end();
        }
    }
    json columns = json::array();
    const auto domains = domains_of(cfg);
    for (std::size_t j = 0; j < path.d; ++j) {
        const auto col = path.column(j);
        const double u = stats::empirical_quantile(col, rc.threshold_quantile);
        json entry{{"margin", j + 1},
                   {"c", cfg.c()[j]},
                   {"theta_theoretical", marginal_extremal_index(cfg.c()[j], domains[j])},
                   {"threshold", format_double(u)}};
        try {
            entry["theta_runs"] = empirical_extremal_index_runs(col, u, rc.run_gap);
        } catch (const UndefinedResult&) {
            entry["theta_runs"] = "nan";
            log << "warning: no exceedances in column " << j + 1 << '\n';
        }
        columns.push_back(entry);
    }
    json meta{{"command", "simulate"},
              {"n", path.n},
              {"d", path.d},
              {"seed", path.seed},
              {"config_digest", path.config_digest},
              {"process", describe(cfg)},
              {"threshold_quantile", rc.threshold_quantile},
              {"run_gap", rc.run_gap},
              {"columns", columns},
              {"config", to_json(rc)}};
    write_json(sidecar_path(rc.output_path, ".json"), meta);
    return kOk;
}

inline int cmd_estimate(const RunConfig& rc, std::ostream& log) {
    const auto path = obtain_path(rc);
    Output out(rc.output_path);
    CsvWriter csv(out.stream());
    for (const char* h : {"margin", "n", "u_bar", "c_moment", "moment_flag", "p_tilde", "c_lebedev", "lebedev_flag",
                          "c_davis_resnick", "davis_resnick_flag", "sigma2", "ci_lo", "ci_hi", "variance_convention",
                          "level", "alpha_hill", "hill_k", "hill_flag"}) {
        csv.cell(h);
    }
    csv.end();
    EstimateOptions opt;
    opt.convention = rc.convention;
    opt.level = rc.level;
    opt.hill_k = rc.hill_k;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < path.d; ++j) {
        const auto col = path.column(j);
        const auto rep = estimate_margin(col, j, opt);
        if (rep.moment_flag != EstimateFlag::ok) {
            log << "warning: margin " << j + 1 << ": moment estimator flagged " << flag_name(rep.moment_flag)
                << " (u_bar=" << format_double(rep.u_bar) << "), unsuitable model\n";
        }
        if (rep.lebedev_flag != EstimateFlag::ok) {
            log << "warning: margin " << j + 1 << ": Lebedev estimator flagged " << flag_name(rep.lebedev_flag)
                << '\n';
        }
        if (!rep.davis_resnick_valid) log << "warning: margin " << j + 1 << ": nonpositive values\n";
        csv.cell(j + 1)
            .cell(rep.n)
            .cell(rep.u_bar)
            .cell(rep.c_moment)
            .cell(flag_name(rep.moment_flag))
            .cell(rep.p_tilde)
            .cell(rep.c_lebedev)
            .cell(flag_name(rep.lebedev_flag))
            .cell(rep.c_davis_resnick)
            .cell(rep.davis_resnick_valid ? "ok" : "domain")
            .cell(rep.sigma2)
            .cell(rep.ci.lo)
            .cell(rep.ci.hi)
            .cell(convention_name(rep.convention))
            .cell(rep.level)
            .cell(rep.alpha_hill.value_or(nan))
            .cell(rep.hill_k)
            .cell(rep.alpha_hill ? "ok" : "undefined");
        csv.end();
    }
    return kOk;
}

inline int cmd_extremal_index(const RunConfig& rc, std::ostream& log) {
    const auto& cfg = *rc.process;
    const auto path = obtain_path(rc);
    const auto domains = domains_of(cfg);
    const AnyCopula attractor = rc.attractor_copula.value_or(AnyCopula{cfg.copula()});
    auto taus = rc.tau_grid;
    if (taus.empty()) taus.push_back(std::vector<double>(cfg.dimension(), 1.0));
    auto ks = rc.k_list;
    if (ks.empty()) {
        const auto k0 = default_stdf_k(path.n);
        ks = {std::max<std::size_t>(1, k0 / 2), k0, 2 * k0};
    }

    Output out(rc.output_path);
    CsvWriter csv(out.stream());
    for (std::size_t j = 0; j < cfg.dimension(); ++j) csv.cell("tau" + std::to_string(j + 1));
    csv.cell("theta_theoretical").cell("theta_empirical").cell("k").cell("n").cell("flag");
    csv.end();
    for (const auto& tau : taus) {
        const double theory = theoretical_mv_extremal_index(attractor, domains, cfg.c(), tau).theta;
        for (auto k : ks) {
            double emp = std::numeric_limits<double>::quiet_NaN();
            std::string flag = "ok";
            try {
                emp = empirical_mv_extremal_index(path, domains, cfg.c(), k, tau);
            } catch (const UndefinedResult&) {
                flag = "undefined";
            } catch (const DomainError&) {
                flag = "invalid_k";
            }
            if (flag != "ok") log << "warning: empirical extremal index " << flag << " at k=" << k << '\n';
            for (double t : tau) csv.cell(t);
            csv.cell(theory).cell(emp).cell(k).cell(path.n).cell(flag);
            csv.end();
        }
    }
    return kOk;
}

inline int cmd_tail_dep(const RunConfig& rc, std::ostream& log) {
    const auto& cfg = *rc.process;
    const auto path = obtain_path(rc);
    auto pairs = rc.pairs;
    if (pairs.empty()) {
        for (std::size_t a = 0; a < cfg.dimension(); ++a) {
            for (std::size_t b = 0; b < cfg.dimension(); ++b) pairs.emplace_back(a, b);
        }
    }
    const auto eta_k = rc.eta_k.value_or(default_eta_k(path.n));
    Output out(rc.output_path);
    CsvWriter csv(out.stream());
    for (const char* h : {"j", "jp", "r", "lambda_theoretical", "lambda_empirical", "eta_empirical", "regime", "flag"}) {
        csv.cell(h);
    }
    csv.end();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [j, jp] : pairs) {
        for (auto r : rc.r_list) {
            const auto lim = theoretical_lag_tdc(cfg, j, jp, r, rc.t_grid);
            std::string flag = "ok";
            double lam_emp = nan;
            std::optional<double> eta;
            try {
                lam_emp = empirical_tdc(path, j, jp, r, rc.t);
            } catch (const DomainError&) {
                flag = "lambda_insufficient_tail";
            } catch (const UndefinedResult&) {
                flag = "lambda_undefined";
            }
            try {
                eta = empirical_eta(path, j, jp, r, eta_k);
            } catch (const DomainError&) {
                flag = flag == "ok" ? "eta_invalid_k" : flag + ";eta_invalid_k";
            } catch (const UndefinedResult&) {
                flag = flag == "ok" ? "eta_undefined" : flag + ";eta_undefined";
            }
            if (flag != "ok") log << "warning: pair (" << j + 1 << "," << jp + 1 << ") r=" << r << ": " << flag << '\n';
            csv.cell(j + 1).cell(jp + 1).cell(r).cell(lim.value).cell(lam_emp).cell(eta.value_or(nan));
            csv.cell(eta ? regime_name(classify_tail_regime(lim.value, *eta)) : "nan").cell(flag);
            csv.end();
        }
    }
    return kOk;
}

inline std::string join_label(const char* prefix, const std::vector<std::string>& parts) {
    std::string s = prefix;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ";" : "") + parts[i];
    return s;
}

inline int cmd_copula(const RunConfig& rc, std::ostream& log) {
    const auto& tab = *rc.copula_table;
    const std::size_t d = tab.theta.size();
    const AnyCopula base{tab.base};
    const AnyCopula derived{DerivedCopula(tab.base, tab.theta)};
    auto points = tab.points;
    if (points.empty()) points.push_back(std::vector<double>(d, 0.5));
    auto subsets = tab.subsets;
    if (subsets.empty()) {
        subsets.emplace_back(d);
        std::iota(subsets.back().begin(), subsets.back().end(), std::size_t{0});
    }

    Output out(rc.output_path);
    CsvWriter csv(out.stream());
    csv.cell("table").cell("label").cell("base").cell("derived");
    csv.end();
    for (const auto& u : points) {
        std::vector<std::string> parts;
        for (double v : u) parts.push_back(format_double(v));
        csv.cell("evaluate").cell(join_label("u=", parts)).cell(evaluate(base, u)).cell(evaluate(derived, u));
        csv.end();
    }
    for (const auto& s : subsets) {
        std::vector<std::string> parts;
        for (auto j : s) parts.push_back(std::to_string(j + 1));
        csv.cell("extremal_coefficient")
            .cell(join_label("J=", parts))
            .cell(extremal_coefficient(base, d, s))
            .cell(extremal_coefficient(derived, d, s));
        csv.end();
    }
    if (d == 2) {
        const std::array<double, 3> powers{0.5, 2.0, 5.0};
        const auto row = [&](const char* label, const GridCheck& b, const GridCheck& dv) {
            csv.cell("validity").cell(std::string(label) + "_worst").cell(b.worst).cell(dv.worst);
            csv.end();
            csv.cell("validity")
                .cell(std::string(label) + "_passed")
                .cell(b.passed ? 1.0 : 0.0)
                .cell(dv.passed ? 1.0 : 0.0);
            csv.end();
            if (!dv.passed) log << "warning: derived copula fails the " << label << " check\n";
        };
        row("two_increasing", two_increasing_grid(base, tab.grid_points), two_increasing_grid(derived, tab.grid_points));
        row("max_stability", max_stability_grid(base, powers, tab.grid_points),
            max_stability_grid(derived, powers, tab.grid_points));
        row("frechet_hoeffding", frechet_hoeffding_grid(base, tab.grid_points),
            frechet_hoeffding_grid(derived, tab.grid_points));
    }
    return kOk;
}

inline json summary_json(const MonteCarloSummary& s) {
    const auto est = [](const EstimatorSummary& e) {
        return json{{"valid", e.valid},
                    {"mean", format_double(e.mean)},
                    {"bias", format_double(e.bias)},
                    {"rmse", format_double(e.rmse)},
                    {"var_sqrt_n", format_double(e.var_sqrt_n)}};
    };
    return json{{"n", s.n},
                {"replicates", s.replicates},
                {"c_true", format_double(s.c_true)},
                {"c_moment", est(s.moment)},
                {"c_lebedev", est(s.lebedev)},
                {"c_davis_resnick", est(s.davis_resnick)},
                {"c_davis_resnick_min", format_double(s.dr_min)},
                {"var_sqrt_n_u_bar", format_double(s.var_sqrt_n_ubar)},
                {"sigma2_formula", format_double(s.sigma2_formula)},
                {"sigma2_exact", format_double(s.sigma2_exact)},
                {"v_delta_pow4", format_double(s.v_delta_pow4)},
                {"v_paper_3m2c", format_double(s.v_paper_3m2c)},
                {"v_delta_pow4_exact", format_double(s.v_delta_pow4_exact)},
                {"v_paper_3m2c_exact", format_double(s.v_paper_3m2c_exact)},
                {"matching_convention", convention_name(s.matching_convention)},
                {"normality_statistic", format_double(s.normality_statistic)},
                {"normality_p_value", format_double(s.normality_p_value)}};
}

inline int cmd_montecarlo(const RunConfig& rc, std::ostream& log) {
    MonteCarloOptions opt;
    opt.n = rc.n;
    opt.replicates = rc.replicates;
    opt.seed = *rc.seed;
    opt.margin = rc.margin;
    opt.threads = rc.threads;
    const auto rows = run_replicates(*rc.process, opt);
    {
        Output out(rc.output_path);
        CsvWriter csv(out.stream());
        for (const char* h : {"replicate", "n", "c_true", "c_moment", "c_lebedev", "c_dr", "u_bar", "moment_flag",
                              "lebedev_flag"}) {
            csv.cell(h);
        }
        csv.end();
        for (const auto& r : rows) {
            csv.cell(r.replicate)
                .cell(r.n)
                .cell(r.c_true)
                .cell(r.c_moment)
                .cell(r.c_lebedev)
                .cell(r.c_dr)
                .cell(r.u_bar)
                .cell(flag_name(r.moment_flag))
                .cell(flag_name(r.lebedev_flag));
            csv.end();
        }
    }
    const auto s = summarize(rows);
    if (s.moment.valid < s.replicates) {
        log << "warning: " << s.replicates - s.moment.valid << " replicates flagged by the moment estimator\n";
    }
    auto j = summary_json(s);
    j["seed"] = *rc.seed;
    j["seed_rule"] = "replicate i uses splitmix64(splitmix64(seed) ^ (i + 1))";
    j["config_digest"] = config_digest(*rc.process);
    j["margin"] = rc.margin + 1;
    write_json(sidecar_path(rc.output_path, ".summary.json"), j);
    return kOk;
}

/// Calls `body` and maps library exceptions to exit codes: configuration and
/// domain errors give 2, numeric-limit and undefined results give 3.
template <class Body>
int with_exit_codes(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericLimitError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const UndefinedResult& e) {
        log << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

/// Runs one validated command.
inline int run(const RunConfig& rc, std::ostream& log = std::cerr) {
    return with_exit_codes(log, [&] {
        validate(rc);
        switch (rc.command) {
            case Command::simulate: return cmd_simulate(rc, log);
            case Command::estimate: return cmd_estimate(rc, log);
            case Command::extremal_index: return cmd_extremal_index(rc, log);
            case Command::tail_dep: return cmd_tail_dep(rc, log);
            case Command::copula: return cmd_copula(rc, log);
            case Command::montecarlo: return cmd_montecarlo(rc, log);
        }
        return static_cast<int>(kFailure);
    });
}

}  // namespace armax::cli
