#pragma once

#include "armax/copulas.hpp"
#include "armax/errors.hpp"
#include "armax/estimation.hpp"
#include "armax/margins.hpp"
#include "armax/process.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace armax::cli {

using nlohmann::json;

enum class Command { simulate, estimate, extremal_index, tail_dep, copula, montecarlo };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::estimate: return "estimate";
        case Command::extremal_index: return "extremal-index";
        case Command::tail_dep: return "tail-dep";
        case Command::copula: return "copula";
        case Command::montecarlo: return "montecarlo";
    }
    return "unknown";
}

inline Command parse_command(std::string_view s) {
    if (s == "simulate") return Command::simulate;
    if (s == "estimate") return Command::estimate;
    if (s == "extremal-index" || s == "extremal_index") return Command::extremal_index;
    if (s == "tail-dep" || s == "tail_dep") return Command::tail_dep;
    if (s == "copula") return Command::copula;
    if (s == "montecarlo") return Command::montecarlo;
    throw ConfigError("unknown command '" + std::string(s) + "'");
}

/// Inputs of the `copula` command.
struct CopulaTable {
    CopulaSpec base = CopulaSpec::independence();
    std::vector<double> theta;
    std::vector<std::vector<double>> points;     // u vectors
    std::vector<std::vector<std::size_t>> subsets;  // one-based index sets J
    std::size_t grid_points = 20;

    bool operator==(const CopulaTable&) const = default;
};

/// Everything a CLI invocation needs. Coordinates are one-based in JSON and
/// CSV and zero-based in memory.
struct RunConfig {
    Command command = Command::simulate;
    std::optional<ProcessConfig> process;
    std::optional<AnyCopula> attractor_copula;
    std::size_t n = 1000;
    std::optional<std::uint64_t> seed;
    std::string output_path;
    std::string input_path;

    // extremal-index
    std::vector<std::vector<double>> tau_grid;
    std::vector<std::size_t> k_list;
    std::size_t run_gap = 1;
    double threshold_quantile = 0.995;

    // tail-dep
    std::vector<double> t_grid{kDefaultTdcGrid.begin(), kDefaultTdcGrid.end()};
    double t = 0.02;
    std::vector<std::size_t> r_list{0, 1, 2};
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::optional<std::size_t> eta_k;

    // estimate / montecarlo
    VarianceConvention convention = VarianceConvention::delta_pow4;
    double level = 0.95;
    std::optional<std::size_t> hill_k;
    std::size_t replicates = 1000;
    std::size_t margin = 0;
    unsigned threads = 0;

    std::optional<CopulaTable> copula_table;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

inline std::size_t count(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

inline std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

inline std::size_t one_based(const json& j, const char* what) {
    const auto v = count(j, what);
    if (v == 0) throw ConfigError(std::string(what) + " indices are one-based");
    return v - 1;
}

inline MarginSpec parse_margin(const json& j) {
    const auto kind = require(j, "kind").get<std::string>();
    if (kind == "frechet") return MarginSpec::frechet(j.contains("alpha") ? number(j["alpha"], "alpha") : 1.0);
    if (kind == "exponential") {
        return MarginSpec::exponential(j.contains("rate") ? number(j["rate"], "rate") : 1.0);
    }
    if (kind == "uniform01") return MarginSpec::uniform01();
    if (kind == "gpd") {
        return MarginSpec::gpd(number(require(j, "shape"), "shape"), number(require(j, "scale"), "scale"),
                               j.contains("location") ? number(j["location"], "location") : 0.0);
    }
    if (kind == "weibull_min") return MarginSpec::weibull_min(number(require(j, "k"), "k"));
    throw ConfigError("unknown margin kind '" + kind + "'");
}

inline json margin_json(const MarginSpec& m) {
    return std::visit(armax::detail::overloaded{
                          [](const margin::Frechet& f) { return json{{"kind", "frechet"}, {"alpha", f.alpha}}; },
                          [](const margin::Exponential& e) {
                              return json{{"kind", "exponential"}, {"rate", e.rate}};
                          },
                          [](const margin::Uniform01&) { return json{{"kind", "uniform01"}}; },
                          [](const margin::Gpd& g) {
                              return json{{"kind", "gpd"},
                                          {"shape", g.shape},
                                          {"scale", g.scale},
                                          {"location", g.location}};
                          },
                          [](const margin::WeibullMin& w) { return json{{"kind", "weibull_min"}, {"k", w.k}}; },
                      },
                      m.kind());
}

inline CopulaSpec parse_copula(const json& j) {
    const auto kind = require(j, "kind").get<std::string>();
    if (kind == "gumbel") return CopulaSpec::gumbel(number(require(j, "gamma"), "gamma"));
    if (kind == "independence") return CopulaSpec::independence();
    if (kind == "comonotone") return CopulaSpec::comonotone();
    throw ConfigError("unknown copula kind '" + kind + "'");
}

inline json copula_json(const CopulaSpec& c) {
    json out{{"kind", kind_name(c)}};
    if (const auto* g = std::get_if<copula::Gumbel>(&c.kind())) out["gamma"] = g->gamma;
    return out;
}

inline AnyCopula parse_any_copula(const json& j) {
    if (require(j, "kind").get<std::string>() == "derived") {
        return DerivedCopula(parse_copula(require(j, "base")), numbers(require(j, "theta"), "theta"));
    }
    return parse_copula(j);
}

inline json any_copula_json(const AnyCopula& c) {
    if (const auto* d = std::get_if<DerivedCopula>(&c)) {
        return json{{"kind", "derived"}, {"base", copula_json(d->base())}, {"theta", d->theta()}};
    }
    return copula_json(std::get<CopulaSpec>(c));
}

inline ProcessConfig parse_process(const json& j) {
    const auto c = numbers(require(j, "c"), "c");
    const auto& mj = require(j, "margins");
    if (!mj.is_array()) throw ConfigError("margins must be an array");
    std::vector<MarginSpec> margins;
    for (const auto& m : mj) margins.push_back(parse_margin(m));
    const auto cop = j.contains("copula") ? parse_copula(j["copula"]) : CopulaSpec::independence();
    std::optional<InitPolicy> init;
    if (j.contains("init")) {
        const auto kind = require(j["init"], "kind").get<std::string>();
        if (kind == "exact_marginal") {
            init = init::ExactMarginal{};
        } else if (kind == "burn_in") {
            init = init::BurnIn{j["init"].contains("length") ? count(j["init"]["length"], "init.length")
                                                             : kDefaultBurnIn};
        } else {
            throw ConfigError("unknown init kind '" + kind + "'");
        }
    }
    return ProcessConfig(c, margins, cop, init);
}

inline json process_json(const ProcessConfig& p) {
    json margins = json::array();
    for (const auto& m : p.margins()) margins.push_back(margin_json(m));
    json init = std::visit(armax::detail::overloaded{
                               [](const init::ExactMarginal&) { return json{{"kind", "exact_marginal"}}; },
                               [](const init::BurnIn& b) { return json{{"kind", "burn_in"}, {"length", b.length}}; },
                           },
                           p.init());
    return json{{"c", p.c()}, {"margins", margins}, {"copula", copula_json(p.copula())}, {"init", init}};
}

inline VarianceConvention parse_convention(const std::string& s) {
    if (s == "delta_pow4") return VarianceConvention::delta_pow4;
    if (s == "paper_3m2c") return VarianceConvention::paper_3m2c;
    throw ConfigError("unknown variance convention '" + s + "'");
}

}  // namespace detail

inline void validate(const RunConfig& rc) {
    const bool needs_process = rc.command != Command::copula &&
                               !(rc.input_path.size() && (rc.command == Command::estimate));
    if (needs_process && !rc.process) throw ConfigError("a 'process' block is required for this command");
    const bool simulates = rc.command == Command::simulate || rc.command == Command::montecarlo ||
                           ((rc.command == Command::extremal_index || rc.command == Command::tail_dep ||
                             rc.command == Command::estimate) &&
                            rc.input_path.empty());
    if (simulates && !rc.seed) throw ConfigError("a seed is required when the command simulates a path");
    if (rc.n < 2) throw ConfigError("n must be at least 2");
    if ((rc.command == Command::simulate || rc.command == Command::montecarlo) && rc.output_path.empty()) {
        throw ConfigError("an output path is required for this command");
    }
    if (rc.command == Command::copula && !rc.copula_table) throw ConfigError("copula command needs a 'copula_table'");
    if (!(rc.level >= 0.0 && rc.level < 1.0)) throw ConfigError("level must lie in [0,1)");
    if (!(rc.t > 0.0 && rc.t < 1.0)) throw ConfigError("t must lie in (0,1)");
    if (!(rc.threshold_quantile > 0.0 && rc.threshold_quantile < 1.0)) {
        throw ConfigError("threshold_quantile must lie in (0,1)");
    }
    if (rc.run_gap == 0) throw ConfigError("run_gap must be positive");
    if (rc.command == Command::montecarlo && rc.replicates == 0) throw ConfigError("replicates must be positive");
    if (rc.process) {
        const auto d = rc.process->dimension();
        for (const auto& tau : rc.tau_grid) {
            if (tau.size() != d) throw ConfigError("every tau in tau_grid needs one entry per coordinate");
        }
        for (const auto& [a, b] : rc.pairs) {
            if (a >= d || b >= d) throw ConfigError("pair index out of range");
        }
        if (rc.margin >= d) throw ConfigError("margin index out of range");
        if (rc.attractor_copula) {
            if (const auto* dc = std::get_if<DerivedCopula>(&*rc.attractor_copula); dc && dc->dimension() != d) {
                throw ConfigError("attractor copula dimension does not match the process");
            }
        }
    }
    if (rc.copula_table) {
        const auto& tab = rc.copula_table;
        const std::size_t d = tab->theta.size();
        for (const auto& u : tab->points) {
            if (u.size() != d) throw ConfigError("copula_table points need one entry per theta");
        }
        for (const auto& s : tab->subsets) {
            for (auto j : s) {
                if (j >= d) throw ConfigError("copula_table subset index out of range");
            }
        }
    }
}

inline RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig rc;
    try {
        if (j.contains("command")) rc.command = parse_command(j["command"].get<std::string>());
        if (j.contains("process")) rc.process = detail::parse_process(j["process"]);
        if (j.contains("attractor_copula")) rc.attractor_copula = detail::parse_any_copula(j["attractor_copula"]);
        if (j.contains("n")) rc.n = detail::count(j["n"], "n");
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be an unsigned integer");
            rc.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("output_path")) rc.output_path = j["output_path"].get<std::string>();
        if (j.contains("input_path")) rc.input_path = j["input_path"].get<std::string>();
        if (j.contains("tau_grid")) {
            for (const auto& tau : j["tau_grid"]) rc.tau_grid.push_back(detail::numbers(tau, "tau"));
        }
        if (j.contains("k_list")) {
            for (const auto& k : j["k_list"]) rc.k_list.push_back(detail::count(k, "k"));
        }
        if (j.contains("run_gap")) rc.run_gap = detail::count(j["run_gap"], "run_gap");
        if (j.contains("threshold_quantile")) rc.threshold_quantile = detail::number(j["threshold_quantile"], "q");
        if (j.contains("t_grid")) rc.t_grid = detail::numbers(j["t_grid"], "t_grid");
        if (j.contains("t")) rc.t = detail::number(j["t"], "t");
        if (j.contains("r_list")) {
            rc.r_list.clear();
            for (const auto& r : j["r_list"]) rc.r_list.push_back(detail::count(r, "r"));
        }
        if (j.contains("pairs")) {
            for (const auto& p : j["pairs"]) {
                if (!p.is_array() || p.size() != 2) throw ConfigError("pairs entries must be [j, jp]");
                rc.pairs.emplace_back(detail::one_based(p[0], "pair"), detail::one_based(p[1], "pair"));
            }
        }
        if (j.contains("eta_k")) rc.eta_k = detail::count(j["eta_k"], "eta_k");
        if (j.contains("convention")) rc.convention = detail::parse_convention(j["convention"].get<std::string>());
        if (j.contains("level")) rc.level = detail::number(j["level"], "level");
        if (j.contains("hill_k")) rc.hill_k = detail::count(j["hill_k"], "hill_k");
        if (j.contains("replicates")) rc.replicates = detail::count(j["replicates"], "replicates");
        if (j.contains("margin")) rc.margin = detail::one_based(j["margin"], "margin");
        if (j.contains("threads")) rc.threads = static_cast<unsigned>(detail::count(j["threads"], "threads"));
        if (j.contains("copula_table")) {
            const auto& t = j["copula_table"];
            CopulaTable tab;
            tab.base = detail::parse_copula(detail::require(t, "base"));
            tab.theta = detail::numbers(detail::require(t, "theta"), "theta");
            if (t.contains("points")) {
                for (const auto& u : t["points"]) tab.points.push_back(detail::numbers(u, "point"));
            }
            if (t.contains("subsets")) {
                for (const auto& s : t["subsets"]) {
                    std::vector<std::size_t> idx;
                    for (const auto& v : s) idx.push_back(detail::one_based(v, "subset"));
                    tab.subsets.push_back(idx);
                }
            }
            if (t.contains("grid_points")) tab.grid_points = detail::count(t["grid_points"], "grid_points");
            DerivedCopula(tab.base, tab.theta);  // validates theta
            rc.copula_table = tab;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return rc;
}

/// Fully resolved config; parse_run_config(to_json(rc)) == rc.
inline json to_json(const RunConfig& rc) {
    json j;
    j["command"] = command_name(rc.command);
    if (rc.process) j["process"] = detail::process_json(*rc.process);
    if (rc.attractor_copula) j["attractor_copula"] = detail::any_copula_json(*rc.attractor_copula);
    j["n"] = rc.n;
    if (rc.seed) j["seed"] = *rc.seed;
    if (!rc.output_path.empty()) j["output_path"] = rc.output_path;
    if (!rc.input_path.empty()) j["input_path"] = rc.input_path;
    j["tau_grid"] = rc.tau_grid;
    j["k_list"] = rc.k_list;
    j["run_gap"] = rc.run_gap;
    j["threshold_quantile"] = rc.threshold_quantile;
    j["t_grid"] = rc.t_grid;
    j["t"] = rc.t;
    j["r_list"] = rc.r_list;
    json pairs = json::array();
    for (const auto& [a, b] : rc.pairs) pairs.push_back({a + 1, b + 1});
    j["pairs"] = pairs;
    if (rc.eta_k) j["eta_k"] = *rc.eta_k;
    j["convention"] = convention_name(rc.convention);
    j["level"] = rc.level;
    if (rc.hill_k) j["hill_k"] = *rc.hill_k;
    j["replicates"] = rc.replicates;
    j["margin"] = rc.margin + 1;
    j["threads"] = rc.threads;
    if (rc.copula_table) {
        const auto& t = *rc.copula_table;
        json subsets = json::array();
        for (const auto& s : t.subsets) {
            json one = json::array();
            for (auto v : s) one.push_back(v + 1);
            subsets.push_back(one);
        }
        j["copula_table"] = {{"base", detail::copula_json(t.base)},
                             {"theta", t.theta},
                             {"points", t.points},
                             {"subsets", subsets},
                             {"grid_points", t.grid_points}};
    }
    return j;
}

}  // namespace armax::cli
