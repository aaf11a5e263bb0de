// Parameter-sweep layer behind the CLI: JSON config ingestion and validation,
// deterministic (thread-count independent) grid evaluation, CSV emission.

#pragma once

#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "circwave/disorder.hpp"
#include "circwave/entanglement.hpp"
#include "circwave/waveguide.hpp"

namespace circwave {

inline constexpr const char* version_string = "0.1.0";

/// Config problems (malformed JSON, schema or invariant violations). The CLI
/// maps these to exit code 2; runtime failures map to 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class Experiment {
    ggm_vs_j,
    ggm_vs_n,
    acggm,
    ggm_analytic_n,
    disorder_quenched,
    breached,
    block_entropy,
    three_mode_oracle,
};

inline const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::ggm_vs_j: return "ggm-vs-J";
        case Experiment::ggm_vs_n: return "ggm-vs-n";
        case Experiment::acggm: return "acggm";
        case Experiment::ggm_analytic_n: return "ggm-analytic-N";
        case Experiment::disorder_quenched: return "disorder-quenched";
        case Experiment::breached: return "breached";
        case Experiment::block_entropy: return "block-entropy";
        case Experiment::three_mode_oracle: return "three-mode-oracle";
    }
    return "?";
}

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    std::vector<double> values() const {
        std::vector<double> xs(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
            xs[static_cast<std::size_t>(i)] =
                points == 1 ? start : start + (stop - start) * i / (points - 1);
        return xs;
    }
};

struct ProfileSpec {
    std::string label;
    std::vector<double> strengths;  // resolved to length floor(N/2)

    CouplingProfile at(int modes, double coupling) const {
        return CouplingProfile(modes, strengths, coupling);
    }
};

struct QuadratureSettings {
    int acggm_steps = 512;      // Simpson steps for accumulated-GGM integrals
    int mean_steps = 128;       // Simpson steps over the mean coupling J_m
    int max_scan_points = 721;  // scan resolution for per-period maxima
    std::string scheme = "gauss-hermite";
    int gh_order = 64;
    long long mc_samples = 100000;
    std::uint64_t mc_seed = 1;
};

struct SweepConfig {
    Experiment experiment = Experiment::ggm_vs_j;
    int modes = 0;
    std::vector<int> mode_counts;  // ggm-analytic-N, breached
    std::vector<ProfileSpec> profiles;
    bool profile_column = false;
    std::vector<double> s_values{1.0};
    bool s_column = false;
    double theta = 0.0;
    int input_mode = 1;
    GridSpec j_grid;
    std::vector<double> j_values;
    bool j_column = false;
    GridSpec n_grid;
    int vary_range = 2;
    GridSpec j0_grid;
    GridSpec jm_grid;
    std::vector<double> sigmas;
    int l_min = 1, l_max = 0;
    std::string strategy = "auto";
    QuadratureSettings quad;
    std::string output;
    int threads = 0;
    std::string echo;  // canonicalized config document
};

using Cell = std::variant<long long, double, std::string>;

struct SweepResult {
    std::vector<std::string> columns;
    int key_columns = 0;  // leading columns that identify the grid point
    std::vector<std::vector<Cell>> rows;
    std::string config_echo;
};

// ---------------------------------------------------------------------------
// config parsing

namespace detail {

using json = nlohmann::json;

inline std::string format_cell(const Cell& c) {
    char buf[40];
    if (std::holds_alternative<long long>(c)) {
        std::snprintf(buf, sizeof buf, "%lld", std::get<long long>(c));
        return buf;
    }
    if (std::holds_alternative<double>(c)) {
        std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
        return buf;
    }
    return std::get<std::string>(c);
}

inline Experiment parse_experiment(const std::string& name) {
    for (Experiment e : {Experiment::ggm_vs_j, Experiment::ggm_vs_n, Experiment::acggm,
                         Experiment::ggm_analytic_n, Experiment::disorder_quenched,
                         Experiment::breached, Experiment::block_entropy,
                         Experiment::three_mode_oracle})
        if (name == experiment_name(e)) return e;
    throw config_error("experiment: unknown kind '" + name + "'");
}

inline double require_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw config_error(field + ": expected a number");
    return j.get<double>();
}

inline int require_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw config_error(field + ": expected an integer");
    return j.get<int>();
}

inline GridSpec parse_grid(const json& j, const std::string& field) {
    if (!j.is_object()) throw config_error(field + ": expected {start, stop, points}");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "start" && it.key() != "stop" && it.key() != "points")
            throw config_error(field + ": unknown key '" + it.key() + "'");
    if (!j.contains("start") || !j.contains("stop") || !j.contains("points"))
        throw config_error(field + ": expected {start, stop, points}");
    GridSpec g;
    g.start = require_number(j["start"], field + ".start");
    g.stop = require_number(j["stop"], field + ".stop");
    g.points = require_int(j["points"], field + ".points");
    if (!std::isfinite(g.start) || !std::isfinite(g.stop))
        throw config_error(field + ": start/stop must be finite");
    if (g.start > g.stop) throw config_error(field + ": start must be <= stop");
    if (g.points < 1) throw config_error(field + ": points must be >= 1");
    return g;
}

inline std::vector<double> parse_number_list(const json& j, const std::string& field,
                                             bool* was_array = nullptr) {
    std::vector<double> out;
    if (j.is_array()) {
        if (was_array) *was_array = true;
        if (j.empty()) throw config_error(field + ": list must be nonempty");
        for (const auto& v : j) out.push_back(require_number(v, field));
    } else {
        if (was_array) *was_array = false;
        out.push_back(require_number(j, field));
    }
    return out;
}

inline ProfileSpec resolve_profile(const json& j, int modes, const std::string& field) {
    const int half = modes / 2;
    const auto by_range = [&](const std::string& label, int range) {
        if (range > half)
            throw config_error(field + ": '" + label + "' needs floor(N/2) >= " +
                               std::to_string(range) + " (N = " + std::to_string(modes) + ")");
        std::vector<double> n(static_cast<std::size_t>(half), 0.0);
        for (int i = 0; i < range; ++i) n[static_cast<std::size_t>(i)] = 1.0;
        return ProfileSpec{label, std::move(n)};
    };
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "NN") return by_range("NN", 1);
        if (name == "NNN") return by_range("NNN", 2);
        if (name == "NNNN") return by_range("NNNN", 3);
        if (name == "LR") return by_range("LR", half);
        throw config_error(field + ": unknown profile shorthand '" + name +
                           "' (use NN, NNN, NNNN, LR or {label, n})");
    }
    if (!j.is_object()) throw config_error(field + ": expected a shorthand string or {label, n}");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "label" && it.key() != "n")
            throw config_error(field + ": unknown key '" + it.key() + "'");
    if (!j.contains("label") || !j.contains("n"))
        throw config_error(field + ": custom profile needs both 'label' and 'n'");
    ProfileSpec spec;
    spec.label = j["label"].get<std::string>();
    if (spec.label.empty() || spec.label.find_first_of(",\n\r") != std::string::npos)
        throw config_error(field + ".label: must be nonempty and free of commas");
    for (const auto& v : j["n"]) spec.strengths.push_back(require_number(v, field + ".n"));
    try {
        CouplingProfile check(modes, spec.strengths, 0.0);
        spec.strengths = check.strengths();
    } catch (const std::invalid_argument& e) {
        throw config_error(field + ".n: " + e.what());
    }
    return spec;
}

inline std::vector<int> parse_mode_list(const json& j, const std::string& field) {
    std::vector<int> out;
    if (j.is_array()) {
        if (j.empty()) throw config_error(field + ": list must be nonempty");
        for (const auto& v : j) out.push_back(require_int(v, field));
    } else {
        out.push_back(require_int(j, field));
    }
    return out;
}

}  // namespace detail

namespace detail {

inline SweepConfig parse_config_checked(const json& doc, SweepConfig& cfg) {
    cfg.experiment = detail::parse_experiment(doc["experiment"].get<std::string>());
    const Experiment ex = cfg.experiment;

    const auto allowed = [&]() -> std::vector<std::string> {
        std::vector<std::string> keys{"experiment", "strategy", "quadrature", "output", "threads"};
        const auto add = [&](std::initializer_list<const char*> more) {
            for (const char* k : more) keys.emplace_back(k);
        };
        switch (ex) {
            case Experiment::ggm_vs_j:
                add({"N", "profile", "profiles", "s", "theta", "input_mode", "J_grid"});
                break;
            case Experiment::ggm_vs_n:
                add({"N", "s", "theta", "input_mode", "J", "n_grid", "vary_range"});
                break;
            case Experiment::acggm:
                add({"N", "profile", "profiles", "s", "theta", "input_mode", "J0_grid"});
                break;
            case Experiment::ggm_analytic_n:
                add({"N", "s"});
                break;
            case Experiment::disorder_quenched:
                add({"N", "profile", "profiles", "s", "sigma", "J_m_grid"});
                break;
            case Experiment::breached:
                add({"N", "s", "sigma"});
                break;
            case Experiment::block_entropy:
                add({"N", "profile", "profiles", "s", "theta", "input_mode", "J", "L_range"});
                break;
            case Experiment::three_mode_oracle:
                add({"N", "s", "theta", "input_mode", "J_grid"});
                break;
        }
        return keys;
    }();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed) ok = ok || k == it.key();
        if (!ok)
            throw config_error("unknown or inapplicable key '" + it.key() + "' for experiment '" +
                               std::string(experiment_name(ex)) + "'");
    }

    // mode count(s)
    if (ex == Experiment::ggm_analytic_n || ex == Experiment::breached) {
        if (!doc.contains("N")) throw config_error("N: field is required");
        cfg.mode_counts = detail::parse_mode_list(doc["N"], "N");
        for (int n : cfg.mode_counts)
            if (n < 4)
                throw config_error("N: " + std::string(experiment_name(ex)) +
                                   " uses the all-equal closed form, which requires N >= 4 (got " +
                                   std::to_string(n) + ")");
    } else if (ex == Experiment::three_mode_oracle) {
        cfg.modes = doc.contains("N") ? detail::require_int(doc["N"], "N") : 3;
        if (cfg.modes != 3) throw config_error("N: three-mode-oracle requires N = 3");
    } else {
        if (!doc.contains("N")) throw config_error("N: field is required");
        cfg.modes = detail::require_int(doc["N"], "N");
        if (cfg.modes < 3) throw config_error("N: must be >= 3 (got " + std::to_string(cfg.modes) + ")");
        if (ex == Experiment::block_entropy && cfg.modes < 4)
            throw config_error("N: block-entropy needs N >= 4 so that floor(N/2)-1 >= 1");
    }

    // squeezing
    if (doc.contains("s")) {
        bool arr = false;
        cfg.s_values = detail::parse_number_list(doc["s"], "s", &arr);
        cfg.s_column = arr;
        for (double s : cfg.s_values)
            if (!(s >= 0.0) || !std::isfinite(s))
                throw config_error("s: squeezing strength must be finite and >= 0");
        if ((ex == Experiment::ggm_analytic_n || ex == Experiment::disorder_quenched ||
             ex == Experiment::breached || ex == Experiment::three_mode_oracle ||
             ex == Experiment::ggm_vs_n) &&
            cfg.s_column)
            throw config_error("s: a single value is required for " +
                               std::string(experiment_name(ex)));
    }
    if (doc.contains("theta")) cfg.theta = detail::require_number(doc["theta"], "theta");
    if (doc.contains("input_mode")) {
        cfg.input_mode = detail::require_int(doc["input_mode"], "input_mode");
        const int n = cfg.modes > 0 ? cfg.modes : 3;
        if (cfg.input_mode < 1 || cfg.input_mode > n)
            throw config_error("input_mode: out of range 1..N");
    }

    // profiles
    if (doc.contains("profile") && doc.contains("profiles"))
        throw config_error("give either 'profile' or 'profiles', not both");
    if (ex == Experiment::ggm_vs_j || ex == Experiment::acggm ||
        ex == Experiment::disorder_quenched || ex == Experiment::block_entropy) {
        if (doc.contains("profiles")) {
            if (!doc["profiles"].is_array() || doc["profiles"].empty())
                throw config_error("profiles: expected a nonempty array");
            for (const auto& p : doc["profiles"])
                cfg.profiles.push_back(detail::resolve_profile(p, cfg.modes, "profiles"));
            cfg.profile_column = true;
        } else if (doc.contains("profile")) {
            cfg.profiles.push_back(detail::resolve_profile(doc["profile"], cfg.modes, "profile"));
        } else {
            cfg.profiles.push_back(detail::resolve_profile(detail::json("LR"), cfg.modes, "profile"));
        }
        for (std::size_t i = 0; i < cfg.profiles.size(); ++i)
            for (std::size_t k = i + 1; k < cfg.profiles.size(); ++k)
                if (cfg.profiles[i].label == cfg.profiles[k].label)
                    throw config_error("profiles: duplicate label '" + cfg.profiles[i].label + "'");
    }

    // per-experiment grids
    switch (ex) {
        case Experiment::ggm_vs_j:
        case Experiment::three_mode_oracle:
            if (!doc.contains("J_grid")) throw config_error("J_grid: field is required");
            cfg.j_grid = detail::parse_grid(doc["J_grid"], "J_grid");
            if (cfg.j_grid.start < 0.0) throw config_error("J_grid: couplings must be >= 0");
            break;
        case Experiment::ggm_vs_n: {
            if (!doc.contains("n_grid")) throw config_error("n_grid: field is required");
            cfg.n_grid = detail::parse_grid(doc["n_grid"], "n_grid");
            if (cfg.n_grid.start < 0.0 || cfg.n_grid.stop > 2.0)
                throw config_error("n_grid: values violate 0 < n_i <= 2");
            if (!doc.contains("J")) throw config_error("J: field is required");
            bool arr = false;
            cfg.j_values = detail::parse_number_list(doc["J"], "J", &arr);
            cfg.j_column = arr;
            for (double j : cfg.j_values)
                if (!(j >= 0.0)) throw config_error("J: couplings must be >= 0");
            if (doc.contains("vary_range"))
                cfg.vary_range = detail::require_int(doc["vary_range"], "vary_range");
            if (cfg.vary_range < 2 || cfg.vary_range > cfg.modes / 2)
                throw config_error("vary_range: must be in 2..floor(N/2)");
            break;
        }
        case Experiment::acggm:
            if (!doc.contains("J0_grid")) throw config_error("J0_grid: field is required");
            cfg.j0_grid = detail::parse_grid(doc["J0_grid"], "J0_grid");
            if (!(cfg.j0_grid.start > 0.0)) throw config_error("J0_grid: J0 must be > 0");
            break;
        case Experiment::ggm_analytic_n:
            break;
        case Experiment::disorder_quenched: {
            if (!doc.contains("J_m_grid")) throw config_error("J_m_grid: field is required");
            cfg.jm_grid = detail::parse_grid(doc["J_m_grid"], "J_m_grid");
            if (!doc.contains("sigma")) throw config_error("sigma: field is required");
            cfg.sigmas = detail::parse_number_list(doc["sigma"], "sigma");
            for (double sg : cfg.sigmas)
                if (!(sg >= 0.0)) throw config_error("sigma: must be >= 0");
            break;
        }
        case Experiment::breached: {
            if (!doc.contains("sigma")) throw config_error("sigma: field is required");
            cfg.sigmas = detail::parse_number_list(doc["sigma"], "sigma");
            for (double sg : cfg.sigmas)
                if (!(sg >= 0.0)) throw config_error("sigma: must be >= 0");
            break;
        }
        case Experiment::block_entropy: {
            if (!doc.contains("J")) throw config_error("J: field is required");
            bool arr = false;
            cfg.j_values = detail::parse_number_list(doc["J"], "J", &arr);
            cfg.j_column = arr;
            for (double j : cfg.j_values)
                if (!(j >= 0.0)) throw config_error("J: couplings must be >= 0");
            cfg.l_min = 1;
            cfg.l_max = cfg.modes / 2 - 1;
            if (doc.contains("L_range")) {
                const auto& lr = doc["L_range"];
                if (!lr.is_object() || !lr.contains("min") || !lr.contains("max"))
                    throw config_error("L_range: expected {min, max}");
                cfg.l_min = detail::require_int(lr["min"], "L_range.min");
                cfg.l_max = detail::require_int(lr["max"], "L_range.max");
            }
            if (cfg.l_min < 1 || cfg.l_max < cfg.l_min || cfg.l_max > cfg.modes / 2 - 1)
                throw config_error("L_range: must satisfy 1 <= min <= max <= floor(N/2)-1");
            break;
        }
    }

    if (doc.contains("strategy")) {
        cfg.strategy = doc["strategy"].get<std::string>();
        if (cfg.strategy != "auto" && cfg.strategy != "symmetry-reduced" &&
            cfg.strategy != "full-enumeration")
            throw config_error("strategy: expected auto | symmetry-reduced | full-enumeration");
    }

    if (doc.contains("quadrature")) {
        const auto& q = doc["quadrature"];
        if (!q.is_object()) throw config_error("quadrature: expected an object");
        for (auto it = q.begin(); it != q.end(); ++it) {
            const std::string& k = it.key();
            if (k == "acggm_steps") cfg.quad.acggm_steps = detail::require_int(*it, "quadrature.acggm_steps");
            else if (k == "mean_steps") cfg.quad.mean_steps = detail::require_int(*it, "quadrature.mean_steps");
            else if (k == "max_scan_points") cfg.quad.max_scan_points = detail::require_int(*it, "quadrature.max_scan_points");
            else if (k == "scheme") cfg.quad.scheme = it->get<std::string>();
            else if (k == "gh_order") cfg.quad.gh_order = detail::require_int(*it, "quadrature.gh_order");
            else if (k == "mc_samples") cfg.quad.mc_samples = detail::require_int(*it, "quadrature.mc_samples");
            else if (k == "mc_seed") cfg.quad.mc_seed = it->get<std::uint64_t>();
            else throw config_error("quadrature: unknown key '" + k + "'");
        }
        if (cfg.quad.acggm_steps < 64 || cfg.quad.acggm_steps % 2 != 0)
            throw config_error("quadrature.acggm_steps: must be even and >= 64");
        if (cfg.quad.mean_steps < 2 || cfg.quad.mean_steps % 2 != 0)
            throw config_error("quadrature.mean_steps: must be even and >= 2");
        if (cfg.quad.max_scan_points < 2)
            throw config_error("quadrature.max_scan_points: must be >= 2");
        if (cfg.quad.scheme != "gauss-hermite" && cfg.quad.scheme != "monte-carlo")
            throw config_error("quadrature.scheme: expected gauss-hermite | monte-carlo");
        if (cfg.quad.gh_order < 16) throw config_error("quadrature.gh_order: must be >= 16");
        if (cfg.quad.mc_samples < 1000) throw config_error("quadrature.mc_samples: must be >= 1000");
    }

    if (doc.contains("output")) cfg.output = doc["output"].get<std::string>();
    if (cfg.output.empty()) cfg.output = std::string(experiment_name(ex)) + ".csv";
    if (doc.contains("threads")) {
        cfg.threads = detail::require_int(doc["threads"], "threads");
        if (cfg.threads < 0) throw config_error("threads: must be >= 0 (0 = auto)");
    }

    cfg.echo = doc.dump();  // keys serialize in sorted order
    return cfg;
}

}  // namespace detail

inline SweepConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset into a line number
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        throw config_error("parse error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!doc.is_object()) throw config_error("config must be a JSON object");
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw config_error("experiment: a string field is required");

    SweepConfig cfg;
    try {
        return detail::parse_config_checked(doc, cfg);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// sweep execution

namespace detail {

inline BipartitionStrategy pick_strategy(const std::string& configured,
                                         const CouplingProfile& profile) {
    if (configured == "symmetry-reduced") return BipartitionStrategy::symmetry_reduced;
    if (configured == "full-enumeration") return BipartitionStrategy::full_enumeration;
    return strategy_for(profile);
}

inline DisorderScheme make_scheme(const QuadratureSettings& q, std::uint64_t row_index) {
    if (q.scheme == "monte-carlo")
        return MonteCarlo{q.mc_samples, derive_seed(q.mc_seed, row_index)};
    return GaussHermite{q.gh_order};
}

struct Job {
    std::vector<Cell> key;
    std::function<std::vector<Cell>(std::uint64_t row_index)> values;
};

inline int resolve_threads(int cli_override, int config_threads) {
    if (cli_override > 0) return cli_override;
    if (config_threads > 0) return config_threads;
    if (const char* env = std::getenv("CIRCWAVE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepConfig& cfg, int threads_override = 0) {
    SweepResult result;
    result.config_echo = cfg.echo;
    std::vector<detail::Job> jobs;

    const auto ggm_value = [&cfg](const ProfileSpec& p, double coupling, double s) {
        const CouplingProfile prof = p.at(cfg.modes, coupling);
        return ggm(evolve_waveguide(prof, SqueezedInputSpec(s, cfg.theta, cfg.input_mode)),
                   detail::pick_strategy(cfg.strategy, prof))
            .value;
    };

    switch (cfg.experiment) {
        case Experiment::ggm_vs_j: {
            if (cfg.profile_column) result.columns.push_back("profile");
            if (cfg.s_column) result.columns.push_back("s");
            result.columns.insert(result.columns.end(), {"J", "ggm"});
            for (const auto& p : cfg.profiles)
                for (double s : cfg.s_values)
                    for (double j : cfg.j_grid.values()) {
                        std::vector<Cell> key;
                        if (cfg.profile_column) key.emplace_back(p.label);
                        if (cfg.s_column) key.emplace_back(s);
                        key.emplace_back(j);
                        jobs.push_back({std::move(key), [&, p, s, j](std::uint64_t) {
                                            return std::vector<Cell>{ggm_value(p, j, s)};
                                        }});
                    }
            break;
        }
        case Experiment::ggm_vs_n: {
            if (cfg.j_column) result.columns.push_back("J");
            result.columns.insert(result.columns.end(), {"n", "ggm"});
            const double s = cfg.s_values.front();
            for (double j : cfg.j_values)
                for (double n : cfg.n_grid.values()) {
                    std::vector<Cell> key;
                    if (cfg.j_column) key.emplace_back(j);
                    key.emplace_back(n);
                    jobs.push_back({std::move(key), [&, j, n, s](std::uint64_t) {
                                        std::vector<double> strengths(
                                            static_cast<std::size_t>(cfg.modes / 2), 0.0);
                                        for (int i = 0; i + 1 < cfg.vary_range; ++i)
                                            strengths[static_cast<std::size_t>(i)] = 1.0;
                                        strengths[static_cast<std::size_t>(cfg.vary_range - 1)] = n;
                                        return std::vector<Cell>{
                                            ggm_value(ProfileSpec{"vary", strengths}, j, s)};
                                    }});
                }
            break;
        }
        case Experiment::acggm: {
            if (cfg.profile_column) result.columns.push_back("profile");
            if (cfg.s_column) result.columns.push_back("s");
            result.columns.insert(result.columns.end(), {"J0", "acggm"});
            for (const auto& p : cfg.profiles)
                for (double s : cfg.s_values)
                    for (double j0 : cfg.j0_grid.values()) {
                        std::vector<Cell> key;
                        if (cfg.profile_column) key.emplace_back(p.label);
                        if (cfg.s_column) key.emplace_back(s);
                        key.emplace_back(j0);
                        jobs.push_back({std::move(key), [&, p, s, j0](std::uint64_t) {
                                            const auto curve = [&](double j) {
                                                return ggm_value(p, j, s);
                                            };
                                            return std::vector<Cell>{accumulated_ggm(
                                                curve, j0, cfg.quad.acggm_steps)};
                                        }});
                    }
            break;
        }
        case Experiment::ggm_analytic_n: {
            result.columns = {"N", "acggm_period", "ggm_max"};
            const double s = cfg.s_values.front();
            for (int n : cfg.mode_counts) {
                jobs.push_back({{Cell{static_cast<long long>(n)}}, [&, n, s](std::uint64_t) {
                                    const double period = 4.0 * std::numbers::pi / n;
                                    const auto curve = [&, n, s](double j) {
                                        return ggm_analytic_lr(n, j, s);
                                    };
                                    const double avg =
                                        accumulated_ggm(curve, period, cfg.quad.acggm_steps);
                                    double peak = 0.0;
                                    for (int i = 0; i < cfg.quad.max_scan_points; ++i)
                                        peak = std::max(
                                            peak, curve(period * i / (cfg.quad.max_scan_points - 1)));
                                    return std::vector<Cell>{avg, peak};
                                }});
            }
            break;
        }
        case Experiment::disorder_quenched: {
            if (cfg.profile_column) result.columns.push_back("profile");
            result.columns.insert(result.columns.end(), {"J_m", "sigma", "quenched_ggm"});
            const double s = cfg.s_values.front();
            for (const auto& p : cfg.profiles)
                for (double sigma : cfg.sigmas)
                    for (double jm : cfg.jm_grid.values()) {
                        std::vector<Cell> key;
                        if (cfg.profile_column) key.emplace_back(p.label);
                        key.emplace_back(jm);
                        key.emplace_back(sigma);
                        jobs.push_back({std::move(key), [&, p, sigma, jm, s](std::uint64_t row) {
                                            const DisorderSpec spec{
                                                jm, sigma, detail::make_scheme(cfg.quad, row)};
                                            return std::vector<Cell>{quenched_ggm(
                                                p.at(cfg.modes, 0.0), s, spec)};
                                        }});
                    }
            break;
        }
        case Experiment::breached: {
            result.columns = {"N", "sigma", "breached_ggm"};
            const double s = cfg.s_values.front();
            for (int n : cfg.mode_counts)
                for (double sigma : cfg.sigmas) {
                    std::vector<Cell> key{Cell{static_cast<long long>(n)}, Cell{sigma}};
                    jobs.push_back({std::move(key), [&, n, sigma, s](std::uint64_t row) {
                                        return std::vector<Cell>{breached_ggm(
                                            n, s, sigma, detail::make_scheme(cfg.quad, row),
                                            cfg.quad.mean_steps)};
                                    }});
                }
            break;
        }
        case Experiment::block_entropy: {
            if (cfg.profile_column) result.columns.push_back("profile");
            if (cfg.j_column) result.columns.push_back("J");
            result.columns.insert(result.columns.end(), {"L", "entropy"});
            const double s = cfg.s_values.front();
            for (const auto& p : cfg.profiles)
                for (double j : cfg.j_values)
                    for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
                        std::vector<Cell> key;
                        if (cfg.profile_column) key.emplace_back(p.label);
                        if (cfg.j_column) key.emplace_back(j);
                        key.emplace_back(static_cast<long long>(l));
                        jobs.push_back({std::move(key), [&, p, j, l, s](std::uint64_t) {
                                            const GaussianState state = evolve_waveguide(
                                                p.at(cfg.modes, j),
                                                SqueezedInputSpec(s, cfg.theta, cfg.input_mode));
                                            return std::vector<Cell>{block_entropy(state, l)};
                                        }});
                    }
            break;
        }
        case Experiment::three_mode_oracle: {
            result.columns = {"J", "nu1", "nu2", "ggm_closed_form", "ggm_numeric"};
            const double s = cfg.s_values.front();
            for (double j : cfg.j_grid.values())
                jobs.push_back({{Cell{j}}, [&, j, s](std::uint64_t) {
                                    const auto [nu1, nu2] = three_mode_nu(j, s);
                                    const ProfileSpec ring{"NN", {1.0}};
                                    return std::vector<Cell>{nu1, nu2, three_mode_ggm(j, s),
                                                             ggm_value(ring, j, s)};
                                }});
        }
    }

    result.key_columns = static_cast<int>(result.columns.size()) -
                         (cfg.experiment == Experiment::three_mode_oracle  ? 4
                          : cfg.experiment == Experiment::ggm_analytic_n   ? 2
                                                                           : 1);

    // evaluate rows on a worker pool; values land by index, so the output is
    // identical for any thread count
    const int workers = std::max(
        1, std::min(detail::resolve_threads(threads_override, cfg.threads),
                    static_cast<int>(jobs.size())));
    std::vector<std::vector<Cell>> values(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = jobs.size();
    std::string error_message;

    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                values[i] = jobs[i].values(static_cast<std::uint64_t>(i));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error_message = e.what();
                }
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error_index < jobs.size()) {
        std::string where;
        for (std::size_t c = 0; c < jobs[error_index].key.size(); ++c) {
            if (!where.empty()) where += ", ";
            where += result.columns[c] + "=" + detail::format_cell(jobs[error_index].key[c]);
        }
        throw std::runtime_error("grid point #" + std::to_string(error_index) + " (" + where +
                                 "): " + error_message);
    }

    result.rows.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::vector<Cell> row = jobs[i].key;
        row.insert(row.end(), values[i].begin(), values[i].end());
        result.rows.push_back(std::move(row));
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV emission

/// FNV-1a over the formatted key cells; identifies the parameter grid.
inline std::uint64_t grid_hash(const SweepResult& result) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    for (const auto& col : result.columns) mix(col);
    for (const auto& row : result.rows)
        for (int c = 0; c < result.key_columns; ++c) mix(detail::format_cell(row[static_cast<std::size_t>(c)]));
    return h;
}

/// UTF-8 CSV: '#'-prefixed metadata, header row, then one line per grid
/// point; floats carry 17 significant digits (round-trip exact), LF endings.
inline void emit_csv(const SweepResult& result, std::ostream& out, bool with_timestamp = true) {
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(grid_hash(result)));
    out << "# circwave " << version_string << "\n";
    out << "# config: " << result.config_echo << "\n";
    out << "# grid: " << hex << "\n";
    if (with_timestamp) {
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# generated: " << stamp << "\n";
    }
    for (std::size_t c = 0; c < result.columns.size(); ++c)
        out << (c ? "," : "") << result.columns[c];
    out << "\n";
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << detail::format_cell(row[c]);
        out << "\n";
    }
}

inline void emit_csv_file(const SweepResult& result, const std::string& path,
                          bool with_timestamp = true) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    emit_csv(result, out, with_timestamp);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace circwave
