// circwave: sweep runner for Gaussian light in circularly coupled waveguide
// arrays. Subcommands: run, validate, recipes.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "circwave/sweep.hpp"

#ifndef CIRCWAVE_RECIPE_DIR
#define CIRCWAVE_RECIPE_DIR ""
#endif

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RecipeInfo {
    const char* name;
    const char* blurb;
};

constexpr RecipeInfo kRecipes[] = {
    {"fig2a", "four-mode GGM vs J, NN and NNN coupling, s = 0.5 and 1"},
    {"fig2b", "four-mode GGM vs NNN strength n at J = 0.5, 1, 2, 4"},
    {"fig2c", "four-mode accumulated GGM vs J0, NN and NNN, s = 0.5 and 1"},
    {"fig3a", "six-mode GGM vs J for NN, NNN, NNNN coupling"},
    {"fig3b", "six-mode accumulated GGM vs J0 for NN, NNN, NNNN"},
    {"fig4", "period-averaged all-equal GGM and per-period maximum vs N"},
    {"fig5a", "four-mode quenched GGM vs mean coupling for several sigma"},
    {"fig5b", "breached GGM vs N and sigma"},
    {"fig6a", "N = 40 Renyi-2 block entropy vs block length, NN coupling"},
    {"fig6b", "N = 40 Renyi-2 block entropy vs block length, all-equal coupling"},
    {"appC", "three-mode closed-form eigenvalues vs the numeric pipeline"},
};

std::string recipe_dir() {
    if (const char* env = std::getenv("CIRCWAVE_RECIPES")) return env;
    return CIRCWAVE_RECIPE_DIR;
}

int cmd_run(const std::string& config_path, const std::string& output_override, int threads,
            bool no_timestamp) {
    circwave::SweepConfig cfg;
    try {
        cfg = circwave::parse_config(slurp(config_path));
    } catch (const circwave::config_error& e) {
        std::cerr << "circwave: " << config_path << ": " << e.what() << "\n";
        return kExitValidation;
    }
    const circwave::SweepResult result = circwave::run_sweep(cfg, threads);
    const std::string out = output_override.empty() ? cfg.output : output_override;
    if (out == "-")
        circwave::emit_csv(result, std::cout, !no_timestamp);
    else
        circwave::emit_csv_file(result, out, !no_timestamp);
    return 0;
}

int cmd_validate(const std::string& config_path) {
    try {
        const circwave::SweepConfig cfg = circwave::parse_config(slurp(config_path));
        std::cout << "OK: " << config_path << " (experiment " << experiment_name(cfg.experiment)
                  << ")\n";
        return 0;
    } catch (const circwave::config_error& e) {
        std::cerr << "circwave: " << config_path << ": " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_recipes() {
    const std::string dir = recipe_dir();
    std::cout << "shipped figure recipes";
    if (!dir.empty()) std::cout << " (" << dir << ")";
    std::cout << ":\n";
    for (const RecipeInfo& r : kRecipes) {
        std::string path = dir.empty() ? std::string(r.name) + ".json"
                                       : dir + "/" + r.name + ".json";
        const bool present = !dir.empty() && std::filesystem::exists(path);
        std::cout << "  " << r.name << (present ? "" : " (missing)") << " - " << r.blurb << "\n";
    }
    std::cout << "run one with: circwave run <dir>/<name>.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-state sweeps for circularly coupled waveguide arrays"};
    app.require_subcommand(1);

    std::string config_path, output_override;
    int threads = 0;
    bool no_timestamp = false;

    auto* run = app.add_subcommand("run", "evaluate a sweep config and write CSV");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--output", output_override, "output CSV path ('-' for stdout)");
    run->add_option("--threads", threads, "worker threads (overrides config and CIRCWAVE_THREADS)");
    run->add_flag("--no-timestamp", no_timestamp, "omit the generated-at metadata line");

    auto* validate = app.add_subcommand("validate", "check a config without running");
    validate->add_option("config", config_path, "JSON config file")->required();

    app.add_subcommand("recipes", "list the shipped figure recipes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (app.got_subcommand("run")) return cmd_run(config_path, output_override, threads, no_timestamp);
        if (app.got_subcommand("validate")) return cmd_validate(config_path);
        return cmd_recipes();
    } catch (const std::exception& e) {
        std::cerr << "circwave: " << e.what() << "\n";
        return kExitRuntime;
    }
}
