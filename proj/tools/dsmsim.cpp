#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsm/config.hpp"
#include "dsm/experiment.hpp"

namespace {

int finish(const dsm::ExperimentResult& result) {
    if (result.status == dsm::ExitStatus::InvalidInput)
        std::fprintf(stderr, "error: %s\n", result.message.c_str());
    else if (result.status == dsm::ExitStatus::Violation)
        std::fprintf(stderr, "bound violations: %lld\n", static_cast<long long>(result.violations));
    return static_cast<int>(result.status);
}

dsm::ExperimentConfig load(const std::string& path, const std::string* seed_override) {
    auto cfg = dsm::load_config(path);
    if (seed_override) cfg.seed = std::stoull(*seed_override);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed subgradient simulator and bound checker"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::string seed_str;
    bool have_seed = false;
    app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed_str, "Override the config seed");

    auto* cmd_run = app.add_subcommand("run", "Simulate and write traces");
    cmd_run->add_option("config", config_path, "Experiment config file")->required();

    auto* cmd_verify = app.add_subcommand("verify", "Simulate and check every bound");
    cmd_verify->add_option("config", config_path, "Experiment config file")->required();

    std::string axis;
    std::string values_csv;
    auto* cmd_sweep = app.add_subcommand("sweep", "Run the config across one parameter axis");
    cmd_sweep->add_option("config", config_path, "Experiment config file")->required();
    cmd_sweep->add_option("--axis", axis, "Parameter to vary: Q, alpha, n, B, eta, k_max")->required();
    cmd_sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    try {
        auto cfg = load(config_path, have_seed ? &seed_str : nullptr);
        if (cmd_run->parsed()) {
            cfg.mode = dsm::Mode::Run;
            return finish(dsm::run_experiment(cfg, out_dir));
        }
        if (cmd_verify->parsed()) {
            cfg.mode = dsm::Mode::Verify;
            return finish(dsm::run_experiment(cfg, out_dir));
        }
        std::vector<std::string> values;
        std::string tok;
        for (char c : values_csv) {
            if (c == ',') {
                if (!tok.empty()) values.push_back(tok);
                tok.clear();
            } else if (c != ' ') {
                tok += c;
            }
        }
        if (!tok.empty()) values.push_back(tok);
        return finish(dsm::sweep(cfg, axis, values, out_dir));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
