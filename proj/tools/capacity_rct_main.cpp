// capacity-rct: closed-queueing analytics, power analysis, and simulation for
// capacity-constrained trial designs. See README.md for the subcommands and
// the emitted CSV schemas.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "capacity_rct/cli.hpp"
#include "capacity_rct/config.hpp"
#include "capacity_rct/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumericError = 4;

struct KeyOverride {
    std::string key;
    std::string value;
};

// Registers one string-typed flag per config key on a subcommand, so every
// file key can be overridden by a flag of the same name (flag wins).
void add_config_flags(CLI::App* cmd, std::vector<KeyOverride>& overrides) {
    static const char* keys[] = {
        "lambda", "tau", "mu", "p", "alpha", "beta", "horizon", "m1p", "n1p", "n0p",
        "gamma", "m1", "n1", "n0", "servers", "users", "n_min", "n_max", "n_step",
        "m_list", "seed", "replications", "checkpoint_times", "sim_horizon", "pairs",
        "fluid_z0", "fluid_step", "trajectory", "vary", "vary_values",
    };
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [key, &overrides](const std::string& value) {
                overrides.push_back({key, value});
            },
            std::string("override config key '") + key + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capacity-rct: design and evaluate capacity-constrained service-intervention trials"};
    app.set_version_flag("--version", std::string("capacity-rct ") + capacity_rct::kVersion);
    app.require_subcommand(1);

    const char* subcommands[] = {"analyze",  "fluid",       "power",
                                 "policy-compare", "simulate", "sweep-effect",
                                 "sweep-power", "sweep-optimal-n"};
    const char* descriptions[] = {
        "stationary distribution, mean queue length, critical ratio, regime",
        "fluid steady state, fluid effect, optional trajectory",
        "power of a given (m1, n1, n0) design",
        "run all three power-analysis policies on a pilot",
        "simulation-versus-approximation validation report",
        "treatment effect across user counts (plot data)",
        "power across user counts (plot data)",
        "power-optimal N as one model parameter varies (plot data)",
    };

    std::string config_path;
    std::string out_dir;
    std::vector<KeyOverride> overrides;
    std::string chosen;
    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        CLI::App* cmd = app.add_subcommand(subcommands[i], descriptions[i]);
        cmd->add_option("--config", config_path, "flat key=value config file");
        cmd->add_option("--out", out_dir, "output directory (default: out)");
        add_config_flags(cmd, overrides);
        cmd->callback([&chosen, name = std::string(subcommands[i])] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        capacity_rct::ScenarioConfig config;
        if (!config_path.empty()) capacity_rct::load_config_file(config, config_path);
        for (const KeyOverride& kv : overrides)
            capacity_rct::apply_key(config, kv.key, kv.value, "--" + kv.key);
        if (!out_dir.empty()) config.out_dir = out_dir;

        const std::vector<std::string> written = capacity_rct::run_subcommand(chosen, config);
        for (const std::string& path : written) std::cout << path << "\n";
        return kExitOk;
    } catch (const capacity_rct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const capacity_rct::SearchExhaustedError& e) {
        std::cerr << chosen << ": " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << chosen << ": " << e.what() << "\n";
        return kExitNumericError;
    }
}
