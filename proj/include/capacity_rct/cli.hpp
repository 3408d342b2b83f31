#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "capacity_rct/config.hpp"
#include "capacity_rct/estimator.hpp"
#include "capacity_rct/fluid.hpp"
#include "capacity_rct/power.hpp"
#include "capacity_rct/queueing.hpp"
#include "capacity_rct/sim.hpp"
#include "capacity_rct/table.hpp"
#include "capacity_rct/version.hpp"

namespace capacity_rct {

namespace detail {

inline ResultTable new_table(const ScenarioConfig& config, const std::string& subcommand) {
    ResultTable table;
    std::ostringstream hash;
    hash << "0x" << std::hex << config.hash();
    table.metadata["config_hash"] = hash.str();
    table.metadata["subcommand"] = subcommand;
    table.metadata["tool"] = std::string("capacity-rct ") + kVersion;
    return table;
}

inline std::string write_table(const ResultTable& table, const ScenarioConfig& config,
                               const std::string& filename) {
    std::filesystem::create_directories(config.out_dir);
    const std::string path = (std::filesystem::path(config.out_dir) / filename).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    table.write_csv(out);
    return path;
}

}  // namespace detail

inline std::vector<std::string> run_analyze(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    const SystemSize size{config.servers, config.users};
    const StationaryDistribution dist = stationary_distribution(params, size);
    const double kbar = mean_queue_length(dist);

    ResultTable distribution = detail::new_table(config, "analyze");
    std::vector<double> states, probs;
    for (std::size_t j = 0; j < dist.probs.size(); ++j) {
        states.push_back(static_cast<double>(j));
        probs.push_back(dist.probs[j]);
    }
    distribution.columns = {{"queue_length", states}, {"probability", probs}};

    ResultTable summary = detail::new_table(config, "analyze");
    summary.columns = {
        {"lambda", std::vector<double>{params.lambda}},
        {"tau", std::vector<double>{params.tau}},
        {"mu", std::vector<double>{params.mu}},
        {"p", std::vector<double>{params.p}},
        {"servers", std::vector<double>{static_cast<double>(size.servers)}},
        {"users", std::vector<double>{static_cast<double>(size.users)}},
        {"critical_ratio", std::vector<double>{critical_ratio(params)}},
        {"offered_load", std::vector<double>{offered_load(params, size.users)}},
        {"mean_queue_length", std::vector<double>{kbar}},
        {"mean_fraction_desired", std::vector<double>{1.0 - kbar / size.users}},
        {"regime", std::vector<std::string>{to_string(classify_regime(params, size))}},
    };
    return {detail::write_table(distribution, config, "analyze_distribution.csv"),
            detail::write_table(summary, config, "analyze_summary.csv")};
}

inline std::vector<std::string> run_fluid(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    const SystemSize size{config.servers, config.users};
    size.validate();
    const ServerRatio ratio{static_cast<double>(size.servers) / size.users};

    ResultTable summary = detail::new_table(config, "fluid");
    summary.columns = {
        {"mbar", std::vector<double>{ratio.mbar}},
        {"critical_ratio", std::vector<double>{critical_ratio(params)}},
        {"z_star", std::vector<double>{fluid_steady_state(ratio, params)}},
        {"fluid_effect", std::vector<double>{fluid_effect(ratio, params)}},
        {"approx_queue_length", std::vector<double>{approx_queue_length(params, size)}},
    };
    std::vector<std::string> written{detail::write_table(summary, config, "fluid_summary.csv")};

    if (config.trajectory) {
        const auto states = integrate_fluid(FluidState{config.fluid_z0, 0.0}, ratio, params,
                                            config.sim_horizon, config.fluid_step);
        ResultTable trajectory = detail::new_table(config, "fluid");
        std::vector<double> times, z;
        for (const FluidState& s : states) {
            times.push_back(s.time);
            z.push_back(s.z);
        }
        trajectory.columns = {{"time", times}, {"z", z}};
        written.push_back(detail::write_table(trajectory, config, "fluid_trajectory.csv"));
    }
    return written;
}

inline std::vector<std::string> run_power(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    const TestConfig test = config.test();
    const EstimatorMoments moments =
        estimator_moments(params, config.m1, config.n1, config.n0, test.horizon);
    const double vt = treatment_moments(params, config.m1, config.n1).asy_variance / test.horizon;
    const double vc = control_moments(params, config.n0).asy_variance / test.horizon;

    ResultTable table = detail::new_table(config, "power");
    table.columns = {
        {"m1", std::vector<double>{static_cast<double>(config.m1)}},
        {"n1", std::vector<double>{static_cast<double>(config.n1)}},
        {"n0", std::vector<double>{static_cast<double>(config.n0)}},
        {"horizon", std::vector<double>{test.horizon}},
        {"alpha", std::vector<double>{test.alpha}},
        {"effect", std::vector<double>{moments.effect}},
        {"var_treat", std::vector<double>{vt}},
        {"var_control", std::vector<double>{vc}},
        {"power", std::vector<double>{power_at_true_effect(params, config.m1, config.n1,
                                                           config.n0, test)}},
    };
    return {detail::write_table(table, config, "power.csv")};
}

inline std::vector<std::string> run_policy_compare(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    const TestConfig test = config.test();
    const PilotStudy pilot = make_pilot(params, config.m1p, config.n1p, config.n0p);

    const DesignTriple designs[] = {
        naive_no_scaleup(pilot, test),
        naive_proportional(pilot, test),
        sqrt_policy(pilot, test, config.gamma),
    };

    ResultTable table = detail::new_table(config, "policy-compare");
    table.metadata["pilot_power"] = format_number(
        power_at_true_effect(params, pilot.m1p, pilot.n1p, pilot.n0p, test));
    std::vector<std::string> names;
    std::vector<double> m1, n1, n0, power;
    for (const DesignTriple& d : designs) {
        names.push_back(to_string(d.policy));
        m1.push_back(d.m1);
        n1.push_back(d.n1);
        n0.push_back(d.n0);
        power.push_back(d.achieved_power);
    }
    table.columns = {{"policy", names}, {"m1", m1}, {"n1", n1}, {"n0", n0},
                     {"achieved_power", power}};
    return {detail::write_table(table, config, "policies.csv")};
}

inline std::vector<std::string> run_simulate(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    ResultTable table = detail::new_table(config, "simulate");
    std::vector<double> servers, users, checkpoint, sim_mean, sim_var, boot_lo, boot_hi;
    std::vector<double> analytic_mean, clt_variance, fluid_mean, mean_flag, fluid_flag;
    for (const auto& [m, n] : config.pairs) {
        const ValidationReport report = validate_against_clt(params, SystemSize{m, n}, config.sim());
        for (const ValidationRow& row : report.rows) {
            servers.push_back(m);
            users.push_back(n);
            checkpoint.push_back(row.summary.checkpoint);
            sim_mean.push_back(row.summary.sample_mean);
            sim_var.push_back(row.summary.sample_variance);
            boot_lo.push_back(row.summary.boot_lo);
            boot_hi.push_back(row.summary.boot_hi);
            analytic_mean.push_back(row.analytic_mean);
            clt_variance.push_back(row.clt_variance);
            fluid_mean.push_back(row.fluid_mean);
            mean_flag.push_back(row.clt_mean_flagged ? 1.0 : 0.0);
            fluid_flag.push_back(row.fluid_flagged ? 1.0 : 0.0);
        }
    }
    table.columns = {{"servers", servers},       {"users", users},
                     {"checkpoint", checkpoint}, {"sim_mean", sim_mean},
                     {"sim_variance", sim_var},  {"boot_lo", boot_lo},
                     {"boot_hi", boot_hi},       {"analytic_mean", analytic_mean},
                     {"clt_variance", clt_variance}, {"fluid_mean", fluid_mean},
                     {"clt_mean_flagged", mean_flag}, {"fluid_flagged", fluid_flag}};
    return {detail::write_table(table, config, "validation.csv")};
}

namespace detail {

// Shared grid for the effect/power sweeps: total N stepped evenly, N1 = N/2.
template <typename RowFn>
inline void sweep_grid(const ScenarioConfig& config, RowFn&& emit) {
    int n = config.n_min + (config.n_min % 2);
    if (n < 2) n = 2;
    const int step = config.n_step % 2 == 0 ? config.n_step : config.n_step + 1;
    for (int m : config.m_list)
        for (int total = n; total <= config.n_max; total += step) emit(m, total, total / 2);
}

}  // namespace detail

inline std::vector<std::string> run_sweep_effect(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    ResultTable table = detail::new_table(config, "sweep-effect");
    std::vector<double> m1, n_total, n1, effect, fluid;
    detail::sweep_grid(config, [&](int m, int total, int half) {
        m1.push_back(m);
        n_total.push_back(total);
        n1.push_back(half);
        effect.push_back(steady_state_effect(params, m, half));
        fluid.push_back(fluid_effect(ServerRatio{static_cast<double>(m) / half}, params));
    });
    table.columns = {{"m1", m1}, {"n_total", n_total}, {"n1", n1}, {"effect", effect},
                     {"fluid_effect", fluid}};
    return {detail::write_table(table, config, "effect_sweep.csv")};
}

inline std::vector<std::string> run_sweep_power(const ScenarioConfig& config) {
    const ModelParams params = config.model();
    const TestConfig test = config.test();
    ResultTable table = detail::new_table(config, "sweep-power");
    std::vector<double> m1, n_total, n1, effect, vt, vc, power;
    detail::sweep_grid(config, [&](int m, int total, int half) {
        m1.push_back(m);
        n_total.push_back(total);
        n1.push_back(half);
        effect.push_back(steady_state_effect(params, m, half));
        vt.push_back(treatment_moments(params, m, half).asy_variance / test.horizon);
        vc.push_back(control_moments(params, half).asy_variance / test.horizon);
        power.push_back(power_at_true_effect(params, m, half, half, test));
    });
    table.columns = {{"m1", m1},     {"n_total", n_total}, {"n1", n1}, {"effect", effect},
                     {"var_treat", vt}, {"var_control", vc}, {"power", power}};
    return {detail::write_table(table, config, "power_sweep.csv")};
}

inline std::vector<std::string> run_sweep_optimal_n(const ScenarioConfig& config) {
    if (config.vary_values.empty())
        throw ConfigError("sweep-optimal-n: vary_values must be a nonempty list");
    if (config.vary != "lambda" && config.vary != "tau" && config.vary != "mu" &&
        config.vary != "p")
        throw ConfigError("sweep-optimal-n: vary must be one of lambda, tau, mu, p");

    const TestConfig test = config.test();
    ResultTable table = detail::new_table(config, "sweep-optimal-n");
    std::vector<std::string> param;
    std::vector<double> value, argmax_n, max_power;
    for (double v : config.vary_values) {
        ModelParams params = config.model();
        if (config.vary == "lambda") params.lambda = v;
        else if (config.vary == "tau") params.tau = v;
        else if (config.vary == "mu") params.mu = v;
        else params.p = v;
        const OptimalNSweep sweep =
            optimal_n_sweep(config.m1, params, test, SweepRange{config.n_min, config.n_max});
        param.push_back(config.vary);
        value.push_back(v);
        argmax_n.push_back(sweep.argmax_users);
        max_power.push_back(sweep.max_power);
    }
    table.columns = {{"param", param}, {"value", value}, {"argmax_n", argmax_n},
                     {"max_power", max_power}};
    return {detail::write_table(table, config, "optimal_n.csv")};
}

// Dispatch by subcommand name; returns the written file paths.
inline std::vector<std::string> run_subcommand(const std::string& name,
                                               const ScenarioConfig& config) {
    if (name == "analyze") return run_analyze(config);
    if (name == "fluid") return run_fluid(config);
    if (name == "power") return run_power(config);
    if (name == "policy-compare") return run_policy_compare(config);
    if (name == "simulate") return run_simulate(config);
    if (name == "sweep-effect") return run_sweep_effect(config);
    if (name == "sweep-power") return run_sweep_power(config);
    if (name == "sweep-optimal-n") return run_sweep_optimal_n(config);
    throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace capacity_rct
