#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "capacity_rct/power.hpp"
#include "capacity_rct/queueing.hpp"
#include "capacity_rct/sim.hpp"
#include "capacity_rct/table.hpp"

namespace capacity_rct {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a subcommand may need, read from a flat key=value file and
// overridable by same-named command-line flags.
struct ScenarioConfig {
    // model
    double lambda = 0.4;
    double tau = 0.35;
    double mu = 3.0;
    double p = 0.1;
    // test
    double alpha = 0.05;
    double beta = 0.80;
    double horizon = 10.0;
    // pilot
    int m1p = 5;
    int n1p = 10;
    int n0p = 10;
    // staffing
    double gamma = kDefaultStaffingGamma;
    // direct design / analysis target
    int m1 = 5;
    int n1 = 10;
    int n0 = 10;
    int servers = 5;
    int users = 10;
    // sweeps
    int n_min = 2;
    int n_max = 400;
    int n_step = 2;
    std::vector<int> m_list = {5, 10, 20};
    // simulation
    std::uint64_t seed = 1;
    int replications = 500;
    std::vector<double> checkpoint_times = {10.0, 25.0, 50.0, 100.0, 150.0};
    double sim_horizon = 150.0;
    std::vector<std::pair<int, int>> pairs = {{2, 10}, {5, 20}, {20, 100}};
    // fluid trajectory
    double fluid_z0 = 0.0;
    double fluid_step = 0.01;
    bool trajectory = false;
    // parameter study
    std::string vary = "lambda";
    std::vector<double> vary_values;
    // output
    std::string out_dir = "out";

    ModelParams model() const { return ModelParams{lambda, tau, mu, p}; }
    TestConfig test() const { return TestConfig{alpha, beta, horizon}; }
    SimConfig sim() const {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.horizon = sim_horizon;
        cfg.replications = replications;
        cfg.checkpoint_times = checkpoint_times;
        return cfg;
    }

    // Canonical key=value text of every field, in fixed order; hashed into
    // output metadata so any emitted table can be traced to its exact inputs.
    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a_hash(canonical()); }
};

namespace detail {

inline double parse_double(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + text + "'");
    }
}

inline long long parse_int(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + text + "'");
    }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

inline std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

}  // namespace detail

// Applies one key=value assignment; `where` names the source (file:line or
// flag) for error messages.
inline void apply_key(ScenarioConfig& config, const std::string& key, const std::string& value,
                      const std::string& where) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "lambda") config.lambda = parse_double(value, where);
    else if (key == "tau") config.tau = parse_double(value, where);
    else if (key == "mu") config.mu = parse_double(value, where);
    else if (key == "p") config.p = parse_double(value, where);
    else if (key == "alpha") config.alpha = parse_double(value, where);
    else if (key == "beta") config.beta = parse_double(value, where);
    else if (key == "horizon") config.horizon = parse_double(value, where);
    else if (key == "m1p") config.m1p = static_cast<int>(parse_int(value, where));
    else if (key == "n1p") config.n1p = static_cast<int>(parse_int(value, where));
    else if (key == "n0p") config.n0p = static_cast<int>(parse_int(value, where));
    else if (key == "gamma") config.gamma = parse_double(value, where);
    else if (key == "m1") config.m1 = static_cast<int>(parse_int(value, where));
    else if (key == "n1") config.n1 = static_cast<int>(parse_int(value, where));
    else if (key == "n0") config.n0 = static_cast<int>(parse_int(value, where));
    else if (key == "servers") config.servers = static_cast<int>(parse_int(value, where));
    else if (key == "users") config.users = static_cast<int>(parse_int(value, where));
    else if (key == "n_min") config.n_min = static_cast<int>(parse_int(value, where));
    else if (key == "n_max") config.n_max = static_cast<int>(parse_int(value, where));
    else if (key == "n_step") config.n_step = static_cast<int>(parse_int(value, where));
    else if (key == "m_list") {
        config.m_list.clear();
        for (const auto& part : detail::split(value, ','))
            config.m_list.push_back(static_cast<int>(parse_int(detail::trim(part), where)));
    } else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value, where));
    else if (key == "replications") config.replications = static_cast<int>(parse_int(value, where));
    else if (key == "checkpoint_times") {
        config.checkpoint_times.clear();
        for (const auto& part : detail::split(value, ','))
            config.checkpoint_times.push_back(parse_double(detail::trim(part), where));
    } else if (key == "sim_horizon") config.sim_horizon = parse_double(value, where);
    else if (key == "pairs") {
        config.pairs.clear();
        for (const auto& part : detail::split(value, ',')) {
            const auto mn = detail::split(detail::trim(part), ':');
            if (mn.size() != 2) throw ConfigError(where + ": pairs entries must look like M:N");
            config.pairs.emplace_back(static_cast<int>(parse_int(mn[0], where)),
                                      static_cast<int>(parse_int(mn[1], where)));
        }
    } else if (key == "fluid_z0") config.fluid_z0 = parse_double(value, where);
    else if (key == "fluid_step") config.fluid_step = parse_double(value, where);
    else if (key == "trajectory") {
        if (value == "1" || value == "true") config.trajectory = true;
        else if (value == "0" || value == "false") config.trajectory = false;
        else throw ConfigError(where + ": expected a boolean (0/1/true/false), got '" + value + "'");
    } else if (key == "vary") config.vary = value;
    else if (key == "vary_values") {
        config.vary_values.clear();
        for (const auto& part : detail::split(value, ','))
            config.vary_values.push_back(parse_double(detail::trim(part), where));
    } else if (key == "out") config.out_dir = value;
    else throw ConfigError(where + ": unknown key '" + key + "'");
}

// Flat key=value file; '#' starts a comment; blank lines ignored. Errors carry
// the offending line number.
inline void load_config_file(ScenarioConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        const std::string where = path + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        apply_key(config, key, value, where);
    }
}

inline std::string ScenarioConfig::canonical() const {
    std::ostringstream out;
    out << "lambda=" << format_number(lambda) << ";tau=" << format_number(tau)
        << ";mu=" << format_number(mu) << ";p=" << format_number(p)
        << ";alpha=" << format_number(alpha) << ";beta=" << format_number(beta)
        << ";horizon=" << format_number(horizon) << ";m1p=" << m1p << ";n1p=" << n1p
        << ";n0p=" << n0p << ";gamma=" << format_number(gamma) << ";m1=" << m1 << ";n1=" << n1
        << ";n0=" << n0 << ";servers=" << servers << ";users=" << users << ";n_min=" << n_min
        << ";n_max=" << n_max << ";n_step=" << n_step << ";m_list=";
    for (std::size_t i = 0; i < m_list.size(); ++i) out << (i ? "," : "") << m_list[i];
    out << ";seed=" << seed << ";replications=" << replications << ";checkpoint_times=";
    for (std::size_t i = 0; i < checkpoint_times.size(); ++i)
        out << (i ? "," : "") << format_number(checkpoint_times[i]);
    out << ";sim_horizon=" << format_number(sim_horizon) << ";pairs=";
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out << (i ? "," : "") << pairs[i].first << ":" << pairs[i].second;
    out << ";fluid_z0=" << format_number(fluid_z0) << ";fluid_step=" << format_number(fluid_step)
        << ";trajectory=" << (trajectory ? 1 : 0) << ";vary=" << vary << ";vary_values=";
    for (std::size_t i = 0; i < vary_values.size(); ++i)
        out << (i ? "," : "") << format_number(vary_values[i]);
    return out.str();
}

}  // namespace capacity_rct
