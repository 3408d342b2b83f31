#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "capacity_rct/estimator.hpp"
#include "capacity_rct/fluid.hpp"
#include "capacity_rct/parallel.hpp"
#include "capacity_rct/queueing.hpp"
#include "capacity_rct/rng.hpp"

namespace capacity_rct {

inline constexpr int kDefaultBootstrapResamples = 10000;

// Fluid-deviation margin for validation reports: the fluid approximation is
// flagged once it misses the simulated mean queue length by more than one user.
inline constexpr double kFluidFlagMargin = 1.0;

struct SimConfig {
    std::uint64_t seed = 1;
    double horizon = 150.0;
    int replications = 500;
    int initial_queue = 0;
    // Draw each replication's initial state from the stationary law instead of
    // initial_queue; used by the validation protocol, where transient bias
    // from a fixed start would not wash out of time averages.
    bool stationary_start = false;
    std::vector<double> checkpoint_times = {150.0};

    void validate(int users) const {
        if (!(horizon > 0.0)) throw std::domain_error("SimConfig: horizon must be > 0");
        if (replications < 1) throw std::domain_error("SimConfig: replications must be >= 1");
        if (initial_queue < 0 || initial_queue > users)
            throw std::domain_error("SimConfig: initial_queue must be in [0, users]");
        if (checkpoint_times.empty())
            throw std::domain_error("SimConfig: checkpoint_times must be nonempty");
        double prev = 0.0;
        for (double t : checkpoint_times) {
            if (!(t > 0.0 && t >= prev))
                throw std::domain_error("SimConfig: checkpoint_times must be ascending and > 0");
            prev = t;
        }
        if (checkpoint_times.back() > horizon)
            throw std::domain_error("SimConfig: checkpoints must not exceed the horizon");
    }
};

// One realized trajectory of the queue-length birth-death chain: piecewise
// constant, jumps of +-1 at the recorded event times.
struct SamplePath {
    int initial_queue = 0;
    double horizon = 0.0;
    std::vector<double> event_times;   // ascending, all <= horizon
    std::vector<int> queue_lengths;    // length after the matching event
};

// Exact event-clock simulation: from state i the next event fires after an
// exponential with the total rate, and is a birth with probability
// rate_up / total. Reproducible from (config.seed, replication_index).
inline SamplePath simulate_path(const ModelParams& params, const SystemSize& size,
                                const SimConfig& config, int replication_index) {
    params.validate();
    size.validate();
    config.validate(size.users);

    std::mt19937_64 engine =
        make_engine(config.seed, static_cast<std::uint64_t>(replication_index));

    int state = config.initial_queue;
    if (config.stationary_start) {
        const StationaryDistribution dist = stationary_distribution(params, size);
        state = static_cast<int>(sample_discrete(engine, dist.probs));
    }

    SamplePath path;
    path.initial_queue = state;
    path.horizon = config.horizon;

    double t = 0.0;
    for (;;) {
        const double up = rate_up(state, params, size);
        const double down = rate_down(state, params, size);
        const double total = up + down;
        if (total <= 0.0) break;  // absorbing (e.g. lambda-only chain stuck at N)
        t += sample_exponential(engine, total);
        if (t > config.horizon) break;
        state += (uniform01(engine) * total < up) ? 1 : -1;
        path.event_times.push_back(t);
        path.queue_lengths.push_back(state);
    }
    return path;
}

// (1/t) * integral of the piecewise-constant queue length over [0, t].
inline double time_average_queue(const SamplePath& path, double t) {
    if (!(t > 0.0)) throw std::domain_error("time_average_queue: t must be > 0");
    if (t > path.horizon + 1e-12)
        throw std::domain_error("time_average_queue: t exceeds the path horizon");
    double integral = 0.0;
    double prev_time = 0.0;
    int level = path.initial_queue;
    for (std::size_t k = 0; k < path.event_times.size() && path.event_times[k] < t; ++k) {
        integral += level * (path.event_times[k] - prev_time);
        prev_time = path.event_times[k];
        level = path.queue_lengths[k];
    }
    integral += level * (t - prev_time);
    return integral / t;
}

// Per-replication difference-in-means estimates. The treatment group is the
// (m1, n1) system; the control group's n0 independent users aggregate into the
// (0, n0) birth-death chain, simulated on its own substream. Substreams
// 2*rep and 2*rep + 1 keep the two groups independent.
inline std::vector<double> simulate_estimator(const ModelParams& params, int m1, int n1, int n0,
                                              const SimConfig& config) {
    const SystemSize treat_size{m1, n1};
    const SystemSize control_size{0, n0};
    config.validate(std::min(n1, n0));

    std::vector<double> estimates(static_cast<std::size_t>(config.replications), 0.0);
    parallel_for_index(config.replications, [&](int rep) {
        SimConfig treat_cfg = config;
        treat_cfg.replications = 1;
        SimConfig control_cfg = treat_cfg;
        const SamplePath treat_path = simulate_path(params, treat_size, treat_cfg, 2 * rep);
        const SamplePath control_path =
            simulate_path(params, control_size, control_cfg, 2 * rep + 1);
        const double treat_mean =
            1.0 - time_average_queue(treat_path, config.horizon) / static_cast<double>(n1);
        const double control_mean =
            1.0 - time_average_queue(control_path, config.horizon) / static_cast<double>(n0);
        estimates[static_cast<std::size_t>(rep)] = treat_mean - control_mean;
    });
    return estimates;
}

// Percentile bootstrap of the mean. Deterministic under (seed, resamples).
inline std::pair<double, double> bootstrap_interval(std::span<const double> values, double level,
                                                    int resamples, std::uint64_t seed) {
    if (values.size() < 2) throw std::domain_error("bootstrap_interval: need >= 2 values");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("bootstrap_interval: level must be in (0, 1)");
    if (resamples < 1) throw std::domain_error("bootstrap_interval: resamples must be >= 1");

    std::mt19937_64 engine = make_engine(seed, 0);
    const auto n = values.size();
    std::vector<double> means(static_cast<std::size_t>(resamples), 0.0);
    for (int b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto pick = static_cast<std::size_t>(uniform01(engine) * static_cast<double>(n));
            sum += values[std::min(pick, n - 1)];
        }
        means[static_cast<std::size_t>(b)] = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    const auto lo_idx = static_cast<std::size_t>(
        std::floor(tail * static_cast<double>(resamples - 1) + 0.5));
    const auto hi_idx = static_cast<std::size_t>(
        std::floor((1.0 - tail) * static_cast<double>(resamples - 1) + 0.5));
    return {means[lo_idx], means[hi_idx]};
}

// Replication-level statistics of the time-average queue length at one
// checkpoint.
struct SimSummary {
    double checkpoint = 0.0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;  // across replications
    double boot_lo = 0.0;
    double boot_hi = 0.0;
    int replications = 0;
};

struct ValidationRow {
    SimSummary summary;
    double analytic_mean = 0.0;   // exact Kbar
    double clt_variance = 0.0;    // sigma^2_{M,N} / T (queue-length scale)
    double fluid_mean = 0.0;      // N * z*(M/N)
    bool clt_mean_flagged = false;
    bool fluid_flagged = false;
};

struct ValidationReport {
    SystemSize size;
    std::vector<ValidationRow> rows;
};

namespace detail {

inline SimSummary summarize(std::span<const double> values, double checkpoint,
                            std::uint64_t boot_seed, int resamples) {
    SimSummary s;
    s.checkpoint = checkpoint;
    s.replications = static_cast<int>(values.size());
    const double n = static_cast<double>(values.size());
    s.sample_mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.sample_mean) * (v - s.sample_mean);
    s.sample_variance = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    const auto [lo, hi] = bootstrap_interval(values, 0.95, resamples, boot_seed);
    s.boot_lo = lo;
    s.boot_hi = hi;
    return s;
}

}  // namespace detail

// The simulation-versus-approximation protocol: simulate `replications` paths
// with stationary initial states, and at every checkpoint T compare the
// replication statistics of the time-average queue length against the exact
// mean, the CLT variance, and the fluid approximation. The exact mean is
// flagged when it falls outside the bootstrap interval; the fluid value when
// it misses the simulated mean by more than kFluidFlagMargin users.
inline ValidationReport validate_against_clt(const ModelParams& params, const SystemSize& size,
                                             const SimConfig& config) {
    SimConfig cfg = config;
    cfg.stationary_start = true;
    cfg.validate(size.users);

    const int reps = cfg.replications;
    const auto n_checkpoints = cfg.checkpoint_times.size();
    std::vector<std::vector<double>> averages(
        n_checkpoints, std::vector<double>(static_cast<std::size_t>(reps), 0.0));
    parallel_for_index(reps, [&](int rep) {
        const SamplePath path = simulate_path(params, size, cfg, rep);
        for (std::size_t c = 0; c < n_checkpoints; ++c)
            averages[c][static_cast<std::size_t>(rep)] =
                time_average_queue(path, cfg.checkpoint_times[c]);
    });

    const StationaryDistribution dist = stationary_distribution(params, size);
    const double kbar = mean_queue_length(dist);
    const double sigma2 = detail::queue_length_asymptotic_variance(params, dist, size.users);
    const double fluid = approx_queue_length(params, size);

    ValidationReport report;
    report.size = size;
    report.rows.reserve(n_checkpoints);
    for (std::size_t c = 0; c < n_checkpoints; ++c) {
        ValidationRow row;
        row.summary = detail::summarize(averages[c], cfg.checkpoint_times[c],
                                        derive_stream_seed(cfg.seed, 1000003 + c),
                                        kDefaultBootstrapResamples);
        row.analytic_mean = kbar;
        row.clt_variance = sigma2 / cfg.checkpoint_times[c];
        row.fluid_mean = fluid;
        row.clt_mean_flagged = kbar < row.summary.boot_lo || kbar > row.summary.boot_hi;
        row.fluid_flagged = std::abs(fluid - row.summary.sample_mean) > kFluidFlagMargin;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace capacity_rct
