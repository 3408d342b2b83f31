#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "capacity_rct/estimator.hpp"
#include "capacity_rct/normal.hpp"
#include "capacity_rct/queueing.hpp"

namespace capacity_rct {

inline constexpr double kDefaultStaffingGamma = 0.5;
inline constexpr int kDefaultSearchCap = 10000;

// One-sided z-test settings and the experiment horizon.
struct TestConfig {
    double alpha = 0.05;
    double beta = 0.80;
    double horizon = 10.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha < beta && beta < 1.0))
            throw std::domain_error("TestConfig: require 0 < alpha < beta < 1");
        if (!(horizon > 0.0)) throw std::domain_error("TestConfig: horizon must be > 0");
    }
};

// A completed pilot experiment together with oracle access to its steady-state
// effect and CLT variances.
struct PilotStudy {
    int m1p = 0;
    int n1p = 1;
    int n0p = 1;
    ModelParams params;
    double effect = 0.0;        // theta^ss(m1p, n1p)
    double var_treat = 0.0;     // sigma1^2(m1p, n1p)
    double var_control = 0.0;   // sigma0^2(n0p)
};

// The oracle fields are always derived from (params, m1p, n1p, n0p); construct
// through here so they cannot drift.
inline PilotStudy make_pilot(const ModelParams& params, int m1p, int n1p, int n0p) {
    if (n1p < 1 || n0p < 1) throw std::domain_error("make_pilot: group sizes must be >= 1");
    if (m1p < 0) throw std::domain_error("make_pilot: servers must be >= 0");
    PilotStudy pilot;
    pilot.m1p = m1p;
    pilot.n1p = n1p;
    pilot.n0p = n0p;
    pilot.params = params;
    pilot.effect = steady_state_effect(params, m1p, n1p);
    pilot.var_treat = treatment_moments(params, m1p, n1p).asy_variance;
    pilot.var_control = control_moments(params, n0p).asy_variance;
    return pilot;
}

enum class PolicyTag {
    NaiveNoScaleUp,
    NaiveProportional,
    SqrtStaffing,
};

inline std::string to_string(PolicyTag tag) {
    switch (tag) {
        case PolicyTag::NaiveNoScaleUp: return "NaiveNoScaleUp";
        case PolicyTag::NaiveProportional: return "NaiveProportional";
        case PolicyTag::SqrtStaffing: return "SqrtStaffing";
    }
    return "?";
}

// An experiment design recommended by a power-analysis policy. achieved_power
// is always the honest value: the true effect with exact CLT variances,
// regardless of the assumptions the policy searched under.
struct DesignTriple {
    int m1 = 0;
    int n1 = 0;
    int n0 = 0;
    double achieved_power = 0.0;
    PolicyTag policy = PolicyTag::NaiveNoScaleUp;
};

struct SearchExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power of the one-sided z-test with known variances:
//   1 - Phi(Phi^-1(1 - alpha) - mde / sqrt(var_treat + var_control)).
inline double power_at_mde(double variance_treat, double variance_control, double mde,
                           double alpha) {
    if (!(variance_treat >= 0.0 && variance_control >= 0.0))
        throw std::domain_error("power_at_mde: variances must be >= 0");
    if (variance_treat + variance_control <= 0.0)
        throw std::domain_error("power_at_mde: total variance must be positive");
    if (!(mde >= 0.0)) throw std::domain_error("power_at_mde: mde must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("power_at_mde: alpha in (0, 1)");
    const double se = std::sqrt(variance_treat + variance_control);
    return 1.0 - normal_cdf(normal_quantile(1.0 - alpha) - mde / se);
}

// Power to detect an effect at least as large as the design's own true effect.
// The effect is nonnegative up to rounding noise; clamp so m1 = 0 gives the
// test size exactly.
inline double power_at_true_effect(const ModelParams& params, int m1, int n1, int n0,
                                   const TestConfig& config) {
    config.validate();
    const double effect = std::max(0.0, steady_state_effect(params, m1, n1));
    const double vt = treatment_moments(params, m1, n1).asy_variance / config.horizon;
    const double vc = control_moments(params, n0).asy_variance / config.horizon;
    return power_at_mde(vt, vc, effect, config.alpha);
}

namespace detail {

// Shared search for the two naive policies: fix the MDE at the pilot effect,
// assume both variance terms shrink like 1/N, and take the smallest
// N1 = N0 >= the pilot's N1 that clears the power bar under those assumptions.
inline int naive_user_count(const PilotStudy& pilot, const TestConfig& config, int cap) {
    config.validate();
    const double mde = std::max(0.0, pilot.effect);
    for (int n = pilot.n1p; n <= cap; ++n) {
        const double vt =
            pilot.var_treat * static_cast<double>(pilot.n1p) / (static_cast<double>(n) * config.horizon);
        const double vc =
            pilot.var_control * static_cast<double>(pilot.n0p) / (static_cast<double>(n) * config.horizon);
        if (power_at_mde(vt, vc, mde, config.alpha) >= config.beta) return n;
    }
    throw SearchExhaustedError("naive policy: no feasible N1 within cap " + std::to_string(cap));
}

}  // namespace detail

// Naive Policy 1: keep the pilot's servers, grow users only.
inline DesignTriple naive_no_scaleup(const PilotStudy& pilot, const TestConfig& config,
                                     int cap = kDefaultSearchCap) {
    const int n = detail::naive_user_count(pilot, config, cap);
    DesignTriple design{pilot.m1p, n, n, 0.0, PolicyTag::NaiveNoScaleUp};
    design.achieved_power = power_at_true_effect(pilot.params, design.m1, design.n1, design.n0, config);
    return design;
}

// Naive Policy 2: same user count, servers scaled proportionally to users.
inline DesignTriple naive_proportional(const PilotStudy& pilot, const TestConfig& config,
                                       int cap = kDefaultSearchCap) {
    const int n = detail::naive_user_count(pilot, config, cap);
    const int m1 = static_cast<int>(
        std::ceil(static_cast<double>(pilot.m1p) * static_cast<double>(n) / static_cast<double>(pilot.n1p)));
    DesignTriple design{m1, n, n, 0.0, PolicyTag::NaiveProportional};
    design.achieved_power = power_at_true_effect(pilot.params, design.m1, design.n1, design.n0, config);
    return design;
}

// Square-root staffing rule: servers to cover the offered load plus a
// gamma * sqrt(N1) variability buffer.
inline int sqrt_staffing(int n1, const ModelParams& params, double gamma = kDefaultStaffingGamma) {
    if (n1 < 1) throw std::domain_error("sqrt_staffing: n1 must be >= 1");
    if (!(gamma >= 0.0)) throw std::domain_error("sqrt_staffing: gamma must be >= 0");
    const double level = offered_load(params, n1) + gamma * std::sqrt(static_cast<double>(n1));
    return static_cast<int>(std::ceil(level));
}

// Queueing-informed policy: smallest N1 = N0 such that, staffed by the
// square-root rule, the design detects its own true effect with the exact CLT
// variances at power >= beta.
inline DesignTriple sqrt_policy(const PilotStudy& pilot, const TestConfig& config,
                                double gamma = kDefaultStaffingGamma, int cap = kDefaultSearchCap) {
    config.validate();
    const ModelParams& params = pilot.params;
    for (int n = 1; n <= cap; ++n) {
        const int m1 = sqrt_staffing(n, params, gamma);
        const double power = power_at_true_effect(params, m1, n, n, config);
        if (power >= config.beta)
            return DesignTriple{m1, n, n, power, PolicyTag::SqrtStaffing};
    }
    throw SearchExhaustedError("sqrt policy: no feasible N1 within cap " + std::to_string(cap));
}

struct SweepRange {
    int n_min = 2;
    int n_max = 400;
};

struct SweepPoint {
    int users_total = 0;  // N, split evenly into N1 = N0 = N/2
    double power = 0.0;
};

struct OptimalNSweep {
    std::vector<SweepPoint> points;
    int argmax_users = 0;
    double max_power = 0.0;
};

// Power across total user counts N (even, split N1 = N0 = N/2) at fixed m1.
inline OptimalNSweep optimal_n_sweep(int m1, const ModelParams& params, const TestConfig& config,
                                     const SweepRange& range) {
    config.validate();
    if (range.n_min > range.n_max) throw std::domain_error("optimal_n_sweep: empty range");
    OptimalNSweep sweep;
    int n = range.n_min + (range.n_min % 2);  // even N only: the split must be exact
    if (n < 2) n = 2;
    for (; n <= range.n_max; n += 2) {
        const int half = n / 2;
        const double power = power_at_true_effect(params, m1, half, half, config);
        sweep.points.push_back({n, power});
        if (power > sweep.max_power) {
            sweep.max_power = power;
            sweep.argmax_users = n;
        }
    }
    if (sweep.points.empty()) throw std::domain_error("optimal_n_sweep: empty range");
    return sweep;
}

}  // namespace capacity_rct
