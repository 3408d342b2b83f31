#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "capacity_rct/queueing.hpp"

namespace capacity_rct {

// Fraction of users in the undesired state at a point in time.
struct FluidState {
    double z = 0.0;
    double time = 0.0;
};

// Limiting servers-per-user ratio of a growing system.
struct ServerRatio {
    double mbar = 0.0;

    void validate() const {
        if (!(mbar >= 0.0)) throw std::domain_error("ServerRatio: mbar must be >= 0");
    }
};

// dz/dt of the large-system limit. Below mbar every undesired user is in
// service; above it, service capacity saturates at mbar.
inline double fluid_derivative(const FluidState& state, const ServerRatio& ratio,
                               const ModelParams& params) {
    const double z = state.z;
    const double served = std::min(z, ratio.mbar);
    return params.lambda * (1.0 - z) - served * params.mu * params.p - z * params.tau;
}

// Closed-form equilibrium of the fluid ODE. Congested branch for mbar <= r,
// uncongested plateau for mbar > r; the two agree at mbar == r.
inline double fluid_steady_state(const ServerRatio& ratio, const ModelParams& params) {
    ratio.validate();
    params.validate();
    const double r = critical_ratio(params);
    if (ratio.mbar <= r)
        return (params.lambda - ratio.mbar * params.mu * params.p) / (params.lambda + params.tau);
    return r;
}

// Fluid-limit treatment effect: linear in mbar up to the critical ratio, then
// constant.
inline double fluid_effect(const ServerRatio& ratio, const ModelParams& params) {
    ratio.validate();
    params.validate();
    const double r = critical_ratio(params);
    const double denom = params.lambda + params.tau;
    if (ratio.mbar <= r) return ratio.mbar * params.mu * params.p / denom;
    return params.lambda * params.mu * params.p / (denom * (params.lambda + params.tau + params.mu * params.p));
}

// Classical fixed-step 4th-order integration of the fluid ODE. The branch
// switch at z == mbar is evaluated per stage; the field is continuous there,
// only its derivative kinks.
inline std::vector<FluidState> integrate_fluid(const FluidState& initial, const ServerRatio& ratio,
                                               const ModelParams& params, double horizon,
                                               double step = 0.01) {
    ratio.validate();
    params.validate();
    if (!(initial.z >= 0.0 && initial.z <= 1.0))
        throw std::domain_error("integrate_fluid: initial z must be in [0, 1]");
    if (!(horizon > 0.0)) throw std::domain_error("integrate_fluid: horizon must be > 0");
    if (!(step > 0.0)) throw std::domain_error("integrate_fluid: step must be > 0");
    if (step > horizon) throw std::domain_error("integrate_fluid: step exceeds horizon");

    const auto deriv = [&](double z) {
        return fluid_derivative(FluidState{z, 0.0}, ratio, params);
    };

    std::vector<FluidState> trajectory;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
    trajectory.reserve(steps + 1);
    trajectory.push_back({initial.z, 0.0});
    double z = initial.z;
    double t = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double h = std::min(step, horizon - t);
        const double k1 = deriv(z);
        const double k2 = deriv(z + 0.5 * h * k1);
        const double k3 = deriv(z + 0.5 * h * k2);
        const double k4 = deriv(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        z = std::clamp(z, 0.0, 1.0);
        t += h;
        trajectory.push_back({z, t});
    }
    return trajectory;
}

// N * z*(M/N): the fluid approximation of the finite system's mean queue length.
inline double approx_queue_length(const ModelParams& params, const SystemSize& size) {
    size.validate();
    const ServerRatio ratio{static_cast<double>(size.servers) / static_cast<double>(size.users)};
    return static_cast<double>(size.users) * fluid_steady_state(ratio, params);
}

}  // namespace capacity_rct
