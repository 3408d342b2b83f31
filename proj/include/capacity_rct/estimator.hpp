#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "capacity_rct/fluid.hpp"
#include "capacity_rct/queueing.hpp"

namespace capacity_rct {

// Steady-state mean and CLT asymptotic variance (sigma-tilde^2, before the
// division by the horizon T) of one group's average fraction of time in the
// desired state.
struct GroupMoments {
    double mean = 0.0;
    double asy_variance = 0.0;
};

// Moments of the difference-in-means estimator at horizon T.
struct EstimatorMoments {
    double effect = 0.0;
    double variance_at_T = 0.0;
    double horizon = 0.0;
};

namespace detail {

// Asymptotic variance of the time-average queue length of the birth-death
// chain (Burman/Whitt):
//
//   sigma^2 = 2 * sum_{j=0}^{N-1} [sum_{i<=j} (i - K) pi_i]^2 / (birth_j pi_j)
//
// with birth_j = (N - j) * lambda. The inner partial sums telescope to zero
// over the full range, so for j >= K they are evaluated from the right tail;
// either side then accumulates terms of one sign only, which keeps the ratio
// [..]^2 / pi_j accurate even where pi_j is denormal-small. Entries that
// underflow to zero contribute nothing and are skipped.
inline double queue_length_asymptotic_variance(const ModelParams& params,
                                               const StationaryDistribution& dist, int users) {
    const std::vector<double>& pi = dist.probs;
    const double kbar = mean_queue_length(dist);
    const auto n = static_cast<std::size_t>(users);

    std::vector<double> suffix(n + 2, 0.0);
    for (std::size_t j = n + 1; j-- > 0;)
        suffix[j] = (static_cast<double>(j) - kbar) * pi[j] + suffix[j + 1];

    double total = 0.0;
    double prefix = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        prefix += (static_cast<double>(j) - kbar) * pi[j];
        const double partial = (static_cast<double>(j) < kbar) ? prefix : -suffix[j + 1];
        if (pi[j] <= 0.0) continue;
        const double birth = static_cast<double>(users - static_cast<int>(j)) * params.lambda;
        total += partial * partial / (birth * pi[j]);
    }
    return 2.0 * total;
}

}  // namespace detail

// Control group: n0 independent two-state users.
inline GroupMoments control_moments(const ModelParams& params, int n0) {
    params.validate();
    if (n0 < 1) throw std::domain_error("control_moments: n0 must be >= 1");
    const double denom = params.lambda + params.tau;
    const double mean = params.tau / denom;
    const double per_user = 2.0 * params.lambda * params.tau / (denom * denom * denom);
    return GroupMoments{mean, per_user / static_cast<double>(n0)};
}

// Treatment group: the closed queueing system with m1 servers and n1 users.
inline GroupMoments treatment_moments(const ModelParams& params, int m1, int n1) {
    const SystemSize size{m1, n1};
    const StationaryDistribution dist = stationary_distribution(params, size);
    const double mean = 1.0 - mean_queue_length(dist) / static_cast<double>(n1);
    const double sigma2 = detail::queue_length_asymptotic_variance(params, dist, n1);
    return GroupMoments{mean, sigma2 / (static_cast<double>(n1) * static_cast<double>(n1))};
}

// theta^ss(m1, n1): steady-state difference in the fraction of time spent in
// the desired state. Independent of the number of control users.
inline double steady_state_effect(const ModelParams& params, int m1, int n1) {
    const SystemSize size{m1, n1};
    const StationaryDistribution dist = stationary_distribution(params, size);
    const double treat = 1.0 - mean_queue_length(dist) / static_cast<double>(n1);
    const double control = params.tau / (params.lambda + params.tau);
    return treat - control;
}

inline EstimatorMoments estimator_moments(const ModelParams& params, int m1, int n1, int n0,
                                          double horizon) {
    if (!(horizon > 0.0)) throw std::domain_error("estimator_moments: horizon must be > 0");
    const GroupMoments treat = treatment_moments(params, m1, n1);
    const GroupMoments control = control_moments(params, n0);
    return EstimatorMoments{treat.mean - control.mean,
                            (treat.asy_variance + control.asy_variance) / horizon,
                            horizon};
}

// Bias of a fluid-scale experiment estimate against the effect at a different
// deployment ratio. Zero exactly when both ratios sit on the plateau (>= r)
// or coincide.
inline double scale_up_bias(const ModelParams& params, double experiment_ratio,
                            double deployment_ratio) {
    if (!(experiment_ratio >= 0.0) || !(deployment_ratio >= 0.0))
        throw std::domain_error("scale_up_bias: ratios must be >= 0");
    return fluid_effect(ServerRatio{experiment_ratio}, params) -
           fluid_effect(ServerRatio{deployment_ratio}, params);
}

}  // namespace capacity_rct
