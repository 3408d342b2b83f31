#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace capacity_rct {

// ---------------------------------------------------------------------------
// ModelParams — the four behavioral rates of one user's two-state dynamics.
//
// A user leaves the desired state at rate lambda, recovers unassisted at rate
// tau, and - while a server is attending to them - completes service at rate
// mu, each completion returning them to the desired state with probability p.
// ---------------------------------------------------------------------------
struct ModelParams {
    double lambda = 0.0;  // rate of leaving the desired state, > 0
    double tau = 0.0;     // unassisted recovery rate, >= 0
    double mu = 0.0;      // per-server service rate, > 0
    double p = 0.0;       // P(service completion returns user to desired state), in [0, 1]

    void validate() const {
        if (!(lambda > 0.0)) throw std::domain_error("ModelParams: lambda must be > 0");
        if (!(mu > 0.0)) throw std::domain_error("ModelParams: mu must be > 0");
        if (!(tau >= 0.0)) throw std::domain_error("ModelParams: tau must be >= 0");
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("ModelParams: p must be in [0, 1]");
    }
};

// One closed system: M servers shared by N users. servers == 0 encodes the
// control system (no service component).
struct SystemSize {
    int servers = 0;
    int users = 1;

    void validate() const {
        if (users < 1) throw std::domain_error("SystemSize: users must be >= 1");
        if (servers < 0) throw std::domain_error("SystemSize: servers must be >= 0");
    }
};

// Steady-state law over queue lengths 0..N.
struct StationaryDistribution {
    std::vector<double> probs;  // probs[j] = P(queue length == j)
};

enum class RegimeLabel {
    EfficiencyDriven,
    QualityDriven,
    QualityEfficiencyDriven,
};

inline std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::EfficiencyDriven: return "EfficiencyDriven";
        case RegimeLabel::QualityDriven: return "QualityDriven";
        case RegimeLabel::QualityEfficiencyDriven: return "QualityEfficiencyDriven";
    }
    return "?";
}

// Buffer constant for the QED band, matching the staffing constant.
inline constexpr double kDefaultRegimeGamma = 0.5;

// Rate of users entering the queue when i of N are already queued.
inline double rate_up(int i, const ModelParams& params, const SystemSize& size) {
    if (i < 0 || i > size.users) throw std::domain_error("rate_up: queue length out of range");
    return static_cast<double>(size.users - i) * params.lambda;
}

// Rate of users leaving the queue: every queued user can recover unassisted,
// and min(i, M) of them are in service.
inline double rate_down(int i, const ModelParams& params, const SystemSize& size) {
    if (i < 0 || i > size.users) throw std::domain_error("rate_down: queue length out of range");
    const double in_service = static_cast<double>(std::min(i, size.servers));
    return in_service * params.mu * params.p + static_cast<double>(i) * params.tau;
}

// r = lambda / (lambda + tau + mu p). The server-to-user ratio separating the
// congested from the uncongested fluid regime.
inline double critical_ratio(const ModelParams& params) {
    params.validate();
    return params.lambda / (params.lambda + params.tau + params.mu * params.p);
}

// r * N: expected number of users in the undesired state under unlimited capacity.
inline double offered_load(const ModelParams& params, int users) {
    if (users < 1) throw std::domain_error("offered_load: users must be >= 1");
    return critical_ratio(params) * static_cast<double>(users);
}

// Stationary distribution via the detailed-balance ratio recursion
// pi(j) = pi(j-1) * rate_up(j-1) / rate_down(j), renormalized periodically so
// the unnormalized products cannot overflow even for N in the tens of thousands.
inline StationaryDistribution stationary_distribution(const ModelParams& params,
                                                      const SystemSize& size) {
    params.validate();
    size.validate();
    const int n = size.users;
    std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
    probs[0] = 1.0;
    double current = 1.0;
    double total = 1.0;
    for (int j = 1; j <= n; ++j) {
        const double up = rate_up(j - 1, params, size);
        const double down = rate_down(j, params, size);
        current *= up / down;
        probs[static_cast<std::size_t>(j)] = current;
        total += current;
        if (total > 1e250) {
            for (int k = 0; k <= j; ++k) probs[static_cast<std::size_t>(k)] /= total;
            current = probs[static_cast<std::size_t>(j)];
            total = 1.0;
        }
    }
    double sum = 0.0;
    for (double v : probs) sum += v;
    for (double& v : probs) v /= sum;
    return StationaryDistribution{std::move(probs)};
}

// E[queue length] under the stationary law.
inline double mean_queue_length(const StationaryDistribution& dist) {
    double mean = 0.0;
    for (std::size_t j = 0; j < dist.probs.size(); ++j)
        mean += static_cast<double>(j) * dist.probs[j];
    return mean;
}

// Places (M, N) relative to the offered load rN with a gamma*sqrt(N) buffer.
// The band's upper edge is rounded up to the next integer so the sqrt-staffed
// server count ceil(rN + gamma*sqrt(N)) always classifies as QED.
inline RegimeLabel classify_regime(const ModelParams& params, const SystemSize& size,
                                   double gamma = kDefaultRegimeGamma) {
    size.validate();
    const double load = offered_load(params, size.users);
    const double buffer = gamma * std::sqrt(static_cast<double>(size.users));
    const double m = static_cast<double>(size.servers);
    if (m > std::ceil(load + buffer)) return RegimeLabel::QualityDriven;
    if (m < load - buffer) return RegimeLabel::EfficiencyDriven;
    return RegimeLabel::QualityEfficiencyDriven;
}

}  // namespace capacity_rct
