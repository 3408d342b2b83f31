#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "capacity_rct/queueing.hpp"
#include "oracle.hpp"

using namespace capacity_rct;

namespace {

const ModelParams kAdherence{0.4, 0.35, 3.0, 0.1};   // lambda, tau, mu, p
const ModelParams kOutreach{0.185, 0.16, 7.0, 0.085};
const ModelParams kSticky{0.3, 0.3, 3.0, 0.5};

const std::vector<ModelParams> kParamGrid = {kAdherence, kOutreach, kSticky};

}  // namespace

TEST_CASE("rate_up counts idle users times lambda") {
    const SystemSize size{3, 10};
    CHECK(rate_up(0, kAdherence, size) == Approx(4.0));
    CHECK(rate_up(10, kAdherence, size) == 0.0);
    const SystemSize big{5, 100};
    CHECK(rate_up(3, ModelParams{0.185, 0.16, 7.0, 0.085}, big) == Approx(17.945));
    CHECK_THROWS_AS(rate_up(-1, kAdherence, size), std::domain_error);
    CHECK_THROWS_AS(rate_up(11, kAdherence, size), std::domain_error);
}

TEST_CASE("rate_down caps service at the server count") {
    const SystemSize size{5, 20};
    CHECK(rate_down(0, kAdherence, size) == 0.0);
    CHECK(rate_down(2, kAdherence, size) == Approx(1.3));
    CHECK(rate_down(8, kAdherence, size) == Approx(4.3));
    CHECK_THROWS_AS(rate_down(21, kAdherence, size), std::domain_error);
}

TEST_CASE("stationary distribution of the smallest chains") {
    SECTION("single user, no servers: two-state balance") {
        const auto dist = stationary_distribution(kAdherence, SystemSize{0, 1});
        const double denom = kAdherence.lambda + kAdherence.tau;
        REQUIRE(dist.probs.size() == 2);
        CHECK(dist.probs[0] == Approx(kAdherence.tau / denom).epsilon(1e-12));
        CHECK(dist.probs[1] == Approx(kAdherence.lambda / denom).epsilon(1e-12));
    }
    SECTION("single user, one server: P(queued) equals the critical ratio") {
        const auto dist = stationary_distribution(kAdherence, SystemSize{1, 1});
        CHECK(dist.probs[1] == Approx(critical_ratio(kAdherence)).epsilon(1e-12));
    }
    SECTION("one server, two users: matches the dense generator solve") {
        const auto dist = stationary_distribution(kAdherence, SystemSize{1, 2});
        const auto ref = oracle::stationary_dense({0.4, 0.35, 3.0, 0.1}, 1, 2);
        for (std::size_t j = 0; j < ref.size(); ++j)
            CHECK(dist.probs[j] == Approx(ref[j]).margin(1e-12));
    }
}

TEST_CASE("recursion matches the dense solve on all small chains") {
    for (const auto& params : kParamGrid) {
        for (int n = 1; n <= 8; ++n) {
            for (int m = 0; m <= n; ++m) {
                const auto dist = stationary_distribution(params, SystemSize{m, n});
                const auto ref =
                    oracle::stationary_dense({params.lambda, params.tau, params.mu, params.p}, m, n);
                for (int j = 0; j <= n; ++j)
                    REQUIRE(dist.probs[static_cast<std::size_t>(j)] ==
                            Approx(ref[static_cast<std::size_t>(j)]).margin(1e-9));
                REQUIRE(mean_queue_length(dist) == Approx(oracle::mean_of(ref)).margin(1e-9));
            }
        }
    }
}

TEST_CASE("stationary distribution normalizes and satisfies detailed balance") {
    const std::vector<SystemSize> sizes = {{0, 1}, {1, 5}, {3, 12}, {7, 40}, {25, 120}};
    for (const auto& params : kParamGrid) {
        for (const auto& size : sizes) {
            const auto dist = stationary_distribution(params, size);
            double sum = 0.0;
            for (double v : dist.probs) {
                REQUIRE(v >= 0.0);
                sum += v;
            }
            CHECK(sum == Approx(1.0).margin(1e-12));
            for (int j = 0; j < size.users; ++j) {
                const double flow_up = dist.probs[static_cast<std::size_t>(j)] * rate_up(j, params, size);
                const double flow_down =
                    dist.probs[static_cast<std::size_t>(j) + 1] * rate_down(j + 1, params, size);
                if (flow_up > 0.0 || flow_down > 0.0)
                    CHECK(flow_up == Approx(flow_down).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("stationary distribution is stable for very large systems") {
    const auto dist = stationary_distribution(kAdherence, SystemSize{3000, 10000});
    double sum = 0.0;
    for (double v : dist.probs) {
        REQUIRE(std::isfinite(v));
        sum += v;
    }
    CHECK(sum == Approx(1.0).margin(1e-9));
    const double kbar = mean_queue_length(dist);
    CHECK(kbar > 0.0);
    CHECK(kbar < 10000.0);
}

TEST_CASE("mean queue length") {
    SECTION("Bernoulli steady state for a lone control user") {
        const auto dist = stationary_distribution(kAdherence, SystemSize{0, 1});
        CHECK(mean_queue_length(dist) ==
              Approx(kAdherence.lambda / (kAdherence.lambda + kAdherence.tau)).epsilon(1e-12));
    }
    SECTION("abundant servers give N times the critical ratio") {
        const int n = 15;
        const auto dist = stationary_distribution(kAdherence, SystemSize{n, n});
        CHECK(mean_queue_length(dist) == Approx(n * critical_ratio(kAdherence)).epsilon(1e-10));
    }
    SECTION("pinned against the dense solve") {
        const auto dist = stationary_distribution(kAdherence, SystemSize{5, 20});
        const auto ref = oracle::stationary_dense({0.4, 0.35, 3.0, 0.1}, 5, 20);
        CHECK(mean_queue_length(dist) == Approx(oracle::mean_of(ref)).margin(1e-9));
    }
    SECTION("non-increasing in the number of servers") {
        for (int n : {5, 20, 100}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int m = 0; m <= n; ++m) {
                const double k = mean_queue_length(stationary_distribution(kAdherence, SystemSize{m, n}));
                CHECK(k <= prev + 1e-12);
                prev = k;
            }
        }
    }
}

TEST_CASE("no servers reduces to independent users: binomial law") {
    for (int n = 1; n <= 10; ++n) {
        const auto dist = stationary_distribution(kAdherence, SystemSize{0, n});
        const double q = kAdherence.lambda / (kAdherence.lambda + kAdherence.tau);
        for (int j = 0; j <= n; ++j)
            CHECK(dist.probs[static_cast<std::size_t>(j)] ==
                  Approx(oracle::binomial_pmf(n, j, q)).margin(1e-12));
    }
}

TEST_CASE("critical ratio") {
    CHECK(critical_ratio(kAdherence) == Approx(0.4 / 1.05).epsilon(1e-12));
    CHECK(critical_ratio(kAdherence) == Approx(0.38).margin(0.005));
    CHECK(critical_ratio(kOutreach) == Approx(0.185 / 0.94).epsilon(1e-12));
    CHECK(critical_ratio(kOutreach) == Approx(0.1968).margin(5e-4));
    CHECK(critical_ratio(ModelParams{0.4, 0.0, 3.0, 0.0}) == Approx(1.0));
}

TEST_CASE("offered load") {
    CHECK(offered_load(kAdherence, 34) == Approx(12.95238).margin(1e-4));
    CHECK_THROWS_AS(offered_load(kAdherence, 0), std::domain_error);
    CHECK(offered_load(ModelParams{1e-12, 0.35, 3.0, 0.1}, 100) < 1e-9);
}

TEST_CASE("regime classification") {
    SECTION("well below the offered load is efficiency driven") {
        CHECK(classify_regime(kAdherence, SystemSize{5, 25}) == RegimeLabel::EfficiencyDriven);
    }
    SECTION("well above the buffered load is quality driven") {
        CHECK(classify_regime(kAdherence, SystemSize{20, 25}) == RegimeLabel::QualityDriven);
    }
    SECTION("a sqrt-staffed system always lands in the QED band") {
        for (int n = 1; n <= 300; ++n) {
            const double load = offered_load(kAdherence, n);
            const int staffed = static_cast<int>(std::ceil(load + 0.5 * std::sqrt(n)));
            CHECK(classify_regime(kAdherence, SystemSize{staffed, n}) ==
                  RegimeLabel::QualityEfficiencyDriven);
        }
    }
    SECTION("a small pilot near the band edge stays QED") {
        CHECK(classify_regime(kAdherence, SystemSize{5, 10}) ==
              RegimeLabel::QualityEfficiencyDriven);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((ModelParams{0.0, 0.1, 1.0, 0.5}).validate(), std::domain_error);
    CHECK_THROWS_AS((ModelParams{0.1, -0.1, 1.0, 0.5}).validate(), std::domain_error);
    CHECK_THROWS_AS((ModelParams{0.1, 0.1, 0.0, 0.5}).validate(), std::domain_error);
    CHECK_THROWS_AS((ModelParams{0.1, 0.1, 1.0, 1.5}).validate(), std::domain_error);
    CHECK_THROWS_AS((SystemSize{-1, 5}).validate(), std::domain_error);
    CHECK_THROWS_AS((SystemSize{2, 0}).validate(), std::domain_error);
}
