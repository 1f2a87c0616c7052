#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "srl/trainer.hpp"

using namespace srl;

namespace {

const ModelParams kParams{};
const DerivedConstants kDc = derive_constants(kParams);
const Theta kTruth = true_theta(kDc, kParams);

TrainConfig small_config(TrainMode mode) {
    TrainConfig cfg;
    cfg.T = 20.0;
    cfg.N = 1000;
    cfg.M = 8;
    cfg.mode = mode;
    cfg.seed = 3;
    return cfg;
}

} // namespace

TEST_SUITE("trainer") {

TEST_CASE("mode names") {
    CHECK(to_string(TrainMode::benchmark) == "benchmark");
    CHECK(parse_train_mode("randomized") == TrainMode::randomized);
    CHECK_THROWS_AS(parse_train_mode("greedy"), std::invalid_argument);
}

TEST_CASE("L-infinity metric") {
    CHECK(linf_error(kTruth, kDc.x_hat, kParams) < 1e-8);
    Theta off = kTruth;
    off.theta3 += 1.0;
    const double coarse = linf_error(off, kDc.x_hat, kParams);
    CHECK(coarse > 0.0);
    CHECK(linf_error(off, kDc.x_hat, kParams, 20001) == doctest::Approx(coarse).epsilon(0.01));
    const TrainConfig cfg;
    const double initial = linf_error(cfg.theta_init, cfg.x_bar_init, kParams);
    CHECK(initial == doctest::Approx(linf_error(cfg.theta_init, cfg.x_bar_init, kParams, 20001)).epsilon(0.01));
    CHECK_THROWS_AS(linf_error(kTruth, 0.0, kParams, 1), std::invalid_argument);
}

TEST_CASE("benchmark loop threads theta and x_bar through the episodes") {
    const TrainConfig cfg = small_config(TrainMode::benchmark);
    const std::vector<EpisodeRecord> log = run_benchmark(cfg, kParams);
    REQUIRE(log.size() == cfg.M);
    Theta theta = cfg.theta_init;
    double x_bar = cfg.x_bar_init;
    for (std::size_t m = 1; m <= cfg.M; ++m) {
        const EpisodeTrace tr = simulate_nonrandomized(cfg.grid(), cfg.x0, 0.0, x_bar, kParams, {cfg.seed, m});
        theta = ml_update_phi(theta, x_bar, tr, m, cfg.pe, kParams);
        x_bar = iterate_boundary(theta, x_bar, kParams.beta, kParams.c, cfg.pi);
        const EpisodeRecord& r = log[m - 1];
        CHECK(r.m == m);
        CHECK(r.theta == theta);
        CHECK(r.x_bar == x_bar);
        CHECK_FALSE(r.activation_time.has_value());
        CHECK(r.total_cost == doctest::Approx(discounted_total_cost(tr, kParams)));
        CHECK(r.linf_error == linf_error(theta, x_bar, kParams));
    }
}

TEST_CASE("randomized loop records activation times") {
    const TrainConfig cfg = small_config(TrainMode::randomized);
    const std::vector<EpisodeRecord> log = run_training(cfg, kParams);
    REQUIRE(log.size() == cfg.M);
    Theta theta = cfg.theta_init;
    double x_bar = cfg.x_bar_init;
    for (std::size_t m = 1; m <= cfg.M; ++m) {
        const EpisodeTrace tr =
            simulate_randomized(cfg.grid(), cfg.x0, 0.0, 0.0, x_bar, theta, kParams, cfg.lambda, {cfg.seed, m});
        theta = tr.activated() ? ml_update_u_activated(theta, x_bar, tr, m, cfg.pe, kParams)
                               : ml_update_u_inactive(theta, tr, m, cfg.pe, kParams);
        x_bar = iterate_boundary(theta, x_bar, kParams.beta, kParams.c, cfg.pi);
        const EpisodeRecord& r = log[m - 1];
        REQUIRE(r.activation_time.has_value());
        CHECK(*r.activation_time == tr.activation_time);
        CHECK(r.theta == theta);
        CHECK(r.x_bar == x_bar);
    }
}

TEST_CASE("runs are reproducible and seed dependent") {
    const TrainConfig cfg = small_config(TrainMode::randomized);
    const auto a = run_training(cfg, kParams);
    const auto b = run_training(cfg, kParams);
    CHECK(a.back().theta == b.back().theta);
    CHECK(a.back().x_bar == b.back().x_bar);
    TrainConfig other = cfg;
    other.seed = 4;
    CHECK_FALSE(run_training(other, kParams).back().theta == a.back().theta);
}

TEST_CASE("callback sees every episode in order") {
    const TrainConfig cfg = small_config(TrainMode::benchmark);
    std::vector<std::size_t> seen;
    run_training(cfg, kParams, [&](const EpisodeRecord& r) { seen.push_back(r.m); });
    REQUIRE(seen.size() == cfg.M);
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i + 1);
}

TEST_CASE("large temperature activates at t_0 with probability Gamma^theta(x0)") {
    const TrainConfig cfg;
    const double lambda = 1e6;
    const std::size_t episodes = 1000;
    double activated = 0.0;
    double eta0 = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        const EpisodeTrace tr = simulate_randomized({1.0, 10}, cfg.x0, 0.0, 0.0, cfg.x_bar_init, cfg.theta_init,
                                                    kParams, lambda, {8, e});
        activated += tr.activation_step == 0 ? 1.0 : 0.0;
        eta0 += tr.steps[0].eta_post;
    }
    const double p = activated / episodes;
    const double se = std::sqrt(std::max(p * (1 - p), 1e-6) / episodes);
    CHECK(std::abs(p - eta0 / episodes) < 3.0 * se);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.M = 0;
    CHECK_THROWS_AS(run_benchmark(cfg, kParams), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.N = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("Monte Carlo value does not depend on the thread count") {
    const McEstimate one = mc_value_estimate(kDc.x_hat, kParams, 1.0, 20.0, 1000, 64, 5, 1);
    const McEstimate four = mc_value_estimate(kDc.x_hat, kParams, 1.0, 20.0, 1000, 64, 5, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.std_error == four.std_error);
    CHECK(one.std_error > 0.0);
}

TEST_CASE("Monte Carlo value brackets Phi at the optimal boundary") {
    const McEstimate est = mc_value_estimate(kDc.x_hat, kParams, 1.0, 100.0, 5000, 4000, 12);
    CHECK(std::abs(est.mean - phi(1.0, kDc, kParams)) < 3.0 * est.std_error);
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("multi-seed summary") {
    TrainConfig cfg = small_config(TrainMode::benchmark);
    cfg.M = 4;
    const MultiSeedSummary s = run_multi_seed(cfg, kParams, {1, 2, 3}, 3);
    REQUIRE(s.outcomes.size() == 3);
    std::vector<double> linf;
    for (const SeedOutcome& o : s.outcomes) {
        TrainConfig one = cfg;
        one.seed = o.seed;
        const auto log = run_training(one, kParams);
        CHECK(o.final_record.theta == log.back().theta);
        CHECK(o.x_bar_error == doctest::Approx(std::abs(log.back().x_bar - kDc.x_hat)));
        linf.push_back(log.back().linf_error);
    }
    CHECK(s.median_final_linf == median(linf));
    CHECK(s.initial_linf == linf_error(cfg.theta_init, cfg.x_bar_init, kParams));
}

}  // TEST_SUITE
