#pragma once

// Offline actor-critic training loops (benchmark and randomized), the
// L-infinity metric, and the Monte Carlo value oracle.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srl/closed_form.hpp"
#include "srl/param_family.hpp"
#include "srl/policy_eval.hpp"
#include "srl/policy_iter.hpp"
#include "srl/sde_sim.hpp"

namespace srl {

enum class TrainMode { benchmark, randomized };

std::string to_string(TrainMode mode);
/// Throws std::invalid_argument on an unknown name.
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
    double x0 = 1.0;
    double T = 100.0;
    std::size_t N = 5000;
    std::size_t M = 500;
    Theta theta_init{0.15, 0.4, 15.0};
    double x_bar_init = -2.5;
    PeConfig pe;
    PiConfig pi;
    double lambda = 0.5;
    std::uint64_t seed = 0;
    TrainMode mode = TrainMode::benchmark;

    [[nodiscard]] TimeGrid grid() const { return {T, N}; }

    bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& cfg);

struct EpisodeRecord {
    std::size_t m = 0;
    Theta theta;
    double x_bar = 0.0;
    double linf_error = 0.0;
    std::optional<double> activation_time;  // empty in benchmark mode; inf when never activated
    double total_cost = 0.0;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

/// Non-randomized actor-critic. Episode m (1-based) uses RNG stream m.
std::vector<EpisodeRecord> run_benchmark(const TrainConfig& cfg, const ModelParams& truth,
                                         const EpisodeCallback& on_episode = {});

/// Randomized actor-critic with temperature cfg.lambda.
std::vector<EpisodeRecord> run_randomized(const TrainConfig& cfg, const ModelParams& truth,
                                          const EpisodeCallback& on_episode = {});

/// Dispatches on cfg.mode.
std::vector<EpisodeRecord> run_training(const TrainConfig& cfg, const ModelParams& truth,
                                        const EpisodeCallback& on_episode = {});

inline constexpr std::size_t kLinfGridPoints = 2001;

/// max over a uniform grid on [-100, 100] of |Phi^theta(x; x_bar) - Phi(x)|.
double linf_error(const Theta& theta, double x_bar, const ModelParams& truth,
                  std::size_t grid_points = kLinfGridPoints);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Realized discounted cost under reflection at x_bar, averaged over
/// n_paths paths; path i uses stream i of seed. threads = 0 picks the
/// hardware concurrency. The result does not depend on the thread count.
McEstimate mc_value_estimate(double x_bar, const ModelParams& truth, double x0, double T, std::size_t N,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

struct SeedOutcome {
    std::uint64_t seed = 0;
    EpisodeRecord final_record;
    double x_bar_error = 0.0;
};

struct MultiSeedSummary {
    double initial_linf = 0.0;
    std::vector<SeedOutcome> outcomes;
    double median_final_linf = 0.0;
    double median_x_bar_error = 0.0;
};

/// Repeats cfg over the given seeds (cfg.seed is replaced) and reports final
/// metrics and medians. Runs are independent and may execute concurrently.
MultiSeedSummary run_multi_seed(const TrainConfig& cfg, const ModelParams& truth,
                                const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

double median(std::vector<double> values);

} // namespace srl
