#include "srl/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "srl/errors.hpp"

namespace srl {

std::string to_string(TrainMode mode) { return mode == TrainMode::benchmark ? "benchmark" : "randomized"; }

TrainMode parse_train_mode(const std::string& name) {
    if (name == "benchmark") return TrainMode::benchmark;
    if (name == "randomized") return TrainMode::randomized;
    throw std::invalid_argument("unknown mode '" + name + "' (expected benchmark or randomized)");
}

void validate(const TrainConfig& cfg) {
    if (!std::isfinite(cfg.x0)) throw std::invalid_argument("x0 must be finite");
    validate(cfg.grid());
    if (cfg.M < 1) throw std::invalid_argument("number of episodes M must be at least 1");
    if (!std::isfinite(cfg.x_bar_init)) throw std::invalid_argument("x_bar_init must be finite");
    validate(cfg.pe);
    validate(cfg.pi);
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

namespace {

template <class Body>
void guarded_episode(std::size_t m, Body&& body) {
    try {
        body();
    } catch (const NumericError& e) {
        throw NumericError("episode " + std::to_string(m) + ": " + e.what());
    }
}

unsigned resolve_threads(unsigned threads, std::size_t jobs) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a small pool with an atomic work index.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    threads = resolve_threads(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

std::vector<EpisodeRecord> run_benchmark(const TrainConfig& cfg, const ModelParams& truth,
                                         const EpisodeCallback& on_episode) {
    validate(cfg);
    validate(truth);
    const TimeGrid grid = cfg.grid();
    Theta theta = cfg.theta_init;
    double x_bar = cfg.x_bar_init;
    std::vector<EpisodeRecord> log;
    log.reserve(cfg.M);
    for (std::size_t m = 1; m <= cfg.M; ++m) {
        EpisodeRecord rec;
        guarded_episode(m, [&] {
            const EpisodeTrace trace = simulate_nonrandomized(grid, cfg.x0, 0.0, x_bar, truth, {cfg.seed, m});
            theta = ml_update_phi(theta, x_bar, trace, m, cfg.pe, truth);
            x_bar = iterate_boundary(theta, x_bar, truth.beta, truth.c, cfg.pi);
            rec.total_cost = discounted_total_cost(trace, truth);
        });
        rec.m = m;
        rec.theta = theta;
        rec.x_bar = x_bar;
        rec.linf_error = linf_error(theta, x_bar, truth);
        log.push_back(rec);
        if (on_episode) on_episode(rec);
    }
    return log;
}

std::vector<EpisodeRecord> run_randomized(const TrainConfig& cfg, const ModelParams& truth,
                                          const EpisodeCallback& on_episode) {
    validate(cfg);
    validate(truth);
    const TimeGrid grid = cfg.grid();
    Theta theta = cfg.theta_init;
    double x_bar = cfg.x_bar_init;
    std::vector<EpisodeRecord> log;
    log.reserve(cfg.M);
    for (std::size_t m = 1; m <= cfg.M; ++m) {
        EpisodeRecord rec;
        guarded_episode(m, [&] {
            const EpisodeTrace trace =
                simulate_randomized(grid, cfg.x0, 0.0, 0.0, x_bar, theta, truth, cfg.lambda, {cfg.seed, m});
            if (trace.activated()) theta = ml_update_u_activated(theta, x_bar, trace, m, cfg.pe, truth);
            else theta = ml_update_u_inactive(theta, trace, m, cfg.pe, truth);
            x_bar = iterate_boundary(theta, x_bar, truth.beta, truth.c, cfg.pi);
            rec.total_cost = discounted_total_cost(trace, truth);
            rec.activation_time = trace.activation_time;
        });
        rec.m = m;
        rec.theta = theta;
        rec.x_bar = x_bar;
        rec.linf_error = linf_error(theta, x_bar, truth);
        log.push_back(rec);
        if (on_episode) on_episode(rec);
    }
    return log;
}

std::vector<EpisodeRecord> run_training(const TrainConfig& cfg, const ModelParams& truth,
                                        const EpisodeCallback& on_episode) {
    return cfg.mode == TrainMode::benchmark ? run_benchmark(cfg, truth, on_episode)
                                            : run_randomized(cfg, truth, on_episode);
}

double linf_error(const Theta& theta, double x_bar, const ModelParams& truth, std::size_t grid_points) {
    if (grid_points < 2) throw std::invalid_argument("linf grid needs at least two points");
    const DerivedConstants dc = derive_constants(truth);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = -100.0 + 200.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double err = std::abs(phi_theta(x, theta, x_bar, truth.c) - phi(x, dc, truth));
        if (!(err <= worst)) worst = err;  // NaN propagates
    }
    return worst;
}

McEstimate mc_value_estimate(double x_bar, const ModelParams& truth, double x0, double T, std::size_t N,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads) {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
    const TimeGrid grid{T, N};
    validate(grid);
    std::vector<double> costs(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        costs[i] = simulate_cost_nonrandomized(grid, x0, x_bar, truth, {seed, i});
    });
    double sum = 0.0;
    for (double v : costs) sum += v;
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double v : costs) ss += (v - mean) * (v - mean);
    McEstimate est;
    est.mean = mean;
    est.std_error = n_paths > 1 ? std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths)) : 0.0;
    return est;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MultiSeedSummary run_multi_seed(const TrainConfig& cfg, const ModelParams& truth,
                                const std::vector<std::uint64_t>& seeds, unsigned threads) {
    if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
    const DerivedConstants dc = derive_constants(truth);
    MultiSeedSummary summary;
    summary.initial_linf = linf_error(cfg.theta_init, cfg.x_bar_init, truth);
    summary.outcomes.resize(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        TrainConfig run = cfg;
        run.seed = seeds[i];
        const std::vector<EpisodeRecord> log = run_training(run, truth);
        SeedOutcome& out = summary.outcomes[i];
        out.seed = seeds[i];
        out.final_record = log.back();
        out.x_bar_error = std::abs(log.back().x_bar - dc.x_hat);
    });
    std::vector<double> linf;
    std::vector<double> xerr;
    for (const auto& o : summary.outcomes) {
        linf.push_back(o.final_record.linf_error);
        xerr.push_back(o.x_bar_error);
    }
    summary.median_final_linf = median(linf);
    summary.median_x_bar_error = median(xerr);
    return summary;
}

} // namespace srl
