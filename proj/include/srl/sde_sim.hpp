#pragma once

// Episode generators on a uniform grid t_n = n T / N, n = 0..N-1.
// Non-randomized: Skorokhod reflection at x_bar from the first step.
// Randomized: an auxiliary control eta, the running maximum of Gamma^theta along
// the uncontrolled path, decides when reflection switches on.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "srl/closed_form.hpp"
#include "srl/param_family.hpp"
#include "srl/rng.hpp"

namespace srl {

struct TimeGrid {
    double T = 100.0;
    std::size_t N = 5000;

    [[nodiscard]] double dt() const { return T / static_cast<double>(N); }
    [[nodiscard]] double t(std::size_t n) const { return T * static_cast<double>(n) / static_cast<double>(N); }
};

/// Throws std::invalid_argument unless T > 0 and N >= 1.
void validate(const TimeGrid& grid);

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct StepRecord {
    double x_pre = 0.0;
    double xi_pre = 0.0;
    double eta_pre = 0.0;
    double x_post = 0.0;
    double xi_post = 0.0;
    double eta_post = 0.0;
    double H = 0.0;  // e^{-beta t_n} e^{a X_{t_n}} dt
    double c = 0.0;  // e^{-beta t_n} c (xi_{t_{n+1}-} - xi_{t_n})
};

struct EpisodeTrace {
    TimeGrid grid;
    std::vector<StepRecord> steps;
    double activation_time = std::numeric_limits<double>::infinity();
    std::ptrdiff_t activation_step = -1;

    [[nodiscard]] bool activated() const { return activation_step >= 0; }
    /// Pre-jump triple of the step after the last one recorded.
    double x_end = 0.0;
    double xi_end = 0.0;
    double eta_end = 0.0;
};

/// Result of one reflected step from (x_pre, xi_pre) at time t.
struct ReflectedStep {
    double x_post;
    double xi_post;
    double x_next;
    double xi_next;
    double H;
    double c;
};

EpisodeTrace simulate_nonrandomized(const TimeGrid& grid, double x0, double xi0, double x_bar,
                                    const ModelParams& params, RngSeed seed);

/// Activation boundary uses Phi^theta and temperature lambda; params supplies
/// the true dynamics and costs.
EpisodeTrace simulate_randomized(const TimeGrid& grid, double x0, double xi0, double eta0, double x_bar,
                                 const Theta& theta, const ModelParams& params, double lambda, RngSeed seed);

/// Same dynamics as simulate_nonrandomized without storing the trace; returns
/// the realized discounted cost including immediate jumps.
double simulate_cost_nonrandomized(const TimeGrid& grid, double x0, double x_bar, const ModelParams& params,
                                   RngSeed seed);

/// Sum over steps of H + c plus the discounted cost of immediate jumps.
double discounted_total_cost(const EpisodeTrace& trace, const ModelParams& params);

/// Header, one row per step, then `activation_time,<t|inf>`.
void write_trace_csv(std::ostream& os, const EpisodeTrace& trace);

// ---------------------------------------------------------------------------

inline ReflectedStep reflected_step(double x_pre, double xi_pre, double discount, double dt, double x_bar,
                                    double a, double c, double increment) {
    ReflectedStep s{};
    const double jump = x_pre > x_bar ? x_pre - x_bar : 0.0;
    s.x_post = x_pre - jump;
    s.xi_post = xi_pre + jump;
    const double moved = s.x_post + increment;
    const double excess = moved > x_bar ? moved - x_bar : 0.0;
    s.x_next = moved - excess;
    s.xi_next = s.xi_post + excess;
    s.H = discount * std::exp(a * s.x_post) * dt;
    s.c = discount * c * excess;
    return s;
}

} // namespace srl
