#pragma once

// Offline martingale-loss updates of theta from a completed episode trace.
// Order: raw sum -> per-component clamp to [-M_gc, M_gc] -> scale by
// alpha * l(m) * dt -> add -> boundary clip.

#include <array>
#include <cstddef>

#include "srl/param_family.hpp"
#include "srl/sde_sim.hpp"

namespace srl {

struct PeConfig {
    std::array<double, 3> alpha{0.1, 0.1, 1.0};
    double lr_decay = 1.01;  // l(m) = lr_decay^{-m}
    std::array<double, 3> grad_clip{1.0, 1.0, 10.0};
    double delta_bc = kDefaultDeltaBc;
    bool include_control_costs = true;

    bool operator==(const PeConfig&) const = default;
};

void validate(const PeConfig& cfg);

/// l(m) = 1.01^{-m} by default.
double lr_schedule(std::size_t m, double decay = 1.01);

/// Clamped summed gradient term and the theta it produces.
struct PeStep {
    Grad3 raw{};
    Grad3 clamped{};
    Theta theta;
};

PeStep ml_step_phi(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                   const PeConfig& cfg, const ModelParams& params);
PeStep ml_step_u_activated(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                           const PeConfig& cfg, const ModelParams& params);
PeStep ml_step_u_inactive(const Theta& theta, const EpisodeTrace& trace, std::size_t m, const PeConfig& cfg,
                          const ModelParams& params);

/// Non-randomized critic update on Phi^theta, followed by clip_full.
Theta ml_update_phi(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                    const PeConfig& cfg, const ModelParams& params);

/// Critic update on U^theta(., t_n, tau) for an activated trace, then clip_full.
Theta ml_update_u_activated(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                            const PeConfig& cfg, const ModelParams& params);

/// Critic update of (theta1, theta3) on U^{inf,theta} for a trace that never
/// activated, then clip_uncontrolled.
Theta ml_update_u_inactive(const Theta& theta, const EpisodeTrace& trace, std::size_t m, const PeConfig& cfg,
                           const ModelParams& params);

} // namespace srl
