#include "srl/policy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace srl {

void validate(const PeConfig& cfg) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(cfg.alpha[i] > 0.0)) throw std::invalid_argument("learning rates must be positive");
        if (!(cfg.grad_clip[i] > 0.0)) throw std::invalid_argument("gradient clipping bounds must be positive");
    }
    if (!(cfg.lr_decay >= 1.0)) throw std::invalid_argument("learning-rate decay base must be >= 1");
    if (!(cfg.delta_bc > 0.0)) throw std::invalid_argument("delta_bc must be positive");
}

double lr_schedule(std::size_t m, double decay) { return std::pow(decay, -static_cast<double>(m)); }

namespace {

// Cost still to come after the post-jump state of step n: H_k + c_k for
// k >= n plus the immediate jump costs of steps k > n.
std::vector<double> suffix_costs(const EpisodeTrace& trace, bool with_control, const ModelParams& params) {
    const std::size_t n_steps = trace.steps.size();
    std::vector<double> suffix(n_steps + 1, 0.0);
    double later_jump = 0.0;
    for (std::size_t k = n_steps; k-- > 0;) {
        const StepRecord& s = trace.steps[k];
        double cost = s.H;
        if (with_control) cost += s.c + later_jump;
        suffix[k] = suffix[k + 1] + cost;
        later_jump = std::exp(-params.beta * trace.grid.t(k)) * params.c * (s.xi_post - s.xi_pre);
    }
    return suffix;
}

template <class ValueFn>
PeStep accumulate(const Theta& theta, const EpisodeTrace& trace, std::size_t m, const PeConfig& cfg,
                  bool with_control, const ModelParams& params, ValueFn&& value_at) {
    if (!trace.steps.empty() && trace.steps.size() != trace.grid.N) {
        throw std::invalid_argument("trace length does not match its time grid");
    }
    PeStep out;
    const std::vector<double> suffix = suffix_costs(trace, with_control, params);
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const ValueGrad vg = value_at(n);
        const double residual = -std::exp(-params.beta * trace.grid.t(n)) * vg.value + suffix[n];
        for (std::size_t i = 0; i < 3; ++i) out.raw[i] += residual * vg.grad[i];
    }
    auto th = theta.to_array();
    const double scale = trace.steps.empty() ? 0.0 : lr_schedule(m, cfg.lr_decay) * trace.grid.dt();
    for (std::size_t i = 0; i < 3; ++i) {
        out.clamped[i] = std::clamp(out.raw[i], -cfg.grad_clip[i], cfg.grad_clip[i]);
        th[i] += cfg.alpha[i] * scale * out.clamped[i];
    }
    out.theta = Theta::from_array(th);
    return out;
}

} // namespace

PeStep ml_step_phi(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                   const PeConfig& cfg, const ModelParams& params) {
    PeStep s = accumulate(theta, trace, m, cfg, cfg.include_control_costs, params, [&](std::size_t n) {
        return phi_theta_vg(trace.steps[n].x_post, theta, x_bar, params.c);
    });
    s.theta = clip_full(s.theta, params.beta, cfg.delta_bc);
    return s;
}

PeStep ml_step_u_activated(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                           const PeConfig& cfg, const ModelParams& params) {
    if (!trace.activated()) throw std::invalid_argument("activated update requires a finite activation time");
    const double tau = trace.activation_time;
    PeStep s = accumulate(theta, trace, m, cfg, cfg.include_control_costs, params, [&](std::size_t n) {
        return u_theta_vg(trace.steps[n].x_post, trace.grid.t(n), tau, theta, x_bar, params.c, params.beta);
    });
    s.theta = clip_full(s.theta, params.beta, cfg.delta_bc);
    return s;
}

PeStep ml_step_u_inactive(const Theta& theta, const EpisodeTrace& trace, std::size_t m, const PeConfig& cfg,
                          const ModelParams& params) {
    if (trace.activated()) throw std::invalid_argument("inactive update requires a trace that never activated");
    PeStep s = accumulate(theta, trace, m, cfg, false, params,
                          [&](std::size_t n) { return u_inf_theta_vg(trace.steps[n].x_post, theta); });
    s.theta = clip_uncontrolled(s.theta, params.beta, cfg.delta_bc);
    return s;
}

Theta ml_update_phi(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                    const PeConfig& cfg, const ModelParams& params) {
    return ml_step_phi(theta, x_bar, trace, m, cfg, params).theta;
}

Theta ml_update_u_activated(const Theta& theta, double x_bar, const EpisodeTrace& trace, std::size_t m,
                            const PeConfig& cfg, const ModelParams& params) {
    return ml_step_u_activated(theta, x_bar, trace, m, cfg, params).theta;
}

Theta ml_update_u_inactive(const Theta& theta, const EpisodeTrace& trace, std::size_t m, const PeConfig& cfg,
                           const ModelParams& params) {
    return ml_step_u_inactive(theta, trace, m, cfg, params).theta;
}

} // namespace srl
