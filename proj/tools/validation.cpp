#include "validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srl/normal.hpp"
#include "srl/policy_eval.hpp"
#include "srl/policy_iter.hpp"
#include "srl/rng.hpp"
#include "srl/sde_sim.hpp"
#include "srl/trainer.hpp"

namespace srl::cli {

namespace {

class Collector {
public:
    explicit Collector(std::string suite) : suite_(std::move(suite)) {}

    // Passes when measured <= limit; NaN fails.
    void at_most(const std::string& name, double measured, double limit) {
        out_.push_back({suite_, name, measured, limit, measured <= limit});
    }

    std::vector<CheckResult> take() { return std::move(out_); }

private:
    std::string suite_;
    std::vector<CheckResult> out_;
};

double char_poly(double r, const ModelParams& p) { return 0.5 * p.sigma * p.sigma * r * r + p.mu * r - p.beta; }

std::vector<CheckResult> closedform_suite(const ModelParams& p) {
    Collector c("closedform");
    const DerivedConstants dc = derive_constants(p);
    c.at_most("characteristic residual at b", std::abs(char_poly(dc.b, p)), 1e-12);
    c.at_most("characteristic residual at l", std::abs(char_poly(dc.l, p)), 1e-12);

    const Jet left = phi_exponential_branch(dc.x_hat, dc, p);
    c.at_most("smooth fit |Phi'(x_hat) - c|", std::abs(left.d1 - p.c), 1e-10);
    c.at_most("second-order fit |Phi''(x_hat-)|", std::abs(left.d2), 1e-8);

    double vi = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = dc.x_hat - 10.0 + 20.0 * i / 199.0;
        const ViResidual r = vi_residual(x, dc, p);
        vi = std::max(vi, std::abs(std::min(r.pde_res, r.grad_res)));
    }
    c.at_most("variational inequality on 200 points", vi, 1e-8);

    double psi_gap = 0.0;
    for (const auto& [x, q] : {std::pair{0.0, 1.0}, {3.0, 5.0}, {-2.0, 0.5}}) {
        const double closed = psi(x, q, dc, p);
        psi_gap = std::max(psi_gap, std::abs(closed - psi_by_quadrature(x, q, dc, p)) / std::abs(closed));
    }
    c.at_most("Psi closed form vs quadrature (relative)", psi_gap, 1e-8);

    c.at_most("Gamma(x) -> 1 as x -> -inf", std::abs(1.0 - gamma(-200.0, dc, p)), 1e-6);
    c.at_most("Gamma(x) -> 0 as x -> +inf", gamma(200.0, dc, p), 1e-6);
    double rises = 0.0;
    double inv_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = -20.0 + 0.4 * i;
        if (gamma(x + 0.4, dc, p) >= gamma(x, dc, p)) rises += 1.0;
        inv_gap = std::max(inv_gap, std::abs(gamma_inv(gamma(x, dc, p), dc, p) - x));
    }
    c.at_most("Gamma strictly decreasing (non-decreasing pairs)", rises, 0.0);
    c.at_most("gamma_inv(Gamma(x)) roundtrip", inv_gap, 1e-8);
    return c.take();
}

std::vector<CheckResult> simulator_suite(const ModelParams& p) {
    Collector c("simulator");
    const DerivedConstants dc = derive_constants(p);

    // One-sample Kolmogorov-Smirnov test of the increments at the 1% level.
    const double dt = 0.02;
    const std::size_t n = 20000;
    Rng rng(2024, 0);
    std::vector<double> draws(n);
    for (auto& d : draws) d = step_increment(rng, p.mu, p.sigma, dt);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    const double sd = p.sigma * std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal::cdf((draws[i] - p.mu * dt) / sd);
        ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    c.at_most("KS statistic of increments (1% critical value)", ks, 1.628 / std::sqrt(static_cast<double>(n)));

    const TimeGrid grid{100.0, 5000};
    const EpisodeTrace trace = simulate_nonrandomized(grid, 3.0, 0.0, dc.x_hat, p, {11, 1});
    double above = -1e300;
    double xi_drop = 0.0;
    for (const StepRecord& s : trace.steps) {
        above = std::max(above, s.x_post - dc.x_hat);
        xi_drop = std::max(xi_drop, s.xi_pre - s.xi_post);
    }
    c.at_most("reflected state stays at or below x_bar", above, 0.0);
    c.at_most("xi nondecreasing (max drop)", xi_drop, 0.0);
    const EpisodeTrace again = simulate_nonrandomized(grid, 3.0, 0.0, dc.x_hat, p, {11, 1});
    c.at_most("same seed reproduces the trace", again.x_end == trace.x_end && again.xi_end == trace.xi_end ? 0 : 1,
              0.0);

    // Activation law: P(tau <= t_k) against the mean of eta_{t_k}.
    const Theta truth = true_theta(dc, p);
    const TimeGrid short_grid{10.0, 200};
    const std::size_t episodes = 20000;
    const std::array<std::size_t, 3> ks_idx{49, 99, 199};
    std::array<double, 3> hits{};
    std::array<double, 3> eta_sum{};
    for (std::size_t e = 0; e < episodes; ++e) {
        const EpisodeTrace tr = simulate_randomized(short_grid, 1.0, 0.0, 0.0, dc.x_hat, truth, p, 0.5, {5, e});
        for (std::size_t j = 0; j < 3; ++j) {
            eta_sum[j] += tr.steps[ks_idx[j]].eta_post;
            if (tr.activated() && static_cast<std::size_t>(tr.activation_step) <= ks_idx[j]) hits[j] += 1.0;
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double freq = hits[j] / episodes;
        const double se = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) / episodes);
        worst = std::max(worst, std::abs(freq - eta_sum[j] / episodes) / se);
    }
    c.at_most("activation frequency vs mean eta (standard errors)", worst, 3.0);

    const McEstimate mc = mc_value_estimate(dc.x_hat, p, 1.0, 100.0, 5000, 4000, 3);
    c.at_most("Monte Carlo cost vs Phi(1) (standard errors)", std::abs(mc.mean - phi(1.0, dc, p)) / mc.std_error,
              3.0);
    return c.take();
}

std::vector<CheckResult> pe_suite(const ModelParams& p) {
    Collector c("pe");
    const DerivedConstants dc = derive_constants(p);
    const Theta truth = true_theta(dc, p);
    const PeConfig cfg;
    const TimeGrid grid{100.0, 5000};

    c.at_most("lr_schedule(100) = 1.01^-100", std::abs(lr_schedule(100) - 0.3697112123291189), 1e-10);

    const EpisodeTrace far = simulate_nonrandomized(grid, 40.0, 0.0, 60.0, p, {1, 1});
    const PeStep sat = ml_step_phi(truth, 60.0, far, 1, cfg, p);
    double clamp_gap = 0.0;
    for (int i = 0; i < 3; ++i) clamp_gap = std::max(clamp_gap, std::abs(std::abs(sat.clamped[i]) - cfg.grad_clip[i]));
    c.at_most("saturated sums sit exactly on the clamp", clamp_gap, 0.0);

    const std::size_t episodes = 200;
    std::array<double, 3> sum{};
    std::array<double, 3> sq{};
    for (std::size_t m = 1; m <= episodes; ++m) {
        const EpisodeTrace tr = simulate_nonrandomized(grid, 1.0, 0.0, dc.x_hat, p, {17, m});
        const PeStep st = ml_step_phi(truth, dc.x_hat, tr, 1, cfg, p);
        for (int i = 0; i < 3; ++i) {
            sum[i] += st.clamped[i];
            sq[i] += st.clamped[i] * st.clamped[i];
        }
    }
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double mean = sum[i] / episodes;
        const double var = (sq[i] - episodes * mean * mean) / (episodes - 1);
        worst = std::max(worst, std::abs(mean) / std::sqrt(var / episodes));
    }
    c.at_most("PEphi mean update at the truth (standard errors)", worst, 3.0);

    // Immediate activation collapses U^theta to Phi^theta.
    const Theta guess{0.12, 0.3, 16.0};
    const EpisodeTrace now = simulate_randomized(grid, 1.0, 0.0, 0.0, 0.5, guess, p, 1e12, {2, 2});
    const EpisodeTrace plain = simulate_nonrandomized(grid, 1.0, 0.0, 0.5, p, {2, 2});
    const Theta via_u = ml_update_u_activated(guess, 0.5, now, 3, cfg, p);
    const Theta via_phi = ml_update_phi(guess, 0.5, plain, 3, cfg, p);
    double collapse = 0.0;
    for (int i = 0; i < 3; ++i) collapse = std::max(collapse, std::abs(via_u.to_array()[i] - via_phi.to_array()[i]));
    c.at_most("PEu1 with activation at t_0 equals PEphi", collapse, 1e-12);

    Rng rng(99, 0);
    int infeasible = 0;
    for (int k = 0; k < 50; ++k) {
        const Theta start{0.05 + 0.2 * rng.uniform(), 0.2 + 0.4 * rng.uniform(), 11.0 + 10.0 * rng.uniform()};
        const Theta from = clip_full(start, p.beta);
        const double xb = -3.0 + 6.0 * rng.uniform();
        const EpisodeTrace tr = simulate_nonrandomized({10.0, 500}, 1.0, 0.0, xb, p, {3, static_cast<std::uint64_t>(k)});
        if (!is_feasible(ml_update_phi(from, xb, tr, 1, cfg, p), p.beta)) ++infeasible;
    }
    c.at_most("updates preserve feasibility (violations)", infeasible, 0.0);
    return c.take();
}

std::vector<CheckResult> pi_suite(const ModelParams& p) {
    Collector c("pi");
    const DerivedConstants dc = derive_constants(p);
    const Theta truth = true_theta(dc, p);
    const PiConfig cfg;
    c.at_most("x_hat is a fixed point", std::abs(iterate_boundary(truth, dc.x_hat, p.beta, p.c, cfg) - dc.x_hat), 1e-8);
    for (const double offset : {-2.0, 2.0}) {
        double x_bar = dc.x_hat + offset;
        int steps = 0;
        while (std::abs(x_bar - dc.x_hat) >= 1e-4 && steps < 1000) {
            x_bar = iterate_boundary(truth, x_bar, p.beta, p.c, cfg);
            ++steps;
        }
        c.at_most("steps to reach x_hat from x_hat" + std::string(offset < 0 ? "-2" : "+2"), steps, 60.0);
    }
    const QValues q = q_functions(dc.x_hat, truth, dc.x_hat, p.c, p.beta);
    c.at_most("q-functions vanish at x_hat", std::max(std::abs(q.q0), std::abs(q.q1)), 1e-10);
    return c.take();
}

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"closedform", "simulator", "pe", "pi"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const ModelParams& params) {
    if (name == "closedform") return closedform_suite(params);
    if (name == "simulator") return simulator_suite(params);
    if (name == "pe") return pe_suite(params);
    if (name == "pi") return pi_suite(params);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

} // namespace srl::cli
