#include "srl/policy_iter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srl/errors.hpp"

namespace srl {

void validate(const PiConfig& cfg) {
    if (!(cfg.alpha_pi > 0.0 && cfg.alpha_pi <= 1.0)) throw std::invalid_argument("alpha_pi must lie in (0, 1]");
    if (!(cfg.root_tol > 0.0)) throw std::invalid_argument("root_tol must be positive");
    if (!(cfg.max_bracket >= 1.0)) throw std::invalid_argument("max_bracket must be at least 1");
}

QValues q_functions(double x, const Theta& theta, double x_bar, double c, double beta) {
    const Jet j = phi_theta_jet(x, theta, x_bar, c);
    const double mu = mu_of_theta(theta, beta);
    const double sigma = sigma_of_theta(theta, beta);
    QValues q;
    q.q0 = c - j.d1;
    q.q1 = std::exp(theta.theta1 * x) - beta * j.value + mu * j.d1 + 0.5 * sigma * sigma * j.d2;
    return q;
}

double pi_selector(const Theta& theta, double x_bar, double c) {
    return (theta.theta2 - theta.theta1) * theta.theta1 * theta.theta3 * std::exp(theta.theta1 * x_bar) -
           c * theta.theta2;
}

double pi_extend_equation(double x, const Theta& theta, double x_bar, double c, double beta) {
    const double c_v = coeffs_of(theta, x_bar, c).c_v;
    return std::exp(theta.theta1 * x) - beta * c * (x - x_bar) - beta * c_v + mu_of_theta(theta, beta) * c;
}

double pi_retract_equation(double x, const Theta& theta, double x_bar, double c) {
    const double k = theta.theta1 * theta.theta3;
    const double e2 = std::exp(theta.theta2 * (x - x_bar));
    return c - k * std::exp(theta.theta1 * x) - c * e2 + k * std::exp(theta.theta1 * x_bar) * e2;
}

std::string to_string(PiBranch branch) { return branch == PiBranch::extend ? "extend" : "retract"; }

namespace {

constexpr int kMaxBisection = 200;
constexpr int kNewtonPolish = 20;

struct Fn {
    double value;
    double slope;
};

// Bisection with f(a) > 0 >= f(b) or the reverse, then Newton polish kept
// inside the final bracket.
template <class F>
double solve_bracketed(F&& f, double a, double b, double tol) {
    double fa = f(a).value;
    for (int i = 0; i < kMaxBisection; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double fm = f(mid).value;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a))) break;
    }
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    double x = 0.5 * (a + b);
    Fn fx = f(x);
    for (int i = 0; i < kNewtonPolish && std::abs(fx.value) >= tol * 1e-3; ++i) {
        if (fx.slope == 0.0) break;
        const double next = x - fx.value / fx.slope;
        if (!(next >= lo && next <= hi)) break;
        const Fn fn = f(next);
        if (std::abs(fn.value) >= std::abs(fx.value)) break;
        x = next;
        fx = fn;
    }
    return x;
}

[[noreturn]] void no_sign_change(PiBranch branch, double x_bar, double lo, double hi) {
    std::ostringstream os;
    os.precision(17);
    os << "iterate_boundary: no sign change on the " << to_string(branch) << " branch from x_bar = " << x_bar
       << " within [" << lo << ", " << hi << "]";
    throw NumericError(os.str());
}

} // namespace

PiResult iterate_boundary_detail(const Theta& theta, double x_bar, double beta, double c, const PiConfig& cfg) {
    validate(cfg);
    if (!std::isfinite(x_bar)) throw std::invalid_argument("x_bar must be finite");
    PiResult out;
    const double t1 = theta.theta1;
    const double t2 = theta.theta2;
    const double k = t1 * theta.theta3;

    if (pi_selector(theta, x_bar, c) <= 0.0) {
        out.branch = PiBranch::extend;
        const double base = pi_extend_equation(x_bar, theta, x_bar, c, beta) - std::exp(t1 * x_bar);
        auto f = [&](double x) -> Fn {
            const double e = std::exp(t1 * x);
            return {e - beta * c * (x - x_bar) + base, t1 * e - beta * c};
        };
        const double f0 = f(x_bar).value;
        if (f0 <= 0.0) {
            double hi = x_bar;
            for (double step = 1.0;; step *= 2.0) {
                if (step > cfg.max_bracket) no_sign_change(out.branch, x_bar, x_bar, hi);
                hi = x_bar + step;
                if (f(hi).value > 0.0) break;
            }
            out.raw_root = f0 == 0.0 ? x_bar : solve_bracketed(f, hi, x_bar, cfg.root_tol);
        } else {
            // convex: a root to the right exists iff the minimum is nonpositive
            const double x_min = std::log(beta * c / t1) / t1;
            if (x_min > x_bar && f(x_min).value <= 0.0) {
                out.raw_root = solve_bracketed(f, x_bar, x_min, cfg.root_tol);
            } else {
                out.raw_root = x_bar;
                out.fallback = true;
            }
        }
    } else {
        out.branch = PiBranch::retract;
        const double ebar = std::exp(t1 * x_bar);
        auto f = [&](double x) -> Fn {
            const double e1 = std::exp(t1 * x);
            const double e2 = std::exp(t2 * (x - x_bar));
            return {c - k * e1 - c * e2 + k * ebar * e2, -t1 * k * e1 - t2 * c * e2 + t2 * k * ebar * e2};
        };
        double lo = x_bar;
        for (double step = 1.0;; step *= 2.0) {
            if (step > cfg.max_bracket) no_sign_change(out.branch, x_bar, lo, x_bar);
            lo = x_bar - step;
            if (f(lo).value > 0.0) break;
        }
        out.raw_root = solve_bracketed(f, lo, x_bar, cfg.root_tol);
    }
    out.x_bar_next = x_bar + cfg.alpha_pi * (out.raw_root - x_bar);
    return out;
}

double iterate_boundary(const Theta& theta, double x_bar, double beta, double c, const PiConfig& cfg) {
    return iterate_boundary_detail(theta, x_bar, beta, c, cfg).x_bar_next;
}

} // namespace srl
