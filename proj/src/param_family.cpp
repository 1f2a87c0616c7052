#include "srl/param_family.hpp"

#include <algorithm>
#include <cmath>

#include "srl/dual.hpp"
#include "srl/gaussian_moments.hpp"

namespace srl {

namespace {

constexpr double kTinyHorizon = 1e-12;

template <class T>
struct ThetaT {
    T t1, t2, t3;
};

ThetaT<double> lift(const Theta& th) { return {th.theta1, th.theta2, th.theta3}; }

ThetaT<Dual3> lift_dual(const Theta& th) {
    return {Dual3::variable(th.theta1, 0), Dual3::variable(th.theta2, 1), Dual3::variable(th.theta3, 2)};
}

template <class T>
T mu_t(const ThetaT<T>& th, double beta) {
    return (beta * (th.t2 * th.t2 - th.t1 * th.t1) - th.t2 * th.t2 / th.t3) / (th.t1 * th.t2 * (th.t2 - th.t1));
}

template <class T>
T sigma_t(const ThetaT<T>& th, double beta) {
    using std::sqrt;
    return sqrt(2.0 * (th.t2 / th.t3 - beta * (th.t2 - th.t1)) / (th.t1 * th.t2 * (th.t2 - th.t1)));
}

// (c - theta1 theta3 e^{theta1 x_bar}) / theta2, i.e. C_b e^{theta2 x_bar}.
template <class T>
T lower_scale(const ThetaT<T>& th, double x_bar, double c) {
    using std::exp;
    return (c - th.t1 * th.t3 * exp(th.t1 * x_bar)) / th.t2;
}

template <class T>
T c_v_t(const ThetaT<T>& th, double x_bar, double c) {
    using std::exp;
    return (c + (th.t2 - th.t1) * th.t3 * exp(th.t1 * x_bar)) / th.t2;
}

template <class T>
T phi_t(double x, const ThetaT<T>& th, double x_bar, double c) {
    using std::exp;
    if (x <= x_bar) return th.t3 * exp(th.t1 * x) + lower_scale(th, x_bar, c) * exp(th.t2 * (x - x_bar));
    return c * (x - x_bar) + c_v_t(th, x_bar, c);
}

template <class T>
T u_t(double x, double t, double r, const ThetaT<T>& th, double x_bar, double c, double beta) {
    using std::exp;
    using std::sqrt;
    const double q = r - t;
    if (q < kTinyHorizon) return phi_t(x, th, x_bar, c);
    ThresholdProfile<T> g{x_bar, lower_scale(th, x_bar, c), th.t2, c, c_v_t(th, x_bar, c), th.t3, th.t1};
    const T mean = x + mu_t(th, beta) * q;
    const T sd = sigma_t(th, beta) * std::sqrt(q);
    return th.t3 * exp(th.t1 * x) + std::exp(-beta * q) * threshold_profile_expectation(g, mean, sd);
}

ValueGrad unpack(const Dual3& d) { return {d.val, d.grad}; }

template <class F>
Grad3 central_difference(const Theta& theta, F&& f) {
    Grad3 g{};
    const auto base = theta.to_array();
    for (std::size_t i = 0; i < 3; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(base[i]));
        auto up = base;
        auto dn = base;
        up[i] += h;
        dn[i] -= h;
        g[i] = (f(Theta::from_array(up)) - f(Theta::from_array(dn))) / (2.0 * h);
    }
    return g;
}

} // namespace

Theta true_theta(const DerivedConstants& dc, const ModelParams& params) { return {params.a, dc.b, dc.c_a}; }

double theta2_ratio(const Theta& theta, double beta) { return beta / (beta - 1.0 / theta.theta3); }

bool is_feasible(const Theta& theta, double beta) {
    if (!(theta.theta1 > 0.0) || !(theta.theta3 > 1.0 / beta)) return false;
    if (!std::isfinite(theta.theta1) || !std::isfinite(theta.theta2) || !std::isfinite(theta.theta3)) return false;
    const double k = theta2_ratio(theta, beta);
    return theta.theta2 > std::sqrt(k) * theta.theta1 && theta.theta2 < k * theta.theta1;
}

double mu_of_theta(const Theta& theta, double beta) { return mu_t(lift(theta), beta); }

double sigma_of_theta(const Theta& theta, double beta) { return sigma_t(lift(theta), beta); }

ThetaCoeffs coeffs_of(const Theta& theta, double x_bar, double c) {
    const auto th = lift(theta);
    return {lower_scale(th, x_bar, c) / std::exp(theta.theta2 * x_bar), c_v_t(th, x_bar, c)};
}

double phi_theta(double x, const Theta& theta, double x_bar, double c) { return phi_t(x, lift(theta), x_bar, c); }

Jet phi_theta_jet(double x, const Theta& theta, double x_bar, double c) {
    if (x > x_bar) return {phi_theta(x, theta, x_bar, c), c, 0.0};
    const auto th = lift(theta);
    const double ea = theta.theta3 * std::exp(theta.theta1 * x);
    const double eb = lower_scale(th, x_bar, c) * std::exp(theta.theta2 * (x - x_bar));
    const double t1 = theta.theta1;
    const double t2 = theta.theta2;
    return {ea + eb, t1 * ea + t2 * eb, t1 * t1 * ea + t2 * t2 * eb};
}

double u_theta(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta) {
    return u_t(x, t, r, lift(theta), x_bar, c, beta);
}

double u_inf_theta(double x, const Theta& theta) { return theta.theta3 * std::exp(theta.theta1 * x); }

ValueGrad phi_theta_vg(double x, const Theta& theta, double x_bar, double c) {
    return unpack(phi_t(x, lift_dual(theta), x_bar, c));
}

ValueGrad u_theta_vg(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta) {
    return unpack(u_t(x, t, r, lift_dual(theta), x_bar, c, beta));
}

ValueGrad u_inf_theta_vg(double x, const Theta& theta) {
    const double e = std::exp(theta.theta1 * x);
    return {theta.theta3 * e, {theta.theta3 * x * e, 0.0, e}};
}

Grad3 grad_theta_phi(double x, const Theta& theta, double x_bar, double c) {
    return phi_theta_vg(x, theta, x_bar, c).grad;
}

Grad3 grad_theta_u(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta) {
    return u_theta_vg(x, t, r, theta, x_bar, c, beta).grad;
}

Grad3 grad_theta_u_inf(double x, const Theta& theta) { return u_inf_theta_vg(x, theta).grad; }

Grad3 grad_theta_phi_fd(double x, const Theta& theta, double x_bar, double c) {
    return central_difference(theta, [&](const Theta& th) { return phi_theta(x, th, x_bar, c); });
}

Grad3 grad_theta_u_fd(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta) {
    return central_difference(theta, [&](const Theta& th) { return u_theta(x, t, r, th, x_bar, c, beta); });
}

Grad3 grad_theta_u_inf_fd(double x, const Theta& theta) {
    return central_difference(theta, [&](const Theta& th) { return u_inf_theta(x, th); });
}

namespace {

void clip_outer(Theta& theta, double beta, double delta_bc) {
    theta.theta1 = std::max(theta.theta1, delta_bc);
    theta.theta3 = std::max(theta.theta3, 1.0 / beta + delta_bc);
}

} // namespace

Theta clip_full(Theta theta, double beta, double delta_bc) {
    clip_outer(theta, beta, delta_bc);
    const double k = theta2_ratio(theta, beta);
    const double lo = std::sqrt(k) * theta.theta1;
    const double hi = k * theta.theta1;
    if (hi - lo <= 2.0 * delta_bc) {
        theta.theta2 = 0.5 * (lo + hi);
        return theta;
    }
    theta.theta2 = std::min(hi - delta_bc, std::max(theta.theta2, lo + delta_bc));
    return theta;
}

Theta clip_uncontrolled(Theta theta, double beta, double delta_bc) {
    clip_outer(theta, beta, delta_bc);
    const double k = theta2_ratio(theta, beta);
    theta.theta2 = 0.5 * (std::sqrt(k) + k) * theta.theta1;
    return theta;
}

} // namespace srl
