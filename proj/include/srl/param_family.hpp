#pragma once

// The learnable critic. theta = (theta1, theta2, theta3) plays the role of
// (a, b, C_a); x_bar is the current boundary of the inner waiting region.

#include <array>

#include "srl/closed_form.hpp"

namespace srl {

struct Theta {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;

    [[nodiscard]] std::array<double, 3> to_array() const { return {theta1, theta2, theta3}; }
    static Theta from_array(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

    bool operator==(const Theta&) const = default;
};

using Grad3 = std::array<double, 3>;

struct ValueGrad {
    double value = 0.0;
    Grad3 grad{};
};

/// The parameter triple realising the true model: (a, b, C_a).
Theta true_theta(const DerivedConstants& dc, const ModelParams& params);

/// beta / (beta - 1/theta3); the feasible theta2 interval is (sqrt(k) theta1, k theta1).
double theta2_ratio(const Theta& theta, double beta);

/// Strict feasibility: theta1 > 0, theta3 > 1/beta, theta2 inside its interval.
bool is_feasible(const Theta& theta, double beta);

double mu_of_theta(const Theta& theta, double beta);
double sigma_of_theta(const Theta& theta, double beta);

struct ThetaCoeffs {
    double c_b = 0.0;
    double c_v = 0.0;
};

ThetaCoeffs coeffs_of(const Theta& theta, double x_bar, double c);

/// Phi^theta(x; x_bar): exponential branch for x <= x_bar, linear with slope c above.
double phi_theta(double x, const Theta& theta, double x_bar, double c);

/// Phi^theta with x-derivatives; at x == x_bar the lower branch is used.
Jet phi_theta_jet(double x, const Theta& theta, double x_bar, double c);

/// U^theta(x, t, r; x_bar). Equals Phi^theta when r - t < 1e-12.
double u_theta(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta);

/// U^{inf,theta}(x) = theta3 e^{theta1 x}.
double u_inf_theta(double x, const Theta& theta);

// Forward-mode theta-gradients (value returned alongside).
ValueGrad phi_theta_vg(double x, const Theta& theta, double x_bar, double c);
ValueGrad u_theta_vg(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta);
ValueGrad u_inf_theta_vg(double x, const Theta& theta);

Grad3 grad_theta_phi(double x, const Theta& theta, double x_bar, double c);
Grad3 grad_theta_u(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta);
Grad3 grad_theta_u_inf(double x, const Theta& theta);

// Central finite differences with step 1e-6 * max(1, |theta_i|).
Grad3 grad_theta_phi_fd(double x, const Theta& theta, double x_bar, double c);
Grad3 grad_theta_u_fd(double x, double t, double r, const Theta& theta, double x_bar, double c, double beta);
Grad3 grad_theta_u_inf_fd(double x, const Theta& theta);

inline constexpr double kDefaultDeltaBc = 0.001;

/// Boundary clipping of all three components. When the theta2 interval is
/// narrower than 2 delta_bc, theta2 is set to the interval midpoint.
Theta clip_full(Theta theta, double beta, double delta_bc = kDefaultDeltaBc);

/// Clips theta1 and theta3, then sets theta2 to the midpoint rule
/// (sqrt(k) + k) theta1 / 2.
Theta clip_uncontrolled(Theta theta, double beta, double delta_bc = kDefaultDeltaBc);

} // namespace srl
