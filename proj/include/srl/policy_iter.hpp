#pragma once

// Boundary improvement for threshold laws: pick the branch by the sign of
// the slope selector at x_bar, find the root of the branch equation, then
// relax toward it.

#include <string>

#include "srl/param_family.hpp"

namespace srl {

struct PiConfig {
    double alpha_pi = 0.5;
    double root_tol = 1e-10;
    double max_bracket = 1024.0;  // largest bracket step, 2^10

    bool operator==(const PiConfig&) const = default;
};

void validate(const PiConfig& cfg);

struct QValues {
    double q0 = 0.0;  // c - Phi^theta'
    double q1 = 0.0;  // e^{theta1 x} - beta Phi^theta + mu(theta) Phi^theta' + sigma(theta)^2 Phi^theta'' / 2
};

/// q-functions of Phi^theta under the dynamics implied by theta. At x == x_bar
/// the lower-branch (left) derivatives are used.
QValues q_functions(double x, const Theta& theta, double x_bar, double c, double beta);

enum class PiBranch {
    extend,  // selector <= 0: root on [x_bar, +inf)
    retract  // selector > 0: root on (-inf, x_bar)
};

/// (theta2 - theta1) theta1 theta3 e^{theta1 x_bar} - c theta2.
double pi_selector(const Theta& theta, double x_bar, double c);

double pi_extend_equation(double x, const Theta& theta, double x_bar, double c, double beta);
double pi_retract_equation(double x, const Theta& theta, double x_bar, double c);

struct PiResult {
    PiBranch branch = PiBranch::extend;
    double raw_root = 0.0;
    double x_bar_next = 0.0;
    bool fallback = false;  // extend branch had no sign change; x_bar kept
};

PiResult iterate_boundary_detail(const Theta& theta, double x_bar, double beta, double c, const PiConfig& cfg);

/// Relaxed boundary update; throws NumericError when the retract branch
/// finds no sign change within the bracket cap.
double iterate_boundary(const Theta& theta, double x_bar, double beta, double c, const PiConfig& cfg);

std::string to_string(PiBranch branch);

} // namespace srl
