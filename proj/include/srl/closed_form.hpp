#pragma once

// Ground-truth analytic layer for the irreversible-reinsurance model:
//   dX = mu dt + sigma dB - d(xi),  cost  E[ int e^{-beta t} e^{aX} dt + int e^{-beta t} c d(xi) ]
// with entropy-regularized randomized activation at temperature lambda.
//
// Every function here is pure and thread-safe.

namespace srl {

/// True environment coefficients plus the exploration temperature.
struct ModelParams {
    double mu = 0.25;
    double sigma = 1.0;
    double a = 0.1;
    double c = 1.0;
    double beta = 0.1;
    double lambda = 0.5;

    /// beta - mu a - sigma^2 a^2 / 2; must be positive.
    [[nodiscard]] double discount_margin() const { return beta - mu * a - 0.5 * sigma * sigma * a * a; }

    bool operator==(const ModelParams&) const = default;
};

/// Throws std::invalid_argument when a coefficient is out of range or the
/// discount rate does not dominate the growth of the running cost.
void validate(const ModelParams& params);

/// Constants of the inner free-boundary solution.
struct DerivedConstants {
    double b = 0.0;      // positive root of sigma^2 r^2/2 + mu r - beta
    double l = 0.0;      // negative root of the same polynomial
    double x_hat = 0.0;  // free boundary; waiting region is x < x_hat
    double c_a = 0.0;    // particular-solution coefficient
    double c_b = 0.0;    // homogeneous coefficient (negative)
};

DerivedConstants derive_constants(const ModelParams& params);

/// Value and first two x-derivatives.
struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// ---------------------------------------------------------------------------
// Inner problem
// ---------------------------------------------------------------------------

/// Optimal inner value Phi: exponential branch below x_hat, linear above.
double phi(double x, const DerivedConstants& dc, const ModelParams& params);

/// Phi with analytic derivatives, branch chosen by x (x >= x_hat is linear).
Jet phi_jet(double x, const DerivedConstants& dc, const ModelParams& params);

/// The exponential expression C_a e^{ax} + C_b e^{bx} evaluated at any x.
/// At x_hat this gives the left-sided derivatives.
Jet phi_exponential_branch(double x, const DerivedConstants& dc, const ModelParams& params);

struct ViResidual {
    double pde_res = 0.0;   // e^{ax} - beta Phi + mu Phi' + sigma^2 Phi''/2
    double grad_res = 0.0;  // c - Phi'
};

ViResidual vi_residual(double x, const DerivedConstants& dc, const ModelParams& params);

/// Psi(p, q) = C_a e^{ap} + e^{-beta q} E[Phi(Y) - C_a e^{aY}],  Y ~ N(p + mu q, sigma^2 q).
/// Closed form via truncated Gaussian moments; Psi(p, 0) = Phi(p).
double psi(double p, double q, const DerivedConstants& dc, const ModelParams& params);

/// Same quantity by adaptive quadrature over the Gaussian kernel. Slow;
/// kept as an independent route for cross-validation.
double psi_by_quadrature(double p, double q, const DerivedConstants& dc, const ModelParams& params);

/// d Psi / d q at q = 0, which equals the PDE residual of Phi at p.
double psi_dq_at_zero(double p, const DerivedConstants& dc, const ModelParams& params);

// ---------------------------------------------------------------------------
// Outer (activation) problem
// ---------------------------------------------------------------------------

/// Entropy E(z) = z - z ln z on [0, 1], with E(0) = 0.
double entropy(double z);

/// Equilibrium activation boundary Gamma(x) = exp(-(beta/lambda) Phi(x)).
double gamma(double x, const DerivedConstants& dc, const ModelParams& params);

/// Inverse of gamma on (0, 1): bracket expansion from [-50, 50] then bisection.
double gamma_inv(double z, const DerivedConstants& dc, const ModelParams& params);

/// C^l(p, q, z) = int_z^1 [(lambda/beta) e^{-beta q} ln z' + Psi(p,q)] e^{-l Gamma^{-1}(z')} dz'.
/// Integrates in z' for z >= 1e-4 and in the state variable below that.
double c_l(double p, double q, double z, const DerivedConstants& dc, const ModelParams& params);

/// C^l integrated directly in the level variable z'.
double c_l_by_level(double p, double q, double z, const DerivedConstants& dc, const ModelParams& params);

/// C^l(p, q, Gamma(x_upper)) * exp(l * x_scale), integrated in the state
/// variable x' = Gamma^{-1}(z') over (-inf, x_upper]. Scaling inside the
/// integrand keeps the product finite when C^l alone would overflow.
double c_l_by_state(double p, double q, double x_upper, double x_scale, const DerivedConstants& dc,
                    const ModelParams& params);

/// Equilibrium outer value V(x, z) (stationary in t).
double outer_value_v(double x, double z, const DerivedConstants& dc, const ModelParams& params);

/// Analytic dV/dz.
double outer_value_v_dz(double x, double z, const DerivedConstants& dc, const ModelParams& params);

/// Auxiliary family f^{p,s}(x, t, z) with q = t - s.
double outer_value_f(double p, double q, double x, double z, const DerivedConstants& dc,
                     const ModelParams& params);

/// F(z) = -lambda E(z) + lambda E(Gamma(x)) - Psi_q(x,0) (z - Gamma(x)); the
/// equilibrium requires F >= 0 on z <= Gamma(x).
double outer_activation_gap(double x, double z, const DerivedConstants& dc, const ModelParams& params);

} // namespace srl
