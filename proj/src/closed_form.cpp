#include "srl/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "srl/errors.hpp"
#include "srl/gaussian_moments.hpp"
#include "srl/normal.hpp"

namespace srl {

namespace {

constexpr double kQuadAbsTol = 1e-10;
constexpr double kQuadRelTol = 1e-10;
constexpr unsigned kQuadMaxDepth = 20;
constexpr double kLevelRouteFloor = 1e-4;

template <class F>
double integrate(F&& f, double lo, double hi, const char* what) {
    double err = 0.0;
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, lo, hi, kQuadMaxDepth, 1e-12, &err, &l1);
    if (!std::isfinite(v) || err > std::max(kQuadAbsTol, kQuadRelTol * l1)) {
        std::ostringstream os;
        os << what << ": quadrature did not converge on [" << lo << ", " << hi << "], error estimate " << err;
        throw NumericError(os.str());
    }
    return v;
}

void require_q(double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be finite and nonnegative");
}

void require_level(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("level z must lie in [0, 1]");
}

double phi_at_boundary(const DerivedConstants& dc, const ModelParams& p) {
    return dc.c_a * std::exp(p.a * dc.x_hat) + dc.c_b * std::exp(dc.b * dc.x_hat);
}

} // namespace

void validate(const ModelParams& p) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
    };
    if (!std::isfinite(p.mu)) throw std::invalid_argument("mu must be finite");
    positive(p.sigma, "sigma");
    positive(p.a, "a");
    positive(p.c, "c");
    positive(p.beta, "beta");
    positive(p.lambda, "lambda");
    if (!(p.discount_margin() > 0.0))
        throw std::invalid_argument("beta must exceed mu*a + sigma^2*a^2/2");
}

DerivedConstants derive_constants(const ModelParams& p) {
    validate(p);
    const double s2 = p.sigma * p.sigma;
    const double disc = std::sqrt(p.mu * p.mu + 2.0 * p.beta * s2);
    DerivedConstants dc;
    dc.b = (disc - p.mu) / s2;
    dc.l = (-disc - p.mu) / s2;
    const double margin = p.discount_margin();
    dc.c_a = 1.0 / margin;
    dc.x_hat = std::log(dc.b * p.c * margin / (dc.b * p.a - p.a * p.a)) / p.a;
    dc.c_b = -(p.a * p.a) / (dc.b * dc.b) * dc.c_a * std::exp((p.a - dc.b) * dc.x_hat);
    return dc;
}

Jet phi_exponential_branch(double x, const DerivedConstants& dc, const ModelParams& p) {
    const double ea = dc.c_a * std::exp(p.a * x);
    const double eb = dc.c_b * std::exp(dc.b * x);
    return {ea + eb, p.a * ea + dc.b * eb, p.a * p.a * ea + dc.b * dc.b * eb};
}

Jet phi_jet(double x, const DerivedConstants& dc, const ModelParams& p) {
    if (x < dc.x_hat) return phi_exponential_branch(x, dc, p);
    return {p.c * (x - dc.x_hat) + phi_at_boundary(dc, p), p.c, 0.0};
}

double phi(double x, const DerivedConstants& dc, const ModelParams& p) { return phi_jet(x, dc, p).value; }

ViResidual vi_residual(double x, const DerivedConstants& dc, const ModelParams& p) {
    const Jet j = phi_jet(x, dc, p);
    ViResidual r;
    r.pde_res = std::exp(p.a * x) - p.beta * j.value + p.mu * j.d1 + 0.5 * p.sigma * p.sigma * j.d2;
    r.grad_res = p.c - j.d1;
    return r;
}

double psi(double p_, double q, const DerivedConstants& dc, const ModelParams& p) {
    require_q(q);
    if (q == 0.0) return phi(p_, dc, p);
    ThresholdProfile<double> g{};
    g.threshold = dc.x_hat;
    g.lower_coef = dc.c_b * std::exp(dc.b * dc.x_hat);
    g.lower_rate = dc.b;
    g.slope = p.c;
    g.level = phi_at_boundary(dc, p);
    g.upper_coef = dc.c_a;
    g.upper_rate = p.a;
    const double mean = p_ + p.mu * q;
    const double sd = p.sigma * std::sqrt(q);
    return dc.c_a * std::exp(p.a * p_) + std::exp(-p.beta * q) * threshold_profile_expectation(g, mean, sd);
}

double psi_by_quadrature(double p_, double q, const DerivedConstants& dc, const ModelParams& p) {
    require_q(q);
    if (q == 0.0) return phi(p_, dc, p);
    const double mean = p_ + p.mu * q;
    const double sd = p.sigma * std::sqrt(q);
    auto integrand = [&](double t) {
        const double density = normal::pdf(t);
        if (density == 0.0) return 0.0;
        const double y = mean + sd * t;
        return phi(y, dc, p) * density - dc.c_a * std::exp(p.a * y + normal::log_pdf(t));
    };
    const double kink = (dc.x_hat - mean) / sd;
    const double inf = std::numeric_limits<double>::infinity();
    const double e = integrate(integrand, -inf, kink, "psi") + integrate(integrand, kink, inf, "psi");
    return dc.c_a * std::exp(p.a * p_) + std::exp(-p.beta * q) * e;
}

double psi_dq_at_zero(double p_, const DerivedConstants& dc, const ModelParams& p) {
    // generator of g = Phi - C_a e^{a.} with killing rate beta
    const Jet j = phi_jet(p_, dc, p);
    const double u = dc.c_a * std::exp(p.a * p_);
    const double g0 = j.value - u;
    const double g1 = j.d1 - p.a * u;
    const double g2 = j.d2 - p.a * p.a * u;
    return -p.beta * g0 + p.mu * g1 + 0.5 * p.sigma * p.sigma * g2;
}

double entropy(double z) {
    require_level(z);
    if (z == 0.0) return 0.0;
    return z - z * std::log(z);
}

double gamma(double x, const DerivedConstants& dc, const ModelParams& p) {
    return std::exp(-(p.beta / p.lambda) * phi(x, dc, p));
}

double gamma_inv(double z, const DerivedConstants& dc, const ModelParams& p) {
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("gamma_inv requires 0 < z < 1");
    const double target = -(p.lambda / p.beta) * std::log(z);
    double lo = -50.0;
    double hi = 50.0;
    double width = 100.0;
    for (int i = 0; phi(lo, dc, p) > target; ++i) {
        if (i > 60) throw NumericError("gamma_inv: lower bracket expansion failed");
        lo -= width;
        width *= 2.0;
    }
    width = 100.0;
    for (int i = 0; phi(hi, dc, p) < target; ++i) {
        if (i > 60) throw NumericError("gamma_inv: upper bracket expansion failed");
        hi += width;
        width *= 2.0;
    }
    for (int i = 0; i < 80 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid, dc, p) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double c_l_by_level(double p_, double q, double z, const DerivedConstants& dc, const ModelParams& p) {
    require_q(q);
    require_level(z);
    if (z == 1.0) return 0.0;
    if (z == 0.0) throw NumericError("C^l diverges at z = 0");
    const double w = (p.lambda / p.beta) * std::exp(-p.beta * q);
    const double psi_v = psi(p_, q, dc, p);
    // integrate in u = ln z' so the z'^{-|l| lambda/beta} growth near 0 becomes exponential
    auto integrand = [&](double u) {
        const double zp = std::exp(u);
        if (zp >= 1.0) return 0.0;
        return (w * u + psi_v) * std::exp(-dc.l * gamma_inv(zp, dc, p)) * zp;
    };
    const double lo = std::log(z);
    const double kink = -(p.beta / p.lambda) * phi_at_boundary(dc, p);
    if (lo >= kink) return integrate(integrand, lo, 0.0, "c_l");
    return integrate(integrand, lo, kink, "c_l") + integrate(integrand, kink, 0.0, "c_l");
}

double c_l_by_state(double p_, double q, double x_upper, double x_scale, const DerivedConstants& dc,
                    const ModelParams& p) {
    require_q(q);
    const double decay = std::exp(-p.beta * q);
    const double psi_v = psi(p_, q, dc, p);
    const double rate = p.beta / p.lambda;
    auto integrand = [&](double xp) {
        const Jet j = phi_jet(xp, dc, p);
        const double dz = rate * j.d1 * std::exp(-rate * j.value);
        return (psi_v - decay * j.value) * std::exp(-dc.l * (xp - x_scale)) * dz;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const double split = std::min(dc.x_hat, x_upper);
    double v = integrate(integrand, -inf, split, "c_l");
    if (x_upper > split) v += integrate(integrand, split, x_upper, "c_l");
    return v;
}

double c_l(double p_, double q, double z, const DerivedConstants& dc, const ModelParams& p) {
    require_q(q);
    require_level(z);
    if (z == 1.0) return 0.0;
    if (z == 0.0) throw NumericError("C^l diverges at z = 0");
    if (z >= kLevelRouteFloor) return c_l_by_level(p_, q, z, dc, p);
    return c_l_by_state(p_, q, gamma_inv(z, dc, p), 0.0, dc, p);
}

double outer_value_f(double p_, double q, double x, double z, const DerivedConstants& dc,
                     const ModelParams& p) {
    require_q(q);
    require_level(z);
    const double w = (p.lambda / p.beta) * std::exp(-p.beta * q);
    const double g = gamma(x, dc, p);
    if (z > g) {
        const double tail = z < 1.0 ? c_l_by_state(p_, q, gamma_inv(z, dc, p), x, dc, p) : 0.0;
        return -w * entropy(z) + tail;
    }
    return -psi(p_, q, dc, p) * (z - g) - w * entropy(g) + c_l_by_state(p_, q, x, x, dc, p);
}

double outer_value_v(double x, double z, const DerivedConstants& dc, const ModelParams& p) {
    require_level(z);
    const double w = p.lambda / p.beta;
    const double g = gamma(x, dc, p);
    if (z > g) {
        const double tail = z < 1.0 ? c_l_by_state(x, 0.0, gamma_inv(z, dc, p), x, dc, p) : 0.0;
        return -w * entropy(z) + tail;
    }
    return -phi(x, dc, p) * (z - g) - w * entropy(g) + c_l_by_state(x, 0.0, x, x, dc, p);
}

double outer_value_v_dz(double x, double z, const DerivedConstants& dc, const ModelParams& p) {
    require_level(z);
    const double g = gamma(x, dc, p);
    const double ph = phi(x, dc, p);
    if (z <= g) return -ph;
    if (z == 1.0) return 0.0;
    const double w = p.lambda / p.beta;
    const double lz = w * std::log(z);
    return lz - (lz + ph) * std::exp(dc.l * (x - gamma_inv(z, dc, p)));
}

double outer_activation_gap(double x, double z, const DerivedConstants& dc, const ModelParams& p) {
    require_level(z);
    const double g = gamma(x, dc, p);
    return -p.lambda * entropy(z) + p.lambda * entropy(g) - psi_dq_at_zero(x, dc, p) * (z - g);
}

} // namespace srl
