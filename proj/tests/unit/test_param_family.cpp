#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "srl/param_family.hpp"
#include "srl/rng.hpp"

using namespace srl;

namespace {

const ModelParams kParams{};
const DerivedConstants kDc = derive_constants(kParams);
const Theta kTruth = true_theta(kDc, kParams);
const Theta kGuess{0.12, 0.3, 16.0};

void check_grad_close(const Grad3& got, const Grad3& want, double tol) {
    for (int i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(std::abs(got[i] - want[i]) <= tol * std::max(1.0, std::abs(want[i])));
    }
}

Theta random_feasible(Rng& rng, double beta) {
    const double t1 = 0.03 + 0.2 * rng.uniform();
    const double t3 = 1.0 / beta + 0.5 + 20.0 * rng.uniform();
    const double k = beta / (beta - 1.0 / t3);
    const double lo = std::sqrt(k) * t1;
    const double hi = k * t1;
    return {t1, lo + (0.1 + 0.8 * rng.uniform()) * (hi - lo), t3};
}

} // namespace

TEST_SUITE("param_family") {

TEST_CASE("implied coefficients at the truth") {
    CHECK(kTruth == Theta{kParams.a, kDc.b, kDc.c_a});
    CHECK(std::abs(mu_of_theta(kTruth, kParams.beta) - kParams.mu) < 1e-10);
    CHECK(std::abs(sigma_of_theta(kTruth, kParams.beta) - kParams.sigma) < 1e-10);
}

TEST_CASE("implied coefficients roundtrip for random models") {
    Rng rng(7, 0);
    for (int i = 0; i < 100; ++i) {
        ModelParams p;
        p.mu = 0.05 + 0.5 * rng.uniform();
        p.sigma = 0.3 + 1.5 * rng.uniform();
        p.a = 0.02 + 0.1 * rng.uniform();
        p.beta = p.mu * p.a + 0.5 * p.sigma * p.sigma * p.a * p.a + 0.01 + 0.2 * rng.uniform();
        const Theta t = true_theta(derive_constants(p), p);
        CAPTURE(i);
        CHECK(std::abs(mu_of_theta(t, p.beta) - p.mu) < 1e-10);
        CHECK(std::abs(sigma_of_theta(t, p.beta) - p.sigma) < 1e-10);
    }
}

TEST_CASE("implied coefficients at the theta2 clip bounds") {
    const double k = theta2_ratio(kGuess, kParams.beta);
    Theta lo = kGuess;
    lo.theta2 = std::sqrt(k) * kGuess.theta1 + 1e-9;
    CHECK(std::abs(mu_of_theta(lo, kParams.beta)) < 1e-6);
    Theta hi = kGuess;
    hi.theta2 = k * kGuess.theta1 - 1e-9;
    CHECK(sigma_of_theta(hi, kParams.beta) < 1e-3);
    CHECK(sigma_of_theta(hi, kParams.beta) > 0.0);
    const Theta scaled{2 * kGuess.theta1, 2 * kGuess.theta2, kGuess.theta3};
    CHECK(mu_of_theta(scaled, kParams.beta) != doctest::Approx(mu_of_theta(kGuess, kParams.beta)));
}

TEST_CASE("coefficients at the fixed point reproduce the closed form") {
    const ThetaCoeffs co = coeffs_of(kTruth, kDc.x_hat, kParams.c);
    CHECK(co.c_b == doctest::Approx(kDc.c_b).epsilon(1e-12));
    CHECK(co.c_v == doctest::Approx(phi(kDc.x_hat, kDc, kParams)).epsilon(1e-12));
}

TEST_CASE("Phi^theta realises Phi and U^theta realises Psi at the fixed point") {
    for (int i = 0; i < 200; ++i) {
        const double x = -40.0 + 0.25 * i;
        CHECK(std::abs(phi_theta(x, kTruth, kDc.x_hat, kParams.c) - phi(x, kDc, kParams)) < 1e-10);
    }
    for (double q : {0.1, 1.0, 7.0}) {
        for (int i = 0; i < 40; ++i) {
            const double x = -8.0 + 0.3 * i;
            const double want = psi(x, q, kDc, kParams);
            CHECK(std::abs(u_theta(x, 2.0, 2.0 + q, kTruth, kDc.x_hat, kParams.c, kParams.beta) - want) < 1e-8);
        }
    }
}

TEST_CASE("Phi^theta is C1 at x_bar with slope c above") {
    Rng rng(3, 0);
    for (int i = 0; i < 25; ++i) {
        const Theta t = random_feasible(rng, kParams.beta);
        const double xb = -4.0 + 8.0 * rng.uniform();
        const double h = 1e-6;
        CHECK(phi_theta(xb - 1e-13, t, xb, kParams.c) == doctest::Approx(phi_theta(xb + 1e-13, t, xb, kParams.c)));
        const double fd = (phi_theta(xb + h, t, xb, kParams.c) - phi_theta(xb - h, t, xb, kParams.c)) / (2 * h);
        CHECK(std::abs(fd - kParams.c) < 1e-6);
        CHECK(phi_theta_jet(xb + 5.0, t, xb, kParams.c).d1 == kParams.c);
    }
}

TEST_CASE("U^theta collapses to Phi^theta at r = t") {
    for (double x : {-2.0, 0.0, 1.0, 4.0}) {
        CHECK(u_theta(x, 3.0, 3.0, kGuess, 0.0, kParams.c, kParams.beta) == phi_theta(x, kGuess, 0.0, kParams.c));
    }
}

TEST_CASE("U^theta against a direct simulation of its defining expectation") {
    const double x = 0.5;
    const double xb = 0.0;
    const double m = x + mu_of_theta(kGuess, kParams.beta);
    const double sd = sigma_of_theta(kGuess, kParams.beta);
    Rng rng(1234, 0);
    const int n = 1000000;
    double s = 0.0;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = m + sd * rng.normal();
        const double v = phi_theta(y, kGuess, xb, kParams.c) - u_inf_theta(y, kGuess);
        s += v;
        ss += v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    const double mc = u_inf_theta(x, kGuess) + std::exp(-kParams.beta) * mean;
    const double got = u_theta(x, 0.0, 1.0, kGuess, xb, kParams.c, kParams.beta);
    CHECK(std::abs(got - mc) < 3.0 * std::exp(-kParams.beta) * se);
}

TEST_CASE("U^theta approaches U^inf as the boundary recedes") {
    for (double x : {-3.0, 0.0, 2.0}) {
        CHECK(std::abs(u_theta(x, 0.0, 1.0, kGuess, 200.0, kParams.c, kParams.beta) - u_inf_theta(x, kGuess)) < 1e-6);
    }
    CHECK(u_inf_theta(0.0, kGuess) == kGuess.theta3);
}

TEST_CASE("forward-mode gradients agree with finite differences") {
    const Grad3 g = grad_theta_u_inf(0.7, kGuess);
    CHECK(g[0] == doctest::Approx(kGuess.theta3 * 0.7 * std::exp(kGuess.theta1 * 0.7)));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == doctest::Approx(std::exp(kGuess.theta1 * 0.7)));

    Rng rng(11, 0);
    for (int i = 0; i < 20; ++i) {
        const Theta t = random_feasible(rng, kParams.beta);
        const double xb = -3.0 + 6.0 * rng.uniform();
        const double x = xb - 4.0 + 6.0 * rng.uniform();
        const double r = 0.05 + 3.0 * rng.uniform();
        CAPTURE(i);
        check_grad_close(grad_theta_phi(x, t, xb, kParams.c), grad_theta_phi_fd(x, t, xb, kParams.c), 1e-5);
        check_grad_close(grad_theta_u(x, 0.0, r, t, xb, kParams.c, kParams.beta),
                         grad_theta_u_fd(x, 0.0, r, t, xb, kParams.c, kParams.beta), 1e-5);
        check_grad_close(grad_theta_u_inf(x, t), grad_theta_u_inf_fd(x, t), 1e-5);
    }
}

TEST_CASE("directional derivative matches a symmetric difference") {
    const Grad3 v{0.3, -0.5, 0.8};
    const double eps = 1e-6;
    Theta up = kGuess;
    Theta down = kGuess;
    up.theta1 += eps * v[0];
    up.theta2 += eps * v[1];
    up.theta3 += eps * v[2];
    down.theta1 -= eps * v[0];
    down.theta2 -= eps * v[1];
    down.theta3 -= eps * v[2];
    for (double x : {-2.0, 0.3, 1.5}) {
        const Grad3 g = grad_theta_u(x, 0.0, 2.0, kGuess, 0.5, kParams.c, kParams.beta);
        const double dir = g[0] * v[0] + g[1] * v[1] + g[2] * v[2];
        const double fd = (u_theta(x, 0.0, 2.0, up, 0.5, kParams.c, kParams.beta) -
                           u_theta(x, 0.0, 2.0, down, 0.5, kParams.c, kParams.beta)) /
                          (2 * eps);
        CHECK(fd == doctest::Approx(dir).epsilon(1e-5));
    }
}

TEST_CASE("value and gradient of u_theta_vg are consistent with the scalar routes") {
    const ValueGrad vg = u_theta_vg(0.7, 0.0, 2.0, kGuess, 0.0, kParams.c, kParams.beta);
    CHECK(vg.value == doctest::Approx(u_theta(0.7, 0.0, 2.0, kGuess, 0.0, kParams.c, kParams.beta)).epsilon(1e-14));
    check_grad_close(vg.grad, grad_theta_u(0.7, 0.0, 2.0, kGuess, 0.0, kParams.c, kParams.beta), 1e-14);
}

TEST_CASE("clip_full") {
    CHECK(clip_full(kGuess, kParams.beta) == kGuess);
    Theta t = kGuess;
    t.theta3 = 1.0 / kParams.beta - 5.0;
    CHECK(clip_full(t, kParams.beta).theta3 == doctest::Approx(1.0 / kParams.beta + kDefaultDeltaBc));
    t = kGuess;
    t.theta2 = 0.0;
    const double k = theta2_ratio(kGuess, kParams.beta);
    CHECK(clip_full(t, kParams.beta).theta2 == doctest::Approx(std::sqrt(k) * kGuess.theta1 + kDefaultDeltaBc));
    t.theta1 = -1.0;
    CHECK(clip_full(t, kParams.beta).theta1 == kDefaultDeltaBc);
}

TEST_CASE("clip_full is a feasible idempotent projection") {
    Rng rng(5, 0);
    for (int i = 0; i < 500; ++i) {
        const Theta raw{-0.1 + 0.5 * rng.uniform(), -0.5 + 1.5 * rng.uniform(), -5.0 + 40.0 * rng.uniform()};
        const Theta once = clip_full(raw, kParams.beta);
        CAPTURE(i);
        CHECK(is_feasible(once, kParams.beta));
        CHECK(clip_full(once, kParams.beta) == once);
        CHECK(mu_of_theta(once, kParams.beta) > 0.0);
        CHECK(sigma_of_theta(once, kParams.beta) > 0.0);
        const double mu = mu_of_theta(once, kParams.beta);
        const double sd = sigma_of_theta(once, kParams.beta);
        CHECK(kParams.beta - mu * once.theta1 - 0.5 * sd * sd * once.theta1 * once.theta1 > 0.0);
    }
}

TEST_CASE("clip_uncontrolled midpoint rule") {
    const Theta out = clip_uncontrolled({0.1, 99.0, 14.2857}, kParams.beta);
    const double k = 0.1 / (0.1 - 1.0 / 14.2857);
    CHECK(out.theta2 == doctest::Approx(0.5 * (std::sqrt(k) + k) * 0.1).epsilon(1e-12));
    CHECK(out.theta2 == doctest::Approx(0.2580).epsilon(1e-3));
    CHECK(clip_uncontrolled(out, kParams.beta) == out);
    Rng rng(9, 0);
    for (int i = 0; i < 200; ++i) {
        const Theta raw{-0.1 + 0.5 * rng.uniform(), rng.uniform(), -5.0 + 40.0 * rng.uniform()};
        CHECK(is_feasible(clip_uncontrolled(raw, kParams.beta), kParams.beta));
    }
}

}  // TEST_SUITE
