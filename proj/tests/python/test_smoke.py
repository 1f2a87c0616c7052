import math

import pytest

import singular_rl as srl

X_HAT = 1.232558273738010171


def test_derived_constants():
    dc = srl.derive_constants()
    assert dc.x_hat == pytest.approx(X_HAT, rel=1e-12)
    assert dc.b == pytest.approx(0.262347538297979919, rel=1e-12)
    assert dc.c_a == pytest.approx(100.0 / 7.0, rel=1e-12)


def test_value_function_and_boundary():
    assert srl.phi(X_HAT) == pytest.approx(13.811737691489899596, rel=1e-10)
    assert srl.psi(0.0, 1.0) == pytest.approx(12.586947773506467713, rel=1e-10)
    assert srl.gamma_inv(srl.gamma(0.7)) == pytest.approx(0.7, abs=1e-8)
    assert srl.entropy(1.0) == 1.0


def test_true_theta_reproduces_phi():
    theta = srl.true_theta()
    for x in (-3.0, 0.0, X_HAT, 4.0):
        assert srl.phi_theta(x, theta, X_HAT) == pytest.approx(srl.phi(x), rel=1e-10)
    assert srl.iterate_boundary(theta, X_HAT) == pytest.approx(X_HAT, abs=1e-8)
    assert srl.linf_error(theta, X_HAT) < 1e-8


def test_simulators():
    tr = srl.simulate_nonrandomized(1.0, X_HAT, T=2.0, N=100, seed=3)
    assert len(tr["x_pre"]) == 100
    assert max(tr["x_pre"][1:]) <= X_HAT + 1e-12
    rt = srl.simulate_randomized(1.0, X_HAT, srl.true_theta(), T=2.0, N=100, seed=3)
    assert all(b >= a for a, b in zip(rt["eta_post"], rt["eta_post"][1:]))


def test_training_log():
    log = srl.train("randomized", M=4, N=200, T=4.0, seed=1)
    assert [r["m"] for r in log] == [1, 2, 3, 4]
    assert all(r["activation_time"] is not None for r in log)
    assert all(math.isfinite(r["x_bar"]) for r in log)
    assert srl.train("benchmark", M=2, N=50, T=1.0)[0]["activation_time"] is None


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        srl.train("greedy", M=1)
    with pytest.raises(ValueError):
        srl.ModelParams(sigma=0.0)
