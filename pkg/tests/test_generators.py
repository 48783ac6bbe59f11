import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from worstcase.errors import GeneratorInconsistencyError, InvalidConfigError
from worstcase.generators import (
    CRSParams,
    MAlphaConfig,
    gen_crs,
    gen_malpha,
    gen_newton2d,
    gen_sd,
    generate,
    predict_iterations,
    termination_tolerance,
)
from worstcase.hermite import check_knot_continuity


@pytest.mark.parametrize("eps, alpha, want", [(0.25, 1.0, 8), (0.05, 0.5, 148), (0.5, 0.0, 4),
                                              (0.05, 0.0, 400), (0.1, 0.0, 100), (0.04, 1.0, 125),
                                              (0.05, 1.0, 90), (0.2, 0.0, 25)])
def test_predict_iterations(eps, alpha, want):
    assert predict_iterations(eps, alpha) == want


@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0))
def test_predict_iterations_is_the_ceiling(eps, alpha):
    k = predict_iterations(eps, alpha)
    val = eps ** (-(2 + alpha) / (1 + alpha))
    assert k - 1 < val * (1 + 1e-9) and val <= k * (1 + 1e-9)


def test_malpha_closed_form_case():
    obj, gt = gen_malpha(MAlphaConfig(0.25, 1.0))
    assert gt.k_target == 8
    assert (gt.f[0], gt.g[0], gt.H[0], gt.s[0]) == (1.0, -0.5, 2.0, 0.25)
    assert gt.f[8] == pytest.approx(0.5, abs=1e-15)
    assert gt.g[8] == pytest.approx(-0.25, abs=1e-15)
    assert len(obj.segments) == 8 + 2


def test_figure_preset_count():
    obj, gt = gen_malpha(MAlphaConfig(0.05, 0.5, lambda_rule="figure"))
    assert gt.k_target == 148
    assert len(obj.segments) == 150
    a = 0.5
    np.testing.assert_allclose(gt.lam, np.abs(gt.g[:-1]) ** (a / (1 + a)) / 10, rtol=1e-15)


def test_theta_at_upper_bound_accepted():
    _, gt = gen_malpha(MAlphaConfig(0.25, 1.0, kappa_rg=0.5, kappa_lambda=2.0, theta_rule="const:1.5"))
    assert np.all(gt.theta == 1.5)
    np.testing.assert_allclose(np.abs(gt.r), 0.5 * np.abs(gt.g[:-1]), rtol=1e-12)


def test_inadmissible_rules_fail_hard():
    with pytest.raises(GeneratorInconsistencyError):
        gen_malpha(MAlphaConfig(0.25, 1.0, theta_rule="const:1.2"))
    with pytest.raises(GeneratorInconsistencyError):
        gen_malpha(MAlphaConfig(0.25, 1.0, lambda_rule="const:100"))
    with pytest.raises(InvalidConfigError):
        MAlphaConfig(0.25, 1.0, lambda_rule="bogus")


@pytest.mark.parametrize("cfg", [
    MAlphaConfig(0.1, 1.0),
    MAlphaConfig(0.1, 0.5, lambda_rule="figure"),
    MAlphaConfig(0.1, 0.0),
    MAlphaConfig(0.1, 1.0, lambda_rule="reg:1"),
    MAlphaConfig(0.1, 0.5, kappa_lambda=3.0, lambda_rule="gqt:3"),
])
def test_malpha_invariants(cfg):
    obj, gt = gen_malpha(cfg)
    K = gt.k_target
    # knot data reproduced by the objective
    for k in range(K + 1):
        assert obj.value(gt.x[k]) == pytest.approx(gt.f[k], rel=1e-10)
        assert obj.gradient(gt.x[k]) == pytest.approx(gt.g[k], rel=1e-10)
        assert obj.hessian(gt.x[k]) == pytest.approx(gt.H[k], rel=1e-10)
    assert np.all(np.diff(gt.f) < 0) and np.all(np.diff(np.abs(gt.g)) < 0) and np.all(np.diff(gt.H) < 0)
    tol = termination_tolerance("malpha", cfg.eps)
    assert abs(gt.g[K]) <= tol * (1 + 1e-9)
    assert np.all(np.abs(gt.g[:K]) > tol)
    assert check_knot_continuity(obj).passed
    bound = 1.0 / ((1 + cfg.kappa_rg) ** 2 * cfg.kappa_lambda)
    assert np.all(gt.decrease_ratios() >= bound)


def test_newton2d_structure():
    obj, (tx, ty) = gen_newton2d(0.1)
    assert obj.dim == 2 and obj.partner is not None
    assert tx.k_target == ty.k_target == 100
    assert (ty.f[0], ty.g[0], ty.H[0], ty.s[0]) == (1.0, pytest.approx(-0.02), pytest.approx(0.04), 0.5)
    g = np.hypot(tx.g[-1], ty.g[-1])
    assert g == pytest.approx(0.1 * math.sqrt(1.01), rel=1e-12)
    _, ref = gen_malpha(MAlphaConfig(0.1, 0.0))
    np.testing.assert_array_equal(tx.x, ref.x)
    np.testing.assert_array_equal(tx.f, ref.f)


def test_newton2d_step_intervals():
    eps, krg = 0.1, 0.2
    _, (tx, ty) = gen_newton2d(eps, nu_rule="const:1.2", kappa_rg=krg)
    # s_k = theta eps / (2 f_k) with f_k in [1/2, 1]; the same for s^u_k with eps -> 1
    assert np.all(tx.s >= eps * (1 - krg) / 2) and np.all(tx.s <= eps * (1 + krg) * (1 + 1e-12))
    assert np.all(ty.s >= (1 - krg) / 2) and np.all(ty.s <= (1 + krg) * (1 + 1e-12))
    # the looser upper bounds hold as well
    assert np.all(tx.s <= 2 * eps * (1 + krg)) and np.all(ty.s <= 2 * (1 + krg))


def test_newton2d_k_target_small():
    _, (tx, _) = gen_newton2d(0.5)
    assert tx.k_target == 4


def test_sd_family():
    obj, gt = gen_sd(0.1)
    assert gt.k_target == 100
    assert gt.extra["mu"][0] == 0.25 and gt.s[0] == pytest.approx(0.05)
    # next value on the Goldstein midline
    mid = gt.f[:-1] + 0.5 * gt.g[:-1] * gt.s
    np.testing.assert_allclose(gt.f[1:], mid, rtol=1e-14)
    assert np.all((gt.extra["mu"] >= 0.25) & (gt.extra["mu"] <= 1.0))
    assert gen_sd(0.05)[1].k_target == 400


def test_crs_family():
    _, gt = gen_crs(0.25, 1.0, 0.0, 0.5)
    assert gt.k_target == 8
    assert gt.extra["rho"][0] == pytest.approx(4.0)
    _, gt = gen_crs(0.04, 1.0, 0.1, 0.3)
    assert gt.k_target == 125
    assert np.all(gt.extra["rho"] >= 0.3)
    with pytest.raises(InvalidConfigError):
        gen_crs(0.25, 1.0, 0.0, 0.6)
    assert CRSParams(1.0, 0.0, 0.5).eta_condition


def test_generate_dispatch_and_csv(tmp_path):
    obj, gt = generate("sd", 0.2)
    gt.write_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "k,x,f,g,H,lambda,theta,s"
    assert len(lines) == gt.k_target + 2
    assert lines[-1].endswith(",,,")
    with pytest.raises(InvalidConfigError):
        generate("nope", 0.1)
