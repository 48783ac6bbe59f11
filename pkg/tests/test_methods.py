import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from worstcase.analysis import matching_setup
from worstcase.errors import InvalidConfigError, MethodInapplicableError
from worstcase.generators import MAlphaConfig, gen_malpha, gen_newton2d, gen_sd
from worstcase.methods import (
    FunctionObjective,
    IterateState,
    MethodConfig,
    goldstein_holds,
    goldstein_search,
    gqt_iterate,
    newton_step,
    read_trace_csv,
    reg_step_bound,
    run,
    rw_direction,
    rw_iterate,
    sd_goldstein_iterate,
    write_trace_csv,
)


def quadratic(h=1.0):
    return FunctionObjective(lambda x: 0.5 * h * x * x, lambda x: h * x, lambda x: h, dim=1)


def test_newton_step_examples():
    np.testing.assert_allclose(newton_step([-0.5], [[2.0]]), [0.25])
    np.testing.assert_allclose(newton_step([-0.02, -0.02], np.diag([0.04, 0.04])), [0.5, 0.5])
    with pytest.raises(MethodInapplicableError):
        newton_step([-0.5], [[-1.0]])


def test_newton_on_indefinite_objective_fails_cleanly():
    obj = FunctionObjective(lambda x: -0.5 * x * x, lambda x: -x, lambda x: -1.0)
    trace = run(MethodConfig("newton", eps=1e-6), obj, [1.0])
    assert trace.termination_reason == "failure"
    assert "positive definite" in trace.message


def test_newton_family_runs():
    _, gt = gen_malpha(MAlphaConfig(0.25, 1.0))
    obj, _ = gen_malpha(MAlphaConfig(0.25, 1.0))
    trace = run(MethodConfig("newton", eps=0.25), obj, [0.0])
    assert trace.termination_index == 8 == trace.evaluations
    assert trace.termination_reason == "gradient-tolerance"
    np.testing.assert_allclose(trace.xs()[:, 0], gt.x, rtol=1e-12)


def test_newton2d_final_gradient():
    obj, _ = gen_newton2d(0.1)
    trace = run(MethodConfig("newton", eps=0.1, alpha=0.0), obj, [0.0, 0.0], tol=0.1 * math.sqrt(1.01))
    assert trace.termination_index == 100
    assert trace.final_gnorm == pytest.approx(0.1 * math.sqrt(1.01), rel=1e-12)


def test_budget_exhaustion_is_not_an_error():
    obj, _ = gen_sd(0.1)
    trace = run(MethodConfig("sd_goldstein", eps=0.1, budget=5), obj, [0.0])
    assert trace.termination_reason == "budget"
    assert trace.termination_index == 5


def test_sd_first_step():
    obj, _ = gen_sd(0.1)
    trace = run(MethodConfig("sd_goldstein", eps=0.1, budget=1), obj, [0.0])
    rec = trace.records[0]
    assert rec.param == pytest.approx(0.25, rel=1e-12)
    assert rec.s[0] == pytest.approx(0.05, rel=1e-12)
    assert rec.f - rec.actual_decrease == pytest.approx(0.995, rel=1e-12)


def test_goldstein_on_quadratic_accepts_unit_step():
    mu, val, _ = goldstein_search(lambda m: 0.5 * (1 - m) ** 2, 0.5, 1.0, 0.9, 0.1)
    assert mu == 1.0 and val == 0.0
    assert goldstein_holds(0.5, 0.0, -1.0, 0.9, 0.1)


def test_sd_zero_gradient():
    state = IterateState.at([0.0], [[1.0]], value=lambda x: 0.0)
    step = sd_goldstein_iterate(state, MethodConfig("sd_goldstein", eps=0.1))
    assert step.failed
    trace = run(MethodConfig("sd_goldstein", eps=0.1), quadratic(), [0.0])
    assert trace.termination_index == 0 and trace.termination_reason == "gradient-tolerance"


def test_rw_examples():
    d, kind = rw_direction([-0.5], [[2.0]], 0.25, 0.5)
    assert kind == "newton" and d[0] == 0.25
    obj, _ = gen_malpha(MAlphaConfig(0.25, 1.0))
    state = IterateState([0.0], 1.0, [-0.5], [[2.0]], value=lambda x: obj.value(x))
    step = rw_iterate(state, MethodConfig("royer_wright", eps=0.25, eps_h=0.5))
    assert step.next_param == 1.0 and step.s[0] == 0.25
    assert step.actual_decrease >= 0.015625 / 6
    with pytest.raises(InvalidConfigError):
        MethodConfig("royer_wright", eps=0.25, eps_h=0.6)


def test_rw_negative_curvature_direction_descends():
    d, kind = rw_direction([0.3, 0.1], [[-2.0, 0.0], [0.0, 1.0]], 0.01, 0.1)
    assert kind == "negative-curvature"
    assert np.linalg.norm(d) == pytest.approx(2.0)
    assert d @ np.array([0.3, 0.1]) <= 0


def test_reg_step_bound_examples():
    assert reg_step_bound([-1.0], [[0.0]], 1.0, 1.0) == pytest.approx(9.0 ** 0.5)
    assert reg_step_bound([-1.0], [[-4.0]], 1.0, 0.0) == math.inf


def test_gqt_residual_sign():
    cfg = MethodConfig("gqt", eps=0.1, kappa_rg=0.2, residual_scale=0.1)
    state = IterateState.at([-0.5], [[2.0]], param=1.0, value=lambda x: 0.0)
    step = gqt_iterate(state, cfg)
    assert step.r @ step.s <= 0
    assert np.linalg.norm(step.r) <= 0.2 * 0.5


def test_trust_region_shrinks_on_failure():
    # a cliff beyond |x| > 0.5 makes long steps fail
    obj = FunctionObjective(lambda x: -x if x < 0.5 else 10.0, lambda x: -1.0 if x < 0.5 else 0.0,
                            lambda x: 0.0)
    trace = run(MethodConfig("trust_region", eps=1e-3, delta0=1.0, budget=3), obj, [0.0])
    assert not trace.records[0].success
    assert trace.records[1].param == 0.5


def test_trace_csv_round_trip(tmp_path):
    obj, _ = gen_newton2d(0.5)
    trace = run(MethodConfig("newton", eps=0.5, alpha=0.0), obj, [0.0, 0.0], tol=0.5 * math.sqrt(1.25))
    path = tmp_path / "t.csv"
    write_trace_csv(trace, path, 2)
    rows = read_trace_csv(path)
    assert len(rows) == trace.termination_index + 1
    assert rows[-1].s is None and rows[0].success
    np.testing.assert_array_equal(rows[1].x, trace.records[1].x)
    header = path.read_text().splitlines()[0].split(",")
    assert header[:10] == ["k", "x1", "x2", "f", "gnorm", "lambda", "sigma_or_delta_or_omega", "step_norm", "rho", "success"]


def test_config_from_mapping():
    cfg = MethodConfig.from_mapping({"method": "reg2alpha", "eps": "0.1", "budget": "50", "sigma0": "2"})
    assert cfg.budget == 50 and cfg.sigma0 == 2.0
    with pytest.raises(InvalidConfigError):
        MethodConfig.from_mapping({"method": "newton", "nope": "1"})


@settings(max_examples=15)
@given(st.sampled_from([0.5, 0.3, 0.2, 0.15]), st.sampled_from([0.0, 0.5, 1.0]),
       st.sampled_from(["newton", "reg2alpha", "trust_region"]))
def test_successful_steps_decrease_and_follow_family(eps, alpha, method):
    setup = matching_setup("malpha", method, eps, alpha)
    trace = run(setup.config, setup.objective, setup.x0, tol=setup.tol)
    assert all(rec.actual_decrease > 0 for rec in trace.records if rec.success)
    assert trace.termination_index == setup.predicted == trace.evaluations
    np.testing.assert_allclose(trace.xs()[:, 0], setup.ground_truth.x, rtol=1e-8, atol=1e-12)


def test_default_regularization_run_respects_step_bound():
    obj, _ = gen_malpha(MAlphaConfig(0.1, 1.0))
    trace = run(MethodConfig("reg2alpha", eps=0.1, sigma_min=0.1), obj, [0.0])
    assert trace.termination_reason == "gradient-tolerance"
    assert all(rec.actual_decrease > 0 for rec in trace.records if rec.success)
