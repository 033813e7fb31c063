"""Adaptive Schrodinger propagation: accuracy, drift, and diagnostics."""

import numpy as np
import pytest

from qaus.dynamics import NORM_DRIFT_CEILING, IntegratorConfig, evolve
from qaus.problem import HamiltonianSpec, ProblemInstance
from qaus.schedule import ScheduleParams, exact_schedule, piecewise_schedule


def _spec(n, **kw):
    return HamiltonianSpec(ProblemInstance(n=n), **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(max_step=1.0, min_step=2.0).resolve_steps(10.0)


def test_auto_config_tightens_with_time():
    short = IntegratorConfig.auto(10.0)
    long = IntegratorConfig.auto(1e6)
    assert short.rel_tol == 1e-8          # capped at the baseline
    assert long.rel_tol < short.rel_tol   # tightened for long anneals


def test_unperturbed_anneal_succeeds():
    for n in (4, 6, 8, 10):
        res = evolve(_spec(n), exact_schedule(ScheduleParams(N=1 << n)))
        assert res.ok
        assert res.success_probability > 0.9
        assert res.norm_drift < NORM_DRIFT_CEILING


def test_reduced_and_full_space_agree():
    for n in (4, 6):
        sched = exact_schedule(ScheduleParams(N=1 << n))
        red = evolve(_spec(n), sched, space="reduced")
        full = evolve(_spec(n), sched, space="full")
        assert abs(red.success_probability - full.success_probability) < 1e-6


def test_compiled_and_reference_integrators_agree():
    sched = exact_schedule(ScheduleParams(N=64))
    a = evolve(_spec(6), sched, compiled=True)
    b = evolve(_spec(6), sched, compiled=False)
    assert abs(a.success_probability - b.success_probability) < 1e-9


def test_adiabatic_limit():
    """Slower rate constant drives P_s to 1."""
    res = evolve(_spec(8), exact_schedule(ScheduleParams(N=256, epsilon=0.001)))
    assert abs(res.success_probability - 1.0) < 1e-3


def test_linear_ramp_underperforms_exact():
    n = 12
    p = ScheduleParams(N=1 << n)
    exact = evolve(_spec(n), exact_schedule(p))
    ramp = evolve(_spec(n), piecewise_schedule(1, p))
    assert ramp.success_probability < exact.success_probability


def test_dense_noise_full_space_runs():
    rng = np.random.default_rng(20)
    h = rng.normal(0.0, 0.01, size=(16, 16))
    h = h + h.T
    res = evolve(_spec(4, noise=h), exact_schedule(ScheduleParams(N=16)),
                 space="full")
    assert res.ok
    assert 0.0 <= res.success_probability <= 1.0


def test_reduced_space_rejects_noise():
    h = np.zeros((16, 16))
    with pytest.raises(ValueError):
        evolve(_spec(4, noise=h), exact_schedule(ScheduleParams(N=16)),
               space="reduced")


def test_unknown_space_rejected():
    with pytest.raises(ValueError):
        evolve(_spec(4), exact_schedule(ScheduleParams(N=16)), space="banana")


def test_step_underflow_reported():
    cfg = IntegratorConfig(rel_tol=1e-14, abs_tol=1e-16,
                           max_step=1.0, min_step=0.5)
    res = evolve(_spec(4), exact_schedule(ScheduleParams(N=16)), config=cfg)
    assert res.status == "step_underflow"
    assert not res.ok


def test_result_params_echo():
    sched = exact_schedule(ScheduleParams(N=16))
    res = evolve(_spec(4), sched)
    assert res.params["n"] == 4
    assert res.params["N"] == 16
    assert res.params["epsilon"] == 0.01
    assert res.params["schedule"] == "exact"
    assert res.accepted_steps > 0


def test_final_state_kept_on_request():
    sched = exact_schedule(ScheduleParams(N=16))
    res = evolve(_spec(4), sched, keep_state=True)
    assert res.final_state is not None
    assert np.isclose(np.vdot(res.final_state, res.final_state).real, 1.0,
                      atol=1e-6)
    assert np.isclose(abs(res.final_state[0]) ** 2, res.success_probability)
