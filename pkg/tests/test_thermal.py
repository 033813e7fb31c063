"""Open-system excitation rates and thermal-success scaling."""

import numpy as np
import pytest

from qaus.problem import HamiltonianSpec, ProblemInstance
from qaus.schedule import ScheduleParams, exact_schedule, piecewise_schedule
from qaus.spectrum import dense_oracle, excited_basis, gap
from qaus.thermal import (
    BathParams,
    excitation_rate,
    expected_excitations,
    ohmic_gamma,
    scaling_report,
    thermal_success,
)


def test_bath_validation():
    with pytest.raises(ValueError):
        BathParams(beta=-1.0, g=0.1)
    with pytest.raises(ValueError):
        BathParams(beta=1.0, g=-0.1)


def test_ohmic_gamma_values():
    bath = BathParams(beta=2.0, g=0.1)
    expect = 2.0 * np.pi * 0.01 * 1.0 / (1.0 - np.exp(-2.0))
    assert np.isclose(ohmic_gamma(1.0, bath), expect)
    assert np.isclose(ohmic_gamma(1.0, bath), 0.0628319 / 0.864665, atol=1e-6)
    # zero-temperature limit: 2 pi g^2 Delta
    cold = BathParams(beta=1e6, g=0.1)
    assert np.isclose(ohmic_gamma(1.0, cold), 0.0628319, atol=1e-6)


def test_ohmic_gamma_continuous_at_zero():
    bath = BathParams(beta=2.0, g=0.1)
    limit = 2.0 * np.pi * 0.01 / 2.0
    assert np.isclose(ohmic_gamma(0.0, bath), limit)
    assert np.isclose(ohmic_gamma(1e-9, bath), limit, rtol=1e-6)
    assert np.isclose(ohmic_gamma(1e-7, bath), limit, rtol=1e-6)


def test_ohmic_gamma_beta_zero_rejected():
    with pytest.raises(ValueError):
        ohmic_gamma(0.0, BathParams(beta=0.0, g=0.1))
    with pytest.raises(ValueError):
        ohmic_gamma(1.0, BathParams(beta=0.0, g=0.1))


def test_excitation_rate_endpoints():
    inst = ProblemInstance(n=5)
    bath = BathParams(beta=2.0, g=0.1)
    assert excitation_rate(1.0, inst, bath) < 1e-14  # matrix elements vanish
    assert excitation_rate(0.5, inst, BathParams(beta=2.0, g=0.0)) == 0.0


def test_excitation_rate_nonnegative_continuous():
    inst = ProblemInstance(n=6)
    bath = BathParams(beta=3.0, g=0.05)
    s = np.linspace(0.0, 1.0, 1001)
    rates = np.array([excitation_rate(float(x), inst, bath) for x in s])
    assert np.all(rates >= 0.0)
    assert np.max(np.abs(np.diff(rates))) < 0.02 * (np.max(rates) + 1e-30)


def _sigma_z_dense(i, n):
    N = 1 << n
    idx = np.arange(N)
    return np.where((idx >> (n - 1 - i)) & 1, -1.0, 1.0)


def test_rate_matches_brute_force_sum():
    """Closed-form rate equals the explicit sum over all excited states
    and qubit couplings, to 1e-8 relative."""
    rng = np.random.default_rng(30)
    for n in (2, 4, 6):
        inst = ProblemInstance(n=n, m=1)
        bath = BathParams(beta=2.5, g=0.07)
        spec = HamiltonianSpec(inst)
        B = excited_basis(inst)
        for s in rng.uniform(0.05, 0.95, size=20 // 3):
            _, vecs = dense_oracle(spec, float(s))
            ground = vecs[:, 0]
            delta_e = 0.5 * (1.0 + gap(float(s), inst.N))
            brute = 0.0
            for i in range(n):
                sz = _sigma_z_dense(i, n)
                elems = np.abs(B.T @ (sz * ground)) ** 2
                brute += ohmic_gamma(delta_e, bath) \
                    * np.exp(-bath.beta * delta_e) * elems.sum()
            closed = excitation_rate(float(s), inst, bath)
            assert abs(closed - brute) <= 1e-8 * brute


def test_expected_excitations_zero_coupling():
    inst = ProblemInstance(n=6)
    sched = exact_schedule(ScheduleParams(N=64))
    assert expected_excitations(inst, BathParams(beta=2.0, g=0.0), sched) == 0.0


def test_expected_excitations_requires_exact_schedule():
    inst = ProblemInstance(n=6)
    sched = piecewise_schedule(3, ScheduleParams(N=64))
    with pytest.raises(ValueError):
        expected_excitations(inst, BathParams(beta=2.0, g=0.1), sched)


def test_expected_excitations_grow_at_fixed_temperature():
    bath = BathParams(beta=1.0, g=0.01)
    vals = [
        expected_excitations(ProblemInstance(n=n), bath,
                             exact_schedule(ScheduleParams(N=1 << n)))
        for n in range(6, 13, 2)
    ]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] / vals[0] > 3.0  # unbounded growth, not saturation


def test_thermal_success_values():
    assert np.isclose(thermal_success(0.5, 16, 0.0), 1.0 / 16.0)
    assert np.isclose(thermal_success(0.5, 16, 1e4), 1.0)
    expect = 1.0 / (1.0 + np.exp(-0.25) + 14.0 * np.exp(-0.625))
    assert np.isclose(thermal_success(0.5, 16, 1.0), expect)
    assert np.isclose(expect, 0.1078, atol=2e-4)


def test_thermal_success_monotone_in_beta():
    betas = np.linspace(0.0, 20.0, 41)
    vals = [thermal_success(0.5, 256, float(b)) for b in betas]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_scaling_report_policies():
    bath = BathParams(beta=1.0, g=0.01)
    ns = list(range(6, 15, 2))

    fixed = scaling_report(ns, bath, "fixed_beta")
    ratios = [b["N_times_thermal_P"] / a["N_times_thermal_P"]
              for a, b in zip(fixed, fixed[1:])]
    assert abs(ratios[-1] - 1.0) < 0.05  # N * P_thermal plateaus

    linear = scaling_report(ns, bath, "beta_linear_in_n")
    assert all(r["beta"] == 2.0 * np.log(2.0) * r["n"] for r in linear)
    assert min(r["thermal_P_at_half"] for r in linear) > 0.1
    exc = [r["expected_excitations"] for r in linear]
    assert max(exc) < 2.0 * exc[0] + 1e-12  # bounded, unlike fixed beta

    scaled = scaling_report(ns, bath, "g_scaled")
    assert all(np.isclose(r["g"], 0.01 * r["N"] ** -0.25) for r in scaled)
    # the N^(-1/4) coupling cancels the sqrt(N) growth of the integrated
    # rate; what remains is the n prefactor from the per-qubit sum, so
    # growth is at most linear in n (the fixed-g case grows like sqrt(N))
    inc_scaled = np.diff([r["expected_excitations"] for r in scaled])
    assert all(b <= 1.01 * a for a, b in zip(inc_scaled, inc_scaled[1:]))
    inc_fixed = np.diff([r["expected_excitations"] for r in fixed])
    assert all(b > 1.5 * a for a, b in zip(inc_fixed, inc_fixed[1:]))


def test_scaling_report_unknown_policy():
    with pytest.raises(ValueError):
        scaling_report([6], BathParams(beta=1.0, g=0.01), "bogus")
