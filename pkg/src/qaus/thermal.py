"""Open-system rate analysis for a per-qubit Ohmic dephasing bath.

Each qubit couples through sigma^z to its own bosonic bath with rate
function gamma(Delta) = 2 pi g^2 Delta / (1 - exp(-beta Delta)).  The
quantities here are the total excitation rate out of the two-level
subspace, its integral over the anneal, the ground-state weight of the
instantaneous Gibbs state, and scaling reports for the temperature and
coupling policies that keep those quantities under control.

No master-equation time integration happens here; this is a rate
analysis only.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .problem import ProblemInstance
from .schedule import Schedule, ScheduleParams, exact_schedule
from .spectrum import gap, sigma_z_matrix_elements

__all__ = [
    "BathParams",
    "ohmic_gamma",
    "excitation_rate",
    "expected_excitations",
    "thermal_success",
    "scaling_report",
]

# below this |beta * Delta| the Ohmic rate uses its Delta -> 0 limit
_SMALL_DELTA = 1e-8

POLICIES = ("fixed_beta", "beta_linear_in_n", "g_scaled")


@dataclass(frozen=True)
class BathParams:
    beta: float   # inverse temperature, hbar = k_B = 1
    g: float      # system-bath coupling strength

    def __post_init__(self):
        if self.beta < 0 or self.g < 0:
            raise ValueError("beta and g must be nonnegative")


def ohmic_gamma(delta: float, bath: BathParams) -> float:
    """Ohmic rate 2 pi g^2 Delta / (1 - exp(-beta Delta)).

    Continuous at Delta = 0 with limit 2 pi g^2 / beta.
    """
    beta = bath.beta
    pref = 2.0 * np.pi * bath.g**2
    if beta == 0.0:
        if delta == 0.0:
            raise ValueError("gamma undefined at beta = 0, Delta = 0")
        # infinite temperature: 1 - exp(-beta Delta) -> beta Delta -> 0
        raise ValueError("gamma diverges at beta = 0")
    if abs(beta * delta) < _SMALL_DELTA:
        return pref / beta
    return pref * delta / -np.expm1(-beta * delta)


def excitation_rate(s: float, instance: ProblemInstance, bath: BathParams) -> float:
    """Total rate out of the two-level subspace at interpolation point s.

    All N-2 outside states sit at energy 1, a gap (1+delta)/2 above the
    ground state; the per-qubit sigma^z matrix elements reduce the sum
    to (N/2 - 1) a^2 + b^2 per qubit.
    """
    N = instance.N
    d = gap(s, N)
    delta_e = 0.5 * (1.0 + d)
    a, b, _ = sigma_z_matrix_elements(s, N)
    weight = (N / 2.0 - 1.0) * a**2 + b**2
    return instance.n * ohmic_gamma(delta_e, bath) \
        * np.exp(-bath.beta * delta_e) * weight


def expected_excitations(instance: ProblemInstance, bath: BathParams,
                         schedule: Schedule) -> float:
    """Integral of the excitation rate over the locally adiabatic anneal.

    Uses the change of variables dt = ds / (eps delta^2), so the
    integrand is R(s) / (eps delta^2(s)); the 1/delta^2 peak at s = 1/2
    is handled by splitting the interval there.
    """
    if schedule.kind != "exact":
        raise ValueError("expected_excitations assumes the exact schedule")
    N = instance.N
    eps = schedule.params.epsilon

    def integrand(s):
        return excitation_rate(s, instance, bath) / (eps * gap(s, N) ** 2)

    total = 0.0
    for a_, b_ in ((0.0, 0.5), (0.5, 1.0)):
        val, err = quad(integrand, a_, b_, epsrel=1e-8, epsabs=1e-12, limit=200)
        if not np.isfinite(val):
            raise RuntimeError("quadrature failed for expected excitations")
        total += val
    return total


def thermal_success(s: float, N: int, beta: float) -> float:
    """Ground-state weight of the Gibbs state of H(s) at inverse temperature beta."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    d = gap(s, N)
    return 1.0 / (1.0 + np.exp(-beta * d) + (N - 2.0) * np.exp(-beta * (1.0 + d) / 2.0))


def scaling_report(n_range, bath: BathParams, policy: str,
                   epsilon: float = 0.01) -> list[dict]:
    """Per-size thermal diagnostics under a bath-parameter scaling policy.

    Policies:
      fixed_beta       - beta and g as given
      beta_linear_in_n - beta = 2 ln(2) n (so exp(-beta/2) N stays bounded)
      g_scaled         - g = g0 N^(-1/4), beta as given
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; choose from {POLICIES}")
    rows = []
    for n in n_range:
        N = 1 << n
        if policy == "beta_linear_in_n":
            eff = BathParams(beta=2.0 * np.log(2.0) * n, g=bath.g)
        elif policy == "g_scaled":
            eff = BathParams(beta=bath.beta, g=bath.g * N ** (-0.25))
        else:
            eff = bath
        instance = ProblemInstance(n=n)
        sched = exact_schedule(ScheduleParams(N=N, epsilon=epsilon))
        p_half = thermal_success(0.5, N, eff.beta)
        rows.append({
            "n": n, "N": N, "beta": eff.beta, "g": eff.g, "policy": policy,
            "thermal_P_at_half": p_half,
            "N_times_thermal_P": N * p_half,
            "expected_excitations": expected_excitations(instance, eff, sched),
        })
    return rows
