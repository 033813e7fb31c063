"""Static Gaussian noise Hamiltonians and ensemble runs.

Each ensemble member adds a fixed random Hermitian matrix H_noise to
the interpolation, with every independent matrix element drawn from
N(0, sigma^2).  The default is a real symmetric draw; a complex
Hermitian variant is available behind a flag.  Ensembles are
reproducible: member k derives its random stream from
(base_seed, spawn_key=k), so results do not depend on execution order.

Propagation uses the eigenbasis of H_noise, where the total Hamiltonian
is diagonal plus the two interpolation projectors and every integration
step costs O(N) instead of the O(N^2) dense product.  The dense
computational-basis path in `dynamics.evolve` remains available and the
two are cross-checked in the test suite.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import (
    NORM_DRIFT_CEILING,
    IntegratorConfig,
    RunResult,
    propagate_projector_rhs,
)
from .problem import HamiltonianSpec, ProblemInstance
from .schedule import Schedule, ScheduleParams, exact_schedule

__all__ = [
    "REFERENCE_DECAY_CONSTANT",
    "NoiseParams",
    "NoiseMatrix",
    "sample_noise",
    "run_noise_instance",
    "run_noise_ensemble",
    "fit_decay_constant",
]

MAX_NOISE_QUBITS = 12

# reference small-noise decay constant: median P_s ~ exp(-c N sigma^2)
# with c ~ 2.11 in the regime sigma < 1/sqrt(7N)
REFERENCE_DECAY_CONSTANT = 2.11


@dataclass(frozen=True)
class NoiseParams:
    sigma: float
    base_seed: int = 0
    instances: int = 200
    complex_hermitian: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.instances < 1:
            raise ValueError(f"need at least one instance, got {self.instances}")


@dataclass(frozen=True)
class NoiseMatrix:
    matrix: np.ndarray
    seed: int
    instance_index: int


def _instance_rng(params: NoiseParams, instance_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(params.base_seed, spawn_key=(instance_index,))
    return np.random.default_rng(ss)


def sample_noise(N: int, params: NoiseParams, instance_index: int) -> NoiseMatrix:
    """Draw the Hermitian noise matrix for one ensemble member.

    Diagonal entries and each (i, j), i < j pair are independent
    N(0, sigma^2) draws, mirrored to keep the matrix exactly Hermitian.
    Deterministic in (base_seed, instance_index).
    """
    rng = _instance_rng(params, instance_index)
    sigma = params.sigma
    iu = np.triu_indices(N, k=1)
    if params.complex_hermitian:
        h = np.zeros((N, N), dtype=np.complex128)
        upper = rng.normal(0.0, sigma, size=len(iu[0])) \
            + 1j * rng.normal(0.0, sigma, size=len(iu[0]))
        h[iu] = upper
        h = h + h.conj().T
        h[np.diag_indices(N)] = rng.normal(0.0, sigma, size=N)
    else:
        h = np.zeros((N, N))
        h[iu] = rng.normal(0.0, sigma, size=len(iu[0]))
        h = h + h.T
        h[np.diag_indices(N)] = rng.normal(0.0, sigma, size=N)
    return NoiseMatrix(matrix=h, seed=params.base_seed, instance_index=instance_index)


def draw_marked_state(N: int, params: NoiseParams, instance_index: int) -> int:
    """Uniform marked index for one ensemble member (independent stream)."""
    # separate stream from the matrix draw: extra spawn-key component
    ss = np.random.SeedSequence(params.base_seed, spawn_key=(instance_index, 1))
    return int(np.random.default_rng(ss).integers(N))


def run_noise_instance(n: int, params: NoiseParams, instance_index: int,
                       schedule: Schedule | None = None,
                       config: IntegratorConfig | None = None) -> RunResult:
    """Evolve one ensemble member: fresh marked state, fresh noise draw.

    Works in the eigenbasis of the noise matrix, where the Hamiltonian
    is diagonal plus the two projectors.
    """
    if n > MAX_NOISE_QUBITS:
        raise ValueError(f"full-space noise runs limited to n <= {MAX_NOISE_QUBITS}")
    N = 1 << n
    if schedule is None:
        schedule = exact_schedule(ScheduleParams(N=N))
    if config is None:
        config = IntegratorConfig.auto(schedule.total_time)

    t_start = time.perf_counter()
    m = draw_marked_state(N, params, instance_index)
    noise = sample_noise(N, params, instance_index)
    w, V = np.linalg.eigh(noise.matrix)

    # rotate |+> and |m> into the noise eigenbasis; psi(0) = |+>
    plus_rot = (V.conj().T @ np.full(N, 1.0 / np.sqrt(N))).astype(np.complex128)
    marked_rot = V.conj().T[:, m].astype(np.complex128)

    # center the spectrum: a global phase that roughly halves the
    # spectral radius the step controller works against
    eshift = 1.0 + 0.5 * (w[0] + w[-1])
    psi, acc, rej, code = propagate_projector_rhs(
        plus_rot, marked_rot, w, 0.0, schedule, config, plus_rot.copy(),
        eshift=eshift,
    )
    drift = abs(float(np.vdot(psi, psi).real) - 1.0)
    if code == _kernels.STATUS_UNDERFLOW:
        status = "step_underflow"
    elif drift > NORM_DRIFT_CEILING:
        status = "norm_drift"
    else:
        status = "ok"
    return RunResult(
        success_probability=float(abs(np.vdot(marked_rot, psi)) ** 2),
        norm_drift=drift,
        accepted_steps=int(acc),
        rejected_steps=int(rej),
        status=status,
        params={
            "n": n, "N": N, "m": m, "sigma": params.sigma,
            "epsilon": schedule.params.epsilon,
            "base_seed": params.base_seed, "instance_index": instance_index,
            "schedule": schedule.kind,
        },
        wall_time=time.perf_counter() - t_start,
    )


def run_noise_ensemble(n: int, sigma: float, params: NoiseParams,
                       schedule: Schedule | None = None,
                       config: IntegratorConfig | None = None) -> list[RunResult]:
    """All ensemble members for one (n, sigma); failures recorded, not dropped."""
    if sigma != params.sigma:
        params = NoiseParams(
            sigma=sigma, base_seed=params.base_seed,
            instances=params.instances,
            complex_hermitian=params.complex_hermitian,
        )
    return [
        run_noise_instance(n, params, k, schedule=schedule, config=config)
        for k in range(params.instances)
    ]


def fit_decay_constant(points) -> float:
    """Least-squares decay constant of median P_s vs N sigma^2.

    points: iterable of (N, sigma, median_Ps) restricted to the
    small-noise regime sigma < 1/sqrt(7N).  Fits -log(median) = c * N
    sigma^2 + intercept and returns the slope c.
    """
    pts = [(N, sig, med) for (N, sig, med) in points if sig < 1.0 / np.sqrt(7.0 * N)]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 small-noise points, got {len(pts)}")
    med = np.array([p[2] for p in pts])
    if np.any(med <= 0.0):
        raise ValueError("medians must be positive to fit the log decay")
    x = np.array([N * sig**2 for (N, sig, _) in pts])
    y = -np.log(med)
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
