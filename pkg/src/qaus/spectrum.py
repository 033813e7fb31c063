"""Closed-form spectral data of the interpolating Hamiltonian.

For the unperturbed interpolation the two lowest levels live in the
span of |m> and |m_perp> with gap

    delta(s) = sqrt((1-2s)^2 + (4/N) s (1-s)),

eigenvalues (1 -/+ delta)/2, and a mixing angle theta(s); the remaining
N-2 eigenstates have energy 1 throughout.  This module also provides
the sigma^z matrix elements between the ground state and the energy-1
manifold, the location of the minimum gap for a misspecified problem
coefficient, and a dense-diagonalization oracle for verification.
"""

from dataclasses import dataclass

import numpy as np

from .problem import HamiltonianSpec, ProblemInstance, make_plus_state

__all__ = [
    "SpectrumPoint",
    "gap",
    "mixing_angle",
    "sin_sq_half_theta",
    "ground_overlap_marked",
    "sigma_z_matrix_elements",
    "shifted_gap_minimum",
    "spectrum_point",
    "excited_basis",
    "dense_hamiltonian",
    "dense_oracle",
]

# dense_oracle guard: anything larger is almost certainly a mistake
MAX_DENSE_QUBITS = 10


@dataclass(frozen=True)
class SpectrumPoint:
    """Spectral data of the unperturbed Hamiltonian at a given s."""

    s: float
    delta: float
    cos_theta: float
    sin_theta: float
    e0: float
    e1: float


def gap(s, N):
    """Energy gap delta(s) between the two lowest levels (chi = 0)."""
    s = np.asarray(s, dtype=float)
    out = np.sqrt((1.0 - 2.0 * s) ** 2 + (4.0 / N) * s * (1.0 - s))
    return out[()] if out.ndim == 0 else out


def mixing_angle(s: float, N: int) -> tuple[float, float]:
    """(cos theta, sin theta) of the ground-state mixing angle."""
    d = gap(s, N)
    cos_t = (1.0 - 2.0 * (1.0 - s) * (1.0 - 1.0 / N)) / d
    sin_t = 2.0 * (1.0 - s) * np.sqrt(1.0 - 1.0 / N) / (d * np.sqrt(N))
    return cos_t, sin_t


def sin_sq_half_theta(s, N):
    """sin^2(theta/2), evaluated in a cancellation-free form.

    Direct use of (1 - cos theta)/2 loses all digits near s = 1 where
    cos theta -> 1.  Rationalizing twice gives the equivalent forms

        (1-s)(1-1/N)(delta + 1 - 2s) / (delta (delta+1))        s <= 1/2
        4 s (1-s)^2 (1-1/N) / (N delta (delta+1)(delta+2s-1))   s >= 1/2

    in which every sum adds nonnegative terms.
    """
    s = np.asarray(s, dtype=float)
    d = np.sqrt((1.0 - 2.0 * s) ** 2 + (4.0 / N) * s * (1.0 - s))
    a = 1.0 - 1.0 / N
    lo = (1.0 - s) * a * (d + 1.0 - 2.0 * s) / (d * (d + 1.0))
    # guard the unused branch of the where: d + 2s - 1 vanishes at s = 0
    dh = np.where(s > 0.5, d + 2.0 * s - 1.0, 1.0)
    hi = 4.0 * s * (1.0 - s) ** 2 * a / (N * d * (d + 1.0) * dh)
    out = np.where(s <= 0.5, lo, hi)
    return out[()] if out.ndim == 0 else out


def ground_overlap_marked(s, N):
    """cos^2(theta/2) = |<m|ground state>|^2."""
    return 1.0 - sin_sq_half_theta(s, N)


def spectrum_point(s: float, N: int) -> SpectrumPoint:
    d = gap(s, N)
    cos_t, sin_t = mixing_angle(s, N)
    return SpectrumPoint(
        s=s, delta=d, cos_theta=cos_t, sin_theta=sin_t,
        e0=0.5 * (1.0 - d), e1=0.5 * (1.0 + d),
    )


def sigma_z_matrix_elements(s: float, N: int) -> tuple[float, float, float]:
    """|<ground| sigma_i^z |excited>| for the three classes of energy-1 states.

    Returns (a, b, c) where a couples to each of the N/2 - 1 antisymmetric
    pair states, b to the single symmetric combination involving |m-bar>,
    and c (identically zero) to the remaining symmetric states.  The values
    are independent of the qubit index i.
    """
    sh = np.sqrt(sin_sq_half_theta(s, N))
    a = np.sqrt(2.0 / (N - 1.0)) * sh
    b = (np.sqrt(N - 2.0) / (N - 1.0)) * sh
    return a, b, 0.0


def shifted_gap_minimum(chi: float, N: int) -> float:
    """Location s* of the minimum gap when H_p carries coefficient s(1+chi)."""
    if chi <= -1.0:
        raise ValueError(f"chi must exceed -1, got {chi}")
    num = N * (chi + 2.0) - 2.0 * (chi + 1.0)
    den = N * (chi + 2.0) ** 2 - 4.0 * (chi + 1.0)
    if den <= 0.0:
        raise ValueError(f"invalid chi/N combination: chi={chi}, N={N}")
    return num / den


def _pair_representatives(instance: ProblemInstance) -> np.ndarray:
    """f(j) for j = 1..N/2-1: pair indices skipping the (m, m-bar) pair."""
    N = instance.N
    m = instance.m
    mbar = N - 1 - m
    assert m != mbar, "m equals its bit-complement; impossible for even N"
    mn = min(m, mbar)
    js = np.arange(1, N // 2)
    return np.where(js - 1 < mn, js - 1, js)


def excited_basis(instance: ProblemInstance) -> np.ndarray:
    """The N-2 energy-1 eigenvectors, as columns of an N x (N-2) array.

    Column order: the N/2 - 1 antisymmetric pair states, then the
    symmetric state involving |m-bar|, then the N/2 - 2 remaining
    symmetric combinations.
    """
    N = instance.N
    if N < 4:
        return np.zeros((N, 0))
    mbar = N - 1 - instance.m
    f = _pair_representatives(instance)
    fbar = N - 1 - f
    half = N // 2

    basis = np.zeros((N, N - 2))
    col = 0
    # antisymmetric pair states (|f> - |fbar>)/sqrt(2)
    for k in range(half - 1):
        basis[f[k], col] = 1.0 / np.sqrt(2.0)
        basis[fbar[k], col] = -1.0 / np.sqrt(2.0)
        col += 1
    # symmetric state built on |m-bar>
    w = np.sqrt((N - 2.0) / (N - 1.0))
    basis[mbar, col] = w
    basis[f, col] += -w / (N - 2.0)
    basis[fbar, col] += -w / (N - 2.0)
    col += 1
    # remaining symmetric combinations
    for k in range(2, half):
        w = np.sqrt(2.0 * (k - 1.0) / k)
        basis[f[k - 1], col] = 0.5 * w
        basis[fbar[k - 1], col] = 0.5 * w
        for j in range(1, k):
            basis[f[j - 1], col] += -0.5 * w / (k - 1.0)
            basis[fbar[j - 1], col] += -0.5 * w / (k - 1.0)
        col += 1
    return basis


def dense_hamiltonian(spec: HamiltonianSpec, s: float) -> np.ndarray:
    """Explicit N x N matrix of H'(s), including any attached noise."""
    instance = spec.instance
    N = instance.N
    plus = make_plus_state(instance).real
    h = (1.0 - s) * (np.eye(N) - np.outer(plus, plus))
    hp = np.eye(N)
    hp[instance.m, instance.m] = 0.0
    h += s * (1.0 + spec.chi) * hp
    if spec.noise is not None:
        h = h + spec.noise
    return h


def dense_oracle(spec: HamiltonianSpec, s: float):
    """Full eigen-decomposition of the explicit Hamiltonian matrix.

    Returns (eigenvalues, eigenvectors) in ascending order, as from
    numpy.linalg.eigh.  Guarded to small n; this is a verification
    oracle, not a production path.
    """
    if spec.instance.n > MAX_DENSE_QUBITS:
        raise ValueError(
            f"dense oracle limited to n <= {MAX_DENSE_QUBITS}, got n={spec.instance.n}"
        )
    return np.linalg.eigh(dense_hamiltonian(spec, s))
