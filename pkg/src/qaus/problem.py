"""Search problem definition and matrix-free Hamiltonian application.

The interpolating Hamiltonian is

    H'(s) = (1-s) (1 - |+><+|) + s (1+chi) (1 - |m><m|) + H_noise,

acting on an N = 2^n dimensional Hilbert space with a single marked
computational-basis state |m>.  The projector terms are applied in O(N)
using the two inner products <+|psi> and <m|psi>; only an attached noise
matrix requires a dense O(N^2) matrix-vector product.

States are plain complex numpy arrays of length N (or length 2 in the
reduced subspace spanned by |m> and |m_perp>).
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProblemInstance",
    "HamiltonianSpec",
    "make_plus_state",
    "marked_state",
    "apply_hamiltonian",
    "reduced_hamiltonian",
    "reduced_initial_state",
]


@dataclass(frozen=True)
class ProblemInstance:
    """An unstructured search instance: n qubits, marked basis index m."""

    n: int
    m: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if not 0 <= self.m < self.N:
            raise ValueError(f"marked index {self.m} outside [0, {self.N})")

    @property
    def N(self) -> int:
        """Hilbert-space dimension 2**n."""
        return 1 << self.n


@dataclass(frozen=True)
class HamiltonianSpec:
    """Interpolating Hamiltonian, optionally misspecified and/or noisy.

    chi rescales the problem-Hamiltonian coefficient to s*(1+chi);
    noise, when given, is an N x N Hermitian matrix added to H(s).
    """

    instance: ProblemInstance
    chi: float = 0.0
    noise: np.ndarray | None = None

    def __post_init__(self):
        if self.chi <= -1.0:
            raise ValueError(f"chi must exceed -1, got {self.chi}")
        if self.noise is not None:
            N = self.instance.N
            if self.noise.shape != (N, N):
                raise ValueError(
                    f"noise matrix shape {self.noise.shape} != ({N}, {N})"
                )


def make_plus_state(instance: ProblemInstance) -> np.ndarray:
    """Equal superposition of all computational basis states."""
    N = instance.N
    return np.full(N, 1.0 / np.sqrt(N), dtype=np.complex128)


def marked_state(instance: ProblemInstance) -> np.ndarray:
    """Computational basis state |m>."""
    psi = np.zeros(instance.N, dtype=np.complex128)
    psi[instance.m] = 1.0
    return psi


def apply_hamiltonian(spec: HamiltonianSpec, s: float, psi: np.ndarray) -> np.ndarray:
    """Apply H'(s) to a full-space state vector.

    Projector terms are matrix-free; the noise term (if any) is a dense
    matrix-vector product.
    """
    N = spec.instance.N
    if psi.shape != (N,):
        raise ValueError(f"state has shape {psi.shape}, expected ({N},)")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"interpolation parameter s={s} outside [0, 1]")

    plus = make_plus_state(spec.instance)
    m = spec.instance.m
    out = (1.0 - s) * (psi - np.vdot(plus, psi) * plus)
    hp = psi.copy()
    hp[m] = 0.0
    out += s * (1.0 + spec.chi) * hp
    if spec.noise is not None:
        out += spec.noise @ psi
    return out


def reduced_hamiltonian(spec: HamiltonianSpec, s: float) -> np.ndarray:
    """H'(s) restricted to span{|m>, |m_perp>}, in that basis order.

    Only valid without noise: a generic noise matrix does not preserve
    the two-dimensional subspace.
    """
    if spec.noise is not None:
        raise ValueError("reduced subspace is not preserved with noise attached")
    N = spec.instance.N
    v = reduced_initial_state(N)  # |+> expressed in the subspace
    h = (1.0 - s) * (np.eye(2) - np.outer(v, v))
    h[1, 1] += s * (1.0 + spec.chi)
    return h


def reduced_initial_state(N: int) -> np.ndarray:
    """|+> in the {|m>, |m_perp>} basis: (1/sqrt(N), sqrt(1-1/N))."""
    return np.array([1.0 / np.sqrt(N), np.sqrt(1.0 - 1.0 / N)])
