"""Problem definition and matrix-free Hamiltonian application."""

import numpy as np
import pytest

from qaus.problem import (
    HamiltonianSpec,
    ProblemInstance,
    apply_hamiltonian,
    make_plus_state,
    marked_state,
    reduced_hamiltonian,
    reduced_initial_state,
)
from qaus.spectrum import dense_hamiltonian, gap


def test_instance_dimension():
    assert ProblemInstance(n=4).N == 16
    assert ProblemInstance(n=1).N == 2


def test_instance_validation():
    with pytest.raises(ValueError):
        ProblemInstance(n=0)
    with pytest.raises(ValueError):
        ProblemInstance(n=3, m=8)
    with pytest.raises(ValueError):
        ProblemInstance(n=3, m=-1)


def test_spec_validation():
    inst = ProblemInstance(n=3)
    with pytest.raises(ValueError):
        HamiltonianSpec(inst, chi=-1.0)
    with pytest.raises(ValueError):
        HamiltonianSpec(inst, noise=np.zeros((4, 4)))
    HamiltonianSpec(inst, chi=-0.5)  # valid: chi > -1


def test_plus_state_is_uniform_and_normalized():
    psi = make_plus_state(ProblemInstance(n=5))
    assert psi.shape == (32,)
    assert np.allclose(psi, psi[0])
    assert np.isclose(np.vdot(psi, psi).real, 1.0)


def test_plus_state_annihilated_at_s_zero():
    inst = ProblemInstance(n=4)
    out = apply_hamiltonian(HamiltonianSpec(inst), 0.0, make_plus_state(inst))
    assert np.max(np.abs(out)) < 1e-14


def test_marked_state_annihilated_at_s_one():
    inst = ProblemInstance(n=4, m=5)
    out = apply_hamiltonian(HamiltonianSpec(inst), 1.0, marked_state(inst))
    assert np.max(np.abs(out)) < 1e-14


def test_apply_matches_dense_matrix_n2():
    inst = ProblemInstance(n=2, m=0)
    spec = HamiltonianSpec(inst)
    psi = make_plus_state(inst)
    out = apply_hamiltonian(spec, 0.5, psi)
    expect = dense_hamiltonian(spec, 0.5) @ psi
    assert np.max(np.abs(out - expect)) < 1e-12


def test_apply_matches_dense_random_states():
    rng = np.random.default_rng(1)
    for n in (2, 4, 6):
        inst = ProblemInstance(n=n, m=3)
        spec = HamiltonianSpec(inst, chi=0.2)
        dense = None
        for s in rng.uniform(0.0, 1.0, size=5):
            dense = dense_hamiltonian(spec, float(s))
            psi = rng.normal(size=inst.N) + 1j * rng.normal(size=inst.N)
            out = apply_hamiltonian(spec, float(s), psi)
            assert np.max(np.abs(out - dense @ psi)) < 1e-12


def test_apply_with_noise_matches_dense():
    rng = np.random.default_rng(2)
    inst = ProblemInstance(n=3)
    h = rng.normal(size=(8, 8))
    h = h + h.T
    spec = HamiltonianSpec(inst, noise=h)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    out = apply_hamiltonian(spec, 0.3, psi)
    expect = dense_hamiltonian(spec, 0.3) @ psi
    assert np.max(np.abs(out - expect)) < 1e-12


def test_apply_validates_inputs():
    inst = ProblemInstance(n=3)
    spec = HamiltonianSpec(inst)
    with pytest.raises(ValueError):
        apply_hamiltonian(spec, 0.5, np.zeros(4, complex))
    with pytest.raises(ValueError):
        apply_hamiltonian(spec, 1.5, make_plus_state(inst))


def test_reduced_hamiltonian_endpoints():
    spec = HamiltonianSpec(ProblemInstance(n=4))
    assert np.allclose(reduced_hamiltonian(spec, 1.0), np.diag([0.0, 1.0]))
    h0 = reduced_hamiltonian(spec, 0.0)
    v = reduced_initial_state(16)
    assert np.max(np.abs(h0 @ v)) < 1e-14  # |+> is the s=0 ground state


def test_reduced_gap_at_half():
    spec = HamiltonianSpec(ProblemInstance(n=4))
    evals = np.linalg.eigvalsh(reduced_hamiltonian(spec, 0.5))
    assert np.isclose(evals[1] - evals[0], 0.25)  # delta(1/2) = 1/sqrt(N) = 1/4
    assert np.isclose(evals[1] - evals[0], gap(0.5, 16))


def test_reduced_matches_full_space_restriction():
    """Restricting the full Hamiltonian to span{|m>, |m_perp>} reproduces
    the 2x2 reduced matrix for random s."""
    rng = np.random.default_rng(3)
    for n in (2, 4, 6, 8, 10):
        inst = ProblemInstance(n=n, m=1)
        spec = HamiltonianSpec(inst, chi=0.1)
        N = inst.N
        em = marked_state(inst)
        perp = np.full(N, 1.0 / np.sqrt(N - 1.0), dtype=complex)
        perp[inst.m] = 0.0
        basis = np.column_stack([em, perp])
        for s in rng.uniform(0.0, 1.0, size=20 // 5):
            hb = np.column_stack([
                apply_hamiltonian(spec, float(s), basis[:, 0]),
                apply_hamiltonian(spec, float(s), basis[:, 1]),
            ])
            restricted = basis.conj().T @ hb
            assert np.max(np.abs(restricted - reduced_hamiltonian(spec, float(s)))) < 1e-12


def test_reduced_rejects_noise():
    inst = ProblemInstance(n=3)
    spec = HamiltonianSpec(inst, noise=np.zeros((8, 8)))
    with pytest.raises(ValueError):
        reduced_hamiltonian(spec, 0.5)


def test_reduced_initial_state_components():
    v = reduced_initial_state(16)
    assert np.isclose(v[0], 0.25)
    assert np.isclose(v[1], np.sqrt(1 - 1 / 16))
    assert np.isclose(v @ v, 1.0)
