"""Numerical robustness study of quantum adiabatic unstructured search."""

from .problem import (
    HamiltonianSpec,
    ProblemInstance,
    apply_hamiltonian,
    make_plus_state,
    reduced_hamiltonian,
    reduced_initial_state,
)
from .spectrum import (
    dense_oracle,
    excited_basis,
    gap,
    ground_overlap_marked,
    mixing_angle,
    shifted_gap_minimum,
    sigma_z_matrix_elements,
)
from .schedule import (
    Schedule,
    ScheduleParams,
    exact_schedule,
    piecewise_schedule,
    s_exact,
    total_time,
)
from .dynamics import IntegratorConfig, RunResult, evolve, success_probability
from .noise import NoiseParams, fit_decay_constant, run_noise_ensemble, sample_noise
from .stats import BootstrapEstimate, bootstrap_median, median
from .thermal import (
    BathParams,
    excitation_rate,
    expected_excitations,
    ohmic_gamma,
    scaling_report,
    thermal_success,
)

__version__ = "0.1.0"
