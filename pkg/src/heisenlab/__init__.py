"""Heisenberg-picture short-time dynamics and its classical limit, measured numerically."""

from .classical import ClassicalHamiltonian, PhasePoint, classical_trajectory, hamilton_step, poisson_bracket
from .heisenberg import (
    TrajectoryRecord,
    ck_compose,
    commutator_expectation_equality,
    difference_quotient,
    exact_heisenberg_op,
    expectation_trajectory,
    hadamard_truncated,
    heisenberg_residual,
)
from .models import ModelOperators, ModelSpec, build_fock_model, build_grid_model, coherent_state
from .operators import EvolutionParams, commutator, expectation, hermitian_expm

__version__ = "0.1.0"
