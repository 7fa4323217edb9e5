import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisenlab.heisenberg import expectation_trajectory
from heisenlab.models import (
    ModelSpec,
    TruncationError,
    build_fock_model,
    build_grid_model,
    check_truncation,
    coherent_state,
    fock_state,
    gaussian_grid_state,
    ground_state,
    interior_ccr_defect,
)
from heisenlab.operators import commutator, hermiticity_defect, interior, maxnorm


def test_harmonic_diagonal_interior():
    model = build_fock_model(ModelSpec(dim=8))
    assert np.allclose(np.diag(model.h)[:6].real, np.arange(6) + 0.5, atol=1e-12)


def test_ground_state_energy():
    model = build_fock_model(ModelSpec(dim=8, hbar=0.7, omega=1.3))
    psi = fock_state(model.spec, 0)
    assert maxnorm(model.h @ psi - 0.5 * 0.7 * 1.3 * psi) < 1e-10


def test_ccr_interior(harmonic32):
    assert interior_ccr_defect(harmonic32) < 1e-10


@given(st.integers(8, 40), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0, 0.5))
def test_ccr_trace_and_spectrum(dim, hbar, mass, omega, lam):
    model = build_fock_model(ModelSpec(dim=dim, hbar=hbar, mass=mass, omega=omega, lam=lam))
    c = interior(commutator(model.q, model.p))
    assert abs(np.trace(c) / (1j * hbar) - (dim - 2)) < 1e-8
    ev = np.linalg.eigvalsh(model.h)
    assert ev[0] >= -1e-9 * hbar * omega


def test_operators_read_only(harmonic32):
    with pytest.raises(ValueError):
        harmonic32.q[0, 0] = 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(dim=4)
    with pytest.raises(ValueError):
        ModelSpec(hbar=0.0)
    with pytest.raises(ValueError):
        ModelSpec(basis="grid")
    with pytest.raises(ValueError):
        ModelSpec(free=True)


def test_coherent_zero_is_vacuum():
    spec = ModelSpec(dim=16)
    assert np.array_equal(coherent_state(spec, 0.0), fock_state(spec, 0))


def test_coherent_moments(harmonic32):
    psi = coherent_state(harmonic32.spec, 1.0)
    q = harmonic32.q
    mean = np.vdot(psi, q @ psi).real
    var = np.vdot(psi, q @ q @ psi).real - mean**2
    assert abs(mean - math.sqrt(2)) < 1e-12
    assert abs(var - 0.5) / 0.5 < 1e-10


def test_coherent_guard_rejects_small_dim():
    with pytest.raises(TruncationError):
        coherent_state(ModelSpec(dim=8), 2.0)


def test_custom_expression_matches_builtin():
    builtin = build_fock_model(ModelSpec(dim=16, lam=0.1))
    custom = build_fock_model(ModelSpec(dim=16, custom_expr="0.5*p^2 + 0.5*q^2 + 0.1*q^4"))
    assert maxnorm(builtin.h - custom.h) < 1e-12


def test_custom_non_hermitian_rejected():
    with pytest.raises(ValueError):
        build_fock_model(ModelSpec(dim=16, custom_expr="q*p"))


@pytest.fixture(scope="module")
def grid():
    return build_grid_model(ModelSpec(basis="grid", dim=400, grid_extent=12.0))


def test_grid_operators(grid):
    assert np.array_equal(grid.q, np.diag(np.diag(grid.q)))
    assert np.all(np.diag(grid.q).imag == 0)
    assert hermiticity_defect(grid.p) < 1e-12


def test_grid_gaussian_moments(grid):
    psi = gaussian_grid_state(grid, 1.0)
    mean = np.vdot(psi, grid.q @ psi).real
    assert abs(mean - math.sqrt(2)) < 1e-8
    assert max(abs(psi[:10]).max(), abs(psi[-10:]).max()) < 1e-10


def test_grid_boundary_guard():
    narrow = build_grid_model(ModelSpec(basis="grid", dim=100, grid_extent=3.0))
    with pytest.raises(TruncationError):
        gaussian_grid_state(narrow, 1.0)


def test_free_particle_momentum_conserved():
    model = build_grid_model(ModelSpec(basis="grid", dim=600, grid_extent=30.0, free=True))
    psi = gaussian_grid_state(model, 0.5 + 0.3j)
    traj = expectation_trajectory(model, psi, np.linspace(0, 2, 11))
    assert np.max(np.abs(traj.P - traj.P[0])) < 1e-8 * abs(traj.P[0])


def test_ground_state_passes_guard(quartic32):
    check_truncation(quartic32, ground_state(quartic32))
