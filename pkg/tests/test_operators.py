import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisenlab.operators import (
    DimensionError,
    EvolutionParams,
    NotHermitianError,
    as_state,
    commutator,
    expectation,
    hermitian_expm,
    hermiticity_defect,
    interior,
    maxnorm,
    require_hermitian,
)
from heisenlab.models import ModelSpec, build_fock_model, coherent_state, fock_state

from conftest import random_hermitian

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_commutator_of_self_and_identity_vanish():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert maxnorm(commutator(a, a)) == 0.0
    assert maxnorm(commutator(np.eye(6), a)) < 1e-15


def test_commutator_qp_fock8_deviates_only_in_corner():
    # oracle: ladder matrices multiplied directly
    a = np.diag(np.sqrt(np.arange(1, 8.0)), 1)
    q = (a + a.T) / math.sqrt(2)
    p = 1j * (a.T - a) / math.sqrt(2)
    c = q @ p - p @ q
    assert np.allclose(c[:6, :6], 1j * np.eye(6), atol=1e-14)
    assert abs(c[7, 7] - (-7j)) < 1e-12
    model = build_fock_model(ModelSpec(dim=8))
    assert maxnorm(commutator(model.q, model.p) - c) < 1e-14


def test_mismatched_dims_rejected():
    with pytest.raises(DimensionError):
        commutator(np.eye(3), np.eye(4))


@given(seeds)
def test_commutator_bilinear_antisymmetric(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)) for _ in range(3))
    x, y = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    scale = max(1.0, maxnorm(commutator(a, c)), maxnorm(commutator(b, c)))
    lhs = commutator(x * a + y * b, c)
    rhs = x * commutator(a, c) + y * commutator(b, c)
    assert maxnorm(lhs - rhs) <= 1e-12 * scale * (abs(x) + abs(y) + 1)
    assert maxnorm(commutator(a, b) + commutator(b, a)) <= 1e-12 * max(1.0, maxnorm(commutator(a, b)))


def test_hermitian_expm_zero_angle_is_identity():
    h = random_hermitian(np.random.default_rng(1), 5)
    assert maxnorm(hermitian_expm(h, 0.0) - np.eye(5)) < 1e-13


def test_hermitian_expm_diag_quarter_turn():
    u = hermitian_expm(np.diag([1.0, -1.0]), math.pi / 2)
    assert np.allclose(u, np.diag([-1j, 1j]), atol=1e-15)


def test_hermitian_expm_unitary_dim16():
    h = random_hermitian(np.random.default_rng(16), 16)
    u = hermitian_expm(h, 0.7)
    assert maxnorm(u.conj().T @ u - np.eye(16)) < 1e-10


def test_hermitian_expm_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_expm(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


@given(seeds, st.floats(min_value=-3, max_value=3))
def test_conjugation_preserves_spectrum(seed, theta):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 8)
    a = random_hermitian(rng, 8)
    u = hermitian_expm(h, theta)
    b = u.conj().T @ a @ u
    assert hermiticity_defect(b) < 1e-10 * max(1.0, maxnorm(a))
    assert np.max(np.abs(np.linalg.eigvalsh(require_hermitian((b + b.conj().T) / 2)) - np.linalg.eigvalsh(a))) < 1e-9


@given(seeds)
def test_expectation_within_eigenrange(seed):
    rng = np.random.default_rng(seed)
    a = random_hermitian(rng, 7)
    psi = rng.normal(size=7) + 1j * rng.normal(size=7)
    psi /= np.linalg.norm(psi)
    ev = np.linalg.eigvalsh(a)
    val = expectation(psi, a)
    assert ev[0] - 1e-9 <= val.real <= ev[-1] + 1e-9
    assert abs(val.imag) < 1e-9


def test_expectation_examples(harmonic32):
    psi = coherent_state(harmonic32.spec, 1.0)
    assert abs(expectation(psi, np.eye(32)) - 1) < 1e-14
    assert abs(expectation(fock_state(harmonic32.spec, 0), harmonic32.q)) < 1e-15
    # direct amplitude sum: <q> = sqrt(hbar/2mw) sum_n 2 Re(c_n* c_{n+1}) sqrt(n+1)
    c = np.array([math.exp(-0.5) / math.sqrt(math.factorial(n)) for n in range(32)])
    direct = math.sqrt(0.5) * sum(2 * c[n] * c[n + 1] * math.sqrt(n + 1) for n in range(31))
    assert abs(direct - math.sqrt(2)) < 1e-12
    assert abs(expectation(psi, harmonic32.q) - direct) < 1e-12


def test_as_state_requires_normalization():
    with pytest.raises(ValueError):
        as_state([1.0, 1.0])


def test_interior_drops_two_indices():
    assert interior(np.arange(16).reshape(4, 4)).shape == (2, 2)


def test_evolution_params_validation():
    assert EvolutionParams(dt=0.0).dt == 0.0
    with pytest.raises(ValueError):
        EvolutionParams(dt=-1.0)
    with pytest.raises(ValueError):
        EvolutionParams(order=-1)
