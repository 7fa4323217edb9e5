import math

import numpy as np
import pytest

from heisenlab.heisenberg import (
    TrajectoryRecord,
    ck_compose,
    commutator_expectation_equality,
    difference_quotient,
    ehrenfest_check,
    energy_trajectory,
    exact_heisenberg_op,
    expectation_trajectory,
    expectation_trajectory_operator,
    hadamard_truncated,
    heisenberg_residual,
)
from heisenlab.models import ModelSpec, TruncationError, build_fock_model, coherent_state, ground_state
from heisenlab.operators import EvolutionParams, hermiticity_defect, interior, maxnorm


def harmonic_q_oracle(model, t):
    # closed-form Heisenberg solution for the quadratic model
    w, m = model.omega, model.mass
    return model.q * math.cos(w * t) + model.p / (m * w) * math.sin(w * t)


def test_zero_step_returns_xi(harmonic32):
    out = exact_heisenberg_op(harmonic32.h, harmonic32.q, EvolutionParams(dt=0.0))
    assert np.array_equal(out, harmonic32.q)


def test_hamiltonian_is_conserved(quartic32):
    out = exact_heisenberg_op(quartic32.h, quartic32.h, EvolutionParams(dt=0.7))
    assert maxnorm(out - quartic32.h) < 1e-10 * maxnorm(quartic32.h)


def test_quarter_period_rotates_q_into_p(harmonic32):
    out = exact_heisenberg_op(harmonic32.h, harmonic32.q, EvolutionParams(dt=math.pi / 2))
    assert maxnorm(interior(out - harmonic32.p)) < 1e-8


@pytest.mark.parametrize("t", [0.1, 0.9, 2.5])
def test_exact_matches_harmonic_oracle(harmonic32, t):
    out = exact_heisenberg_op(harmonic32.h, harmonic32.q, EvolutionParams(dt=t))
    assert maxnorm(interior(out - harmonic_q_oracle(harmonic32, t))) < 1e-10


def test_exact_preserves_hermiticity(quartic32):
    out = exact_heisenberg_op(quartic32.h, quartic32.p, EvolutionParams(dt=0.1))
    assert hermiticity_defect(out) < 1e-10


def test_hadamard_trivial_cases(quartic32):
    q = quartic32.q
    assert np.array_equal(hadamard_truncated(quartic32.h, q, EvolutionParams(dt=0.3, order=0)), q)
    assert maxnorm(hadamard_truncated(quartic32.h, q, EvolutionParams(dt=0.0, order=3)) - q) == 0


def test_hadamard_first_order_is_velocity(harmonic32):
    dt = 0.05
    out = hadamard_truncated(harmonic32.h, harmonic32.q, EvolutionParams(dt=dt, order=1))
    assert maxnorm(interior(out - (harmonic32.q + harmonic32.p * dt))) < 1e-10


def test_hadamard_error_shrinks_with_order():
    model = build_fock_model(ModelSpec(dim=8, lam=0.1))
    exact = exact_heisenberg_op(model.h, model.q, EvolutionParams(dt=0.05))
    errs = [maxnorm(interior(exact - hadamard_truncated(model.h, model.q, EvolutionParams(dt=0.05, order=k))))
            for k in range(5)]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_single_point_trajectory(quartic96):
    psi = coherent_state(quartic96.spec, 1.0)
    rec = expectation_trajectory(quartic96, psi, [0.0])
    assert abs(rec.Q[0] - np.vdot(psi, quartic96.q @ psi).real) < 1e-14
    assert abs(rec.P[0] - np.vdot(psi, quartic96.p @ psi).real) < 1e-14


def test_coherent_harmonic_trajectory(harmonic64):
    psi = coherent_state(harmonic64.spec, 1.0)
    t = np.linspace(0, 10, 201)
    rec = expectation_trajectory(harmonic64, psi, t)
    assert np.max(np.abs(rec.Q - math.sqrt(2) * np.cos(t))) < 1e-8
    assert np.max(np.abs(rec.P + math.sqrt(2) * np.sin(t))) < 1e-8


def test_energy_conserved(quartic96):
    e = energy_trajectory(quartic96, coherent_state(quartic96.spec, 1.0), np.linspace(0, 0.1, 5))
    assert np.max(np.abs(e - e[0])) < 1e-9 * abs(e[0])


def test_state_and_operator_sides_agree(quartic96):
    psi = coherent_state(quartic96.spec, 1.0)
    t = np.linspace(0, 0.1, 6)
    a = expectation_trajectory(quartic96, psi, t)
    b = expectation_trajectory_operator(quartic96, psi, t)
    for col in ("Q", "P", "varQ", "varP"):
        assert np.max(np.abs(getattr(a, col) - getattr(b, col))) < 1e-11


def test_trajectory_guard_trips_on_leakage(quartic32):
    # a quartic coherent packet leaks into the top levels at N=32
    with pytest.raises(TruncationError):
        expectation_trajectory(quartic32, coherent_state(quartic32.spec, 1.0), [0.0, 1.0])


def test_stationary_state_is_static(quartic32):
    psi = ground_state(quartic32)
    rec = expectation_trajectory(quartic32, psi, np.linspace(0, 5, 11))
    assert np.max(np.abs(rec.Q - rec.Q[0])) < 1e-9
    assert np.max(np.abs(rec.P - rec.P[0])) < 1e-9


def test_difference_quotient_harmonic(harmonic64):
    psi = coherent_state(harmonic64.spec, 1.0)
    qdot, pdot = difference_quotient(harmonic64, psi, 1e-3)
    assert abs(qdot) < 1e-2  # P0 = 0 and the leading remainder is -Q0 dt/2
    assert abs(pdot - (-math.sqrt(2))) / math.sqrt(2) < 1e-3
    with pytest.raises(ValueError):
        difference_quotient(harmonic64, psi, 0.0)


def test_difference_quotient_stationary(quartic96):
    psi = ground_state(quartic96)
    for dt in (1e-1, 1e-2, 1e-3):
        assert abs(difference_quotient(quartic96, psi, dt)[0]) < 1e-9


def test_equality_values(harmonic64, quartic96):
    psi = coherent_state(harmonic64.spec, complex(1.0, 0.4))
    rep = commutator_expectation_equality(harmonic64, psi)
    P0 = np.vdot(psi, harmonic64.p @ psi).real
    assert rep.difference == 0.0
    assert abs(rep.lhs_q - P0) < 1e-12
    psi = coherent_state(quartic96.spec, 1.0)
    rep = commutator_expectation_equality(quartic96, psi)
    q = quartic96.q
    force = -np.vdot(psi, (q + 0.4 * q @ q @ q) @ psi)
    assert abs(rep.lhs_p - force) < 1e-10
    assert rep.passes


def test_residual_second_order(harmonic32):
    r1 = heisenberg_residual(harmonic32, 0.3, 1e-2)
    r2 = heisenberg_residual(harmonic32, 0.3, 5e-3)
    assert abs(r1 / r2 - 4) < 0.8
    assert heisenberg_residual(harmonic32, 0.3, 1e-3) < 1e-5 * maxnorm(harmonic32.p)
    assert heisenberg_residual(harmonic32, 0.3, 1e-2, xi=harmonic32.h) < 1e-10


def test_composition(harmonic32, quartic32):
    assert ck_compose(harmonic32.h, 0.1, 1).difference == 0.0
    assert ck_compose(harmonic32.h, 0.01, 100).difference < 1e-9
    assert ck_compose(quartic32.h, 0.05, 2).difference < 1e-11
    with pytest.raises(ValueError):
        ck_compose(harmonic32.h, 0.1, 0)


def test_ehrenfest_harmonic(harmonic64):
    res = ehrenfest_check(harmonic64, coherent_state(harmonic64.spec, 1.0), np.linspace(0, 10, 41))
    assert res.passes_q()
    assert np.max(res.residual_p) < 1e-8


def test_record_validation():
    with pytest.raises(ValueError):
        TrajectoryRecord(np.array([0.0, 1.0]), Q=np.array([1.0]))
