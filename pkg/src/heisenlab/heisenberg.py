"""Heisenberg-picture evolution: exact conjugation, truncated Hadamard series,
expectation trajectories and the checks built on them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .models import ModelOperators, check_truncation
from .operators import (
    EvolutionParams,
    as_matrix,
    as_state,
    commutator,
    expm_from_spectrum,
    hermitian_expm,
    interior,
    maxnorm,
    spectral,
)


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    Q: np.ndarray | None = None
    P: np.ndarray | None = None
    varQ: np.ndarray | None = None
    varP: np.ndarray | None = None
    Qcl: np.ndarray | None = None
    Pcl: np.ndarray | None = None
    errQ: np.ndarray | None = None
    errP: np.ndarray | None = None

    COLUMNS = ("Q", "P", "varQ", "varP", "Qcl", "Pcl", "errQ", "errP")

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-D sequence")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name in self.COLUMNS:
            col = getattr(self, name)
            if col is None:
                continue
            col = np.asarray(col, dtype=float)
            if col.shape != times.shape:
                raise ValueError(f"column {name} has length {col.size}, expected {times.size}")
            object.__setattr__(self, name, col)
        for name in ("varQ", "varP"):
            col = getattr(self, name)
            if col is not None and np.any(col < -1e-12):
                raise ValueError(f"{name} is negative beyond round-off: min {col.min():.3e}")

    def __len__(self):
        return self.times.size

    def with_classical(self, Qcl, Pcl) -> "TrajectoryRecord":
        Qcl = np.asarray(Qcl, dtype=float)
        Pcl = np.asarray(Pcl, dtype=float)
        errQ = np.abs(self.Q - Qcl) if self.Q is not None else None
        errP = np.abs(self.P - Pcl) if self.P is not None else None
        return replace(self, Qcl=Qcl, Pcl=Pcl, errQ=errQ, errP=errP)


class Propagator:
    """Spectral cache for e^{-i H t / hbar}; avoids re-diagonalizing per time point."""

    def __init__(self, h, hbar: float = 1.0):
        self.evals, self.evecs = spectral(h)
        self.hbar = hbar

    def unitary(self, dt: float) -> np.ndarray:
        return expm_from_spectrum(self.evals, self.evecs, dt / self.hbar)

    def conjugate(self, xi, dt: float) -> np.ndarray:
        """U^dagger xi U with U = e^{-i H dt / hbar}."""
        u = self.unitary(dt)
        return u.conj().T @ xi @ u

    def expectations(self, psi0, ops, times) -> np.ndarray:
        """Real parts of <psi(t)|A|psi(t)> for each operator A and time t; shape (len(ops), len(times))."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self.evecs.conj().T @ psi0
        phases = np.exp(-1j * np.outer(times, self.evals) / self.hbar)
        amps = phases * coeffs  # eigenbasis amplitudes, one row per time
        out = np.empty((len(ops), times.size))
        for i, a in enumerate(ops):
            a_eig = self.evecs.conj().T @ a @ self.evecs
            out[i] = np.einsum("ti,ij,tj->t", amps.conj(), a_eig, amps).real
        return out

    def states(self, psi0, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self.evecs.conj().T @ psi0
        phases = np.exp(-1j * np.outer(times, self.evals) / self.hbar)
        return (phases * coeffs) @ self.evecs.T


def exact_heisenberg_op(h, xi, params: EvolutionParams, hbar: float = 1.0) -> np.ndarray:
    """e^{i H dt/hbar} xi e^{-i H dt/hbar}."""
    h, xi = as_matrix(h), as_matrix(xi)
    if h.shape != xi.shape:
        raise ValueError(f"dimension mismatch: {h.shape[0]} vs {xi.shape[0]}")
    if params.dt == 0:
        return xi.copy()
    u = hermitian_expm(h, params.dt / hbar)
    return u.conj().T @ xi @ u


def hadamard_terms(h, xi, dt: float, order: int, hbar: float = 1.0) -> list[np.ndarray]:
    """Terms (i dt/hbar)^n / n! ad_H^n(xi) for n = 0..order, built iteratively."""
    h, xi = as_matrix(h), as_matrix(xi)
    factor = 1j * dt / hbar
    terms = [xi.copy()]
    term = xi
    for n in range(1, order + 1):
        term = commutator(h, term) * (factor / n)
        terms.append(term)
    return terms


def hadamard_truncated(h, xi, params: EvolutionParams, hbar: float = 1.0) -> np.ndarray:
    """Sum of the Hadamard series through order ``params.order``."""
    acc = np.zeros_like(as_matrix(xi))
    for term in hadamard_terms(h, xi, params.dt, params.order, hbar):
        acc = acc + term
    return acc


def _prepare(model: ModelOperators, psi0) -> np.ndarray:
    psi0 = as_state(psi0)
    if psi0.size != model.dim:
        raise ValueError(f"dimension mismatch: state {psi0.size} vs model {model.dim}")
    check_truncation(model, psi0)
    return psi0


def guard_along(model: ModelOperators, prop: Propagator, psi0, times) -> None:
    """Apply the truncation guard to every evolved state psi(t0 + t)."""
    for psi in prop.states(psi0, times):
        check_truncation(model, psi)


def expectation_trajectory(model: ModelOperators, psi0, t_grid, t0: float | None = None) -> TrajectoryRecord:
    """Q(t), P(t) and variances, evaluated on the evolved state (equivalent to conjugating q, p)."""
    psi0 = _prepare(model, psi0)
    times = np.asarray(t_grid, dtype=float)
    t0 = float(times[0]) if t0 is None else t0
    prop = Propagator(model.h, model.hbar)
    guard_along(model, prop, psi0, times - t0)
    q, p = model.q, model.p
    Q, P, Q2, P2 = prop.expectations(psi0, [q, p, q @ q, p @ p], times - t0)
    return TrajectoryRecord(times, Q=Q, P=P, varQ=Q2 - Q**2, varP=P2 - P**2)


def expectation_trajectory_operator(model: ModelOperators, psi0, t_grid, t0: float | None = None) -> TrajectoryRecord:
    """Same as :func:`expectation_trajectory` but by explicit conjugation of q and p."""
    psi0 = _prepare(model, psi0)
    times = np.asarray(t_grid, dtype=float)
    t0 = float(times[0]) if t0 is None else t0
    prop = Propagator(model.h, model.hbar)
    cols = {k: [] for k in ("Q", "P", "Q2", "P2")}
    for t in times:
        qh = prop.conjugate(model.q, t - t0)
        ph = prop.conjugate(model.p, t - t0)
        for key, op in (("Q", qh), ("P", ph), ("Q2", qh @ qh), ("P2", ph @ ph)):
            cols[key].append(np.vdot(psi0, op @ psi0).real)
    Q, P = np.array(cols["Q"]), np.array(cols["P"])
    return TrajectoryRecord(times, Q=Q, P=P, varQ=np.array(cols["Q2"]) - Q**2, varP=np.array(cols["P2"]) - P**2)


def energy_trajectory(model: ModelOperators, psi0, t_grid) -> np.ndarray:
    psi0 = _prepare(model, psi0)
    times = np.asarray(t_grid, dtype=float)
    return Propagator(model.h, model.hbar).expectations(psi0, [model.h], times - times[0])[0]


def velocity_operator(model: ModelOperators, xi) -> np.ndarray:
    """(i/hbar)[H, xi]."""
    return 1j / model.hbar * commutator(model.h, xi)


def difference_quotient(model: ModelOperators, psi0, dt: float) -> tuple[float, float]:
    """Forward quotients (Q(t0+dt) - Q(t0))/dt and (P(t0+dt) - P(t0))/dt."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    psi0 = _prepare(model, psi0)
    prop = Propagator(model.h, model.hbar)
    guard_along(model, prop, psi0, [dt])
    (q0, q1), (p0, p1) = prop.expectations(psi0, [model.q, model.p], [0.0, dt])
    return (q1 - q0) / dt, (p1 - p0) / dt


@dataclass(frozen=True)
class EqualityReport:
    """Both sides of <(i/hbar)[H, xi]> = <(i/hbar)[H, xi_H(t0)]> for xi = q and p."""

    lhs_q: complex
    rhs_q: complex
    lhs_p: complex
    rhs_p: complex
    scale: float

    @property
    def difference(self) -> float:
        return max(abs(self.lhs_q - self.rhs_q), abs(self.lhs_p - self.rhs_p))

    @property
    def passes(self) -> bool:
        return self.difference < 1e-12 * self.scale

    def to_dict(self) -> dict:
        return {
            "lhs_q": [self.lhs_q.real, self.lhs_q.imag],
            "rhs_q": [self.rhs_q.real, self.rhs_q.imag],
            "lhs_p": [self.lhs_p.real, self.lhs_p.imag],
            "rhs_p": [self.rhs_p.real, self.rhs_p.imag],
            "difference": self.difference,
            "scale": self.scale,
            "passes": self.passes,
        }


def commutator_expectation_equality(model: ModelOperators, psi0, t0: float = 0.0) -> EqualityReport:
    psi0 = _prepare(model, psi0)
    at_t0 = EvolutionParams(t0=t0, dt=0.0)
    sides = []
    scale = 0.0
    for xi in (model.q, model.p):
        vel = velocity_operator(model, xi)
        vel_h = velocity_operator(model, exact_heisenberg_op(model.h, xi, at_t0, model.hbar))
        sides.append(complex(np.vdot(psi0, vel @ psi0)))
        sides.append(complex(np.vdot(psi0, vel_h @ psi0)))
        scale = max(scale, maxnorm(vel))
    return EqualityReport(*sides, scale=max(scale, 1.0))


def heisenberg_residual(model: ModelOperators, t: float, step: float, xi=None) -> float:
    """Interior max-norm of the central-difference d/dt xi_H(t) minus (i/hbar)[H, xi_H(t)]."""
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step}")
    xi = model.q if xi is None else as_matrix(xi)
    prop = Propagator(model.h, model.hbar)
    deriv = (prop.conjugate(xi, t + step) - prop.conjugate(xi, t - step)) / (2 * step)
    rhs = velocity_operator(model, prop.conjugate(xi, t))
    return maxnorm(interior(deriv - rhs, model.cut))


@dataclass(frozen=True)
class CompositionReport:
    n: int
    dt: float
    difference: float
    bound: float

    @property
    def passes(self) -> bool:
        return self.difference <= self.bound

    def to_dict(self) -> dict:
        return {"n": self.n, "dt": self.dt, "difference": self.difference, "bound": self.bound, "passes": self.passes}


def ck_compose(h, dt: float, n: int, hbar: float = 1.0) -> CompositionReport:
    """Compare n successive short-time propagators with one propagator over n*dt."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    prop = Propagator(h, hbar)
    step = prop.unitary(dt)
    composed = step
    for _ in range(n - 1):
        composed = composed @ step
    diff = maxnorm(composed - prop.unitary(n * dt))
    return CompositionReport(n, dt, diff, n * 1e-12 * step.shape[0])


# central first-derivative stencil, fourth order: (f(-2h) - 8 f(-h) + 8 f(h) - f(2h)) / 12h
_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


@dataclass(frozen=True)
class EhrenfestResult:
    times: np.ndarray
    dQdt: np.ndarray
    velocity: np.ndarray  # P/m
    dPdt: np.ndarray
    force: np.ndarray  # <(i/hbar)[H, p]>

    @property
    def residual_q(self) -> np.ndarray:
        return np.abs(self.dQdt - self.velocity)

    @property
    def residual_p(self) -> np.ndarray:
        return np.abs(self.dPdt - self.force)

    def passes_q(self, rtol: float = 1e-8, atol: float = 1e-10) -> bool:
        return bool(np.all(self.residual_q < rtol * np.abs(self.velocity) + atol))


def ehrenfest_check(model: ModelOperators, psi0, t_grid, step: float = 1e-3) -> EhrenfestResult:
    """dQ/dt and dP/dt by central differences of the expectation trajectory.

    Compared against P/m and the mean force <(i/hbar)[H, p]>.
    """
    psi0 = _prepare(model, psi0)
    times = np.asarray(t_grid, dtype=float)
    prop = Propagator(model.h, model.hbar)
    rel = times - times[0]
    guard_along(model, prop, psi0, rel)
    force_op = velocity_operator(model, model.p)
    Q, P, F = prop.expectations(psi0, [model.q, model.p, force_op], rel)
    dQ = np.zeros_like(rel)
    dP = np.zeros_like(rel)
    for k, w in _STENCIL:
        q_k, p_k = prop.expectations(psi0, [model.q, model.p], rel + k * step)
        dQ += w * q_k
        dP += w * p_k
    return EhrenfestResult(times, dQ / step, P / model.mass, dP / step, F)

