"""Classical counterpart: Poisson brackets, Hamilton's equations, trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np

from .heisenberg import TrajectoryRecord
from .models import ModelSpec
from .symbolic import CommutativePolynomial, classical_symbol, normal_order, parse

FD_STEP = 1e-6

Q_COORD = CommutativePolynomial({(1, 0): 1})
P_COORD = CommutativePolynomial({(0, 1): 1})


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float
    t: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.q, self.p, self.t)):
            raise ValueError(f"non-finite phase point {self}")


@dataclass(frozen=True)
class ClassicalHamiltonian:
    """H = p^2/2m + m w^2 q^2/2 + lam q^4, or a real commuting polynomial ``custom``."""

    mass: float = 1.0
    omega: float = 1.0
    lam: float = 0.0
    custom: CommutativePolynomial | None = None
    free: bool = False

    def __post_init__(self):
        if self.custom is None:
            if not self.mass > 0 or not self.omega > 0 or not self.lam >= 0:
                raise ValueError(f"invalid parameters m={self.mass} w={self.omega} lam={self.lam}")
        elif not self.custom.is_real():
            raise ValueError(f"classical Hamiltonian must have real coefficients: {self.custom}")

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> "ClassicalHamiltonian":
        """Commuting-variable counterpart; custom expressions use their hbar -> 0 symbol."""
        if spec.custom_expr is not None:
            return cls(spec.mass, spec.omega, custom=classical_symbol(normal_order(parse(spec.custom_expr))))
        return cls(spec.mass, spec.omega, spec.lam, free=spec.free)

    @property
    def time_scale(self) -> float:
        """1/omega, or 1 for free particles."""
        return 1.0 if self.free else 1.0 / self.omega

    def polynomial(self) -> CommutativePolynomial:
        if self.custom is not None:
            return self.custom
        terms = {(0, 2): 1 / (2 * self.mass)}
        if not self.free:
            terms[(2, 0)] = self.mass * self.omega**2 / 2
            terms[(4, 0)] = self.lam
        return CommutativePolynomial(terms)

    @property
    def separable(self) -> bool:
        return all(m == 0 or n == 0 for _, m, n in self.polynomial().terms)

    def value(self, q: float, p: float) -> float:
        if self.custom is not None:
            return self.custom.evaluate_real(q, p)
        v = 0.0 if self.free else 0.5 * self.mass * self.omega**2 * q * q + self.lam * q**4
        return p * p / (2 * self.mass) + v

    def dH_dq(self, q: float, p: float) -> float:
        if self.custom is not None:
            return self.custom.diff_q().evaluate_real(q, p)
        if self.free:
            return 0.0
        return self.mass * self.omega**2 * q + 4 * self.lam * q**3

    def dH_dp(self, q: float, p: float) -> float:
        if self.custom is not None:
            return self.custom.diff_p().evaluate_real(q, p)
        return p / self.mass


Field = Union[CommutativePolynomial, ClassicalHamiltonian, Callable[[float, float], float]]


def _analytic_partials(f, q: float, p: float):
    if isinstance(f, ClassicalHamiltonian):
        return f.dH_dq(q, p), f.dH_dp(q, p)
    if isinstance(f, CommutativePolynomial):
        return f.diff_q()(q, p).real, f.diff_p()(q, p).real
    return None


def _fd_partials(f, q: float, p: float, step: float):
    fn = f.value if isinstance(f, ClassicalHamiltonian) else f
    ev = (lambda a, b: complex(fn(a, b)).real)
    return (
        (ev(q + step, p) - ev(q - step, p)) / (2 * step),
        (ev(q, p + step) - ev(q, p - step)) / (2 * step),
    )


def poisson_bracket(
    f: Field,
    g: Field,
    at: PhasePoint,
    method: Literal["auto", "analytic", "fd"] = "auto",
    step: float = FD_STEP,
) -> float:
    """{f, g} = df/dq dg/dp - df/dp dg/dq at a phase point.

    Polynomials and ``ClassicalHamiltonian`` use exact partials; plain callables
    use central differences with ``step``.
    """
    parts = []
    for fld in (f, g):
        d = _analytic_partials(fld, at.q, at.p) if method != "fd" else None
        if d is None:
            if method == "analytic":
                raise TypeError(f"no analytic partials for {fld!r}")
            d = _fd_partials(fld, at.q, at.p, step)
        parts.append(d)
    (fq, fp), (gq, gp) = parts
    return fq * gp - fp * gq


def _rhs(hcl: ClassicalHamiltonian, q: float, p: float):
    return hcl.dH_dp(q, p), -hcl.dH_dq(q, p)


def hamilton_step(
    hcl: ClassicalHamiltonian,
    x: PhasePoint,
    dt: float,
    method: Literal["euler", "leapfrog", "rk4"] = "rk4",
) -> PhasePoint:
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    q, p = x.q, x.p
    if method == "euler":
        # q + {q,H} dt, p + {p,H} dt
        dq = poisson_bracket(Q_COORD, hcl, x)
        dp = poisson_bracket(P_COORD, hcl, x)
        return PhasePoint(q + dq * dt, p + dp * dt, x.t + dt)
    if method == "leapfrog":
        if not hcl.separable:
            raise ValueError("leapfrog needs a separable Hamiltonian T(p) + V(q)")
        p_half = p - 0.5 * dt * hcl.dH_dq(q, p)
        q_new = q + dt * hcl.dH_dp(q, p_half)
        p_new = p_half - 0.5 * dt * hcl.dH_dq(q_new, p_half)
        return PhasePoint(q_new, p_new, x.t + dt)
    if method == "rk4":
        k1 = _rhs(hcl, q, p)
        k2 = _rhs(hcl, q + 0.5 * dt * k1[0], p + 0.5 * dt * k1[1])
        k3 = _rhs(hcl, q + 0.5 * dt * k2[0], p + 0.5 * dt * k2[1])
        k4 = _rhs(hcl, q + dt * k3[0], p + dt * k3[1])
        q_new = q + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p_new = p + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        return PhasePoint(q_new, p_new, x.t + dt)
    raise ValueError(f"unknown method {method!r}; expected euler, leapfrog or rk4")


def integrate(hcl: ClassicalHamiltonian, x: PhasePoint, t_end: float, max_substep: float, method="rk4") -> PhasePoint:
    """Advance from ``x.t`` to ``t_end`` in equal substeps no longer than ``max_substep``."""
    span = t_end - x.t
    if span < 0:
        raise ValueError(f"cannot integrate backwards from {x.t} to {t_end}")
    if span == 0:
        return x
    n = max(1, math.ceil(span / max_substep - 1e-9))
    h = span / n
    q, p = x.q, x.p
    for _ in range(n):
        nxt = hamilton_step(hcl, PhasePoint(q, p), h, method)
        q, p = nxt.q, nxt.p
    return PhasePoint(q, p, t_end)


def classical_trajectory(
    hcl: ClassicalHamiltonian,
    x0: PhasePoint,
    t_grid,
    max_substep: float | None = None,
) -> TrajectoryRecord:
    """rk4 trajectory sampled on ``t_grid`` (substep <= 1e-3/omega by default)."""
    times = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if times[0] < x0.t:
        raise ValueError(f"t_grid starts at {times[0]} before the initial time {x0.t}")
    if max_substep is None:
        max_substep = 1e-3 * hcl.time_scale
    qs, ps = [], []
    x = x0
    for t in times:
        x = integrate(hcl, x, float(t), max_substep)
        qs.append(x.q)
        ps.append(x.p)
    return TrajectoryRecord(times, Qcl=np.array(qs), Pcl=np.array(ps))
