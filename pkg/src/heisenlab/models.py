"""Concrete one-dimensional models: truncated Fock basis and position grid.

Hamiltonians have the form p^2/2m + m w^2 q^2/2 + lam q^4, or a custom
operator polynomial realized with the model's q and p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .operators import commutator, frozen, interior, is_hermitian, maxnorm, normalize, require_hermitian
from .symbolic import classical_symbol, normal_order, parse, realize

TAIL_MASS_TOL = 1e-12
BOUNDARY_AMP_TOL = 1e-10
BOUNDARY_MARGIN = 10


class TruncationError(ValueError):
    """A state puts non-negligible weight where the truncated basis is unfaithful."""


@dataclass(frozen=True)
class ModelSpec:
    basis: Literal["fock", "grid"] = "fock"
    dim: int = 32
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    lam: float = 0.0
    grid_extent: float | None = None
    custom_expr: str | None = None
    # grid only: drop the potential entirely (free particle)
    free: bool = False

    def __post_init__(self):
        if self.basis not in ("fock", "grid"):
            raise ValueError(f"basis must be 'fock' or 'grid', got {self.basis!r}")
        if int(self.dim) != self.dim or self.dim < 8:
            raise ValueError(f"dim must be an integer >= 8, got {self.dim}")
        for name in ("hbar", "mass", "omega"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive, got {val}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.basis == "grid":
            if self.grid_extent is None or not self.grid_extent > 0:
                raise ValueError("grid basis needs grid_extent > 0")
        if self.free and self.basis != "grid":
            raise ValueError("free-particle models are only available on the grid basis")

    @property
    def sigma2(self) -> float:
        """Position variance of the harmonic ground state, hbar / (2 m w)."""
        return self.hbar / (2 * self.mass * self.omega)

    @property
    def is_quadratic(self) -> bool:
        if self.custom_expr is not None:
            return classical_symbol(normal_order(parse(self.custom_expr))).degree <= 2
        return self.lam == 0


@dataclass(frozen=True)
class ModelOperators:
    spec: ModelSpec
    q: np.ndarray
    p: np.ndarray
    h: np.ndarray
    grid: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("q", "p", "h"):
            object.__setattr__(self, name, frozen(require_hermitian(getattr(self, name), name)))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    @property
    def hbar(self) -> float:
        return self.spec.hbar

    @property
    def mass(self) -> float:
        return self.spec.mass

    @property
    def omega(self) -> float:
        return self.spec.omega

    @property
    def cut(self) -> int:
        """Top indices excluded from operator comparisons (Fock basis only)."""
        return 2 if self.spec.basis == "fock" else 0


def _hamiltonian(spec: ModelSpec, q: np.ndarray, p: np.ndarray, ops_holder) -> np.ndarray:
    if spec.custom_expr is not None:
        h = realize(parse(spec.custom_expr), ops_holder, spec.hbar)
        if not is_hermitian(h):
            raise ValueError(f"custom Hamiltonian {spec.custom_expr!r} does not realize to a Hermitian matrix")
    else:
        h = p @ p / (2 * spec.mass)
        if not spec.free:
            q2 = q @ q
            h = h + 0.5 * spec.mass * spec.omega**2 * q2 + spec.lam * (q2 @ q2)
    return (h + h.conj().T) / 2


class _QP:
    def __init__(self, q, p, hbar):
        self.q, self.p, self.hbar = q, p, hbar


def ladder(dim: int) -> np.ndarray:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(np.complex128)


def build_fock_model(spec: ModelSpec) -> ModelOperators:
    if spec.basis != "fock":
        raise ValueError(f"build_fock_model needs basis='fock', got {spec.basis!r}")
    a = ladder(spec.dim)
    ad = a.conj().T
    q = math.sqrt(spec.hbar / (2 * spec.mass * spec.omega)) * (a + ad)
    p = 1j * math.sqrt(spec.mass * spec.hbar * spec.omega / 2) * (ad - a)
    h = _hamiltonian(spec, q, p, _QP(q, p, spec.hbar))
    return ModelOperators(spec, q, p, h)


def build_grid_model(spec: ModelSpec) -> ModelOperators:
    """Dirichlet grid on [-L, L]; p = -i hbar D with D the central difference."""
    if spec.basis != "grid":
        raise ValueError(f"build_grid_model needs basis='grid', got {spec.basis!r}")
    n = spec.dim
    L = spec.grid_extent
    dx = 2 * L / (n + 1)
    x = -L + dx * np.arange(1, n + 1)
    q = np.diag(x).astype(np.complex128)
    d = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2 * dx)
    p = -1j * spec.hbar * d
    h = _hamiltonian(spec, q, p, _QP(q, p, spec.hbar))
    return ModelOperators(spec, q, p, h, grid=x)


def build_model(spec: ModelSpec) -> ModelOperators:
    return build_fock_model(spec) if spec.basis == "fock" else build_grid_model(spec)


def coherent_state(spec: ModelSpec, alpha: complex) -> np.ndarray:
    """Truncated coherent state |alpha>; rejects truncations that lose >= 1e-12 of the norm."""
    if spec.basis != "fock":
        raise ValueError("coherent_state needs a fock-basis spec")
    alpha = complex(alpha)
    amps = np.zeros(spec.dim, dtype=np.complex128)
    amps[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, spec.dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail >= TAIL_MASS_TOL:
        raise TruncationError(
            f"coherent state alpha={alpha} loses tail mass {tail:.3e} >= {TAIL_MASS_TOL:.0e} "
            f"at dim={spec.dim}; increase dim"
        )
    return normalize(amps)


def fock_state(spec: ModelSpec, n: int) -> np.ndarray:
    if spec.basis != "fock":
        raise ValueError("fock_state needs a fock-basis spec")
    if not 0 <= n < spec.dim - 2:
        raise TruncationError(f"Fock state {n} lies outside the interior block of dim={spec.dim}")
    psi = np.zeros(spec.dim, dtype=np.complex128)
    psi[n] = 1.0
    return psi


def gaussian_grid_state(model: ModelOperators, alpha: complex) -> np.ndarray:
    """Minimum-uncertainty packet on the grid with the same moments as |alpha>."""
    spec = model.spec
    if spec.basis != "grid":
        raise ValueError("gaussian_grid_state needs a grid model")
    alpha = complex(alpha)
    x0 = math.sqrt(2 * spec.hbar / (spec.mass * spec.omega)) * alpha.real
    p0 = math.sqrt(2 * spec.mass * spec.hbar * spec.omega) * alpha.imag
    x = model.grid
    psi = np.exp(-((x - x0) ** 2) / (4 * spec.sigma2) + 1j * p0 * x / spec.hbar)
    psi = normalize(psi)
    check_truncation(model, psi)
    return psi


def ground_state(model: ModelOperators) -> np.ndarray:
    _, vecs = np.linalg.eigh(model.h)
    return normalize(vecs[:, 0])


def check_truncation(model: ModelOperators, psi: np.ndarray) -> None:
    """Raise if ``psi`` has weight where the truncated model is unfaithful.

    Fock basis: population of the top two levels must stay below 1e-12.
    Grid basis: amplitudes within 10 points of either wall must stay below 1e-10.
    """
    psi = np.asarray(psi)
    if model.spec.basis == "fock":
        top = float(np.sum(np.abs(psi[-2:]) ** 2))
        if top >= TAIL_MASS_TOL:
            raise TruncationError(f"top-level population {top:.3e} >= {TAIL_MASS_TOL:.0e}; increase dim")
    else:
        m = BOUNDARY_MARGIN
        edge = max(maxnorm(psi[:m]), maxnorm(psi[-m:]))
        if edge >= BOUNDARY_AMP_TOL:
            raise TruncationError(
                f"amplitude {edge:.3e} within {m} points of the grid wall; increase grid_extent"
            )


def interior_ccr_defect(model: ModelOperators) -> float:
    """max|[q,p] - i hbar I| over the interior block, in units of hbar."""
    c = commutator(model.q, model.p) - 1j * model.hbar * np.eye(model.dim)
    return maxnorm(interior(c, 2)) / model.hbar
