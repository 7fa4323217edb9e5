"""Dense complex linear algebra for small operator matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; states are
normalized 1-D arrays. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_ATOL = 1e-12


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class EvolutionParams:
    """Start time, step and Hadamard truncation order.

    ``dt = 0`` is accepted so that the identity transform can be exercised.
    """

    t0: float = 0.0
    dt: float = 0.1
    order: int = 1

    def __post_init__(self):
        if not np.isfinite(self.dt) or self.dt < 0:
            raise ValueError(f"dt must be finite and >= 0, got {self.dt}")
        if int(self.order) != self.order or self.order < 0:
            raise ValueError(f"order must be a nonnegative integer, got {self.order}")


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimensionError(f"matrix dimension must be >= 2, got {m.shape[0]}")
    return m


def maxnorm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def interior(a: np.ndarray, cut: int = 2) -> np.ndarray:
    """Drop the last ``cut`` basis indices (rows and columns).

    Truncated ladder operators misrepresent the algebra only in that corner.
    """
    n = a.shape[0] - cut
    if n < 1:
        raise DimensionError(f"cannot cut {cut} indices from dimension {a.shape[0]}")
    return a[:n, :n]


def hermiticity_defect(a) -> float:
    a = np.asarray(a)
    return maxnorm(a - a.conj().T)


def is_hermitian(a, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_defect(a) <= rtol * max(maxnorm(a), np.finfo(float).tiny)


def require_hermitian(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a)
    if not is_hermitian(m):
        raise NotHermitianError(
            f"{name} is not Hermitian: max|A - A^dagger| = {hermiticity_defect(m):.3e} "
            f"(allowed {HERMITIAN_RTOL:.0e} * maxnorm = {HERMITIAN_RTOL * maxnorm(m):.3e})"
        )
    return m


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def spectral(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian matrix."""
    h = require_hermitian(h, "generator")
    return np.linalg.eigh(h)


def expm_from_spectrum(evals: np.ndarray, evecs: np.ndarray, theta: float) -> np.ndarray:
    return (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T


def hermitian_expm(h, theta: float) -> np.ndarray:
    """Return ``exp(-i * theta * h)`` for Hermitian ``h`` via its eigendecomposition."""
    evals, evecs = spectral(h)
    return expm_from_spectrum(evals, evecs, theta)


def normalize(v) -> np.ndarray:
    psi = np.asarray(v, dtype=np.complex128).reshape(-1)
    if psi.size < 2:
        raise DimensionError(f"state dimension must be >= 2, got {psi.size}")
    norm = np.linalg.norm(psi)
    if norm == 0 or not np.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return psi / norm


def as_state(v) -> np.ndarray:
    """Validate that ``v`` is already normalized and return it as complex."""
    psi = np.asarray(v, dtype=np.complex128).reshape(-1)
    if abs(np.vdot(psi, psi).real - 1.0) >= NORM_ATOL:
        raise ValueError(f"state is not normalized: <psi|psi> = {np.vdot(psi, psi).real!r}")
    return psi


def expectation(psi, a) -> complex:
    psi = as_state(psi)
    a = as_matrix(a)
    if psi.size != a.shape[0]:
        raise DimensionError(f"dimension mismatch: state {psi.size} vs operator {a.shape[0]}")
    return complex(np.vdot(psi, a @ psi))


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a
