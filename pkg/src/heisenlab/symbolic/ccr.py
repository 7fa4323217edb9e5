"""Canonical commutation algebra: normal ordering, commutators, classical symbols.

Normal order puts every q to the left of every p using ``p q = q p - i hbar``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polynomial import (
    I_UNIT,
    ONE,
    ZERO,
    Coeff,
    CommutativePolynomial,
    OperatorPolynomial,
    QQ_I,
    to_complex,
)

_MINUS_I = QQ_I(0, -1)

# normal-ordered monomial key: (hbar power, q power, p power)
_Mono = tuple[int, int, int]


def _times_q(acc: dict[_Mono, Coeff]) -> dict[_Mono, Coeff]:
    # q^m p^n q = q^(m+1) p^n - i hbar n q^m p^(n-1)
    out: dict[_Mono, Coeff] = {}
    for (h, m, n), c in acc.items():
        k = (h, m + 1, n)
        out[k] = out.get(k, ZERO) + c
        if n:
            k = (h + 1, m, n - 1)
            out[k] = out.get(k, ZERO) + c * _MINUS_I * n
    return out


def _times_p(acc: dict[_Mono, Coeff]) -> dict[_Mono, Coeff]:
    return {(h, m, n + 1): c for (h, m, n), c in acc.items()}


def normal_order(u: OperatorPolynomial) -> OperatorPolynomial:
    """Rewrite ``u`` so that every word has the form q^m p^n."""
    total: dict[_Mono, Coeff] = {}
    for (hp, word), c in u.items():
        acc = {(hp, 0, 0): c}
        for letter in word:
            acc = _times_q(acc) if letter == "q" else _times_p(acc)
        for k, v in acc.items():
            total[k] = total.get(k, ZERO) + v
    return OperatorPolynomial({(h, "q" * m + "p" * n): c for (h, m, n), c in total.items()})


def sym_commutator(u: OperatorPolynomial, v: OperatorPolynomial) -> OperatorPolynomial:
    return normal_order(u * v - v * u)


def classical_symbol(u: OperatorPolynomial) -> CommutativePolynomial:
    """The hbar -> 0 symbol of a normal-ordered polynomial."""
    if not u.is_normal_ordered():
        raise ValueError("classical_symbol needs a normal-ordered polynomial; call normal_order first")
    return CommutativePolynomial({(w.count("q"), w.count("p")): c for (hp, w), c in u.items() if hp == 0})


def quantize(f: CommutativePolynomial) -> OperatorPolynomial:
    """Map q^m p^n to the normal-ordered word q^m p^n."""
    return OperatorPolynomial({(0, "q" * m + "p" * n): c for (m, n), c in f.items()})


def poisson(f: CommutativePolynomial, g: CommutativePolynomial) -> CommutativePolynomial:
    return f.diff_q() * g.diff_p() - f.diff_p() * g.diff_q()


@dataclass(frozen=True)
class DiracReport:
    u: OperatorPolynomial
    v: OperatorPolynomial
    commutator: OperatorPolynomial
    poisson: CommutativePolynomial
    discrepancy: OperatorPolynomial
    min_hbar_power: int | None  # None when the discrepancy vanishes identically

    @property
    def passes(self) -> bool:
        return self.min_hbar_power is None or self.min_hbar_power >= 2

    def to_dict(self) -> dict:
        return {
            "u": self.u.to_text(),
            "v": self.v.to_text(),
            "commutator": self.commutator.to_text(),
            "poisson": self.poisson.to_text(),
            "discrepancy": self.discrepancy.to_text(),
            "min_hbar_power": self.min_hbar_power,
            "passes": self.passes,
        }


def dirac_check(u: OperatorPolynomial, v: OperatorPolynomial) -> DiracReport:
    """Compare [u, v] with i*hbar times the quantized Poisson bracket of the symbols."""
    comm = sym_commutator(u, v)
    pb = poisson(classical_symbol(normal_order(u)), classical_symbol(normal_order(v)))
    d = comm - quantize(pb).scale(I_UNIT, hbar_power=1)
    return DiracReport(u, v, comm, pb, d, min(d.hbar_powers()) if not d.is_zero() else None)


def realize(u: OperatorPolynomial, model, hbar: float | None = None) -> np.ndarray:
    """Substitute ``model.q``, ``model.p`` for q, p and a number for hbar, keeping word order.

    ``hbar`` defaults to ``model.hbar``.
    """
    q = np.asarray(model.q, dtype=np.complex128)
    p = np.asarray(model.p, dtype=np.complex128)
    if hbar is None:
        hbar = model.hbar
    if q.shape != p.shape:
        raise ValueError(f"q and p shapes differ: {q.shape} vs {p.shape}")
    dim = q.shape[0]
    cache: dict[str, np.ndarray] = {"": np.eye(dim, dtype=np.complex128)}

    def word_matrix(word: str) -> np.ndarray:
        if word not in cache:
            prefix = word_matrix(word[:-1])
            cache[word] = prefix @ (q if word[-1] == "q" else p)
        return cache[word]

    out = np.zeros((dim, dim), dtype=np.complex128)
    for (hp, word), c in sorted(u.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], kv[0][0])):
        out += to_complex(c) * hbar**hp * word_matrix(word)
    return out


def realization_cut(*polys: OperatorPolynomial) -> int:
    """Number of top Fock indices to exclude when comparing realized products.

    A product of d truncated tridiagonal factors is exact on indices below
    N - d/2; the cut never drops below the 2 used for [q, p].
    """
    deg = max((u.degree for u in polys), default=0)
    return max(2, deg // 2 + 1)


def random_polynomial(rng: random.Random, max_degree: int = 4, max_terms: int = 6) -> OperatorPolynomial:
    """Random polynomial with words of length <= max_degree and coefficients in [-2, 2] (steps of 1/4)."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        length = rng.randint(0, max_degree)
        word = "".join(rng.choice("qp") for _ in range(length))
        num = 0
        while num == 0:
            num = rng.randint(-8, 8)
        terms[(0, word)] = terms.get((0, word), ZERO) + QQ_I(Fraction(num, 4), 0)
    poly = OperatorPolynomial(terms)
    if poly.is_zero():
        return OperatorPolynomial({(0, "q"): ONE})
    return poly


def random_pairs(count: int, seed: int = 42, max_degree: int = 4, max_terms: int = 6):
    rng = random.Random(seed)
    return [
        (random_polynomial(rng, max_degree, max_terms), random_polynomial(rng, max_degree, max_terms))
        for _ in range(count)
    ]
