"""Polynomials over the canonical pair (q, p) with exact Gaussian-rational coefficients.

``hbar`` is kept symbolic: every operator term carries an integer power of it.
"""
from __future__ import annotations

import decimal
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from sympy.polys.domains import QQ_I

Coeff = type(QQ_I.one)

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)


def coeff(value) -> Coeff:
    """Coerce an int, Fraction, decimal string or complex pair to an exact coefficient."""
    if isinstance(value, Coeff):
        return value
    if isinstance(value, tuple):
        re, im = value
        return QQ_I(_rational(re), _rational(im))
    if isinstance(value, complex):
        return QQ_I(_rational(value.real), _rational(value.imag))
    return QQ_I(_rational(value), 0)


def _rational(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, Fraction):
        return x
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    return Fraction(x)


def to_complex(c: Coeff) -> complex:
    return complex(float(c.x), float(c.y))


def _decimal_text(x) -> str:
    frac = _rational(x)
    den = frac.denominator
    for prime in (2, 5):
        while den % prime == 0:
            den //= prime
    if den != 1:
        raise ValueError(f"coefficient {frac} has no finite decimal expansion")
    if frac.denominator == 1:
        return str(frac.numerator)
    with decimal.localcontext() as ctx:
        ctx.prec = 1000
        d = decimal.Decimal(frac.numerator) / decimal.Decimal(frac.denominator)
    return format(d.normalize(), "f")


def _word_text(word: str) -> str:
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        parts.append(word[i] if run == 1 else f"{word[i]}^{run}")
        i = j
    return "*".join(parts)


def _term_text(c: Coeff, hbar_power: int, body: str) -> tuple[bool, str]:
    """Return (negative, text) for one term; ``body`` is the already printed monomial."""
    x, y = c.x, c.y
    negative = False
    factors = []
    if y == 0:
        negative = x < 0
        if abs(x) != 1:
            factors.append(_decimal_text(abs(x)))
    elif x == 0:
        negative = y < 0
        if abs(y) != 1:
            factors.append(_decimal_text(abs(y)))
        factors.append("i")
    else:
        sign = "-" if y < 0 else "+"
        mag = abs(y)
        im = "i" if mag == 1 else f"{_decimal_text(mag)}*i"
        factors.append(f"({_decimal_text(x)} {sign} {im})")
    if hbar_power == 1:
        factors.append("hbar")
    elif hbar_power > 1:
        factors.append(f"hbar^{hbar_power}")
    if len(factors) > 1:
        scalar = "(" + "*".join(factors) + ")"
    else:
        scalar = factors[0] if factors else ""
    if scalar and body:
        return negative, f"{scalar}*{body}"
    return negative, scalar or body or "1"


def _join_terms(pieces: list[tuple[bool, str]]) -> str:
    if not pieces:
        return "0"
    out = []
    for idx, (neg, text) in enumerate(pieces):
        if idx == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f" - {text}" if neg else f" + {text}")
    return "".join(out)


def _word_order(word: str) -> tuple:
    # longer words first; within a length, q sorts before p
    return (-len(word), word.replace("q", "0").replace("p", "1"))


class OperatorPolynomial:
    """Noncommutative polynomial in q, p; each term is (coefficient, hbar power, word).

    Words are strings over ``"qp"`` kept in written (operator) order.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, str], object] | Iterable = ()):
        acc: dict[tuple[int, str], Coeff] = {}
        items = terms.items() if isinstance(terms, Mapping) else (((h, w), c) for c, h, w in terms)
        for (hp, word), c in items:
            if hp < 0 or set(word) - {"q", "p"}:
                raise ValueError(f"invalid term: hbar^{hp} * {word!r}")
            key = (int(hp), word)
            acc[key] = acc.get(key, ZERO) + coeff(c)
        self._terms = {k: v for k, v in acc.items() if v != ZERO}

    @classmethod
    def scalar(cls, c, hbar_power: int = 0) -> "OperatorPolynomial":
        return cls({(hbar_power, ""): c})

    @classmethod
    def symbol(cls, name: str) -> "OperatorPolynomial":
        if name not in ("q", "p"):
            raise ValueError(f"unknown operator symbol {name!r}")
        return cls({(0, name): ONE})

    @property
    def terms(self) -> list[tuple[Coeff, int, str]]:
        return [(c, hp, w) for (hp, w), c in self._sorted_items()]

    def items(self) -> Iterator[tuple[tuple[int, str], Coeff]]:
        return iter(self._terms.items())

    def _sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: (_word_order(kv[0][1]), kv[0][0]))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((len(w) for _, w in self._terms), default=0)

    def hbar_powers(self) -> set[int]:
        return {hp for hp, _ in self._terms}

    def is_normal_ordered(self) -> bool:
        return all("pq" not in w for _, w in self._terms)

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return OperatorPolynomial(out)

    def __neg__(self) -> "OperatorPolynomial":
        return OperatorPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def __mul__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out: dict[tuple[int, str], Coeff] = {}
        for (h1, w1), c1 in self._terms.items():
            for (h2, w2), c2 in other._terms.items():
                k = (h1 + h2, w1 + w2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return OperatorPolynomial(out)

    def __pow__(self, n: int) -> "OperatorPolynomial":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = OperatorPolynomial.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c, hbar_power: int = 0) -> "OperatorPolynomial":
        c = coeff(c)
        return OperatorPolynomial({(hp + hbar_power, w): v * c for (hp, w), v in self._terms.items()})

    def to_text(self) -> str:
        return _join_terms([_term_text(c, hp, _word_text(w)) for (hp, w), c in self._sorted_items()])

    __str__ = to_text

    def __repr__(self):
        return f"OperatorPolynomial({self.to_text()!r})"


class CommutativePolynomial:
    """Commuting polynomial in (q, p) keyed by (q power, p power)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | Iterable = ()):
        acc: dict[tuple[int, int], Coeff] = {}
        items = terms.items() if isinstance(terms, Mapping) else (((m, n), c) for c, m, n in terms)
        for (m, n), c in items:
            if m < 0 or n < 0:
                raise ValueError(f"negative power in monomial q^{m} p^{n}")
            acc[(m, n)] = acc.get((m, n), ZERO) + coeff(c)
        self._terms = {k: v for k, v in acc.items() if v != ZERO}

    @property
    def terms(self) -> list[tuple[Coeff, int, int]]:
        return [(c, m, n) for (m, n), c in sorted(self._terms.items(), key=lambda kv: (-sum(kv[0]), -kv[0][0]))]

    def items(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((m + n for m, n in self._terms), default=0)

    def is_real(self) -> bool:
        return all(c.y == 0 for c in self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, CommutativePolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return CommutativePolynomial(out)

    def __neg__(self):
        return CommutativePolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict[tuple[int, int], Coeff] = {}
        for (m1, n1), c1 in self._terms.items():
            for (m2, n2), c2 in other._terms.items():
                k = (m1 + m2, n1 + n2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return CommutativePolynomial(out)

    def diff_q(self) -> "CommutativePolynomial":
        return CommutativePolynomial({(m - 1, n): c * m for (m, n), c in self._terms.items() if m > 0})

    def diff_p(self) -> "CommutativePolynomial":
        return CommutativePolynomial({(m, n - 1): c * n for (m, n), c in self._terms.items() if n > 0})

    def __call__(self, q: float, p: float) -> complex:
        total = 0j
        for (m, n), c in self._terms.items():
            total += to_complex(c) * q**m * p**n
        return total

    def evaluate_real(self, q: float, p: float) -> float:
        """Evaluate a real-coefficient polynomial as a float."""
        total = 0.0
        for (m, n), c in self._terms.items():
            total += float(c.x) * q**m * p**n
        return total

    def to_text(self) -> str:
        pieces = []
        for c, m, n in self.terms:
            body = _word_text("q" * m + "p" * n)
            pieces.append(_term_text(c, 0, body))
        return _join_terms(pieces)

    __str__ = to_text

    def __repr__(self):
        return f"CommutativePolynomial({self.to_text()!r})"
