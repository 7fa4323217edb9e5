import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisenlab.models import ModelSpec, build_fock_model
from heisenlab.operators import interior, maxnorm
from heisenlab.symbolic import (
    CommutativePolynomial,
    OperatorPolynomial,
    ParseError,
    classical_symbol,
    dirac_check,
    normal_order,
    parse,
    quantize,
    random_pairs,
    random_polynomial,
    realization_cut,
    realize,
    sym_commutator,
)
from heisenlab.symbolic.polynomial import to_complex

Q, P = OperatorPolynomial.symbol("q"), OperatorPolynomial.symbol("p")


@pytest.fixture(scope="module")
def fock48():
    return build_fock_model(ModelSpec(dim=48))


def brute_force_normal_order(u: OperatorPolynomial) -> dict:
    """Rewrite the leftmost 'pq' into 'qp' - i hbar until no 'pq' remains."""
    todo = {key: to_complex(c) for key, c in u.items()}
    done = {}
    while todo:
        (hp, word), c = todo.popitem()
        k = word.find("pq")
        if k < 0:
            done[(hp, word)] = done.get((hp, word), 0) + c
            continue
        swapped = (hp, word[:k] + "qp" + word[k + 2:])
        dropped = (hp + 1, word[:k] + word[k + 2:])
        todo[swapped] = todo.get(swapped, 0) + c
        todo[dropped] = todo.get(dropped, 0) - 1j * c
    return {k: v for k, v in done.items() if v != 0}


def test_parse_examples():
    terms = sorted((w, hp, to_complex(c)) for c, hp, w in parse("q*p - p*q").terms)
    assert terms == [("pq", 0, -1), ("qp", 0, 1)]
    assert [w for _, _, w in parse("p^2").terms] == ["pp"]


@pytest.mark.parametrize("src", ["0.5*m*q", "q*+", "q^^2", "q^-1", "(q", "q p", "2^q", "q^2^2"])
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse(src)


def test_parse_unknown_symbol_message():
    with pytest.raises(ParseError, match="unknown symbol 'm'"):
        parse("0.5*m*q")


def test_precedence():
    assert parse("-q^2") == -(Q * Q)
    assert parse("2*q + p*q") == Q.scale(2) + P * Q
    assert parse("(q + p)^2") == Q * Q + Q * P + P * Q + P * P


def test_normal_order_examples():
    assert normal_order(Q * P) == Q * P
    assert normal_order(P * Q).to_text() == "q*p - (i*hbar)"
    assert normal_order(parse("p*q*p*q")).to_text() == "q^2*p^2 - (3*i*hbar)*q*p - hbar^2"


def test_pqpq_against_matrices(fock48):
    u = parse("p*q*p*q")
    diff = realize(normal_order(u), fock48) - realize(u, fock48)
    assert maxnorm(interior(diff, realization_cut(u))) < 1e-8


def test_normal_order_matches_brute_force():
    rng = random.Random(7)
    for _ in range(100):
        u = random_polynomial(rng)
        got = {key: to_complex(c) for key, c in normal_order(u).items()}
        assert got == brute_force_normal_order(u)


def test_commutator_examples(fock48):
    assert sym_commutator(Q, P).to_text() == "(i*hbar)"
    q2 = parse("q^2")
    c = sym_commutator(q2, P)
    assert c.to_text() == "(2*i*hbar)*q"
    small = build_fock_model(ModelSpec(dim=16))
    mq2, mp = realize(q2, small), small.p
    assert maxnorm(interior(realize(c, small) - (mq2 @ mp - mp @ mq2), 2)) < 1e-8
    c = sym_commutator(q2, parse("p^2"))
    assert c.to_text() == "(4*i*hbar)*q*p + (2*hbar^2)"
    mp2 = realize(parse("p^2"), fock48)
    mq2 = realize(q2, fock48)
    assert maxnorm(interior(realize(c, fock48) - (mq2 @ mp2 - mp2 @ mq2), 2)) < 1e-8


def test_classical_symbol_examples():
    assert classical_symbol(parse("q*p - i*hbar")) == CommutativePolynomial({(1, 1): 1})
    assert classical_symbol(normal_order(P * Q)) == CommutativePolynomial({(1, 1): 1})
    assert classical_symbol(parse("p^2*0.5 + 0.5*q^2")).to_text() == "0.5*q^2 + 0.5*p^2"
    with pytest.raises(ValueError):
        classical_symbol(P * Q)


def test_dirac_examples(fock48):
    assert dirac_check(Q, P).discrepancy.is_zero()
    rep = dirac_check(parse("q^2"), parse("p^2"))
    assert rep.discrepancy.to_text() == "(2*hbar^2)"
    assert rep.min_hbar_power == 2
    rep = dirac_check(parse("q^3"), parse("p^3"))
    assert rep.min_hbar_power >= 2
    for hbar in (1.0, 0.5):
        model = build_fock_model(ModelSpec(dim=48, hbar=hbar))
        u, v = realize(parse("q^3"), model), realize(parse("p^3"), model)
        pb = realize(quantize(rep.poisson), model)
        expected = u @ v - v @ u - 1j * hbar * pb
        assert maxnorm(interior(realize(rep.discrepancy, model) - expected, 4)) < 1e-8 * maxnorm(interior(u @ v, 4))


def test_random_pairs_dirac_property():
    for u, v in random_pairs(200):
        assert dirac_check(u, v).passes


def test_exact_on_generators():
    one = OperatorPolynomial.scalar(1)
    for raw, _ in random_pairs(30, seed=3):
        u = quantize(classical_symbol(normal_order(raw)))
        for g in (Q, P, one):
            assert dirac_check(u, g).discrepancy.is_zero()
            assert dirac_check(g, u).discrepancy.is_zero()


def test_generator_discrepancy_from_ordering(fock48):
    # q p^2 q = q^2 p^2 - 2 i hbar q p: the hbar-correction of its normal form reaches D at hbar^2
    u = parse("q*p^2*q")
    rep = dirac_check(u, Q)
    assert rep.discrepancy.to_text() == "-(2*hbar^2)*q"
    U = realize(u, fock48)
    expected = U @ fock48.q - fock48.q @ U - 1j * realize(quantize(rep.poisson), fock48)
    assert maxnorm(interior(realize(rep.discrepancy, fock48) - expected, 3)) < 1e-8


def test_realize_generators_exact(fock48):
    assert np.array_equal(realize(Q, fock48), fock48.q)
    assert np.array_equal(realize(P, fock48), fock48.p)


@given(st.integers(0, 10**6))
def test_rewrite_soundness(seed):
    model = build_fock_model(ModelSpec(dim=24, hbar=0.5))
    u = random_polynomial(random.Random(seed))
    a, b = realize(normal_order(u), model), realize(u, model)
    cut = realization_cut(u)
    assert maxnorm(interior(a - b, cut)) <= 1e-8 * max(1.0, maxnorm(interior(b, cut)))


@given(st.integers(0, 10**6))
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    u = random_polynomial(rng)
    w = sym_commutator(u, random_polynomial(rng))
    for poly in (u, w, normal_order(u)):
        assert parse(poly.to_text()) == poly


def test_complex_coefficient_round_trip():
    u = parse("(1 + 2*i)*q - 0.25*hbar^2 + (-3*i*hbar)*p")
    assert parse(u.to_text()) == u


def test_pow_and_degree():
    assert (Q + P) ** 0 == OperatorPolynomial.scalar(1)
    assert parse("q^3*p").degree == 4
    assert parse("q*p").is_normal_ordered() and not parse("p*q").is_normal_ordered()
