import itertools
from collections import Counter

import numpy as np
import pytest

from paigeloops.finite_field import FieldError, GuardrailError, make_field
from paigeloops.paige import (
    NotUnitNorm,
    PaigeElement,
    canonicalize,
    element_order,
    enumerate_loop,
    frobenius_map,
    loop_associator,
    paige_loop,
    predicted_order,
)
from paigeloops.zorn import ZornMatrix, norm


def brute_force_classes(p):
    """Oracle: scan all p^8 tuples with scalar arithmetic, group a with -a."""
    f = make_field(p)
    unit = [t for t in itertools.product(range(p), repeat=8) if norm(ZornMatrix.from_tuple(f, t)) == 1]
    classes = {min(t, tuple((-x) % p for x in t)) for t in unit}
    return unit, classes


@pytest.mark.parametrize("p,unit_count,order", [(2, 120, 120), (3, 2160, 1080)])
def test_enumeration_matches_brute_force(p, unit_count, order):
    unit, classes = brute_force_classes(p)
    assert len(unit) == unit_count and len(classes) == order
    loop = paige_loop(p)
    assert set(map(tuple, loop.tuples().tolist())) == classes
    star = enumerate_loop(make_field(p), quotient=False)
    assert set(map(tuple, star.tuples().tolist())) == set(unit)


@pytest.mark.parametrize("p,n,order", [(2, 1, 120), (3, 1, 1080), (2, 2, 16320), (5, 1, 39000)])
def test_orders_match_formula(p, n, order):
    assert predicted_order(p**n) == order
    assert paige_loop(p, n).order == order


def test_guardrail():
    with pytest.raises(GuardrailError):
        paige_loop(2, 3)
    with pytest.raises(GuardrailError):
        paige_loop(3, 1, max_order=100)


def test_index_layout(m3):
    t = m3.tuples()
    assert tuple(t[0]) == (1, 0, 0, 0, 0, 0, 0, 1)
    rest = [tuple(r) for r in t[1:]]
    assert rest == sorted(rest)
    assert m3.index_of_tuple((2, 0, 0, 0, 0, 0, 0, 2)) == 0
    with pytest.raises(KeyError):
        m3.index_of_tuple((1, 0, 0, 0, 0, 0, 0, 0))


def test_loop_elements_agree_with_scalar_arithmetic(m3):
    rng = np.random.default_rng(3)
    xs, ys = rng.integers(0, m3.order, size=(2, 200))
    prods = m3.mul(xs, ys)
    for x, y, z in zip(xs, ys, prods):
        a, b = m3.element(int(x)), m3.element(int(y))
        assert (a * b).to_tuple() == tuple(m3.tuples(int(z)))
        assert (a * a.inverse()) == PaigeElement.identity(m3.field)
    inv = m3.inv(np.arange(m3.order))
    assert (m3.mul(np.arange(m3.order), inv) == 0).all()
    assert (m3.ldiv(xs, prods) == ys).all()
    assert (m3.rdiv(prods, ys) == xs).all()


def test_canonicalize():
    f = make_field(3)
    a = ZornMatrix.from_tuple(f, (2, 0, 0, 0, 0, 0, 0, 2))
    assert canonicalize(a).to_tuple() == (1, 0, 0, 0, 0, 0, 0, 1)
    with pytest.raises(NotUnitNorm):
        canonicalize(ZornMatrix.from_tuple(f, (1, 0, 0, 0, 0, 0, 0, 2)))


def test_element_orders_m2(m2):
    # oracle: repeated scalar multiplication
    orders = m2.orders()
    hist = Counter(orders.tolist())
    assert hist == {1: 1, 2: 63, 3: 56}
    for i in (1, 17, 90, 119):
        assert element_order(m2.element(i)) == orders[i]


def test_loop_associator_is_identity_exactly_on_associating_triples(m2):
    rng = np.random.default_rng(0)
    for x, y, z in rng.integers(0, m2.order, size=(200, 3)):
        a, b, c = (m2.element(int(v)) for v in (x, y, z))
        u = loop_associator(a, b, c)
        assert ((a * b) * c == (a * (b * c))) == (u == PaigeElement.identity(m2.field))
        assert (a * (b * c)) * u == (a * b) * c


def test_gf5_diagonal_square_is_minus_identity():
    f = make_field(5)
    alpha = 2
    d = ZornMatrix.diag(f, f.inv(alpha), alpha)
    assert norm(d) == 1
    assert d * d == -ZornMatrix.identity(f)
    assert canonicalize(d * d) == PaigeElement.identity(f)


def test_frobenius_map(m4, m2):
    phi = frobenius_map(m4, 1)
    assert sorted(phi.tolist()) == list(range(m4.order))
    assert (phi[phi] == np.arange(m4.order)).all()
    assert (frobenius_map(m4, 0) == np.arange(m4.order)).all()
    with pytest.raises(FieldError):
        frobenius_map(m4, 2)
    with pytest.raises(FieldError):
        frobenius_map(m2, 1)
