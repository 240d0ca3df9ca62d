import json

import numpy as np
import pytest

from paigeloops.finite_field import CharacteristicMismatch, DegreeMismatch, FieldError, divisors, make_field
from paigeloops.galois_lattice import (
    correspondence_table,
    embed_paige,
    fixed_field,
    galois_group,
    lattice_join,
    lattice_meet,
    modular_law_violations,
)
from paigeloops.loop_core import build_table
from paigeloops.paige import paige_loop, predicted_order


def test_galois_group():
    g = galois_group(2, 6)
    assert g.order == 6
    assert sorted(g.subgroups) == [1, 2, 3, 6]
    assert g.subgroup(2) == frozenset({0, 2, 4})
    assert galois_group(3, 2).order == 2
    with pytest.raises(FieldError):
        g.subgroup(4)
    with pytest.raises(FieldError):
        galois_group(6, 2)


@pytest.mark.parametrize("p,n", [(2, 6), (2, 4), (3, 4), (2, 1), (5, 2)])
def test_correspondence(p, n):
    tower = correspondence_table(p, n)
    big = make_field(p, n)
    assert tower.divisors == divisors(n)
    for d, rec in tower.records.items():
        # oracle: brute-force fixed points of a -> a^(p^d)
        fixed = [a for a in big.elements() if big.pow(a, p**d) == a]
        assert rec.elements.tolist() == fixed
        assert sorted(rec.embedding.tolist()) == fixed
        assert len(rec.subgroup) == n // d
        assert rec.loop_order == predicted_order(p**d)
    for d in tower.divisors:
        for e in tower.divisors:
            sub_f = set(tower.records[d].elements.tolist()) <= set(tower.records[e].elements.tolist())
            sup_g = tower.records[d].subgroup >= tower.records[e].subgroup
            assert sub_f == sup_g == (e % d == 0)


def test_fixed_field_rejects_nondivisor():
    with pytest.raises(FieldError):
        fixed_field(make_field(2, 6), 4)


def test_exports():
    tower = correspondence_table(2, 6)
    dot = tower.to_dot()
    assert dot.count("[label=") == 4
    assert sorted(tower.covers()) == [(1, 2), (1, 3), (2, 6), (3, 6)]
    assert dot.count("->") == 4
    doc = json.loads(tower.to_json())
    assert doc["schema"] == "tower/1" and len(doc["records"]) == 4
    single = correspondence_table(2, 1)
    assert single.to_dot().count("[label=") == 1 and single.covers() == []


@pytest.mark.parametrize("p,n", [(2, 12), (2, 30), (3, 12), (2, 8), (2, 1)])
def test_modular_law(p, n):
    tower = correspondence_table(p, n, embed=False)
    assert modular_law_violations(tower) == []
    # oracle: subfield intersection and compositum computed from element sets
    if n <= 12 and p == 2:
        sets = {d: set(r.elements.tolist()) for d, r in tower.records.items()}
        for a in tower.divisors:
            for b in tower.divisors:
                assert sets[lattice_meet(tower, a, b)] == sets[a] & sets[b]
                join = min(d for d in tower.divisors if sets[d] >= sets[a] | sets[b])
                assert lattice_join(tower, a, b) == join


def test_lattice_ops():
    tower = correspondence_table(2, 12, embed=False)
    assert lattice_meet(tower, 4, 6) == 2
    assert lattice_join(tower, 4, 6) == 12
    with pytest.raises(FieldError):
        lattice_join(tower, 5, 1)


def test_embed_paige_small():
    e = embed_paige(make_field(2), make_field(2, 2))
    assert e.injective and e.homomorphism and e.pairs_checked == 120**2
    e = embed_paige(make_field(2), make_field(2, 3))
    assert e.injective and e.homomorphism
    m2 = paige_loop(2)
    e = embed_paige(make_field(2), make_field(2, 2), small_table=build_table(m2))
    assert e.homomorphism
    # image inside M(GF(4)) is exactly the set of Frobenius-fixed elements
    from paigeloops.paige import frobenius_map
    m4 = paige_loop(2, 2)
    fixed = np.nonzero(frobenius_map(m4, 1) == np.arange(m4.order))[0]
    keys = m4.ops.encode(m4.packed[fixed])
    assert sorted(keys.tolist()) == sorted(e.image_keys.tolist())


def test_embed_paige_refusals():
    with pytest.raises(DegreeMismatch):
        embed_paige(make_field(2, 2), make_field(2, 3))
    with pytest.raises(CharacteristicMismatch):
        embed_paige(make_field(2), make_field(3, 2))
