"""Subfields of GF(p^n), subgroups of its Galois group, and Paige subloops.

Everything is keyed by a divisor d of n: the subfield GF(p^d), the subgroup
generated by phi^d (phi the Frobenius a -> a^p), and the loop M(GF(p^d)).
Subfields are compared through their images inside GF(p^n), never through
their standalone moduli.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .finite_field import (
    FIELD_ENUM_LIMIT,
    GF,
    CharacteristicMismatch,
    DegreeMismatch,
    FieldError,
    divisors,
    make_field,
    rank_mod_p,
    subfield_embedding,
)
from .paige import array_ops, enumerate_loop, predicted_order


class EmbeddingVerificationError(RuntimeError):
    """An embedding that should exist failed its own verification."""


@dataclass(frozen=True)
class GaloisGroup:
    """Cyclic group of order n generated by Frobenius; elements are exponents k of phi^k."""

    p: int
    n: int

    @property
    def order(self) -> int:
        return self.n

    def subgroup(self, d: int) -> frozenset:
        if self.n % d:
            raise FieldError(f"{d} does not divide {self.n}")
        return frozenset(range(0, self.n, d))

    @property
    def subgroups(self) -> dict:
        return {d: self.subgroup(d) for d in divisors(self.n)}


def galois_group(p: int, n: int) -> GaloisGroup:
    make_field(p)  # validates p
    if p == 0 or n < 1:
        raise FieldError("need a prime p and n >= 1")
    return GaloisGroup(p, n)


@dataclass
class SubfieldRecord:
    d: int
    field: GF
    subgroup: frozenset
    basis: np.ndarray                       # GF(p)-basis of the fixed space inside the big field
    elements: np.ndarray | None = None      # big-field indices, when small enough to list
    embedding: np.ndarray | None = None     # standalone index -> big index
    loop_order: int = 0

    @property
    def size(self) -> int:
        return self.field.order


def _check_subfield(big: GF, basis: np.ndarray) -> None:
    # the span of ``basis`` is closed under + by construction, and under *
    # iff every product of two basis vectors stays in the span
    p = big.p
    prods = big.mul_coeff_arrays(basis[:, None, :], basis[None, :, :]).reshape(-1, big.n)
    r = rank_mod_p(basis, p)
    if rank_mod_p(np.vstack([basis, prods]), p) != r:
        raise EmbeddingVerificationError("fixed set is not closed under multiplication")
    one = np.eye(1, big.n, 0, dtype=np.int64)
    if rank_mod_p(np.vstack([basis, one]), p) != r:
        raise EmbeddingVerificationError("fixed set does not contain 1")


def fixed_field(big: GF, d: int, embed: bool = True) -> SubfieldRecord:
    """The subfield of ``big`` fixed by phi^d, checked to have p^d elements."""
    n, p = big.n, big.p
    if n % d:
        raise FieldError(f"{d} does not divide {n}")
    basis = big.fixed_space(d)
    if len(basis) != d:
        raise EmbeddingVerificationError(f"fixed space of phi^{d} has dimension {len(basis)}")
    _check_subfield(big, basis)
    rec = SubfieldRecord(d=d, field=make_field(p, d), subgroup=galois_group(p, n).subgroup(d),
                         basis=basis, loop_order=predicted_order(p**d))
    if p**d <= FIELD_ENUM_LIMIT:
        rec.elements = big.fixed_points(d)
        if len(rec.elements) != p**d:
            raise EmbeddingVerificationError("fixed field has the wrong size")
        if embed:
            rec.embedding = subfield_embedding(rec.field, big)
            if not np.array_equal(np.sort(rec.embedding), rec.elements):
                raise EmbeddingVerificationError("embedding image differs from the fixed field")
    return rec


def _contained(small: SubfieldRecord, big: SubfieldRecord, p: int) -> bool:
    stacked = np.vstack([big.basis, small.basis])
    return rank_mod_p(stacked, p) == rank_mod_p(big.basis, p)


@dataclass
class GaloisTower:
    p: int
    n: int
    records: dict = field(default_factory=dict)

    @property
    def divisors(self) -> list[int]:
        return sorted(self.records)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (d, e) of the divisor lattice: d | e with e/d prime."""
        out = []
        for d in self.divisors:
            for e in self.divisors:
                if e != d and e % d == 0 and all((e // d) % k for k in range(2, e // d)):
                    out.append((d, e))
        return out

    def to_dict(self) -> dict:
        return {
            "schema": "tower/1",
            "p": self.p,
            "n": self.n,
            "records": [
                {
                    "d": r.d,
                    "field": {"p": self.p, "n": r.d, "modulus": list(r.field.modulus or [])},
                    "subgroup": sorted(r.subgroup),
                    "subgroup_order": len(r.subgroup),
                    "embedded_elements": None if r.elements is None else [int(v) for v in r.elements],
                    "loop_order": r.loop_order,
                }
                for r in (self.records[d] for d in self.divisors)
            ],
            "covers": [list(c) for c in self.covers()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_dot(self) -> str:
        p = self.p
        lines = [f'digraph "GF({p}^{self.n})" {{', "  rankdir=BT;"]
        for d in self.divisors:
            label = f"GF({p}^{d}) | <phi^{d}> | M(GF({p}^{d}))"
            lines.append(f'  d{d} [label="{label}"];')
        for d, e in self.covers():
            lines.append(f"  d{d} -> d{e};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def correspondence_table(p: int, n: int, embed: bool = True) -> GaloisTower:
    """One record per divisor of n, with the Galois correspondence verified.

    For every pair of divisors d, e the three relations d | e, GF(p^d) inside
    GF(p^e) (as subsets of GF(p^n)) and <phi^d> containing <phi^e> must agree.
    """
    big = make_field(p, n)
    tower = GaloisTower(p, n)
    for d in divisors(n):
        tower.records[d] = fixed_field(big, d, embed=embed)
    for d, rd in tower.records.items():
        for e, re in tower.records.items():
            divides = e % d == 0
            field_in = _contained(rd, re, p)
            group_in = rd.subgroup >= re.subgroup
            if not divides == field_in == group_in:
                raise EmbeddingVerificationError(f"correspondence fails for divisors {d}, {e}")
    return tower


def _check_divisors(n: int, *ds: int) -> None:
    for d in ds:
        if d < 1 or n % d:
            raise FieldError(f"{d} does not divide {n}")


def lattice_meet(tower: GaloisTower, d1: int, d2: int) -> int:
    """Subfield intersection: gcd of the degrees."""
    _check_divisors(tower.n, d1, d2)
    return gcd(d1, d2)


def lattice_join(tower: GaloisTower, d1: int, d2: int) -> int:
    """Compositum: lcm of the degrees."""
    _check_divisors(tower.n, d1, d2)
    return d1 * d2 // gcd(d1, d2)


def modular_law_violations(tower: GaloisTower) -> list[tuple[int, int, int]]:
    """Triples (x, y, z) with y | x where x ^ (y v z) != y v (x ^ z)."""
    bad = []
    ds = tower.divisors
    for x in ds:
        for y in ds:
            if x % y:
                continue
            for z in ds:
                lhs = lattice_meet(tower, x, lattice_join(tower, y, z))
                rhs = lattice_join(tower, y, lattice_meet(tower, x, z))
                if lhs != rhs:
                    bad.append((x, y, z))
    return bad


# ---------------------------------------------------------------------------


@dataclass
class PaigeEmbedding:
    small: GF
    big: GF
    image_keys: np.ndarray      # canonical big-field keys of the image, in small-loop index order
    injective: bool
    pairs_checked: int
    homomorphism: bool


def embed_paige(small: GF, big: GF, block: int = 1 << 20, small_table=None) -> PaigeEmbedding:
    """Lift the field embedding to M(small) -> M(big) and verify it on every pair.

    The big loop is never enumerated: products of images are computed in
    C(big) and compared by canonical key.  ``small_table`` may supply a
    prebuilt Cayley table of the small loop.
    """
    if small.p != big.p:
        raise CharacteristicMismatch(f"cannot embed M({small!r}) into M({big!r}): characteristics differ")
    if big.n % small.n:
        raise DegreeMismatch(f"cannot embed M({small!r}) into M({big!r}): {small.n} does not divide {big.n}")
    emb = subfield_embedding(small, big)
    loop = enumerate_loop(small)
    bops = array_ops(big)
    img = bops.canonical(bops.pack(emb[loop.tuples()]))
    img_keys = bops.encode(img)
    injective = len(np.unique(img_keys)) == loop.order
    N = loop.order
    ys = np.arange(N)
    rows = max(1, block // N)
    ok = True
    for start in range(0, N, rows):
        xs = np.arange(start, min(N, start + rows))
        if small_table is not None:
            prod = small_table.table[xs]
        else:
            prod = loop.mul(xs[:, None], ys[None, :])
        lhs = img_keys[prod]
        rhs = bops.encode(bops.canonical(bops.zmul(img[xs][:, None, :], img[None, :, :])))
        if not np.array_equal(lhs, rhs):
            ok = False
            break
    result = PaigeEmbedding(small, big, img_keys, injective, N * N, ok)
    if not (injective and ok):
        raise EmbeddingVerificationError(f"M({small!r}) -> M({big!r}) failed verification")
    return result
