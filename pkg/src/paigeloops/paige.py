"""Paige loops M*(F) (unit-norm Zorn matrices) and M(F) = M*(F)/{+-1}."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .finite_field import GF, Field, FieldError, GuardrailError, make_field
from .zorn import ArrayOps, ZornMatrix, norm, zorn_inverse, zorn_mul

# Enumeration refuses loops larger than this unless told otherwise.
LOOP_ORDER_LIMIT = 2_000_000
# Key spaces up to this size get a direct key -> index array.
DENSE_LOOKUP_LIMIT = 1 << 24


class NotUnitNorm(ValueError):
    pass


@lru_cache(maxsize=None)
def array_ops(f: GF) -> ArrayOps:
    return ArrayOps(f)


def predicted_order(q: int) -> int:
    """Order of M(GF(q)): q^3 (q^4 - 1) / gcd(2, q - 1)."""
    return q**3 * (q**4 - 1) // gcd(2, q - 1)


def canonicalize(a: ZornMatrix) -> "PaigeElement":
    f = a.field
    if norm(a) != f.one:
        raise NotUnitNorm(f"{a!r} does not have norm 1")
    if f.p == 2:
        return PaigeElement(a)
    b = -a
    return PaigeElement(b if b.to_tuple() < a.to_tuple() else a)


@dataclass(frozen=True)
class PaigeElement:
    """A class {a, -a} in M(F), stored by its canonical representative."""

    rep: ZornMatrix

    @property
    def field(self) -> Field:
        return self.rep.field

    @classmethod
    def identity(cls, f: Field) -> "PaigeElement":
        return cls(ZornMatrix.identity(f))

    def __mul__(self, other: "PaigeElement") -> "PaigeElement":
        return paige_mul(self, other)

    def inverse(self) -> "PaigeElement":
        return paige_inv(self)

    def to_tuple(self) -> tuple:
        return self.rep.to_tuple()


def paige_mul(x: PaigeElement, y: PaigeElement) -> PaigeElement:
    return canonicalize(zorn_mul(x.rep, y.rep))


def paige_inv(x: PaigeElement) -> PaigeElement:
    return canonicalize(zorn_inverse(x.rep))


def loop_associator(a: PaigeElement, b: PaigeElement, c: PaigeElement) -> PaigeElement:
    """The element u with (ab)c = (a(bc))u."""
    return paige_mul(paige_inv(paige_mul(a, paige_mul(b, c))), paige_mul(paige_mul(a, b), c))


def element_order(x: PaigeElement, limit: int = 10**6) -> int:
    one = PaigeElement.identity(x.field)
    power, k = x, 1
    while power != one:
        power = paige_mul(power, x)
        k += 1
        if k > limit:
            raise GuardrailError("element order exceeds limit")
    return k


# ---------------------------------------------------------------------------


class LoopElements:
    """An enumerated Paige loop: packed representatives plus index lookup.

    Index 0 is the identity; the rest are in ascending order of their
    serialized 8-tuples.  With ``quotient=False`` this is M*(F) instead of
    M(F) (no identification of a with -a).

    Multiplication is available without a dense table through :meth:`mul`,
    which works on index arrays.
    """

    def __init__(self, f: GF, packed: np.ndarray, quotient: bool = True):
        self.field = f
        self.ops = array_ops(f)
        self.quotient = quotient
        keys = self.ops.encode(packed)
        ident_key = self.ops.encode(self.ops.identity)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if len(keys) and np.any(keys[1:] == keys[:-1]):
            raise ValueError("duplicate loop elements")
        packed = packed[order]
        pos = int(np.searchsorted(keys, ident_key))
        if pos >= len(keys) or keys[pos] != ident_key:
            raise ValueError("identity missing from loop elements")
        perm = np.r_[pos, np.arange(pos), np.arange(pos + 1, len(keys))]
        self.packed = packed[perm]
        self.packed.setflags(write=False)
        self._sorted_keys = keys
        self._sorted_to_index = np.argsort(perm)
        self._dense = None
        if f.order**8 <= DENSE_LOOKUP_LIMIT:
            self._dense = np.full(f.order**8, -1, dtype=np.int32)
            self._dense[keys] = self._sorted_to_index

    def __len__(self) -> int:
        return len(self.packed)

    @property
    def order(self) -> int:
        return len(self.packed)

    def __repr__(self):
        name = "M" if self.quotient else "M*"
        return f"{name}({self.field!r}) [{self.order} elements]"

    def canonical(self, P: np.ndarray) -> np.ndarray:
        return self.ops.canonical(P) if self.quotient else P

    def index_of(self, P: np.ndarray) -> np.ndarray:
        """Loop indices of packed rows (already canonical)."""
        keys = self.ops.encode(P)
        if self._dense is not None:
            out = self._dense[keys]
            if (out < 0).any():
                raise KeyError("element not in loop")
            return out
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, len(self._sorted_keys) - 1)
        if not np.all(self._sorted_keys[pos] == keys):
            raise KeyError("element not in loop")
        return self._sorted_to_index[pos]

    def index_of_tuple(self, t) -> int:
        P = self.canonical(self.ops.pack(np.asarray(t))[None])
        return int(self.index_of(P)[0])

    def tuples(self, idx=None) -> np.ndarray:
        """Serialized 8-tuples, shape (N, 8) or idx.shape + (8,)."""
        P = self.packed if idx is None else self.packed[np.asarray(idx)]
        return self.ops.unpack(P)

    def element(self, i: int) -> PaigeElement:
        t = [int(x) for x in self.tuples(i)]
        return PaigeElement(ZornMatrix.from_tuple(self.field, t))

    def mul(self, x, y) -> np.ndarray:
        P = self.ops.zmul(self.packed[np.asarray(x)], self.packed[np.asarray(y)])
        return self.index_of(self.canonical(P))

    def inv(self, x) -> np.ndarray:
        return self.index_of(self.canonical(self.ops.zconj(self.packed[np.asarray(x)])))

    def ldiv(self, x, y) -> np.ndarray:
        return self.mul(self.inv(x), y)

    def rdiv(self, y, x) -> np.ndarray:
        return self.mul(y, self.inv(x))

    def orders(self) -> np.ndarray:
        """Order of every element (powers are unambiguous by diassociativity)."""
        idx = np.arange(self.order)
        out = np.zeros(self.order, dtype=np.int64)
        power = idx.copy()
        k = 1
        while True:
            hit = (power == 0) & (out == 0)
            out[hit] = k
            if out.all():
                return out
            power = self.mul(power, idx)
            k += 1


def enumerate_loop(f: Field, quotient: bool = True, max_order: int = LOOP_ORDER_LIMIT) -> LoopElements:
    """All unit-norm Zorn matrices over ``f``, modulo +-1 when ``quotient``.

    Stratified scan: for a1 != 0 the norm equation fixes a2; for a1 == 0 only
    pairs (a12, a21) with a12.a21 = -1 survive and a2 is free.
    """
    if not isinstance(f, GF):
        raise GuardrailError("Paige loops are enumerated over finite fields only")
    q = f.order
    expected = predicted_order(q)
    if not quotient and f.p != 2:
        expected *= 2
    if expected > max_order:
        raise GuardrailError(f"loop over {f!r} has {expected} elements, above the limit {max_order}")
    ops = array_ops(f)
    Q = ops.Q
    dt = ops.dtype
    v12, v21 = np.meshgrid(np.arange(Q, dtype=dt), np.arange(Q, dtype=dt), indexing="ij")
    d = ops._vdot
    one = 1
    parts = []
    for a1 in range(1, q):
        a2 = ops._mul[f.inv(a1), ops._add[one, d]]
        parts.append(np.stack([np.full(Q * Q, a1, dtype=dt), v12.ravel(), v21.ravel(),
                               a2.ravel().astype(dt)], axis=1))
    r, c = np.nonzero(d == ops._neg[one])
    for a2 in range(q):
        parts.append(np.stack([np.zeros(len(r), dtype=dt), r.astype(dt), c.astype(dt),
                               np.full(len(r), a2, dtype=dt)], axis=1))
    P = np.concatenate(parts)
    if quotient:
        P = ops.canonical(P)
        P = ops.decode(np.unique(ops.encode(P)))
    return LoopElements(f, P, quotient=quotient)


def paige_loop(p: int, n: int = 1, **kw) -> LoopElements:
    return enumerate_loop(make_field(p, n), **kw)


def frobenius_map(loop: LoopElements, k: int) -> np.ndarray:
    """Permutation of loop indices induced by a -> a^(p^k) on all components."""
    n = loop.field.n
    if not 0 <= k < n:
        raise FieldError(f"Frobenius power {k} out of range for degree {n}")
    P = loop.ops.frobenius(loop.packed, k)
    return loop.index_of(loop.canonical(P))
