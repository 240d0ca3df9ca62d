"""Zorn vector matrices: the split octonion algebra C(F).

An element is a 2x2 matrix ``(a1, a12; a21, a2)`` with scalar diagonal and
3-vector off-diagonal entries.  Products follow the Zorn rule

    (a1, a12; a21, a2)(b1, b12; b21, b2) =
        (a1 b1 + a12.b21,           a1 b12 + b2 a12 - a21 x b21;
         b1 a21 + a2 b21 + a12 x b12, a2 b2 + a21.b12)

and the norm is ``a1 a2 - a12.a21``.

Two layers live here.  :class:`ZornMatrix` is a scalar value type that works
over any field (including QQ).  :class:`ArrayOps` runs the same arithmetic
on numpy arrays of packed element indices for small finite fields.  The
serialized form of an element is the 8-tuple ``(a1, a12[0..2], a21[0..2],
a2)`` of field element indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .finite_field import GF, Field, FieldError, GuardrailError

# ArrayOps builds (q^3)^2-entry tables; refuse fields where that is too large.
ARRAY_TABLE_LIMIT = 1 << 25


class NonInvertible(ArithmeticError):
    pass


def dot(f: Field, g: Sequence, d: Sequence):
    return f.add(f.add(f.mul(g[0], d[0]), f.mul(g[1], d[1])), f.mul(g[2], d[2]))


def cross(f: Field, g: Sequence, d: Sequence) -> tuple:
    return (
        f.sub(f.mul(g[1], d[2]), f.mul(g[2], d[1])),
        f.sub(f.mul(g[2], d[0]), f.mul(g[0], d[2])),
        f.sub(f.mul(g[0], d[1]), f.mul(g[1], d[0])),
    )


def _vadd(f, g, d):
    return tuple(f.add(x, y) for x, y in zip(g, d))


def _vscale(f, c, g):
    return tuple(f.mul(c, x) for x in g)


@dataclass(frozen=True)
class ZornMatrix:
    field: Field
    a1: object
    a12: tuple
    a21: tuple
    a2: object

    @classmethod
    def from_tuple(cls, f: Field, t: Sequence) -> "ZornMatrix":
        """Inverse of :meth:`to_tuple`."""
        if len(t) != 8:
            raise ValueError("a Zorn matrix has 8 components")
        t = [f.coerce(x) for x in t]
        return cls(f, t[0], tuple(t[1:4]), tuple(t[4:7]), t[7])

    @classmethod
    def identity(cls, f: Field) -> "ZornMatrix":
        return cls.diag(f, f.one, f.one)

    @classmethod
    def zero(cls, f: Field) -> "ZornMatrix":
        return cls.diag(f, f.zero, f.zero)

    @classmethod
    def diag(cls, f: Field, a1, a2) -> "ZornMatrix":
        z = (f.zero,) * 3
        return cls(f, f.coerce(a1), z, z, f.coerce(a2))

    def to_tuple(self) -> tuple:
        return (self.a1, *self.a12, *self.a21, self.a2)

    def __repr__(self):
        return f"Zorn[{self.field!r}]({self.a1}, {self.a12}; {self.a21}, {self.a2})"

    def __add__(self, other):
        return zorn_add(self, other)

    def __sub__(self, other):
        return zorn_add(self, -other)

    def __neg__(self):
        return scalar_mul(self.field.neg(self.field.one), self)

    def __mul__(self, other):
        return zorn_mul(self, other)


def _same_field(*mats: ZornMatrix) -> Field:
    f = mats[0].field
    for m in mats[1:]:
        if m.field != f:
            raise FieldError(f"field mismatch: {f!r} vs {m.field!r}")
    return f


def zorn_add(a: ZornMatrix, b: ZornMatrix) -> ZornMatrix:
    f = _same_field(a, b)
    return ZornMatrix(f, f.add(a.a1, b.a1), _vadd(f, a.a12, b.a12), _vadd(f, a.a21, b.a21), f.add(a.a2, b.a2))


def scalar_mul(c, a: ZornMatrix) -> ZornMatrix:
    f = a.field
    return ZornMatrix(f, f.mul(c, a.a1), _vscale(f, c, a.a12), _vscale(f, c, a.a21), f.mul(c, a.a2))


def zorn_mul(a: ZornMatrix, b: ZornMatrix) -> ZornMatrix:
    f = _same_field(a, b)
    c1 = f.add(f.mul(a.a1, b.a1), dot(f, a.a12, b.a21))
    c12 = _vadd(f, _vadd(f, _vscale(f, a.a1, b.a12), _vscale(f, b.a2, a.a12)),
                tuple(f.neg(x) for x in cross(f, a.a21, b.a21)))
    c21 = _vadd(f, _vadd(f, _vscale(f, b.a1, a.a21), _vscale(f, a.a2, b.a21)), cross(f, a.a12, b.a12))
    c2 = f.add(f.mul(a.a2, b.a2), dot(f, a.a21, b.a12))
    return ZornMatrix(f, c1, c12, c21, c2)


def norm(a: ZornMatrix):
    f = a.field
    return f.sub(f.mul(a.a1, a.a2), dot(f, a.a12, a.a21))


def conjugate(a: ZornMatrix) -> ZornMatrix:
    f = a.field
    return ZornMatrix(f, a.a2, tuple(f.neg(x) for x in a.a12), tuple(f.neg(x) for x in a.a21), a.a1)


def zorn_inverse(a: ZornMatrix) -> ZornMatrix:
    nrm = norm(a)
    if nrm == a.field.zero:
        raise NonInvertible(f"{a!r} has norm 0")
    return scalar_mul(a.field.inv(nrm), conjugate(a))


def alg_associator(a: ZornMatrix, b: ZornMatrix, c: ZornMatrix) -> ZornMatrix:
    return zorn_mul(zorn_mul(a, b), c) - zorn_mul(a, zorn_mul(b, c))


# ---------------------------------------------------------------------------
# vectorized kernels on packed index arrays of shape (..., 4)
#
# A packed row is (a1, v12, v21, a2) where a 3-vector (x, y, z) is stored as
# the single index x*q^2 + y*q + z.  The packed key a1*q^7 + v12*q^4 + v21*q
# + a2 equals the base-q value of the serialized 8-tuple, so ordering by key
# is lexicographic order of 8-tuples.

IDENTITY_TUPLE = (1, 0, 0, 0, 0, 0, 0, 1)


class ArrayOps:
    """Table-driven Zorn arithmetic for one small finite field."""

    def __init__(self, f: GF):
        if not isinstance(f, GF):
            raise FieldError("array kernels need a finite field")
        self.field = f
        q = self.q = f.order
        Q = self.Q = q**3
        if Q * Q > ARRAY_TABLE_LIMIT:
            raise GuardrailError(f"vector tables for {f!r} would have {Q * Q} entries")
        self.dtype = np.int16 if Q < 2**15 else np.int32
        dt = self.dtype
        self._add = f.add_table.astype(dt)
        self._mul = f.mul_table.astype(dt)
        self._neg = f.neg_table.astype(dt)
        # all 3-vectors, row v = components of packed index v
        comps = np.stack([np.arange(Q) // (q * q), np.arange(Q) // q % q, np.arange(Q) % q], axis=1)
        self._vcomps = comps.astype(dt)
        u = comps[:, None, :]
        v = comps[None, :, :]
        self._vadd = self._pack3(self._add[u, v])
        self._vneg = self._pack3(self._neg[comps])
        self._smul = self._pack3(self._mul[np.arange(q)[:, None, None], v])
        m = self._mul[u, v]
        self._vdot = self._add[self._add[m[..., 0], m[..., 1]], m[..., 2]]
        u0, u1, u2 = u[..., 0], u[..., 1], u[..., 2]
        v0, v1, v2 = v[..., 0], v[..., 1], v[..., 2]
        mm, sub = self._mul, self._sub
        self._vcross = self._pack3(np.stack([
            sub(mm[u1, v2], mm[u2, v1]),
            sub(mm[u2, v0], mm[u0, v2]),
            sub(mm[u0, v1], mm[u1, v0]),
        ], axis=-1))
        self._vcross_neg = self._vneg[self._vcross]
        self.identity = np.array([1, 0, 0, 1], dtype=dt)

    def _sub(self, a, b):
        return self._add[a, self._neg[b]]

    def _pack3(self, c) -> np.ndarray:
        q = self.q
        return ((c[..., 0].astype(np.int64) * q + c[..., 1]) * q + c[..., 2]).astype(self.dtype)

    # -- conversions --------------------------------------------------------

    def pack(self, A8) -> np.ndarray:
        A8 = np.asarray(A8, dtype=np.int64)
        q = self.q
        v12 = (A8[..., 1] * q + A8[..., 2]) * q + A8[..., 3]
        v21 = (A8[..., 4] * q + A8[..., 5]) * q + A8[..., 6]
        return np.stack([A8[..., 0], v12, v21, A8[..., 7]], axis=-1).astype(self.dtype)

    def unpack(self, P) -> np.ndarray:
        P = np.asarray(P)
        c = self._vcomps
        return np.concatenate([P[..., :1], c[P[..., 1]], c[P[..., 2]], P[..., 3:]], axis=-1)

    def encode(self, P) -> np.ndarray:
        """Base-q key of the serialized 8-tuple of each packed row."""
        P = np.asarray(P, dtype=np.int64)
        q, Q = self.q, self.Q
        return ((P[..., 0] * Q + P[..., 1]) * Q + P[..., 2]) * q + P[..., 3]

    def decode(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        q, Q = self.q, self.Q
        a2 = keys % q
        keys = keys // q
        v21 = keys % Q
        keys = keys // Q
        return np.stack([keys // Q, keys % Q, v21, a2], axis=-1).astype(self.dtype)

    # -- algebra ------------------------------------------------------------

    def zmul(self, P, R) -> np.ndarray:
        P = np.asarray(P)
        R = np.asarray(R)
        a1, a12, a21, a2 = P[..., 0], P[..., 1], P[..., 2], P[..., 3]
        b1, b12, b21, b2 = R[..., 0], R[..., 1], R[..., 2], R[..., 3]
        ad, m, va, sm = self._add, self._mul, self._vadd, self._smul
        c1 = ad[m[a1, b1], self._vdot[a12, b21]]
        c12 = va[va[sm[a1, b12], sm[b2, a12]], self._vcross_neg[a21, b21]]
        c21 = va[va[sm[b1, a21], sm[a2, b21]], self._vcross[a12, b12]]
        c2 = ad[m[a2, b2], self._vdot[a21, b12]]
        return np.stack([c1, c12, c21, c2], axis=-1)

    def znorm(self, P) -> np.ndarray:
        P = np.asarray(P)
        return self._sub(self._mul[P[..., 0], P[..., 3]], self._vdot[P[..., 1], P[..., 2]])

    def zneg(self, P) -> np.ndarray:
        P = np.asarray(P)
        return np.stack([self._neg[P[..., 0]], self._vneg[P[..., 1]], self._vneg[P[..., 2]],
                         self._neg[P[..., 3]]], axis=-1)

    def zconj(self, P) -> np.ndarray:
        P = np.asarray(P)
        return np.stack([P[..., 3], self._vneg[P[..., 1]], self._vneg[P[..., 2]], P[..., 0]], axis=-1)

    def canonical(self, P) -> np.ndarray:
        """Pick the lexicographically smaller of P and -P, row by row."""
        P = np.asarray(P)
        if self.field.p == 2:
            return P
        N = self.zneg(P)
        flip = self.encode(N) < self.encode(P)
        return np.where(flip[..., None], N, P)

    def frobenius(self, P, k: int = 1) -> np.ndarray:
        """Apply a -> a^(p^k) to every component."""
        fr = self.field.frobenius_table.astype(self.dtype)
        comps = self._vcomps
        out = np.asarray(P)
        for _ in range(k):
            out = np.stack([fr[out[..., 0]], self._pack3(fr[comps[out[..., 1]]]),
                            self._pack3(fr[comps[out[..., 2]]]), fr[out[..., 3]]], axis=-1)
        return out
