"""Exact arithmetic in GF(p), GF(p^n) and the rationals.

Elements of a finite field are plain ints: the index of an element is the
base-p evaluation of its coefficient vector (constant term first), so
``GF(4)`` has elements ``0, 1, x = 2, x + 1 = 3``.  Rational elements are
:class:`fractions.Fraction` values.

The model of GF(p^n) is fixed by :func:`make_field`: the modulus is the
smallest monic irreducible polynomial of degree n when coefficient vectors
are read as base-p numbers with the constant term least significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

# Largest field order for which element enumeration is allowed.
FIELD_ENUM_LIMIT = 1 << 22
# Largest field order for which dense q*q operation tables are built.
TABLE_LIMIT = 1 << 8


class FieldError(ValueError):
    pass


class GuardrailError(RuntimeError):
    """A computation was refused because it exceeds a configured size limit."""


class EmbeddingError(FieldError):
    pass


class CharacteristicMismatch(EmbeddingError):
    pass


class DegreeMismatch(EmbeddingError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, isqrt(p) + 1):
        if p % d == 0:
            return False
    return True


def prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# polynomials over GF(p): tuples of ints, constant term first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m`` over GF(p)."""
    r = _trim([c % p for c in a])
    dm = len(m) - 1
    while len(r) - 1 >= dm:
        lead = r[-1]
        shift = len(r) - 1 - dm
        for i, c in enumerate(m):
            r[shift + i] = (r[shift + i] - lead * c) % p
        _trim(r)
    return r


def _monic_polys(degree: int, p: int) -> Iterable[tuple[int, ...]]:
    for k in range(p**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(k % p)
            k //= p
        yield tuple(coeffs) + (1,)


def _poly_mulmod(a: list[int], b: list[int], m: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_mod(out, m, p)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        inv = pow(b[-1], p - 2, p)
        b = [c * inv % p for c in b]
        a, b = b, poly_mod(a, b, p)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: f of degree n is irreducible iff gcd(x^(p^k) - x, f) = 1
    for k = 1 .. n // 2."""
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    return _is_irreducible(tuple(c % p for c in poly), p)


@lru_cache(maxsize=4096)
def _is_irreducible(poly: tuple, p: int) -> bool:
    poly = _trim(list(poly))
    if len(poly) < 2:
        raise FieldError("polynomial must have degree >= 1")
    if poly[-1] != 1:
        raise FieldError("polynomial must be monic")
    deg = len(poly) - 1
    xpow = [0, 1] if deg > 1 else poly_mod([0, 1], poly, p)
    for _ in range(deg // 2):
        # xpow <- xpow^p mod poly
        acc = [1]
        base, e = xpow, p
        while e:
            if e & 1:
                acc = _poly_mulmod(acc, base, poly, p)
            base = _poly_mulmod(base, base, poly, p)
            e >>= 1
        xpow = acc
        diff = list(xpow) + [0] * max(0, 2 - len(xpow))
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(poly, diff, p)) != 1:
            return False
    return True


def _has_root(poly: Sequence[int], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    for cand in _monic_polys(n, p):
        if n > 1 and _has_root(cand, p):
            continue
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def nullspace_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the right null space of ``mat`` over GF(p)."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        nz = [i for i in range(r, rows) if a[i, c]]
        if not nz:
            continue
        a[[r, nz[0]]] = a[[nz[0], r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    mat = np.asarray(mat, dtype=np.int64)
    if mat.size == 0:
        return 0
    return mat.shape[1] - len(nullspace_mod_p(mat, p))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GF:
    """The finite field GF(p^n) with a fixed modulus.

    Use :func:`make_field` rather than constructing this directly.
    """

    p: int
    n: int
    modulus: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"characteristic {self.p} is not prime")
        if self.n < 1:
            raise FieldError("degree must be >= 1")
        if self.n == 1 and self.modulus is not None:
            raise FieldError("prime fields carry no modulus")
        if self.n > 1:
            if self.modulus is None or len(self.modulus) != self.n + 1:
                raise FieldError("modulus must be a monic polynomial of degree n")
            if not is_irreducible(self.modulus, self.p):
                raise FieldError("modulus is reducible")

    def __repr__(self):
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def elements(self) -> range:
        if self.order > FIELD_ENUM_LIMIT:
            raise GuardrailError(f"{self!r} has more than {FIELD_ENUM_LIMIT} elements")
        return range(self.order)

    def coerce(self, a) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise FieldError(f"{a} is not an element index of {self!r}")
        return a

    # -- coefficient vectors ------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.n:
            coeffs = poly_mod(coeffs, self.modulus, self.p)
        idx = 0
        for c in reversed(list(coeffs)):
            idx = idx * self.p + c % self.p
        return idx

    def coeff_array(self, idx) -> np.ndarray:
        """Coefficient vectors of an index array, shape ``idx.shape + (n,)``."""
        idx = np.asarray(idx, dtype=np.int64)
        powers = self.p ** np.arange(self.n, dtype=np.int64)
        return (idx[..., None] // powers) % self.p

    def index_array(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.int64)
        powers = self.p ** np.arange(self.n, dtype=np.int64)
        return (coeffs % self.p) @ powers

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        ca, cb = self.coeffs(a), self.coeffs(b)
        return self.from_coeffs([x + y for x, y in zip(ca, cb)])

    def neg(self, a: int) -> int:
        if self.n == 1:
            return -a % self.p
        return self.from_coeffs([-x for x in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        if self.order <= TABLE_LIMIT:
            return int(self.mul_table[a, b])
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        return self.from_coeffs(poly_mod(prod, self.modulus, self.p))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self!r}")
        if self.n == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int, k: int = 1) -> int:
        """``a`` raised to ``p**k``."""
        for _ in range(k % self.n if self.n > 1 else 0):
            a = self.pow(a, self.p)
        return a

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise FieldError("0 has no multiplicative order")
        m = self.order - 1
        for r in prime_factors(self.order - 1):
            while m % r == 0 and self.pow(a, m // r) == 1:
                m //= r
        return m

    # -- dense tables (small fields only) -----------------------------------

    def _check_table_size(self):
        if self.order > TABLE_LIMIT:
            raise GuardrailError(f"{self!r} is too large for dense operation tables")

    def mul_coeff_arrays(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Vectorized product of coefficient arrays (..., n) -> (..., n)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        n, p = self.n, self.p
        shape = np.broadcast_shapes(A.shape, B.shape)
        conv = np.zeros(shape[:-1] + (2 * n - 1,), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                conv[..., i + j] += A[..., i] * B[..., j]
        out = conv[..., :n] % p
        if n > 1:
            for k, rk in enumerate(self._reductions, start=n):
                out = (out + conv[..., k, None] % p * rk) % p
        return out

    @cached_property
    def _reductions(self) -> list[np.ndarray]:
        # x^k mod modulus for k = n .. 2n-2
        out = []
        for k in range(self.n, 2 * self.n - 1):
            r = poly_mod([0] * k + [1], self.modulus, self.p)
            out.append(np.array(r + [0] * (self.n - len(r)), dtype=np.int64))
        return out

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_table_size()
        c = self.coeff_array(np.arange(self.order))
        return self.index_array(c[:, None, :] + c[None, :, :]).astype(np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_table_size()
        c = self.coeff_array(np.arange(self.order))
        return self.index_array(self.mul_coeff_arrays(c[:, None, :], c[None, :, :]))

    @cached_property
    def neg_table(self) -> np.ndarray:
        self._check_table_size()
        return self.index_array(-self.coeff_array(np.arange(self.order)))

    @cached_property
    def inv_table(self) -> np.ndarray:
        """Multiplicative inverses; entry 0 is 0 by convention."""
        self._check_table_size()
        rows, cols = np.nonzero(self.mul_table == 1)
        out = np.zeros(self.order, dtype=np.int64)
        out[rows] = cols
        return out

    @cached_property
    def frobenius_table(self) -> np.ndarray:
        return self.index_array(self.coeff_array(np.arange(self.order)) @ self.frobenius_matrix().T % self.p)

    # -- Frobenius as a GF(p)-linear map ------------------------------------

    def frobenius_matrix(self, k: int = 1) -> np.ndarray:
        """Matrix M with coeffs(a^(p^k)) = M @ coeffs(a) mod p."""
        n, p = self.n, self.p
        cols = []
        for i in range(n):
            basis = self.from_coeffs([0] * i + [1])
            cols.append(self.coeffs(self.frobenius(basis, k)))
        return np.array(cols, dtype=np.int64).T % p

    def fixed_space(self, k: int) -> np.ndarray:
        """GF(p)-basis (rows of coefficient vectors) of {a : a^(p^k) = a}."""
        mat = (self.frobenius_matrix(k) - np.eye(self.n, dtype=np.int64)) % self.p
        return nullspace_mod_p(mat, self.p)

    def fixed_points(self, k: int) -> np.ndarray:
        """Sorted indices of all a with a^(p^k) == a.

        Computed from the null space of (Frobenius^k - I), so the full field
        is never enumerated.
        """
        n, p = self.n, self.p
        basis = self.fixed_space(k)
        if p ** len(basis) > FIELD_ENUM_LIMIT:
            raise GuardrailError("fixed field too large to enumerate")
        k = len(basis)
        combos = np.indices((p,) * k).reshape(k, -1).T
        vecs = combos @ basis.reshape(k, n) % p
        return np.sort(self.index_array(vecs))


class Rationals:
    """The field Q; used only for arithmetic spot checks."""

    p = 0
    n = 1
    modulus = None
    order = None
    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def elements(self):
        raise GuardrailError("the rationals cannot be enumerated")

    def coerce(self, a) -> Fraction:
        return Fraction(a)

    def add(self, a, b):
        return Fraction(a) + b

    def neg(self, a):
        return -Fraction(a)

    def sub(self, a, b):
        return Fraction(a) - b

    def mul(self, a, b):
        return Fraction(a) * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in QQ")
        return 1 / Fraction(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        return Fraction(a) ** e

    def frobenius(self, a, k=1):
        raise FieldError("Frobenius is undefined in characteristic 0")


QQ = Rationals()
Field = GF | Rationals


@lru_cache(maxsize=None)
def make_field(p: int, n: int = 1) -> Field:
    """Return the canonical model of GF(p^n), or QQ for ``p == 0``."""
    if p == 0:
        if n != 1:
            raise FieldError("characteristic 0 requires n = 1")
        return QQ
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if n < 1:
        raise FieldError("degree must be >= 1")
    if n == 1:
        return GF(p, 1)
    return GF(p, n, smallest_irreducible(p, n))


def primitive_element(f: GF) -> int:
    """Smallest-index generator of the multiplicative group."""
    if not isinstance(f, GF):
        raise FieldError("primitive elements exist only for finite fields")
    for a in f.elements()[1:]:
        if f.multiplicative_order(a) == f.order - 1:
            return a
    raise AssertionError("multiplicative group is not cyclic")  # pragma: no cover


def subfield_embedding(small: GF, big: GF) -> np.ndarray:
    """Field embedding GF(p^m) -> GF(p^n) as an index map ``emb[a] = image``.

    The generator ``x`` of the small field goes to the smallest-index root of
    the small modulus inside the big field.
    """
    if small.p != big.p:
        raise CharacteristicMismatch(f"cannot embed {small!r} into {big!r}: characteristics differ")
    if big.n % small.n:
        raise DegreeMismatch(f"cannot embed {small!r} into {big!r}: {small.n} does not divide {big.n}")
    if small.n == 1 or small == big:
        return np.arange(small.order, dtype=np.int64)
    candidates = big.fixed_points(small.n)
    # evaluate the small modulus at every candidate (Horner, vectorized)
    cand = big.coeff_array(candidates)
    acc = np.zeros_like(cand)
    for c in reversed(small.modulus):
        acc = big.mul_coeff_arrays(acc, cand)
        acc[..., 0] = (acc[..., 0] + c) % big.p
    roots = candidates[~acc.any(axis=-1)]
    root = big.coeff_array(int(roots.min()))
    # image of sum c_i x^i is sum c_i root^i
    powers = [np.eye(1, big.n, 0, dtype=np.int64)[0]]
    for _ in range(1, small.n):
        powers.append(big.mul_coeff_arrays(powers[-1], root))
    basis = np.array(powers)
    src = small.coeff_array(np.arange(small.order))
    return big.index_array(src @ basis % big.p)
