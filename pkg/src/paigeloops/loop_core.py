"""Finite loop engine: Cayley tables, closures, normality and automorphisms.

Most functions accept either a dense :class:`LoopTable` or any object with
the same vectorized interface (``order``, ``mul``, ``inv``, ``ldiv``,
``rdiv``), such as :class:`paigeloops.paige.LoopElements`, whose products
come from Zorn arithmetic instead of a table.  Functions that need random
access to every product (center, inner mapping cubes) require a table.

Element 0 is always the identity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .finite_field import GuardrailError

# Largest loop for which a dense N x N table is materialized by default.
TABLE_LIMIT = 2000
# Largest loop for which the N^3 inner-mapping arrays are built.
INNER_CUBE_LIMIT = 256


class NotLatin(ValueError):
    """A multiplication table fails the Latin square or identity property."""


class NotSubloop(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class LoopTable:
    """Dense Cayley table of a finite loop with identity 0.

    ``labels`` optionally maps each index to its serialized 8-tuple so that
    reports can print elements rather than bare indices.
    """

    def __init__(self, table, labels: np.ndarray | None = None, check: bool = True):
        table = np.asarray(table)
        N = table.shape[0]
        if table.shape != (N, N):
            raise NotLatin("table must be square")
        dt = np.int16 if N < 2**15 else np.int32
        self.table = table.astype(dt)
        self.labels = labels
        if check:
            verify_latin(self.table)
        idx = np.arange(N, dtype=dt)
        self.ldiv_table = np.empty_like(self.table)
        self.rdiv_table = np.empty_like(self.table)
        rows = np.arange(N)[:, None]
        self.ldiv_table[rows, self.table] = idx[None, :]
        self.rdiv_table[self.table, rows.T] = idx[:, None]
        self.inverse = self.ldiv_table[:, 0].copy()
        for a in (self.table, self.ldiv_table, self.rdiv_table, self.inverse):
            a.setflags(write=False)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"LoopTable(order={self.order})"

    def mul(self, x, y):
        return self.table[x, y]

    def inv(self, x):
        return self.inverse[x]

    def ldiv(self, x, y):
        """x \\ y, the z with xz = y."""
        return self.ldiv_table[x, y]

    def rdiv(self, y, x):
        """y / x, the z with zx = y."""
        return self.rdiv_table[y, x]


def verify_latin(table: np.ndarray) -> None:
    N = table.shape[0]
    if N == 0:
        raise NotLatin("empty table")
    ar = np.arange(N)
    if not (np.array_equal(table[0], ar) and np.array_equal(table[:, 0], ar)):
        raise NotLatin("row 0 and column 0 must be the identity")
    if table.min() < 0 or table.max() >= N:
        raise NotLatin("entries out of range")
    srt = np.sort(table, axis=1)
    if not (srt == ar).all():
        bad = int(np.nonzero((srt != ar).any(axis=1))[0][0])
        raise NotLatin(f"row {bad} is not a permutation")
    srt = np.sort(table, axis=0)
    if not (srt == ar[:, None]).all():
        bad = int(np.nonzero((srt != ar[:, None]).any(axis=0))[0][0])
        raise NotLatin(f"column {bad} is not a permutation")


def build_table(loop, max_order: int = TABLE_LIMIT, block: int = 1 << 20) -> LoopTable:
    """Materialize the Cayley table of an implicit loop such as a Paige loop."""
    N = loop.order
    if N > max_order:
        raise GuardrailError(f"refusing to build a {N}x{N} table (limit {max_order})")
    out = np.empty((N, N), dtype=np.int16 if N < 2**15 else np.int32)
    ys = np.arange(N)
    rows = max(1, block // N)
    for start in range(0, N, rows):
        xs = np.arange(start, min(N, start + rows))
        out[xs] = loop.mul(xs[:, None], ys[None, :])
    labels = loop.tuples() if hasattr(loop, "tuples") else None
    return LoopTable(out, labels=labels)


def table_from_operation(elements: Sequence, op, identity) -> LoopTable:
    """Cayley table of ``op`` on ``elements`` with ``identity`` moved to index 0."""
    elements = [identity] + [e for e in elements if e != identity]
    index = {e: i for i, e in enumerate(elements)}
    N = len(elements)
    table = np.array([[index[op(a, b)] for b in elements] for a in elements]).reshape(N, N)
    return LoopTable(table)


def cyclic_group(n: int) -> LoopTable:
    return table_from_operation(range(n), lambda a, b: (a + b) % n, 0)


def labels_of(loop, idx) -> list:
    """8-tuples for ``idx`` when the loop knows them, else the bare indices."""
    idx = [int(i) for i in idx]
    if hasattr(loop, "tuples"):
        return [[int(v) for v in row] for row in loop.tuples(np.array(idx))]
    if getattr(loop, "labels", None) is not None:
        return [[int(v) for v in loop.labels[i]] for i in idx]
    return idx


# ---------------------------------------------------------------------------
# Moufang identities

MOUFANG_IDENTITIES = (
    "((xy)x)z = x(y(xz))",
    "((xy)z)y = x(y(zy))",
    "(xy)(zx) = (x(yz))x",
    "(xy)(zx) = x((yz)x)",
)


def _moufang_sides(t, x, y, z):
    m = t.mul
    xy = m(x, y)
    yz = m(y, z)
    zx = m(z, x)
    xy_zx = m(xy, zx)
    return (
        (m(m(xy, x), z), m(x, m(y, m(x, z)))),
        (m(m(xy, z), y), m(x, m(y, m(z, y)))),
        (xy_zx, m(m(x, yz), x)),
        (xy_zx, m(x, m(yz, x))),
    )


@dataclass
class MoufangReport:
    mode: str
    checked: int
    passed: dict
    counterexamples: dict
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def _triple_chunks(N, mode, count, seed, chunk):
    if mode == "exhaustive":
        yz = np.indices((N, N)).reshape(2, -1)
        for x in range(N):
            yield np.full(N * N, x), yz[0], yz[1]
    elif mode == "sample":
        if seed is None or count is None:
            raise ValueError("sample mode needs an explicit seed and count")
        rng = np.random.default_rng(seed)
        done = 0
        while done < count:
            k = min(chunk, count - done)
            x, y, z = rng.integers(0, N, size=(3, k))
            yield x, y, z
            done += k
    else:
        raise ValueError(f"unknown mode {mode!r}")


def check_moufang(t, mode: str = "exhaustive", count: int | None = None, seed: int | None = None,
                  chunk: int = 1 << 18) -> MoufangReport:
    """Check the four Moufang identities; failures are reported, not raised."""
    first = {name: None for name in MOUFANG_IDENTITIES}
    checked = 0
    for x, y, z in _triple_chunks(t.order, mode, count, seed, chunk):
        for name, (lhs, rhs) in zip(MOUFANG_IDENTITIES, _moufang_sides(t, x, y, z)):
            if first[name] is None:
                bad = np.nonzero(lhs != rhs)[0]
                if len(bad):
                    i = bad[0]
                    first[name] = (int(x[i]), int(y[i]), int(z[i]))
        checked += len(x)
    return MoufangReport(
        mode=mode,
        checked=checked,
        passed={k: v is None for k, v in first.items()},
        counterexamples={k: v for k, v in first.items() if v is not None},
        seed=seed,
    )


def associates(t, a, b, c) -> np.ndarray:
    return t.mul(t.mul(a, b), c) == t.mul(a, t.mul(b, c))


# ---------------------------------------------------------------------------
# subloops


@dataclass(frozen=True)
class SubloopHandle:
    indices: tuple

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, x) -> bool:
        return int(x) in set(self.indices)

    def array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int64)

    def mask(self, N: int) -> np.ndarray:
        m = np.zeros(N, dtype=bool)
        m[list(self.indices)] = True
        return m


def _handle(mask: np.ndarray) -> SubloopHandle:
    return SubloopHandle(tuple(int(i) for i in np.nonzero(mask)[0]))


def _closure_pairs(t, mask: np.ndarray) -> np.ndarray:
    # products of every pair; closure under products alone is enough in a
    # finite loop, inverses are added for clarity
    mask = mask.copy()
    mask[0] = True
    mask[t.inv(np.nonzero(mask)[0])] = True
    frontier = np.nonzero(mask)[0]
    while len(frontier):
        S = np.nonzero(mask)[0]
        prods = np.concatenate([
            t.mul(frontier[:, None], S[None, :]).ravel(),
            t.mul(S[:, None], frontier[None, :]).ravel(),
        ])
        prods = np.unique(prods)
        new = prods[~mask[prods]]
        new = np.unique(np.concatenate([new, t.inv(new)]))
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return mask


def _closure_translations(t, mask: np.ndarray) -> np.ndarray:
    # orbit of the identity under left and right translations by the seed;
    # equals the generated subloop in Moufang loops
    gens = np.nonzero(mask)[0]
    out = np.zeros(t.order, dtype=bool)
    out[0] = True
    frontier = np.array([0])
    while len(frontier):
        imgs = np.concatenate([
            t.mul(gens[:, None], frontier[None, :]).ravel(),
            t.mul(frontier[None, :], gens[:, None]).ravel(),
        ])
        imgs = np.unique(imgs)
        frontier = imgs[~out[imgs]]
        out[frontier] = True
    return out


def subloop_closure(t, seed: Iterable[int], method: str = "auto") -> SubloopHandle:
    """Smallest subloop containing ``seed``.

    ``method="pairs"`` closes under all products (any loop).
    ``method="translations"`` takes the orbit of the identity under left and
    right multiplication by seed elements; this is correct for Moufang loops,
    whose multiplication group is generated by the translations of any
    generating set, and is far cheaper for large implicit loops.
    """
    mask = np.zeros(t.order, dtype=bool)
    seed = np.fromiter((int(s) for s in seed), dtype=np.int64)
    mask[seed] = True
    if method == "auto":
        method = "pairs" if isinstance(t, LoopTable) else "translations"
    if method == "pairs":
        return _handle(_closure_pairs(t, mask))
    if method == "translations":
        return _handle(_closure_translations(t, mask))
    raise ValueError(f"unknown closure method {method!r}")


def generates(t, elems: Sequence[int], method: str = "auto") -> bool:
    return subloop_closure(t, elems, method).size == t.order


def find_generators(t, size: int = 3, seed: int = 0, tries: int = 10_000) -> list[int]:
    """A random ``size``-element generating set, reproducible from ``seed``."""
    if t.order == 1:
        return [0] * size
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        cand = [int(v) for v in rng.integers(1, t.order, size=size)]
        if generates(t, cand):
            return cand
    raise ValueError(f"no generating {size}-set found in {tries} tries")


# ---------------------------------------------------------------------------
# inner mappings and normality


def inner_maps(t, x: int, y: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Permutations L(x,y), R(x,y), T(x) of all loop indices."""
    z = np.arange(t.order)
    xy = t.mul(x, y)
    L = t.ldiv(xy, t.mul(x, t.mul(y, z)))
    R = t.rdiv(t.mul(t.mul(z, x), y), xy)
    T = t.ldiv(x, t.mul(z, x))
    return np.asarray(L), np.asarray(R), np.asarray(T)


class InnerMaps:
    """All L(x,y), R(x,y), T(x) for a small table, as arrays [x, y, z]."""

    def __init__(self, t: LoopTable):
        N = t.order
        if N > INNER_CUBE_LIMIT:
            raise GuardrailError(f"inner mapping arrays need N <= {INNER_CUBE_LIMIT}")
        T = t.table.astype(np.int64)
        x = np.arange(N)[:, None, None]
        y = np.arange(N)[None, :, None]
        z = np.arange(N)[None, None, :]
        xy = T[x, y]
        self.L = t.ldiv_table[xy, T[x, T[y, z]]]
        self.R = t.rdiv_table[T[T[z, x], y], xy]
        self.T = t.ldiv_table[np.arange(N)[:, None], T.T]

    def image(self, S: np.ndarray) -> np.ndarray:
        return np.unique(np.concatenate([
            self.L[:, :, S].ravel(), self.R[:, :, S].ravel(), self.T[:, S].ravel()
        ]))


def _inner_cache(t: LoopTable) -> InnerMaps:
    cache = getattr(t, "_inner_maps", None)
    if cache is None:
        cache = InnerMaps(t)
        t._inner_maps = cache
    return cache


def _normal_closure_inner(t: LoopTable, mask: np.ndarray) -> np.ndarray:
    im = _inner_cache(t)
    mask = _closure_pairs(t, mask)
    while True:
        img = im.image(np.nonzero(mask)[0])
        if mask[img].all():
            return mask
        mask[img] = True
        mask = _closure_pairs(t, mask)


def _normal_closure_congruence(t, mask: np.ndarray, translators=None) -> np.ndarray:
    # smallest congruence containing (0, s) for all seeds; its identity class
    # is the normal closure.  Invariance is only required under translations
    # by ``translators`` (all elements by default).
    N = t.order
    g = np.arange(N) if translators is None else np.asarray(list(translators))
    if translators is not None and not generates(t, g):
        raise ValueError("translators must generate the loop")
    seeds = np.nonzero(mask)[0]
    src = np.zeros(len(seeds), dtype=np.int64)
    dst = seeds.astype(np.int64)
    while True:
        graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
        _, labels = connected_components(graph, directed=False)
        # root of each class: its smallest member
        root = np.full(labels.max() + 1, N)
        np.minimum.at(root, labels, np.arange(N))
        r = root[labels]
        members = np.nonzero(r != np.arange(N))[0]
        a, b = members, r[members]
        new_src = np.concatenate([
            t.mul(g[:, None], a[None, :]).ravel(), t.mul(a[None, :], g[:, None]).ravel()])
        new_dst = np.concatenate([
            t.mul(g[:, None], b[None, :]).ravel(), t.mul(b[None, :], g[:, None]).ravel()])
        new_src = np.asarray(new_src, dtype=np.int64)
        new_dst = np.asarray(new_dst, dtype=np.int64)
        if np.array_equal(labels[new_src], labels[new_dst]):
            return labels == labels[0]
        src = np.concatenate([members, new_src])
        dst = np.concatenate([r[members], new_dst])


def normal_closure(t, seed: Iterable[int], method: str = "auto", translators=None) -> SubloopHandle:
    """Smallest normal subloop containing ``seed``.

    ``method="inner"`` alternates subloop closure with images under every
    inner mapping L(x,y), R(x,y), T(x) until nothing changes; it needs a
    table of order <= INNER_CUBE_LIMIT.  ``method="congruence"`` computes
    the identity class of the smallest congruence identifying the seeds with
    the identity.  Passing ``translators`` (a generating set of a Moufang
    loop) restricts the compatibility check to their translations.
    """
    mask = np.zeros(t.order, dtype=bool)
    mask[np.fromiter((int(s) for s in seed), dtype=np.int64)] = True
    mask[0] = True
    if method == "auto":
        small = isinstance(t, LoopTable) and t.order <= INNER_CUBE_LIMIT
        method = "inner" if small else "congruence"
    if method == "inner":
        return _handle(_normal_closure_inner(t, mask))
    if method == "congruence":
        return _handle(_normal_closure_congruence(t, mask, translators))
    raise ValueError(f"unknown normal closure method {method!r}")


def is_subloop(t, s: SubloopHandle) -> bool:
    mask = s.mask(t.order)
    if not mask[0]:
        return False
    S = s.array()
    return bool(mask[np.asarray(t.mul(S[:, None], S[None, :]))].all() and mask[np.asarray(t.inv(S))].all())


def is_normal(t, s: SubloopHandle, method: str = "auto") -> bool:
    if not is_subloop(t, s):
        raise NotSubloop("input is not closed under multiplication and inverses")
    if method == "auto":
        small = isinstance(t, LoopTable) and t.order <= INNER_CUBE_LIMIT
        method = "inner" if small else "congruence"
    if method == "inner":
        img = _inner_cache(t).image(s.array())
        return bool(s.mask(t.order)[img].all())
    return normal_closure(t, s.indices, method=method).indices == s.indices


def conjugacy_orbits(t, by: Iterable[int] | None = None) -> np.ndarray:
    """Orbit label of every element under the maps T(x) for x in ``by``.

    ``by`` defaults to the whole loop.  Any subset still gives orbits on
    which normal closures are constant, only finer ones.
    """
    N = t.order
    if by is None and isinstance(t, LoopTable):
        T = t.ldiv_table[np.arange(N)[:, None], t.table.T]
        src = np.repeat(np.arange(N)[None, :], N, axis=0).ravel()
        dst = T.ravel().astype(np.int64)
    else:
        xs = np.arange(N) if by is None else np.fromiter((int(v) for v in by), dtype=np.int64)
        z = np.arange(N)
        src = np.tile(z, len(xs))
        dst = np.concatenate([np.asarray(t.ldiv(np.full(N, x), t.mul(z, np.full(N, x)))) for x in xs])
        dst = dst.astype(np.int64)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
    return connected_components(graph, directed=False)[1]


def is_simple(t, method: str = "auto", translators=None, use_orbits: bool | None = None) -> bool:
    """True iff the normal closure of every non-identity element is everything.

    The trivial loop is not simple by convention.  With ``use_orbits`` only
    one element per T-orbit is checked (orbits under T(x) for x in
    ``translators``, or all x); normal closures are constant on such orbits.
    By default orbits are used with the congruence method only.
    """
    N = t.order
    if N == 1:
        return False
    if method == "auto":
        small = isinstance(t, LoopTable) and N <= INNER_CUBE_LIMIT
        method = "inner" if small else "congruence"
    if use_orbits is None:
        use_orbits = method == "congruence"
    candidates = np.arange(1, N)
    if use_orbits:
        labels = conjugacy_orbits(t, by=translators)
        _, first = np.unique(labels, return_index=True)
        candidates = np.sort(first[first != 0])
    for x in candidates:
        if normal_closure(t, [int(x)], method=method, translators=translators).size != N:
            return False
    return True


def center(t, generators: Sequence[int] | None = None) -> SubloopHandle:
    """Elements that commute and associate with everything.

    Without ``generators`` this needs a table and checks the definition
    directly.  With a generating set of a Moufang loop, z is central iff L(z)
    commutes with L(g) and R(g) for every generator g: those translations
    generate the multiplication group, whose centralizer in Sym(Q) is
    {L(z) : z central}.
    """
    if generators is not None:
        return _center_moufang(t, [int(g) for g in generators])
    T = t.table
    col = np.arange(t.order)[:, None]
    row = np.arange(t.order)[None, :]
    out = []
    for z in np.nonzero((T == T.T).all(axis=1))[0]:
        zx, xz = T[z][:, None], T[:, z][:, None]
        if not (T[zx, row] == T[z][T]).all():             # (zx)y = z(xy)
            continue
        if not (T[xz, row] == T[col, T[z][None, :]]).all():  # (xz)y = x(zy)
            continue
        if not (T[T, z] == T[col, T[:, z][None, :]]).all():  # (xy)z = x(yz)
            continue
        out.append(int(z))
    return SubloopHandle(tuple(out))


def _center_moufang(t, gens: list[int]) -> SubloopHandle:
    if not generates(t, gens):
        raise ValueError("generators do not generate the loop")
    N = t.order
    ys = np.arange(N)
    cand = ys
    for g in gens:
        gs = np.full(len(cand), g)
        cand = cand[np.asarray(t.mul(cand, gs)) == np.asarray(t.mul(gs, cand))]
    out = []
    for z in cand:
        zs = np.full(N, int(z))
        zy = t.mul(zs, ys)
        ok = True
        for g in gens:
            gs = np.full(N, g)
            # z(gy) = g(zy) and z(yg) = (zy)g
            if not ((t.mul(zs, t.mul(gs, ys)) == t.mul(gs, zy)).all()
                    and (t.mul(zs, t.mul(ys, gs)) == t.mul(zy, gs)).all()):
                ok = False
                break
        if ok:
            out.append(int(z))
    return SubloopHandle(tuple(out))


# ---------------------------------------------------------------------------
# triple scans


@dataclass
class TripleScanReport:
    mode: str
    checked: int
    associating: int
    nonassoc_generating: int
    nonassoc_nongenerating: int
    nongenerating_examples: list = field(default_factory=list)
    seed: int | None = None


def classify_triples(t, mode: str = "exhaustive", count: int | None = None, seed: int | None = None,
                     max_examples: int = 20, chunk: int = 1 << 16, method: str = "auto") -> TripleScanReport:
    """Count triples by (associates?, generates the loop?).

    Subloops generated by two elements are memoized, so the exhaustive scan
    only computes one closure per (two-generated subloop, third element).
    ``method`` is the closure method of :func:`subloop_closure`; use
    "translations" for Moufang loops.
    """
    if method == "auto":
        method = "pairs" if isinstance(t, LoopTable) else "translations"
    close = _closure_pairs if method == "pairs" else _closure_translations
    N = t.order
    pair_cache: dict = {}
    gen_cache: dict = {}

    def pair_key(a, b):
        k = (a, b)
        if k not in pair_cache:
            m = np.zeros(N, dtype=bool)
            m[[a, b]] = True
            pair_cache[k] = close(t, m).tobytes()
        return pair_cache[k]

    rep = TripleScanReport(mode=mode, checked=0, associating=0, nonassoc_generating=0,
                           nonassoc_nongenerating=0, seed=seed)
    if mode == "exhaustive":
        grid = np.indices((N, N)).reshape(2, -1)
        chunks = ((np.full(N * N, a), grid[0], grid[1]) for a in range(N))
    else:
        chunks = _triple_chunks(N, mode, count, seed, chunk)
    for a, b, c in chunks:
        ok = np.asarray(associates(t, a, b, c))
        rep.checked += len(a)
        rep.associating += int(ok.sum())
        for i in np.nonzero(~ok)[0]:
            x, y, z = int(a[i]), int(b[i]), int(c[i])
            H = pair_key(x, y)
            key = (H, z)
            if key not in gen_cache:
                m = np.zeros(N, dtype=bool)
                m[[x, y, z]] = True
                gen_cache[key] = bool(close(t, m).all())
            if gen_cache[key]:
                rep.nonassoc_generating += 1
            else:
                rep.nonassoc_nongenerating += 1
                if len(rep.nongenerating_examples) < max_examples:
                    rep.nongenerating_examples.append((x, y, z))
    return rep


# ---------------------------------------------------------------------------
# automorphisms


def check_automorphism(t, perm, block: int = 1 << 20, generators: Sequence[int] | None = None) -> bool:
    """True iff ``perm`` fixes 0 and preserves every product.

    With ``generators`` (a generating set of a Moufang loop) only products
    g*y and y*g are checked.  That suffices: the elements x whose left and
    right translations ``perm`` intertwines form a subloop, by
    L(xy) = R(x) L(x) L(y) R(x)^-1 and the inverse property.
    """
    perm = np.asarray(perm)
    N = t.order
    if perm.shape != (N,) or not np.array_equal(np.sort(perm), np.arange(N)):
        raise ValueError("not a permutation of the loop indices")
    if perm[0] != 0:
        return False
    if generators is not None:
        if not generates(t, list(generators)):
            raise ValueError("generators do not generate the loop")
        ys = np.arange(N)
        for g in generators:
            gs = np.full(N, int(g))
            pg = np.full(N, int(perm[g]))
            if not (perm[t.mul(gs, ys)] == t.mul(pg, perm)).all():
                return False
            if not (perm[t.mul(ys, gs)] == t.mul(perm, pg)).all():
                return False
        return True
    if isinstance(t, LoopTable):
        T = t.table
        return bool((perm[T] == T[perm][:, perm]).all())
    ys = np.arange(N)
    rows = max(1, block // N)
    for start in range(0, N, rows):
        xs = np.arange(start, min(N, start + rows))[:, None]
        if not (perm[t.mul(xs, ys[None, :])] == t.mul(perm[xs], perm[ys][None, :])).all():
            return False
    return True


def permutation_order(perm) -> int:
    perm = np.asarray(perm)
    ident = np.arange(len(perm))
    cur, k = perm.copy(), 1
    while not np.array_equal(cur, ident):
        cur = perm[cur]
        k += 1
    return k


def element_orders(t) -> np.ndarray:
    N = t.order
    idx = np.arange(N)
    out = np.zeros(N, dtype=np.int64)
    power = idx.copy()
    k = 1
    while True:
        out[(power == 0) & (out == 0)] = k
        if out.all():
            return out
        power = np.asarray(t.mul(power, idx))
        k += 1


def fingerprints(t: LoopTable) -> list[tuple]:
    """Automorphism-invariant signature of each element.

    (order, fixed points of T(x), histogram of orders of x*y over all y).
    """
    N = t.order
    orders = element_orders(t)
    T = t.ldiv_table[np.arange(N)[:, None], t.table.T]
    fixed = (T == np.arange(N)[None, :]).sum(axis=1)
    width = orders.max() + 1
    hist = np.stack([np.bincount(orders[t.table[x]], minlength=width) for x in range(N)])
    return [(int(orders[x]), int(fixed[x]), tuple(hist[x])) for x in range(N)]


def greedy_generators(t: LoopTable) -> list[int]:
    """A short generating sequence: repeatedly add the element that grows the closure most."""
    N = t.order
    gens: list[int] = []
    mask = np.zeros(N, dtype=bool)
    mask[0] = True
    while not mask.all():
        best, best_mask = None, None
        for x in np.nonzero(~mask)[0]:
            m = mask.copy()
            m[x] = True
            m = _closure_pairs(t, m)
            if best_mask is None or m.sum() > best_mask.sum():
                best, best_mask = int(x), m
        gens.append(best)
        mask = best_mask
    return gens


def _straight_line_program(t: LoopTable, gens: Sequence[int]):
    """For each prefix of ``gens``: elements of the generated subloop and a
    list of (z, x, y) with z = x*y that reaches each of them from the prefix."""
    N = t.order
    known = np.zeros(N, dtype=bool)
    known[0] = True
    order = [0]
    steps = []
    stages = []
    for g in gens:
        if not known[g]:
            known[g] = True
            order.append(g)
        queue = list(order)
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            for y in list(order):
                for a, b in ((x, y), (y, x)):
                    z = int(t.table[a, b])
                    if not known[z]:
                        known[z] = True
                        order.append(z)
                        queue.append(z)
                        steps.append((z, a, b))
        stages.append((np.array(order), list(steps)))
    return stages


@dataclass
class AutomorphismReport:
    count: int
    complete: bool
    base: list
    permutations: list = field(default_factory=list)
    nodes: int = 0
    pruned: dict = field(default_factory=dict)


def automorphism_search(t: LoopTable, collect: bool = False, budget: int | None = None,
                        base: Sequence[int] | None = None) -> AutomorphismReport:
    """Count automorphisms by backtracking over images of a generating sequence.

    Candidate images must match fingerprints and the orders of pairwise
    products; each partial assignment is extended through a straight-line
    program over the subloop its generators span, and any conflict prunes.
    """
    N = t.order
    if N == 1:
        return AutomorphismReport(count=1, complete=True, base=[], permutations=[np.zeros(1, dtype=np.int64)]
                                  if collect else [])
    gens = list(base) if base is not None else greedy_generators(t)
    if not generates(t, gens):
        raise ValueError("base does not generate the loop")
    stages = _straight_line_program(t, gens)
    fps = fingerprints(t)
    orders = element_orders(t)
    by_fp: dict = {}
    for x in range(1, N):
        by_fp.setdefault(fps[x], []).append(x)
    candidates = [by_fp[fps[g]] for g in gens]
    T = t.table
    report = AutomorphismReport(count=0, complete=True, base=gens)
    pruned = Counter()

    def extend(img: list[int], depth: int):
        elems, steps = stages[depth]
        phi = np.full(N, -1, dtype=np.int64)
        phi[0] = 0
        for g, h in zip(gens[: depth + 1], img):
            if phi[g] not in (-1, h):
                return None
            phi[g] = h
        for z, a, b in steps:
            phi[z] = T[phi[a], phi[b]]
        sub = phi[elems]
        if len(np.unique(sub)) != len(elems):
            pruned["injectivity"] += 1
            return None
        if not (phi[T[np.ix_(elems, elems)]] == T[np.ix_(sub, sub)]).all():
            pruned["homomorphism"] += 1
            return None
        return phi

    def recurse(img: list[int]):
        depth = len(img)
        g = gens[depth]
        for h in candidates[depth]:
            if h in img:
                continue
            report.nodes += 1
            if budget is not None and report.nodes > budget:
                raise BudgetExhausted
            if any(orders[T[g, gp]] != orders[T[h, hp]] or orders[T[gp, g]] != orders[T[hp, h]]
                   for gp, hp in zip(gens, img)):
                pruned["pair orders"] += 1
                continue
            new = img + [h]
            phi = extend(new, depth)
            if phi is None:
                continue
            if depth + 1 == len(gens):
                report.count += 1
                if collect:
                    report.permutations.append(phi)
            else:
                recurse(new)

    try:
        recurse([])
    except BudgetExhausted:
        report.complete = False
    report.pruned = dict(pruned)
    return report
