"""Binary cache of an enumerated Paige loop.

Layout (all integers little-endian)::

    b"PAIGE1"
    u64 p, u64 n
    u64 L, then L bytes: modulus coefficients, constant term first (L = 0 for n = 1)
    u64 N
    N * 8 element indices, each w_e bytes, w_e = smallest w >= 1 with 256**w >= p**n
    u64 table flag (0 or 1)
    if flag: N * N row-major table entries, each w_t bytes, 256**w_t >= N
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .finite_field import FieldError, make_field
from .loop_core import LoopTable, NotLatin
from .paige import LoopElements, array_ops, predicted_order

MAGIC = b"PAIGE1"


class CacheError(ValueError):
    pass


def byte_width(count: int) -> int:
    w = 1
    while 256**w < count:
        w += 1
    return w


def default_cache_dir() -> Path:
    return Path(os.environ.get("PAIGE_CACHE_DIR", Path.home() / ".cache" / "paige"))


def default_cache_path(p: int, n: int) -> Path:
    return default_cache_dir() / f"paige_{p}_{n}.bin"


def _pack_ints(values: np.ndarray, width: int) -> bytes:
    v = np.ascontiguousarray(values, dtype="<u8").reshape(-1)
    return v.view(np.uint8).reshape(-1, 8)[:, :width].tobytes()


def _unpack_ints(buf: bytes, count: int, width: int) -> np.ndarray:
    raw = np.frombuffer(buf, dtype=np.uint8, count=count * width).reshape(count, width)
    padded = np.zeros((count, 8), dtype=np.uint8)
    padded[:, :width] = raw
    return padded.view("<u8").reshape(count).astype(np.int64)


def dumps(loop: LoopElements, table: LoopTable | None = None) -> bytes:
    f = loop.field
    modulus = bytes(f.modulus or ())
    out = [MAGIC, struct.pack("<QQ", f.p, f.n), struct.pack("<Q", len(modulus)), modulus,
           struct.pack("<Q", loop.order)]
    out.append(_pack_ints(loop.tuples(), byte_width(f.order)))
    if table is None:
        out.append(struct.pack("<Q", 0))
    else:
        out.append(struct.pack("<Q", 1))
        out.append(_pack_ints(table.table, byte_width(loop.order)))
    return b"".join(out)


def write_cache(path, loop: LoopElements, table: LoopTable | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(loop, table))
    return path


def loads(data: bytes, trust: bool = False) -> tuple[LoopElements, LoopTable | None]:
    """Parse a cache; unless ``trust``, re-verify elements and any stored table."""
    view = memoryview(data)
    pos = 0

    def take(k: int) -> bytes:
        nonlocal pos
        if pos + k > len(view):
            raise CacheError("truncated cache file")
        chunk = bytes(view[pos:pos + k])
        pos += k
        return chunk

    if take(len(MAGIC)) != MAGIC:
        raise CacheError("bad magic; not a PAIGE1 cache")
    p, n = struct.unpack("<QQ", take(16))
    (mlen,) = struct.unpack("<Q", take(8))
    modulus = tuple(take(mlen))
    try:
        f = make_field(p, n)
    except FieldError as exc:
        raise CacheError(f"invalid field record: {exc}") from exc
    if tuple(f.modulus or ()) != modulus:
        raise CacheError("modulus in cache differs from the canonical modulus")
    (N,) = struct.unpack("<Q", take(8))
    we = byte_width(f.order)
    tuples = _unpack_ints(take(N * 8 * we), N * 8, we).reshape(N, 8)
    (flag,) = struct.unpack("<Q", take(8))
    if flag not in (0, 1):
        raise CacheError("bad table flag")
    raw_table = None
    if flag:
        wt = byte_width(N)
        raw_table = _unpack_ints(take(N * N * wt), N * N, wt).reshape(N, N)
    if pos != len(view):
        raise CacheError("trailing bytes after cache payload")
    if tuples.max(initial=0) >= f.order:
        raise CacheError("element index out of range")

    try:
        loop = LoopElements(f, array_ops(f).pack(tuples))
    except ValueError as exc:
        raise CacheError(str(exc)) from exc
    if not np.array_equal(loop.tuples(), tuples):
        raise CacheError("elements are not in canonical order")
    if not trust:
        _verify_elements(loop)
    table = None
    if raw_table is not None:
        try:
            table = LoopTable(raw_table, labels=tuples, check=not trust)
        except NotLatin as exc:
            raise CacheError(f"stored table is not a loop table: {exc}") from exc
    return loop, table


def _verify_elements(loop: LoopElements) -> None:
    ops = loop.ops
    if (ops.znorm(loop.packed) != 1).any():
        raise CacheError("cache contains an element whose norm is not 1")
    if not np.array_equal(ops.canonical(loop.packed), loop.packed):
        raise CacheError("cache contains a non-canonical representative")
    if loop.order != predicted_order(loop.field.order):
        raise CacheError(f"cache has {loop.order} elements, expected {predicted_order(loop.field.order)}")


def read_cache(path, trust: bool = False):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CacheError(f"cannot read {path}: {exc}") from exc
    return loads(data, trust=trust)
