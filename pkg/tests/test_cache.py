import struct

import numpy as np
import pytest

from paigeloops.cache import (
    MAGIC,
    CacheError,
    byte_width,
    default_cache_path,
    dumps,
    loads,
    read_cache,
    write_cache,
)
from paigeloops.loop_core import build_table
from paigeloops.paige import paige_loop


def test_byte_width():
    assert [byte_width(k) for k in (2, 256, 257, 65536, 65537)] == [1, 1, 2, 2, 3]


def test_header_layout(m2):
    data = dumps(m2)
    assert data[:6] == MAGIC
    p, n, mlen, N = struct.unpack("<QQQQ", data[6:38])
    assert (p, n, mlen, N) == (2, 1, 0, 120)
    assert data[38:46] == bytes(m2.tuples(0).tolist())
    assert len(data) == 38 + 120 * 8 + 8
    data4 = dumps(paige_loop(2, 2))
    p, n, mlen = struct.unpack("<QQQ", data4[6:30])
    assert (p, n, mlen) == (2, 2, 3) and data4[30:33] == bytes([1, 1, 1])


@pytest.mark.parametrize("with_table", [False, True])
def test_round_trip(tmp_path, m2, t2, with_table):
    path = write_cache(tmp_path / "m2.bin", m2, t2 if with_table else None)
    loop, table = read_cache(path)
    assert np.array_equal(loop.tuples(), m2.tuples())
    if with_table:
        assert np.array_equal(table.table, t2.table)
    else:
        assert table is None


def test_round_trip_two_byte_table():
    m = paige_loop(3)
    t = build_table(m)
    loop, table = loads(dumps(m, t))
    assert np.array_equal(table.table, t.table)
    assert byte_width(m.order) == 2


def corrupt(data, pos, xor=1):
    b = bytearray(data)
    b[pos] ^= xor
    return bytes(b)


def test_corruption_detected(m2, t2):
    data = dumps(m2, t2)
    with pytest.raises(CacheError, match="magic"):
        loads(corrupt(data, 0))
    with pytest.raises(CacheError):
        loads(corrupt(data, 7))          # p becomes 258, not prime
    with pytest.raises(CacheError):
        loads(corrupt(data, 38 + 8 * 50 + 3))  # flip a tuple entry
    with pytest.raises(CacheError, match="truncated"):
        loads(data[:-5])
    with pytest.raises(CacheError, match="trailing"):
        loads(data + b"\0")
    # swap two entries of a table row: no longer Latin
    off = len(data) - 120 * 120
    b = bytearray(data)
    b[off + 121], b[off + 122] = b[off + 122], b[off + 121]
    with pytest.raises(CacheError, match="loop table"):
        loads(bytes(b))


def test_trust_skips_verification(m2):
    data = dumps(m2)
    # drop one element and patch the count: detected unless trusted
    N = 119
    body = data[:30] + struct.pack("<Q", N) + data[38:38 + 8 * N] + struct.pack("<Q", 0)
    with pytest.raises(CacheError):
        loads(body)
    loop, _ = loads(body, trust=True)
    assert loop.order == 119


def test_default_path(monkeypatch, tmp_path):
    monkeypatch.setenv("PAIGE_CACHE_DIR", str(tmp_path))
    assert default_cache_path(2, 3) == tmp_path / "paige_2_3.bin"
    with pytest.raises(CacheError):
        read_cache(tmp_path / "missing.bin")
