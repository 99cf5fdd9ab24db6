from __future__ import annotations

import json
import math
import struct
import zlib
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qindex.codec import encode_block
from qindex.container import (
    HEADER_SIZE,
    StreamHeader,
    compress,
    decompress,
    encode,
    layout,
    prepare_bits,
    read_stream,
    write_stream,
)
from qindex.errors import (
    BadMagicError,
    BadVersionError,
    CorruptStreamError,
    InconsistentParametersError,
    TruncatedStreamError,
)
from qindex.qtable import get_table

DATA = Path(__file__).parent / "data"


def test_empty_is_header_only():
    out = write_stream(encode(np.zeros(0, dtype=np.uint8)))
    assert len(out) == HEADER_SIZE == 19
    magic, version, g, block, total, flags = struct.unpack("<4sBBIQB", out)
    assert (magic, version, g, block, total, flags) == (b"QIX1", 1, 32, 4096, 0, 0)
    assert read_stream(out)[1].size == 0


def test_worked_example_bytes():
    out = compress(bytes([0b00101001]))
    # k=3 in 4 bits, no body, tip 43 in ceil(log2 56) = 6 bits, zero pad
    assert out[19:21] == bytes([0b0011_1010, 0b1100_0000])
    assert out[21:] == struct.pack("<I", zlib.crc32(out[:21]))
    assert decompress(out) == bytes([0b00101001])


def test_single_zero_block():
    s = encode(np.zeros(8, dtype=np.uint8), 8, 32)
    lay = layout(s)
    assert (lay.class_bits, lay.body_bits, lay.tip_bits) == (4, 0, 0)
    assert len(write_stream(s)) == 19 + 1 + 4


def test_prepare_bits():
    bits, inv = prepare_bits("1110")
    assert bits.tolist() == [0, 0, 0, 1] and inv
    bits, inv = prepare_bits("0011")
    assert bits.tolist() == [0, 0, 1, 1] and not inv
    rng = np.random.default_rng(1)
    bits, _ = prepare_bits((rng.random(5000) < 0.8).astype(np.uint8))
    assert 2 * bits.sum() <= bits.size


def test_payload_lengths_recomputed(t4096):
    rng = np.random.default_rng(7)
    bits = (rng.random(8192) < 0.3).astype(np.uint8)
    s = encode(bits, 4096, 32)
    bodies = tips = 0
    prod_radix = 1
    for c in s.blocks:
        lv = t4096.value(c.m - c.k, c.k)
        b = lv.bit_length()
        bodies += max(b - 16, 0)
        prod_radix *= (lv >> (b - 16)) + 1 if b > 16 else lv
    lay = layout(s)
    assert lay.body_bits == bodies
    # tip stream costs ceil(log2) of the quantized radix product, within a bit of the exact one
    assert math.log2(prod_radix) <= lay.tip_bits <= math.log2(prod_radix) + 2
    assert [c.index for c in s.blocks] == [encode_block(bits[i:i + 4096], t4096).index for i in (0, 4096)]


def test_deterministic():
    raw = bytes(range(256)) * 10
    assert compress(raw, 1000, 24) == compress(raw, 1000, 24)


def test_golden_vectors():
    index = json.loads((DATA / "golden.json").read_text())
    assert index
    for name, p in index.items():
        raw = (DATA / f"{name}.raw").read_bytes()
        frozen = (DATA / f"{name}.qix").read_bytes()
        assert compress(raw, p["block_size"], p["g"], p["alphabet"]) == frozen, name
        assert decompress(frozen) == raw, name


def test_header_errors():
    good = compress(b"hello world")
    with pytest.raises(BadMagicError):
        read_stream(b"QIX2" + good[4:])
    with pytest.raises(BadVersionError):
        read_stream(good[:4] + b"\x02" + good[5:])
    with pytest.raises(TruncatedStreamError):
        read_stream(good[:10])
    with pytest.raises(CorruptStreamError):
        read_stream(good[:18] + b"\x03" + good[19:])
    with pytest.raises(CorruptStreamError):
        StreamHeader.unpack(StreamHeader(2, 10, 10).pack())


def test_every_truncation_fails():
    good = compress(b"quantized indexing" * 40, 256, 16)
    for cut in range(len(good)):
        with pytest.raises(CorruptStreamError):
            read_stream(good[:cut])


def test_trailing_garbage_fails():
    good = compress(b"abc" * 100)
    with pytest.raises(CorruptStreamError):
        read_stream(good + b"\x00")


def test_bit_flips_fail():
    rng = np.random.default_rng(11)
    good = compress(rng.integers(0, 256, 2000, dtype=np.uint8).tobytes(), 1024, 12)
    picks = list(range(HEADER_SIZE * 8)) + rng.choice(len(good) * 8, 400, replace=False).tolist()
    for bit in picks:
        bad = bytearray(good)
        bad[bit >> 3] ^= 0x80 >> (bit & 7)
        with pytest.raises(CorruptStreamError):
            read_stream(bytes(bad))


def test_inconsistent_parameters():
    s = encode(np.zeros(100, dtype=np.uint8), 64, 32)
    s.blocks.pop()
    with pytest.raises(InconsistentParametersError):
        write_stream(s)
    with pytest.raises(InconsistentParametersError):
        encode(b"x", alphabet="hex")


def test_decompress_rejects_odd_bit_lengths():
    s = write_stream(encode(np.ones(13, dtype=np.uint8), 8, 32))
    assert read_stream(s)[1].tolist() == [1] * 13
    with pytest.raises(InconsistentParametersError):
        decompress(s)


@settings(max_examples=80)
@given(st.binary(max_size=3000), st.sampled_from([1, 7, 64, 1000, 4096]), st.sampled_from([4, 9, 16, 32]),
       st.sampled_from(["bin", "byte"]))
def test_round_trip(raw, block, g, alphabet):
    if alphabet == "byte" and block > 1000:
        block = 1000
    assert decompress(compress(raw, block, g, alphabet)) == raw


@given(st.integers(0, 20000), st.floats(0, 1), st.integers(0, 2**32))
def test_round_trip_bits(n, p, seed):
    rng = np.random.default_rng(seed)
    bits = (rng.random(n) < p).astype(np.uint8)
    h, out = read_stream(write_stream(encode(bits, 4096, 32)))
    assert h.total_symbols == n and np.array_equal(out, bits)


def resign(framed: bytes) -> bytes:
    return framed + struct.pack("<I", zlib.crc32(framed))


def test_structural_checks_behind_valid_checksum():
    good = compress(bytes([0b00101001]))
    framed = bytearray(good[:-4])
    # k field 3 -> 9 exceeds the 8-bit block
    bad = bytearray(framed)
    bad[19] = (bad[19] & 0x0F) | (9 << 4)
    with pytest.raises(CorruptStreamError):
        read_stream(resign(bytes(bad)))
    # nonzero padding bit
    bad = bytearray(framed)
    bad[20] |= 0x01
    with pytest.raises(CorruptStreamError):
        read_stream(resign(bytes(bad)))
    # an extra byte of stream
    with pytest.raises(CorruptStreamError):
        read_stream(resign(bytes(framed) + b"\x00"))
    # tip 43 -> 63, beyond the 56 strings of the class
    bad = bytearray(framed)
    bad[19] |= 0b0000_1111
    bad[20] |= 0b1100_0000
    with pytest.raises(CorruptStreamError):
        read_stream(resign(bytes(bad)))
    assert decompress(resign(bytes(framed))) == bytes([0b00101001])
