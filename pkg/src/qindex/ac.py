"""Baseline static binary arithmetic coder (32-bit, order 0).

A textbook low/high coder with bit-plus-follow underflow handling.  The
model is two-pass: the block's ones count ``k`` fixes p(1) = k/m, which is
exactly the information the QI coder receives through its class field.
"""

from __future__ import annotations

import numpy as np

from .bitio import BitWriter
from .codec import as_bits
from .errors import CorruptStreamError

STATE_BITS = 32
_FULL = (1 << STATE_BITS) - 1
_HALF = 1 << (STATE_BITS - 1)
_QUARTER = 1 << (STATE_BITS - 2)
_THREE_Q = 3 * _QUARTER


def ac_encode(bits, k: int | None = None) -> tuple[bytes, int]:
    """Encode a bit block; returns (payload bytes, payload length in bits)."""
    a = as_bits(bits)
    m = int(a.size)
    if k is None:
        k = int(np.count_nonzero(a))
    total = m
    c0 = m - k
    low, high, pending = 0, _FULL, 0
    out = []
    emit = out.append
    for b in a.tolist():
        rng = high - low + 1
        split = low + rng * c0 // total
        if b:
            if split > high:
                raise ValueError("symbol 1 has zero probability under the model")
            low = split
        else:
            if split == low:
                raise ValueError("symbol 0 has zero probability under the model")
            high = split - 1
        while True:
            if high < _HALF:
                emit(0)
                if pending:
                    out.extend([1] * pending)
                    pending = 0
            elif low >= _HALF:
                emit(1)
                if pending:
                    out.extend([0] * pending)
                    pending = 0
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_Q:
                pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
    if m:
        pending += 1
        if low < _QUARTER:
            out.append(0)
            out.extend([1] * pending)
        else:
            out.append(1)
            out.extend([0] * pending)
    w = BitWriter()
    if out:
        w.write(int("".join(map(str, out)), 2), len(out))
    return w.getvalue(), len(out)


def ac_decode(payload: bytes, nbits: int, m: int, k: int) -> np.ndarray:
    if not 0 <= k <= m:
        raise CorruptStreamError(f"k={k} outside [0, {m}]")
    if nbits > len(payload) * 8:
        raise CorruptStreamError("payload shorter than its bit length")
    stream = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:nbits].tolist()
    stream += [0] * (STATE_BITS + 2)
    pos = STATE_BITS
    value = int("".join(map(str, stream[:STATE_BITS])) or "0", 2)
    total = m
    c0 = m - k
    low, high = 0, _FULL
    out = np.zeros(m, dtype=np.uint8)
    for i in range(m):
        rng = high - low + 1
        split = low + rng * c0 // total
        if value >= split:
            out[i] = 1
            low = split
        else:
            high = split - 1
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                value -= _HALF
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_Q:
                value -= _QUARTER
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            value = (value << 1) | (stream[pos] if pos < len(stream) else 0)
            pos += 1
    if int(np.count_nonzero(out)) != k:
        raise CorruptStreamError("decoded ones count does not match the model")
    return out
