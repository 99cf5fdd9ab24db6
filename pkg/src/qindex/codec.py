"""Binary block coder over a quantized addend table.

Encoding walks the block forward and, for every 1 landing on lattice point
``(x, y)``, adds the quantized count of the left neighbour ``L(x-1, y)``.
Zeros cost nothing.  Decoding runs backwards from ``(m-k, k)``: while the
index is below ``L(x-1, y)`` the last step was a 0, otherwise it was a 1 and
``L(x-1, y)`` is subtracted.  Because ``L(., y)`` grows with ``x`` the run of
zeros preceding each 1 is located by galloping search rather than one step at
a time.

The index itself is a plain Python int: adding ``w << s`` is exactly the
add-at-bit-offset with unbounded carry the coder needs.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BlockTooLongError, CorruptIndexError, DigitOutOfRangeError
from .qtable import QuantTable

TIP_BITS = 16


@dataclass(frozen=True)
class BlockCode:
    m: int
    k: int
    index: int


class Tip(NamedTuple):
    digit: int
    radix: int
    body: int
    body_bits: int


def as_bits(bits) -> np.ndarray:
    """Coerce a '0'/'1' string, bytes-like of 0/1 values or sequence into a uint8 array."""
    if isinstance(bits, np.ndarray):
        return (bits != 0).astype(np.uint8) if bits.dtype != np.uint8 else bits
    if isinstance(bits, str):
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    return np.asarray(list(bits), dtype=np.uint8)


def bitstring(bits) -> str:
    return "".join("1" if b else "0" for b in as_bits(bits).tolist())


def class_size(t: QuantTable, m: int, k: int) -> int:
    """Quantized size of the index interval for blocks of m bits with k ones."""
    return t.value(m - k, k)


def encode_block(bits, t: QuantTable) -> BlockCode:
    a = as_bits(bits)
    m = int(a.size)
    if m > t.n_max:
        raise BlockTooLongError(f"block of {m} bits exceeds table front {t.n_max}")
    pos = np.flatnonzero(a)
    k = int(pos.size)
    # j-th one at offset p lands on (p + 1 - j, j); its addend is L(p - j, j)
    j = np.arange(1, k + 1)
    live = pos >= j
    p, j = pos[live], j[live]
    flat = p * (p + 1) // 2 + j
    ws = t.w[flat].tolist()
    ss = t.s[flat].tolist()
    return BlockCode(m, k, sum(map(operator.lshift, ws, ss)))


def decode_block(code: BlockCode, t: QuantTable) -> np.ndarray:
    m, k, index = code.m, code.k, code.index
    if m > t.n_max:
        raise BlockTooLongError(f"block of {m} bits exceeds table front {t.n_max}")
    if not 0 <= k <= m:
        raise CorruptIndexError(f"k={k} outside [0, {m}]")
    if not 0 <= index < t.value(m - k, k):
        raise CorruptIndexError("index outside its class interval")

    w, s = t.views

    def left(xp: int, y: int) -> int:
        # L(xp - 1, y), the length of the 0-subinterval at (xp, y)
        if xp <= 0:
            return 0
        n = xp - 1 + y
        i = (n * (n + 1) >> 1) + y
        return w[i] << s[i]

    out = np.zeros(m, dtype=np.uint8)
    x, y = m - k, k
    while y > 0:
        v = left(x, y)
        if v > index:
            # gallop down to a bracket left(lo) <= index < left(hi), then bisect
            hi, step, lo = x, 1, x - 1
            v = left(lo, y)
            while v > index:
                hi, step = lo, step * 2
                lo = max(x - step, 0)
                v = left(lo, y)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                vm = left(mid, y)
                if vm <= index:
                    lo, v = mid, vm
                else:
                    hi = mid
            x = lo
        out[x + y - 1] = 1
        index -= v
        y -= 1
    # A zero remainder means the removed addends are exactly the encoding of
    # the emitted string, whose prefix sums never leave their intervals; any
    # escape from an interval along the way therefore leaves a nonzero rest.
    if index != 0:
        raise CorruptIndexError("lattice walk did not reach the origin with a zero index")
    return out


def tip_shape(t: QuantTable, m: int, k: int) -> tuple[int, int]:
    """(radix, body_bits) of the tip split for class (m, k).

    The radix is one more than the top 16 bits of the class size: an index just
    below the class size can share those top bits, so the digit range is
    inclusive of them.  Small classes travel whole as a single digit.
    """
    size = class_size(t, m, k)
    low = size.bit_length() - TIP_BITS
    if low <= 0:
        return size, 0
    return (size >> low) + 1, low


def split_tip(code: BlockCode, t: QuantTable) -> Tip:
    """Split an index into its leading 16-bit digit and the raw low body bits."""
    radix, low = tip_shape(t, code.m, code.k)
    return Tip(code.index >> low, radix, code.index & ((1 << low) - 1), low)


def merge_tip(digit: int, radix: int, body: int, m: int, k: int, t: QuantTable) -> BlockCode:
    expect, low = tip_shape(t, m, k)
    if radix != expect:
        raise DigitOutOfRangeError(f"radix {radix} does not match class ({m}, {k})")
    if not 0 <= digit < radix:
        raise DigitOutOfRangeError(f"digit {digit} outside radix {radix}")
    if not 0 <= body < (1 << low):
        raise DigitOutOfRangeError("body wider than its field")
    return BlockCode(m, k, (digit << low) | body)
