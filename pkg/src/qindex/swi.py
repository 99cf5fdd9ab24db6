"""Sliding window integers.

A sliding window integer (SWI) is ``w * 2**s`` where the mantissa ``w`` holds
at most ``g`` bits.  Whenever ``s > 0`` the mantissa is normalized, i.e. its
top bit is set.  Arithmetic on SWIs is integer-exact; the only lossy step is
the final upward rounding to the nearest representable SWI (``sw_ceil``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

MIN_PRECISION = 4
MAX_PRECISION = 32
DEFAULT_PRECISION = 32


def check_precision(g: int) -> int:
    if not MIN_PRECISION <= g <= MAX_PRECISION:
        raise ValueError(f"precision g={g} outside [{MIN_PRECISION}, {MAX_PRECISION}]")
    return g


@dataclass(frozen=True, slots=True)
class SWInt:
    w: int
    s: int = 0
    g: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        if self.w < 0 or self.s < 0 or self.w >> self.g:
            raise ValueError(f"malformed SWInt {self!r}")
        if self.s > 0 and self.w >> (self.g - 1) != 1:
            raise ValueError(f"unnormalized SWInt with s > 0: {self!r}")

    @property
    def value(self) -> int:
        return self.w << self.s

    def __int__(self) -> int:
        return self.w << self.s


def sw_value(q: SWInt) -> int:
    return q.w << q.s


def _round_window(acc: int, base: int, sticky: bool, g: int) -> SWInt:
    """Round ``acc * 2**base + eps`` up to ``g`` bits, ``eps`` in (0, 2**base) iff sticky.

    With ``sticky`` set the caller guarantees the result shift is >= ``base``.
    """
    shift = max(acc.bit_length() + base - g, 0)
    if shift <= base and not sticky:
        return SWInt(acc << (base - shift), shift, g)
    assert shift >= base, "sticky bits below the result granularity"
    drop = shift - base
    w = acc >> drop
    if sticky or acc & ((1 << drop) - 1):
        w += 1
        if w >> g:
            w >>= 1
            shift += 1
    return SWInt(w, shift, g)


def sw_ceil(x: int, g: int = DEFAULT_PRECISION) -> SWInt:
    """Smallest SWI of precision ``g`` whose value is >= ``x``."""
    if x < 0:
        raise ValueError("sw_ceil requires x >= 0")
    bl = x.bit_length()
    if bl <= g:
        return SWInt(x, 0, g)
    drop = bl - g
    w = x >> drop
    if x & ((1 << drop) - 1):
        w += 1
        if w >> g:
            return SWInt(w >> 1, drop + 1, g)
    return SWInt(w, drop, g)


def sw_sum_ceil(terms: Iterable[SWInt], g: int = DEFAULT_PRECISION) -> SWInt:
    """Exact sum of SWI terms, rounded up once.

    The sum is formed in a window aligned to the smallest shift that can still
    influence the rounded result.  Terms lying entirely below that window are
    folded into a sticky bit: their total is smaller than one unit of the
    window, and the window's own lowest unit lies below the result's
    granularity, so only their being nonzero matters.
    """
    live = sorted((t for t in terms if t.w), key=lambda t: t.s, reverse=True)
    if not live:
        return SWInt(0, 0, g)
    gap = g + len(live).bit_length()
    cut = len(live)
    for i in range(1, len(live)):
        if live[i - 1].s - live[i].s >= gap:
            cut = i
            break
    window = live[:cut]
    base = window[-1].s
    acc = 0
    for t in window:
        acc += t.w << (t.s - base)
    return _round_window(acc, base, cut < len(live), g)


def sw_mul_ceil(r: int, q: SWInt, g: int | None = None) -> SWInt:
    """Round ``r * value(q)`` up to an SWI; the product itself is exact."""
    if r < 1:
        raise ValueError("sw_mul_ceil requires r >= 1")
    g = q.g if g is None else g
    if r == 1 and g == q.g:
        return q
    return _round_window(r * q.w, q.s, False, g)
