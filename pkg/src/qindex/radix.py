"""Quantized mixed-radix and permutation numbering.

The place value of digit i is ``L[i-1]`` where ``L[0] = 1`` and
``L[i] = sw_ceil(R_i * L[i-1])``.  Rounding up keeps every digit's
sub-interval disjoint, so floor division still peels digits off from the
most significant end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CorruptStreamError, DigitOutOfRangeError
from .swi import SWInt, check_precision, sw_mul_ceil


@dataclass(frozen=True)
class RadixTable:
    radices: tuple[int, ...]
    lengths: tuple[SWInt, ...]
    g: int

    @property
    def place_values(self) -> list[int]:
        return [q.value for q in self.lengths]

    @property
    def total(self) -> int:
        return self.lengths[-1].value


def build_radix_table(radices: Sequence[int], g: int = 32) -> RadixTable:
    check_precision(g)
    lengths = [SWInt(1, 0, g)]
    for r in radices:
        if r < 1:
            raise ValueError(f"radix {r} < 1")
        lengths.append(sw_mul_ceil(r, lengths[-1], g))
    return RadixTable(tuple(radices), tuple(lengths), g)


def _shifted_sum(terms: list[tuple[int, int]], lo: int, hi: int) -> tuple[int, int]:
    """Sum of a << s over terms[lo:hi] (s nondecreasing), as (value >> base, base)."""
    if hi - lo == 1:
        return terms[lo]
    mid = (lo + hi) // 2
    lv, lb = _shifted_sum(terms, lo, mid)
    rv, rb = _shifted_sum(terms, mid, hi)
    return lv + (rv << (rb - lb)), lb


def radix_encode(digits: Sequence[int], rt: RadixTable) -> int:
    """Index = sum of d_i * L[i-1]; place values are SWIs so each term is a shifted small product."""
    if len(digits) != len(rt.radices):
        raise DigitOutOfRangeError(f"expected {len(rt.radices)} digits, got {len(digits)}")
    terms = []
    for d, r, q in zip(digits, rt.radices, rt.lengths):
        if not 0 <= d < r:
            raise DigitOutOfRangeError(f"digit {d} outside radix {r}")
        if d:
            terms.append((d * q.w, q.s))
    if not terms:
        return 0
    v, base = _shifted_sum(terms, 0, len(terms))
    return v << base


def radix_decode(index: int, rt: RadixTable) -> list[int]:
    """Peel digits from the most significant place down.

    Removing d_i * w_i * 2**s_i leaves every bit below s_i untouched, so only
    a short remainder above the current shift is kept and lower bits of the
    index are pulled in as the shift decreases.
    """
    if not 0 <= index < rt.total:
        raise CorruptStreamError("mixed-radix index outside the table range")
    n = len(rt.radices)
    digits = [0] * n
    if n == 0:
        return digits
    raw = index.to_bytes(index.bit_length() // 8 + 1, "little")

    def field(lo: int, hi: int) -> int:
        b0 = lo >> 3
        v = int.from_bytes(raw[b0:(hi + 7) >> 3], "little") >> (lo - (b0 << 3))
        return v & ((1 << (hi - lo)) - 1)

    cur = rt.lengths[n - 1].s
    rem = index >> cur
    for i in range(n - 1, -1, -1):
        q = rt.lengths[i]
        if q.s < cur:
            rem = (rem << (cur - q.s)) | field(q.s, cur)
            cur = q.s
        d, rem = divmod(rem, q.w)
        if d >= rt.radices[i]:
            raise CorruptStreamError(f"digit {d} at place {i} falls in a quantization gap")
        digits[i] = d
    return digits


def build_perm_table(n: int, g: int = 32) -> RadixTable:
    """Place values for permutations of n items: radix i at place i."""
    return build_radix_table(range(1, n + 1), g)


def lehmer_code(perm: Sequence[int]) -> list[int]:
    """c_i = number of earlier elements greater than perm[i]; c_i < i + 1."""
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    return [sum(1 for q in perm[:i] if q > p) for i, p in enumerate(perm)]


def from_lehmer(code: Sequence[int]) -> list[int]:
    remaining = list(range(len(code)))
    perm = [0] * len(code)
    for i in range(len(code) - 1, -1, -1):
        # perm[i] has exactly code[i] larger values among remaining (all earlier)
        perm[i] = remaining.pop(len(remaining) - 1 - code[i])
    return perm


def perm_rank(perm: Sequence[int], pt: RadixTable) -> int:
    return radix_encode(lehmer_code(perm), pt)


def perm_unrank(index: int, n: int, pt: RadixTable) -> list[int]:
    if len(pt.radices) != n:
        raise ValueError(f"table built for {len(pt.radices)} items, not {n}")
    return from_lehmer(radix_decode(index, pt))
