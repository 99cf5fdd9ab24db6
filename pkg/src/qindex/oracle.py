"""Exact enumerative coding with unlimited precision (colex convention).

This is the ground truth the quantized coder is checked against.  It is
deliberately simple and slow.
"""

from __future__ import annotations

import math
import threading
from typing import Sequence

from .errors import RankOutOfRangeError

#: rows of Pascal's triangle memoized by addition up to this n
PASCAL_LIMIT = 256

_rows: list[list[int]] = [[1]]
_rows_lock = threading.Lock()


def _pascal_row(n: int) -> list[int]:
    if n >= len(_rows):
        with _rows_lock:
            while len(_rows) <= n:
                prev = _rows[-1]
                _rows.append([1] + [a + b for a, b in zip(prev, prev[1:])] + [1])
    return _rows[n]


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    if n <= PASCAL_LIMIT:
        return _pascal_row(n)[k]
    k = min(k, n - k)
    c = 1
    for i in range(k):
        c = c * (n - i) // (i + 1)
    return c


def binom_row(n: int) -> list[int]:
    """All of C(n, 0..n), by the multiplicative recurrence along the row."""
    if n <= PASCAL_LIMIT:
        return list(_pascal_row(n))
    row = [1] * (n + 1)
    c = 1
    for k in range(n // 2):
        c = c * (n - k) // (k + 1)
        row[k + 1] = row[n - k - 1] = c
    return row


def multinomial(counts: Sequence[int]) -> int:
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    total = 0
    result = 1
    for c in counts:
        total += c
        result *= binom(total, c)
    return result


def _bits(s) -> list[int]:
    if isinstance(s, str):
        return [1 if ch == "1" else 0 for ch in s]
    return [1 if b else 0 for b in s]


def rank_exact(bits) -> int:
    """Colex rank: sum of C(n_j, j) over the 1s, n_j the offset of the j-th 1."""
    rank = 0
    j = 0
    for pos, b in enumerate(_bits(bits)):
        if b:
            j += 1
            rank += binom(pos, j)
    return rank


def rank_exact_walk(bits) -> int:
    """Same rank, computed as the lattice-walk sum of left-neighbour path counts.

    Each 1 taken at step i contributes N(x_i - 1, y_i), the number of paths to
    the point left of where the step lands.
    """
    x = y = 0
    rank = 0
    for b in _bits(bits):
        if b:
            y += 1
            if x >= 1:
                rank += binom(x - 1 + y, y)
        else:
            x += 1
    return rank


def unrank_exact(index: int, n: int, k: int) -> str:
    if not 0 <= k <= n:
        raise RankOutOfRangeError(f"k={k} outside [0, {n}]")
    if not 0 <= index < binom(n, k):
        raise RankOutOfRangeError(f"index {index} outside [0, C({n},{k}))")
    out = ["0"] * n
    pos = n - 1
    for j in range(k, 0, -1):
        while binom(pos, j) > index:
            pos -= 1
        out[pos] = "1"
        index -= binom(pos, j)
        pos -= 1
    return "".join(out)


def log2_multinomial(counts: Sequence[int]) -> float:
    m = multinomial(counts)
    return math.log2(m) if m > 1 else 0.0
