"""Quantized binomial addend tables.

``L(x, y)`` replaces the binomial ``C(x+y, y)``: axis entries are 1 and every
interior entry is the SW ceiling of the exact sum of its two predecessors,
computed front by front (a front being the anti-diagonal ``x + y = n``).
Entries are stored front-major as parallel mantissa and shift arrays.
"""

from __future__ import annotations

import functools
import math
import struct
import threading
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .errors import CapacityError, CorruptStreamError, OutOfRangeError
from .swi import SWInt, check_precision

#: default ceiling on table storage (mantissas + shifts), in bytes
MEMORY_BUDGET = 1 << 30

#: fractional bits of the fixed-point log2(i!) array used for shift reconstruction
LOGFACT_FRAC_BITS = 32

_ENTRY_BYTES = 6
_TABLE_MAGIC = b"QIT1"
_FILE_DTYPE = np.dtype([("w", "<u4"), ("s", "<u2")])


def front_offset(n: int) -> int:
    """Flat index of L(n, 0), the first entry of front n."""
    return n * (n + 1) // 2


@dataclass(frozen=True, eq=False)
class QuantTable:
    g: int
    n_max: int
    w: np.ndarray
    s: np.ndarray

    def __post_init__(self) -> None:
        self.w.flags.writeable = False
        self.s.flags.writeable = False

    @functools.cached_property
    def views(self) -> tuple[memoryview, memoryview]:
        """Mantissa and shift arrays as memoryviews; indexing yields plain ints."""
        return memoryview(self.w), memoryview(self.s)

    @functools.cached_property
    def logfact(self) -> np.ndarray:
        return log_factorial_table(self.n_max)

    @functools.cached_property
    def shift_exceptions(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted flat indices whose shift the log-factorial estimate gets wrong, and their shifts."""
        return _find_shift_exceptions(self.s, self.g, self.n_max, self.logfact)

    def _flat(self, x: int, y: int) -> int:
        n = x + y
        if n > self.n_max:
            raise OutOfRangeError(f"point ({x}, {y}) beyond front {self.n_max}")
        return front_offset(n) + y

    def lookup(self, x: int, y: int) -> SWInt:
        if x < 0 or y < 0:
            return SWInt(0, 0, self.g)
        i = self._flat(x, y)
        return SWInt(int(self.w[i]), int(self.s[i]), self.g)

    def value(self, x: int, y: int) -> int:
        if x < 0 or y < 0:
            return 0
        i = self._flat(x, y)
        w, s = self.views
        return w[i] << s[i]

    def front(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Mantissas and shifts of front n, indexed by y."""
        if not 0 <= n <= self.n_max:
            raise OutOfRangeError(f"front {n} outside [0, {self.n_max}]")
        lo = front_offset(n)
        return self.w[lo:lo + n + 1], self.s[lo:lo + n + 1]

    @property
    def nbytes(self) -> int:
        return self.w.nbytes + self.s.nbytes


def lookup(t: QuantTable, x: int, y: int) -> SWInt:
    return t.lookup(x, y)


def _bit_length_u64(v: np.ndarray) -> np.ndarray:
    # float64 rounding can only push the estimate up by one, never down
    _, e = np.frexp(v.astype(np.float64))
    e = e.astype(np.int64)
    e[v == 0] = 0
    over = (e > 0) & ((v >> np.maximum(e - 1, 0).astype(np.uint64)) == 0)
    e[over] -= 1
    return e


def _sum_ceil_front(wa, sa, wb, sb, g: int):
    """Vectorized SW ceiling of (wa << sa) + (wb << sb), elementwise."""
    hi_is_a = sa >= sb
    w_hi = np.where(hi_is_a, wa, wb).astype(np.uint64)
    w_lo = np.where(hi_is_a, wb, wa).astype(np.uint64)
    s_hi = np.maximum(sa, sb).astype(np.int64)
    s_lo = np.minimum(sa, sb).astype(np.int64)
    d = s_hi - s_lo

    top = np.uint64(1) << np.uint64(g)
    near = d < 32
    # aligned exact sum, below 2**63 + 2**32 since w < 2**32 and d <= 31
    acc = (w_hi << np.where(near, d, 0).astype(np.uint64)) + w_lo
    bl = _bit_length_u64(acc)
    drop = np.maximum(bl - g, 0)
    wn = acc >> drop.astype(np.uint64)
    rem = acc & ((np.uint64(1) << drop.astype(np.uint64)) - np.uint64(1))
    wn = wn + (rem != 0).astype(np.uint64)
    sn = s_lo + drop

    # far apart: the smaller term is below one unit of the larger's mantissa
    wf = w_hi + (w_lo != 0).astype(np.uint64)
    w_out = np.where(near, wn, wf)
    s_out = np.where(near, sn, s_hi)

    ovf = w_out >= top
    w_out = np.where(ovf, w_out >> np.uint64(1), w_out)
    s_out = np.where(ovf, s_out + 1, s_out)
    return w_out, s_out


def log_factorial_table(n_max: int) -> np.ndarray:
    """Fixed-point log2(i!) for i = 0..n_max, LOGFACT_FRAC_BITS fractional bits."""
    scale = 2.0 ** LOGFACT_FRAC_BITS
    ln2 = math.log(2.0)
    return np.array(
        [round(math.lgamma(i + 1) / ln2 * scale) for i in range(n_max + 1)],
        dtype=np.int64,
    )


def _shift_candidates(n: int, logfact: np.ndarray, g: int) -> np.ndarray:
    k = np.arange(n + 1)
    est = logfact[n] - logfact[k] - logfact[n - k]
    return np.maximum((est >> LOGFACT_FRAC_BITS) - g + 1, 0)


def _find_shift_exceptions(s, g: int, n_max: int, logfact: np.ndarray):
    where, shifts = [], []
    for n in range(n_max + 1):
        lo = front_offset(n)
        stored = s[lo:lo + n + 1].astype(np.int64)
        bad = np.flatnonzero(_shift_candidates(n, logfact, g) != stored)
        where.append(bad + lo)
        shifts.append(stored[bad])
    return np.concatenate(where), np.concatenate(shifts)


def build_table(n_max: int, g: int = 32, memory_budget: int = MEMORY_BUDGET) -> QuantTable:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    check_precision(g)
    size = front_offset(n_max + 1)
    if size * _ENTRY_BYTES > memory_budget:
        raise CapacityError(
            f"table with n_max={n_max} needs {size * _ENTRY_BYTES} bytes, budget {memory_budget}"
        )
    if n_max + g > 0xFFFF:
        raise CapacityError("shifts would overflow 16 bits")

    w = np.empty(size, dtype=np.uint32)
    s = np.empty(size, dtype=np.uint16)
    w[0], s[0] = 1, 0
    pw = np.ones(1, dtype=np.uint64)
    ps = np.zeros(1, dtype=np.int64)
    for n in range(1, n_max + 1):
        lo = front_offset(n)
        # interior y = 1..n-1: L(n-y, y) = L(n-1-y, y) + L(n-y, y-1)
        iw, is_ = _sum_ceil_front(pw[1:], ps[1:], pw[:-1], ps[:-1], g)
        fw = np.empty(n + 1, dtype=np.uint64)
        fs = np.empty(n + 1, dtype=np.int64)
        fw[0] = fw[n] = 1
        fs[0] = fs[n] = 0
        fw[1:n] = iw
        fs[1:n] = is_
        w[lo:lo + n + 1] = fw
        s[lo:lo + n + 1] = fs
        pw, ps = fw, fs

    return QuantTable(g, n_max, w, s)


_CACHE_SIZE = 8
_cache: OrderedDict[tuple[int, int], QuantTable] = OrderedDict()
_cache_lock = threading.Lock()


def get_table(n_max: int, g: int = 32) -> QuantTable:
    """Process-wide LRU cache of built tables; tables are immutable once built."""
    key = (n_max, g)
    with _cache_lock:
        t = _cache.get(key)
        if t is not None:
            _cache.move_to_end(key)
            return t
    t = build_table(n_max, g)
    with _cache_lock:
        _cache[key] = t
        while len(_cache) > _CACHE_SIZE:
            _cache.popitem(last=False)
    return t


def table_covering(n: int, g: int = 32) -> QuantTable:
    """Smallest cached table of precision g reaching front n, else a fresh one.

    Entries depend only on (x, y, g), so any table with n_max >= n codes
    blocks of up to n symbols identically.
    """
    with _cache_lock:
        fits = [t for (m, gg), t in _cache.items() if gg == g and m >= n]
    if fits:
        return min(fits, key=lambda t: t.n_max)
    return get_table(n, g)


def reconstruct_shift(n: int, k: int, logfact: np.ndarray, t: QuantTable) -> int:
    """Shift of L(n-k, k) recomputed from log-factorials instead of read from storage.

    The fixed-point estimate of log2 C(n, k) gives the shift directly except
    near power-of-two boundaries (or where quantization pushed L past one);
    those entries are recorded once per table and consulted first.  The
    exceptions are computed against ``t.logfact``; pass that array.
    """
    if not 0 <= k <= n <= t.n_max:
        raise OutOfRangeError(f"(n={n}, k={k}) outside table")
    where, shifts = t.shift_exceptions
    flat = front_offset(n) + k
    i = int(np.searchsorted(where, flat))
    if i < where.size and where[i] == flat:
        return int(shifts[i])
    est = int(logfact[n]) - int(logfact[k]) - int(logfact[n - k])
    return max((est >> LOGFACT_FRAC_BITS) - t.g + 1, 0)


@dataclass(frozen=True)
class RedundancyReport:
    g: int
    n: int
    max_excess_bits: float
    avg_excess_bits: float
    theoretical_bound_bits: float


def excess_bits(quantized: int, exact: int) -> float:
    """log2(quantized / exact) without losing the tiny ratio to float cancellation."""
    if quantized == exact:
        return 0.0
    return math.log1p((quantized - exact) / exact) / math.log(2.0)


def excess_profile(t: QuantTable, n: int) -> RedundancyReport:
    ws, ss = t.front(n)
    exact = oracle.binom_row(n)
    excess = [
        excess_bits(int(w) << int(s), c)
        for w, s, c in zip(ws.tolist(), ss.tolist(), exact)
    ]
    bound = n * math.log2(math.e) / 2 ** (t.g - 1)
    return RedundancyReport(t.g, n, max(excess), sum(excess) / len(excess), bound)


def min_precision(n: int, c: float) -> int:
    """Smallest g keeping the total quantization excess over n symbols below c bits."""
    if n < 1 or c <= 0:
        raise ValueError("need n >= 1 and c > 0")
    g = math.ceil(1 + math.log2(math.log2(math.e)) + math.log2(n / c))
    return min(max(g, 4), 32)


def dump_table(t: QuantTable, path) -> None:
    rec = np.empty(t.w.size, dtype=_FILE_DTYPE)
    rec["w"] = t.w
    rec["s"] = t.s
    with open(path, "wb") as fh:
        fh.write(_TABLE_MAGIC + struct.pack("<BI", t.g, t.n_max))
        fh.write(rec.tobytes())


def load_table(path) -> QuantTable:
    data = Path(path).read_bytes()
    if data[:4] != _TABLE_MAGIC:
        raise CorruptStreamError("not a QIT1 table file")
    if len(data) < 9:
        raise CorruptStreamError("truncated table header")
    g, n_max = struct.unpack_from("<BI", data, 4)
    check_precision(g)
    size = front_offset(n_max + 1)
    if len(data) != 9 + size * _ENTRY_BYTES:
        raise CorruptStreamError("table file length does not match its header")
    rec = np.frombuffer(data, dtype=_FILE_DTYPE, offset=9)
    w = rec["w"].astype(np.uint32)
    s = rec["s"].astype(np.uint16)
    return QuantTable(g, n_max, w, s)
