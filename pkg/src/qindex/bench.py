"""QI vs. baseline arithmetic coder over a grid of sizes and ones counts.

Rows follow the layout of the classic comparison table: fixed ones counts
(8, 16, 32), fixed densities (N/64 .. N/2) and a "Vary" row of consecutive
int32 values.  Both coders see identical inputs cut into identical blocks
and both get the block's ones count.  Payload sizes exclude the per-block
count fields, which are the same for both.  Only the coding loops are timed.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .ac import ac_decode, ac_encode
from .codec import decode_block, encode_block
from .container import DEFAULT_BLOCK_SIZE, encode, layout, prepare_bits, read_stream, write_stream
from .qtable import get_table

K = 1024
DEFAULT_SIZES = (4 * K, 8 * K, 32 * K, 128 * K)
ROW_LABELS = ("8", "16", "32", "N/64", "N/32", "N/16", "N/8", "N/4", "N/2", "Vary")

VARY_NOTE = (
    "Vary: consecutive little-endian int32 values ..,-2,-1,0,+1,+2,.. centred on a "
    "random start; the exact construction of this row is a guess."
)


@dataclass
class BenchRow:
    n: int
    label: str
    trials: int
    ones: float
    qi_bits: int
    ac_bits: int
    qi_time: float
    ac_time: float

    @property
    def size_delta_pct(self) -> float:
        return (self.ac_bits / self.qi_bits - 1) * 100 if self.qi_bits else 0.0

    @property
    def speed_ratio(self) -> float:
        return self.ac_time / self.qi_time if self.qi_time else float("inf")


@dataclass
class BenchReport:
    block_size: int
    g: int
    seed: int
    rows: list[BenchRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    SIZE_COLUMNS = ("N", "ones", "trials", "avg_ones", "qi_bits", "ac_bits", "size_delta_pct")
    TIME_COLUMNS = ("qi_seconds", "ac_seconds", "speed_ratio")

    def to_csv(self, with_times: bool = False) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.SIZE_COLUMNS + (self.TIME_COLUMNS if with_times else ()))
        for r in self.rows:
            cells = [r.n, r.label, r.trials, f"{r.ones:.2f}", r.qi_bits, r.ac_bits, f"{r.size_delta_pct:.4f}"]
            if with_times:
                cells += [f"{r.qi_time:.6f}", f"{r.ac_time:.6f}", f"{r.speed_ratio:.2f}"]
            wr.writerow(cells)
        return buf.getvalue()

    def to_text(self) -> str:
        sizes = sorted({r.n for r in self.rows})
        by_key = {(r.label, r.n): r for r in self.rows}
        labels = [lb for lb in ROW_LABELS if any((lb, n) in by_key for n in sizes)]
        head = f"{'#1s':>6}" + "".join(f"{'N: ' + _size_name(n):>12}{'Speed':>9}" for n in sizes)
        lines = [head]
        for lb in labels:
            cells = [f"{lb:>6}"]
            for n in sizes:
                r = by_key.get((lb, n))
                cells.append(f"{r.size_delta_pct:>12.3f}{r.speed_ratio:>9.1f}" if r else " " * 21)
            lines.append("".join(cells))
        lines.append("")
        lines.append(
            f"N: output size % (AC/QI - 1)*100; Speed: coding time ratio AC/QI; "
            f"block {self.block_size} bits, g={self.g}, seed {self.seed}"
        )
        lines += self.notes
        return "\n".join(lines)


def _size_name(n: int) -> str:
    return f"{n // K}K" if n % K == 0 else str(n)


def ones_for(label: str, n: int) -> int | None:
    if label == "Vary":
        return None
    if label.startswith("N/"):
        return n // int(label[2:])
    return int(label)


def make_input(n: int, label: str, rng: np.random.Generator) -> np.ndarray:
    k = ones_for(label, n)
    if k is None:
        count = n // 32
        start = int(rng.integers(-(1 << 20), 1 << 20)) - count // 2
        vals = np.arange(start, start + count, dtype="<i4")
        return np.unpackbits(vals.view(np.uint8))
    bits = np.zeros(n, dtype=np.uint8)
    bits[rng.choice(n, size=k, replace=False)] = 1
    return bits


def _blocks(bits: np.ndarray, block_size: int) -> list[np.ndarray]:
    return [bits[i:i + block_size] for i in range(0, bits.size, block_size)]


def run_bench(sizes=DEFAULT_SIZES, densities=ROW_LABELS, trials: int = 5, seed: int = 1,
              block_size: int = DEFAULT_BLOCK_SIZE, g: int = 32) -> BenchReport:
    t = get_table(block_size, g)
    report = BenchReport(block_size, g, seed)
    for n in sizes:
        for row_id, label in enumerate(ROW_LABELS):
            if label not in densities:
                continue
            qi_bits = ac_bits = 0
            qi_time = ac_time = 0.0
            ones = 0
            for trial in range(trials):
                rng = np.random.default_rng([seed, n, row_id, trial])
                bits = make_input(n, label, rng)
                ones += int(np.count_nonzero(bits))

                stream = encode(bits, block_size, g)
                _, back = read_stream(write_stream(stream))
                if not np.array_equal(back, bits):
                    raise AssertionError(f"QI round trip failed at N={n}, {label}, trial {trial}")
                qi_bits += layout(stream).payload_bits

                prepared, _ = prepare_bits(bits)
                blocks = _blocks(prepared, block_size)
                counts = [int(np.count_nonzero(b)) for b in blocks]
                ac_out = [ac_encode(b, k) for b, k in zip(blocks, counts)]
                for b, k, (payload, nb) in zip(blocks, counts, ac_out):
                    if not np.array_equal(ac_decode(payload, nb, b.size, k), b):
                        raise AssertionError(f"AC round trip failed at N={n}, {label}, trial {trial}")
                ac_bits += sum(nb for _, nb in ac_out)

                t0 = time.perf_counter()
                codes = [encode_block(b, t) for b in blocks]
                for c in codes:
                    decode_block(c, t)
                qi_time += time.perf_counter() - t0

                t0 = time.perf_counter()
                for b, k in zip(blocks, counts):
                    payload, nb = ac_encode(b, k)
                    ac_decode(payload, nb, b.size, k)
                ac_time += time.perf_counter() - t0
            report.rows.append(BenchRow(n, label, trials, ones / trials, qi_bits, ac_bits, qi_time, ac_time))
    if "Vary" in densities:
        report.notes.append(VARY_NOTE)
    return report
