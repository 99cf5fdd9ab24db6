"""Command line front end: ``qindex {encode,decode,tables,bench,selftest}``."""

from __future__ import annotations

import argparse
import itertools
import sys
import time

import numpy as np

from . import oracle
from .bench import DEFAULT_SIZES, ROW_LABELS, run_bench
from .codec import decode_block, encode_block
from .container import DEFAULT_BLOCK_SIZE, compress, decompress
from .errors import QIError
from .qtable import build_table, dump_table, excess_profile, load_table
from .radix import build_perm_table, build_radix_table, perm_rank, perm_unrank, radix_decode, radix_encode


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def _write_output(path: str | None, data: bytes | str) -> None:
    if isinstance(data, str):
        data = data.encode()
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    with open(path, "wb") as f:
        f.write(data)


def cmd_encode(args) -> int:
    data = _read_input(args.input)
    _write_output(args.output, compress(data, args.block_size, args.precision, args.alphabet))
    return 0


def cmd_decode(args) -> int:
    _write_output(args.output, decompress(_read_input(args.input)))
    return 0


def cmd_tables(args) -> int:
    t0 = time.perf_counter()
    if args.load:
        t = load_table(args.load)
    else:
        n_max = args.n if args.n is not None else args.block_size
        t = build_table(n_max, args.g if args.g is not None else args.precision)
    built = time.perf_counter() - t0
    if args.dump:
        dump_table(t, args.dump)
    n = t.n_max if args.n is None else min(args.n, t.n_max)
    rep = excess_profile(t, n)
    lines = [
        f"table        g={t.g} n_max={t.n_max} entries={t.w.size} bytes={t.nbytes}",
        f"build/load   {built:.3f} s",
        f"shift exceptions  {len(t.shift_exceptions[0])}",
        f"front n={n}: max excess {rep.max_excess_bits:.4f} bits, "
        f"avg {rep.avg_excess_bits:.4f} bits, bound n*log2(e)/2^(g-1) = {rep.theoretical_bound_bits:.4g} bits",
    ]
    _write_output(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_bench(args) -> int:
    sizes = tuple(args.sizes) if args.sizes else DEFAULT_SIZES
    report = run_bench(sizes, ROW_LABELS, args.trials, args.seed, args.block_size, args.precision)
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            f.write(report.to_csv(with_times=args.times))
    _write_output(args.output, report.to_text() + "\n")
    return 0


def _check_exact_ranks(n: int) -> None:
    for bits in itertools.product((0, 1), repeat=n):
        k = sum(bits)
        r = oracle.rank_exact(bits)
        if not 0 <= r < oracle.binom(n, k) or oracle.unrank_exact(r, n, k) != "".join(map(str, bits)):
            raise AssertionError(f"oracle rank/unrank mismatch at {bits}")


def _check_quantized(n: int, g: int) -> None:
    t = build_table(n, g)
    seen: dict[int, set[int]] = {}
    for bits in itertools.product((0, 1), repeat=n):
        code = encode_block(bits, t)
        if code.index >= t.value(n - code.k, code.k) or code.index in seen.setdefault(code.k, set()):
            raise AssertionError(f"g={g}: index collision or overflow at {bits}")
        seen[code.k].add(code.index)
        if tuple(decode_block(code, t).tolist()) != bits:
            raise AssertionError(f"g={g}: round trip failed at {bits}")


def _check_radix() -> None:
    radices = (3, 5, 7, 4)
    for g in (4, 6, 8):
        rt = build_radix_table(radices, g)
        for digits in itertools.product(*(range(r) for r in radices)):
            if radix_decode(radix_encode(digits, rt), rt) != list(digits):
                raise AssertionError(f"radix round trip failed at g={g}")
    pt = build_perm_table(6)
    for perm in itertools.permutations(range(6)):
        if perm_unrank(perm_rank(perm, pt), 6, pt) != list(perm):
            raise AssertionError("permutation round trip failed")


def _check_container(seed: int) -> None:
    rng = np.random.default_rng(seed)
    for size in (0, 1, 17, 1000, 20000):
        data = rng.integers(0, 256, size, dtype=np.uint8).tobytes()
        for alphabet in ("bin", "byte"):
            if decompress(compress(data, 512, 16, alphabet)) != data:
                raise AssertionError(f"container round trip failed ({alphabet}, {size} bytes)")


def cmd_selftest(args) -> int:
    checks = [
        ("oracle rank/unrank, n=10", lambda: _check_exact_ranks(10)),
        ("quantized injectivity g=4, n=10", lambda: _check_quantized(10, 4)),
        ("quantized injectivity g=8, n=10", lambda: _check_quantized(10, 8)),
        ("mixed radix and permutations", _check_radix),
        ("container round trip", lambda: _check_container(args.seed)),
    ]
    failed = 0
    for name, fn in checks:
        try:
            fn()
        except AssertionError as e:
            failed += 1
            print(f"FAIL  {name}: {e}")
        else:
            print(f"ok    {name}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    common.add_argument("--precision", "-g", type=int, default=32, help="mantissa bits g")
    common.add_argument("--alphabet", choices=("bin", "byte"), default="bin")
    common.add_argument("--in", dest="input", help="input file (default stdin)")
    common.add_argument("--out", dest="output", help="output file (default stdout)")
    common.add_argument("--trials", type=int, default=5)
    common.add_argument("--seed", type=int, default=1)

    p = argparse.ArgumentParser(prog="qindex", description="Quantized indexing coder")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("encode", parents=[common], help="compress to a QIX1 stream").set_defaults(func=cmd_encode)
    sub.add_parser("decode", parents=[common], help="expand a QIX1 stream").set_defaults(func=cmd_decode)

    t = sub.add_parser("tables", parents=[common], help="build or inspect an addend table")
    t.add_argument("--n", type=int, help="front size (default: block size)")
    t.add_argument("--g", type=int, help="precision override")
    t.add_argument("--dump", help="write the table to this file")
    t.add_argument("--load", help="read a dumped table instead of building")
    t.set_defaults(func=cmd_tables)

    b = sub.add_parser("bench", parents=[common], help="compare against the arithmetic coder")
    b.add_argument("--sizes", type=int, nargs="+", help="input sizes in bits")
    b.add_argument("--csv", help="also write the report as CSV")
    b.add_argument("--times", action="store_true", help="include time columns in the CSV")
    b.set_defaults(func=cmd_bench)

    sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks").set_defaults(
        func=cmd_selftest
    )
    return p


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QIError as e:
        print(f"qindex: {e.name}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"qindex: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
