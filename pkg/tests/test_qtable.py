from __future__ import annotations

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reference import brute_ceil, ref_table

from qindex.errors import CapacityError, OutOfRangeError
from qindex.qtable import (
    QuantTable,
    build_table,
    dump_table,
    excess_profile,
    get_table,
    load_table,
    log_factorial_table,
    lookup,
    min_precision,
    reconstruct_shift,
)
from qindex.swi import SWInt


def test_small_lattice_values():
    assert get_table(8, 8).value(5, 3) == 56
    assert lookup(get_table(8, 8), 5, 3).value == 56
    t4 = get_table(8, 4)
    assert t4.value(4, 3) == 36
    assert t4.value(5, 3) == 60


def test_lookup_edges():
    t = get_table(8, 8)
    assert lookup(t, -1, 5) == SWInt(0, 0, 8)
    assert lookup(t, 0, 0).value == 1
    with pytest.raises(OutOfRangeError):
        lookup(t, 5, 4)


@pytest.mark.parametrize("g", [4, 5, 6, 8, 12])
def test_matches_reference_recurrence(g):
    ref = ref_table(60, g)
    t = get_table(60, g)
    for (x, y), v in ref.items():
        assert t.value(x, y) == v


def test_axes_are_one():
    for g in (4, 32):
        t = get_table(300, g)
        for i in range(301):
            assert t.value(i, 0) == 1 == t.value(0, i)


def test_symmetry():
    t = get_table(200, 6)
    for x in range(100):
        for y in range(100):
            assert t.value(x, y) == t.value(y, x)


def test_exact_regime():
    # C(24, 12) = 2704156 needs 22 bits
    t = get_table(24, 22)
    for n in range(25):
        for k in range(n + 1):
            assert t.value(n - k, k) == math.comb(n, k)


def test_table_is_read_only():
    t = get_table(16, 8)
    with pytest.raises(ValueError):
        t.w[3] = 7


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_table(100_000, 32, memory_budget=1 << 20)


def test_excess_profile():
    rep = excess_profile(get_table(256, 8), 256)
    # pinned by the integer reference table below
    assert rep.max_excess_bits == pytest.approx(0.8312, abs=1e-4)
    assert rep.avg_excess_bits == pytest.approx(0.6983, abs=1e-4)
    assert 0 <= rep.max_excess_bits <= rep.theoretical_bound_bits
    ref = ref_table(256, 8)
    worst = max(math.log2(ref[256 - k, k] / math.comb(256, k)) for k in range(257))
    assert rep.max_excess_bits == pytest.approx(worst, abs=1e-9)
    exact = excess_profile(get_table(30, 32), 30)
    assert exact.max_excess_bits == 0.0


def test_excess_g13_4096():
    rep = excess_profile(get_table(4096, 13), 4096)
    assert rep.max_excess_bits <= 0.7


def test_min_precision():
    assert min_precision(4096, 1) == 14
    assert min_precision(1 << 12, 1 << 12) == 4
    assert min_precision(1 << 20, 0.1) == 25


def test_reconstruct_shift_examples():
    t = get_table(64, 16)
    lf = t.logfact
    assert reconstruct_shift(8, 3, lf, get_table(8, 8)) == 0
    assert reconstruct_shift(64, 32, lf, t) == t.value(32, 32).bit_length() - 16
    assert reconstruct_shift(1, 0, lf, t) == 0


@pytest.mark.parametrize("n_max,g", [(300, 4), (300, 8), (2000, 13), (1000, 32)])
def test_reconstruct_shift_everywhere(n_max, g):
    t = get_table(n_max, g)
    lf = t.logfact
    for n in range(0, n_max + 1, 7):
        for k in range(n + 1):
            assert reconstruct_shift(n, k, lf, t) == t.lookup(n - k, k).s


def test_logfact_fixed_point():
    lf = log_factorial_table(50)
    for i in (0, 1, 10, 50):
        assert abs(lf[i] / 2**32 - math.log2(math.factorial(i))) < 1e-6


def test_dump_load(tmp_path):
    t = get_table(40, 7)
    p = tmp_path / "t.qit"
    dump_table(t, p)
    raw = p.read_bytes()
    assert raw[:4] == b"QIT1" and raw[4] == 7 and int.from_bytes(raw[5:9], "little") == 40
    assert len(raw) == 9 + 6 * (41 * 42 // 2)
    u = load_table(p)
    assert isinstance(u, QuantTable)
    assert (u.w == t.w).all() and (u.s == t.s).all() and (u.g, u.n_max) == (7, 40)


def test_majorizes_binomials_4096(t4096):
    rng = random.Random(5)
    for _ in range(1000):
        n = rng.randint(0, 4096)
        k = rng.randint(0, n)
        assert t4096.value(n - k, k) >= math.comb(n, k)


@given(st.integers(4, 32), st.integers(1, 120))
def test_per_symbol_bound(g, n):
    rep = excess_profile(get_table(120, g), n)
    assert rep.max_excess_bits / n < math.log2(math.e) / 2 ** (g - 1)


def test_front_slices_match_lookup():
    t = get_table(50, 6)
    w, s = t.front(50)
    vals = [int(a) << int(b) for a, b in zip(w.tolist(), s.tolist())]
    assert vals == [t.value(50 - k, k) for k in range(51)]
    assert brute_ceil(t.value(24, 25) + t.value(25, 24), 6) == t.value(25, 25)
