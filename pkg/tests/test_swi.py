from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reference import brute_ceil

from qindex.swi import SWInt, sw_ceil, sw_mul_ceil, sw_sum_ceil, sw_value


def test_value_examples():
    assert sw_value(SWInt(12, 2, 4)) == 48
    assert sw_value(SWInt(1, 0, 32)) == 1
    assert sw_value(SWInt(0, 0, 8)) == 0


def test_normalization_enforced():
    with pytest.raises(ValueError):
        SWInt(5, 1, 4)
    with pytest.raises(ValueError):
        SWInt(16, 0, 4)


def test_ceil_examples():
    assert sw_ceil(13, 4) == SWInt(13, 0, 4)
    assert sw_ceil(45, 4) == SWInt(12, 2, 4)
    assert sw_ceil(0, 8) == SWInt(0, 0, 8)


def test_ceil_matches_scan_small():
    for g in (4, 5, 8):
        for x in range(0, 5000):
            assert sw_ceil(x, g).value == brute_ceil(x, g)


def test_sum_examples():
    q = sw_sum_ceil([SWInt(12, 2, 4), SWInt(13, 0, 4)], 4)
    assert q == SWInt(8, 3, 4) and q.value == 64
    assert sw_sum_ceil([SWInt(1, 0, 4), SWInt(1, 0, 4)], 4) == SWInt(2, 0, 4)
    assert sw_sum_ceil([sw_ceil(35, 8), sw_ceil(21, 8)], 8).value == 56


def test_mul_examples():
    assert sw_mul_ceil(3, SWInt(10, 0, 4), 4) == SWInt(15, 1, 4)
    q = sw_ceil(123456789, 9)
    assert sw_mul_ceil(1, q) is q
    assert sw_mul_ceil(5, SWInt(6, 0, 5), 5).value == 30


g_st = st.integers(4, 32)


@given(st.integers(0, 1 << 64), g_st)
def test_ceil_minimal(x, g):
    q = sw_ceil(x, g)
    assert q.value >= x
    if x.bit_length() <= g:
        assert q.value == x
    # the next representable value below q is already < x
    if q.w > 0:
        if q.s > 0 and q.w == 1 << (g - 1):
            below = ((1 << g) - 1) << (q.s - 1)
        else:
            below = (q.w - 1) << q.s
        assert below < x


@given(st.integers(1, 1 << 64), g_st)
def test_expansion_bound(x, g):
    # value/x < 1 + 2^-(g-1), in integers
    assert sw_ceil(x, g).value * (1 << (g - 1)) < x * ((1 << (g - 1)) + 1)


@given(st.integers(0, 1 << 64), st.integers(0, 1 << 64), g_st)
def test_monotone(x, y, g):
    x, y = min(x, y), max(x, y)
    assert sw_ceil(x, g).value <= sw_ceil(y, g).value


@given(st.lists(st.integers(0, 1 << 80), max_size=12), g_st)
def test_delayed_rounding(xs, g):
    terms = [sw_ceil(x, g) for x in xs]
    assert sw_sum_ceil(terms, g) == sw_ceil(sum(q.value for q in terms), g)


@given(st.integers(1, 1 << 20), st.integers(0, 1 << 60), g_st)
def test_mul_is_exact_then_rounded(r, x, g):
    q = sw_ceil(x, g)
    assert sw_mul_ceil(r, q, g) == sw_ceil(r * q.value, g)
