"""Unit tests for directed-rounding interval enclosures over the rationals."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from adicweights import Bounds, DomainError, Enclosure, EnclosureContext

fractions_pos = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6)
fractions_any = st.fractions(min_value=-(10**6), max_value=10**6)


class TestFromFraction:
    @given(fractions_any)
    def test_containment(self, value):
        enc = EnclosureContext(64).from_fraction(value)
        assert enc.lower <= value <= enc.upper
        assert isinstance(enc.lower, Fraction)
        assert isinstance(enc.upper, Fraction)

    def test_dyadic_is_exact(self):
        enc = EnclosureContext(64).from_fraction(Fraction(5, 16))
        assert enc.lower == enc.upper == Fraction(5, 16)
        assert enc.width == 0

    def test_non_dyadic_is_tight(self):
        enc = EnclosureContext(64).from_fraction(Fraction(1, 3))
        assert enc.lower < Fraction(1, 3) < enc.upper
        assert enc.width <= Fraction(1, 2**62)

    def test_from_int_is_exact(self):
        enc = EnclosureContext(16).from_int(3)
        assert enc.lower == enc.upper == 3

    @given(fractions_any)
    def test_more_bits_never_widen(self, value):
        coarse = EnclosureContext(32).from_fraction(value)
        fine = EnclosureContext(128).from_fraction(value)
        assert coarse.lower <= fine.lower
        assert fine.upper <= coarse.upper


class TestArithmeticContainment:
    @given(fractions_any, fractions_any)
    def test_add_sub_mul(self, x, y):
        ctx = EnclosureContext(64)
        ex, ey = ctx.from_fraction(x), ctx.from_fraction(y)
        for op, true in [
            (ex + ey, x + y),
            (ex - ey, x - y),
            (ex * ey, x * y),
        ]:
            assert op.lower <= true <= op.upper

    @given(fractions_any, fractions_pos)
    def test_div(self, x, y):
        ctx = EnclosureContext(64)
        quotient = ctx.from_fraction(x) / ctx.from_fraction(y)
        assert quotient.lower <= x / y <= quotient.upper

    @given(fractions_pos, st.integers(min_value=0, max_value=8))
    def test_integer_power(self, x, n):
        ctx = EnclosureContext(96)
        power = ctx.from_fraction(x) ** n
        assert power.lower <= x**n <= power.upper

    @given(fractions_pos)
    def test_log_exp_round_trip_contains(self, x):
        ctx = EnclosureContext(96)
        enc = ctx.from_fraction(x)
        back = enc.log().exp()
        assert back.lower <= x <= back.upper

    def test_log_brackets_known_value(self):
        # ln 2 = 0.693147180559945...
        enc = EnclosureContext(128).from_fraction(Fraction(2)).log()
        assert enc.lower < Fraction(693147180559946, 10**15)
        assert enc.upper > Fraction(693147180559945, 10**15)
        assert enc.upper - enc.lower < Fraction(1, 2**120)

    def test_log_requires_positive(self):
        with pytest.raises((DomainError, ValueError)):
            EnclosureContext(64).from_fraction(Fraction(-1)).log()


class TestDecisions:
    @given(fractions_any, fractions_any)
    def test_decide_lt_on_distinct_rationals(self, x, y):
        assume(x != y)
        ctx = EnclosureContext(256)
        verdict = ctx.from_fraction(x).decide_lt(ctx.from_fraction(y))
        if verdict is not None:
            assert verdict == (x < y)

    def test_decide_lt_undecided_on_overlap(self):
        from adicweights import PrecisionError

        ctx = EnclosureContext(64)
        enc = ctx.from_fraction(Fraction(1, 3))
        assert enc.decide_lt(enc) is None
        with pytest.raises(PrecisionError):
            enc.certified_lt(enc)
        with pytest.raises(PrecisionError):
            enc.certified_gt(enc)

    def test_certified_comparisons(self):
        ctx = EnclosureContext(64)
        small = ctx.from_fraction(Fraction(1, 3))
        large = ctx.from_fraction(Fraction(2, 5))
        assert small.certified_lt(large)
        assert not small.certified_gt(large)
        assert large.certified_gt(small)
        assert small.decide_lt(large) is True
        assert large.decide_lt(small) is False


class TestBounds:
    def test_exact(self):
        b = Bounds.exact(Fraction(2, 7))
        assert b.lo == b.hi == Fraction(2, 7)
        assert b.bits is None

    def test_of_enclosure(self):
        enc = EnclosureContext(64).from_fraction(Fraction(1, 3))
        b = Bounds.of_enclosure(enc)
        assert b.lo == enc.lower
        assert b.hi == enc.upper
        assert b.bits == 64
        assert b.lo <= Fraction(1, 3) <= b.hi

    def test_rejects_inverted(self):
        with pytest.raises(DomainError):
            Bounds(Fraction(1, 2), Fraction(1, 3))
