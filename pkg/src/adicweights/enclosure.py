"""Certified real-number enclosures with directed rounding.

Comparisons of quantities like b**r / q for irrational r cannot be done in
exact rational arithmetic.  This module wraps ``mpmath``'s interval type:
every value is carried as a binary interval [lo, hi] whose endpoints are
rounded outward, so any comparison that the enclosure decides is certified.
A comparison whose truth the enclosure cannot decide raises
``PrecisionError`` (callers may retry at higher precision or report the
undecided state); nothing is ever silently rounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mpf
from mpmath.libmp import from_rational, round_ceiling, round_floor

from .errors import DomainError, PrecisionError

__all__ = ["Bounds", "Enclosure", "EnclosureContext"]

DEFAULT_PRECISION_BITS = 256


@dataclass(frozen=True)
class Bounds:
    """A plain-data certified range [lo, hi] with exact rational endpoints.

    Reports store these instead of live ``Enclosure`` objects so they can
    be serialized and compared for equality; ``bits`` records the working
    precision that produced the range (None for exact values, where
    lo == hi).
    """

    lo: Fraction
    hi: Fraction
    bits: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"inverted bounds [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Fraction) -> "Bounds":
        value = Fraction(value)
        return cls(value, value, None)

    @classmethod
    def of_enclosure(cls, enc: "Enclosure") -> "Bounds":
        return cls(enc.lower, enc.upper, enc.ctx.precision_bits)


class EnclosureContext:
    """A working precision (binary digits) for enclosure arithmetic."""

    def __init__(self, precision_bits: int = DEFAULT_PRECISION_BITS):
        if precision_bits < 8:
            raise DomainError(f"precision must be at least 8 bits, got {precision_bits}")
        self.precision_bits = precision_bits

    def from_fraction(self, value: Fraction) -> "Enclosure":
        """Tightest representable interval around an exact rational."""
        value = Fraction(value)
        old = iv.prec
        try:
            iv.prec = self.precision_bits
            lo = mpf(0)
            lo._mpf_ = from_rational(
                value.numerator, value.denominator, iv.prec, round_floor
            )
            hi = mpf(0)
            hi._mpf_ = from_rational(
                value.numerator, value.denominator, iv.prec, round_ceiling
            )
            return Enclosure(self, iv.mpf([lo, hi]))
        finally:
            iv.prec = old

    def from_int(self, value: int) -> "Enclosure":
        return self.from_fraction(Fraction(value))


class Enclosure:
    """An interval [lo, hi] certified to contain the represented real."""

    __slots__ = ("ctx", "_ival")

    def __init__(self, ctx: EnclosureContext, ival):
        self.ctx = ctx
        self._ival = ival

    def _run(self, fn):
        old = iv.prec
        try:
            iv.prec = self.ctx.precision_bits
            return Enclosure(self.ctx, fn())
        finally:
            iv.prec = old

    @staticmethod
    def _coerce(ctx, other):
        if isinstance(other, Enclosure):
            return other._ival
        if isinstance(other, (int, Fraction)):
            return ctx.from_fraction(Fraction(other))._ival
        raise DomainError(f"cannot combine an enclosure with {type(other).__name__}")

    def __add__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: self._ival + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: self._ival - o)

    def __rsub__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: o - self._ival)

    def __mul__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: self._ival * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: self._ival / o)

    def __rtruediv__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: o / self._ival)

    def __pow__(self, other):
        o = self._coerce(self.ctx, other)
        return self._run(lambda: self._ival**o)

    def log(self) -> "Enclosure":
        return self._run(lambda: iv.log(self._ival))

    def exp(self) -> "Enclosure":
        return self._run(lambda: iv.exp(self._ival))

    # -- exact endpoints ----------------------------------------------

    @staticmethod
    def _mpf_tuple_to_fraction(t) -> Fraction:
        # raw libmp representation (sign, mantissa, exponent, bitcount);
        # reading it directly avoids any re-rounding of the endpoint
        sign, man, exp, _ = t
        if man == 0:
            if exp == 0:
                return Fraction(0)
            raise PrecisionError("enclosure endpoint is not finite")
        value = Fraction(int(man)) * Fraction(2) ** int(exp)
        return -value if sign else value

    @property
    def lower(self) -> Fraction:
        """Exact value of the lower endpoint (a dyadic rational)."""
        return self._mpf_tuple_to_fraction(self._ival._mpi_[0])

    @property
    def upper(self) -> Fraction:
        """Exact value of the upper endpoint (a dyadic rational)."""
        return self._mpf_tuple_to_fraction(self._ival._mpi_[1])

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __repr__(self):
        return f"Enclosure[{self.lower}, {self.upper}]"

    # -- certified comparisons ----------------------------------------

    def _compare(self, other) -> int | None:
        """-1, 0(overlap undecided -> None), or 1; equality undecidable."""
        if isinstance(other, (int, Fraction)):
            o_lo = o_hi = Fraction(other)
        else:
            o_lo, o_hi = other.lower, other.upper
        if self.upper < o_lo:
            return -1
        if self.lower > o_hi:
            return 1
        return None

    def certified_lt(self, other) -> bool:
        """True/False when certifiable; PrecisionError when undecided."""
        c = self._compare(other)
        if c is None:
            raise PrecisionError(
                "comparison undecided at the current precision",
                lo=self.lower,
                hi=self.upper,
            )
        return c < 0

    def certified_gt(self, other) -> bool:
        c = self._compare(other)
        if c is None:
            raise PrecisionError(
                "comparison undecided at the current precision",
                lo=self.lower,
                hi=self.upper,
            )
        return c > 0

    def decide_lt(self, other) -> bool | None:
        """Three-valued comparison: True, False, or None when undecided."""
        c = self._compare(other)
        return None if c is None else c < 0
