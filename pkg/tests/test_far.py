"""Unit tests for distance-to-integer scans along geometric orbits and the
prime-power proximity survey."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from adicweights import (
    DomainError,
    FarConstantResult,
    KrantzReport,
    PrimePair,
    far_constant,
    krantz_scan,
    sharpness_witnesses,
    solve_pair,
)

from .oracles import brute_order, far_recount, krantz_recount


class TestFarConstant:
    def test_frozen_one_third(self):
        result = far_constant(Fraction(1, 3), 2, 40)
        assert isinstance(result, FarConstantResult)
        assert result.inf_value == Fraction(1, 3)
        assert result.argmin == (0, 0)
        assert len(result.sharp_hits) == 41

    def test_matches_oracle(self):
        result = far_constant(Fraction(1, 3), 2, 40)
        inf, hits = far_recount(Fraction(1, 3), 2, 40)
        assert result.inf_value == inf
        assert list(result.sharp_hits) == hits

    def test_sharp_hits_are_nearest_integers(self):
        result = far_constant(Fraction(1, 3), 2, 12)
        for m, k in result.sharp_hits:
            assert abs(Fraction(2) ** m * Fraction(1, 3) - k) == result.inf_value

    def test_n_adic_point_reaches_zero(self):
        result = far_constant(Fraction(1, 4), 2, 10)
        assert result.inf_value == 0
        assert result.argmin == (2, 1)

    @given(
        st.fractions(min_value=0, max_value=1),
        st.sampled_from([2, 3, 5]),
        st.integers(min_value=0, max_value=12),
        st.integers(min_value=0, max_value=6),
    )
    @settings(max_examples=60)
    def test_oracle_agreement_and_monotonicity(self, delta, n, M, extra):
        small = far_constant(delta, n, M)
        large = far_constant(delta, n, M + extra)
        inf, hits = far_recount(delta, n, M)
        assert small.inf_value == inf
        assert list(small.sharp_hits) == hits
        # Extending the horizon can only lower the infimum.
        assert large.inf_value <= small.inf_value
        assert 0 <= small.inf_value <= Fraction(1, 2)

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            far_constant(Fraction(1, 3), 1, 10)
        with pytest.raises(DomainError):
            far_constant(Fraction(1, 3), 2, -1)


class TestSharpnessWitnesses:
    def test_frozen_example(self):
        assert sharpness_witnesses(3, 1, 1, 2, 6) == [(1, 2), (5, 4), (21, 6)]

    def test_witnesses_satisfy_alignment_identity(self):
        p, n1, k, q, M = 3, 1, 1, 2, 6
        for j, m in sharpness_witnesses(p, n1, k, q, M):
            assert k * q**m == j * p ** (n1 * (q - 1)) + 1
            assert j % q == q - 1

    @given(
        st.sampled_from([3, 5, 7, 13]),
        st.integers(min_value=1, max_value=2),
        st.integers(min_value=8, max_value=24),
    )
    @settings(max_examples=30)
    def test_identity_and_stride(self, p, n1, M):
        q = 2
        witnesses = sharpness_witnesses(p, n1, 1, q, M)
        for j, m in witnesses:
            assert 1 * q**m == j * p**n1 + 1
            assert j % q == q - 1
            assert m <= M
        # Hits recur exactly at multiples of the multiplicative order of q.
        order = brute_order(q, p**n1)
        assert [m for _, m in witnesses] == list(range(order, M + 1, order))
        # The alignment solver's solutions are a sub-progression of the hits.
        sol = solve_pair(PrimePair(p, q), n1, 1)
        solver_ms = range(sol.m2 * (p - 1), M + 1, sol.stride * (p - 1))
        assert set(solver_ms) <= {m for _, m in witnesses}

    def test_congruence_is_checked_not_assumed(self):
        # For p = 5, q = 3 the quotient j lands in the wrong residue class
        # (j = -1 mod q needs p**n1 = 1 mod q), and the function refuses to
        # return an unverified witness.
        from adicweights import InvariantViolation

        with pytest.raises(InvariantViolation):
            sharpness_witnesses(5, 1, 1, 3, 8)
        # For p = 7 the hypothesis holds (7 = 1 mod 3) and witnesses flow.
        good = sharpness_witnesses(7, 1, 1, 3, 12)
        assert good == [(104, 6), (75920, 12)]
        for j, m in good:
            assert 3**m == j * 7 + 1
            assert j % 3 == 2

    def test_matches_far_scan_hits(self):
        # The even-exponent sharp hits of the base-2 orbit of 1/3 carry the
        # same j values that the alignment solver produces level by level.
        result = far_constant(Fraction(1, 3), 2, 12)
        even_hits = [(k, m) for m, k in result.sharp_hits if m % 2 == 0 and m > 0]
        assert sharpness_witnesses(3, 1, 1, 2, 12) == even_hits


class TestKrantzScan:
    @pytest.mark.parametrize(
        "m,c,pairs,argmin",
        [
            (5, Fraction(1, 289), 74, (17, 2, 9)),
            (6, Fraction(1, 577), 126, (577, 1, 9)),
            (7, Fraction(1, 1279), 218, (1279, 1, 10)),
        ],
    )
    def test_frozen_small_m(self, m, c, pairs, argmin):
        report = krantz_scan(m)
        assert isinstance(report, KrantzReport)
        assert report.C_m == c
        assert report.pairs_examined == pairs
        assert report.argmin == argmin
        assert report.epsilon == c / 2
        assert report.k == 1

    @pytest.mark.parametrize(
        "m,c",
        [
            (8, Fraction(1, 1279)),
            (9, Fraction(1, 5119)),
            (10, Fraction(1, 8191)),
            (11, Fraction(1, 20479)),
            (12, Fraction(1, 20479)),
        ],
    )
    def test_frozen_larger_m(self, m, c):
        report = krantz_scan(m)
        assert report.C_m == c
        assert report.C_m > 0

    @pytest.mark.parametrize("m", [5, 6, 7])
    def test_matches_oracle(self, m):
        report = krantz_scan(m)
        c, pairs = krantz_recount(m)
        assert report.C_m == c
        assert report.pairs_examined == len(pairs)

    def test_rejects_bad_m(self):
        with pytest.raises(DomainError):
            krantz_scan(0)
