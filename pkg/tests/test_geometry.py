"""Unit tests for base-b interval geometry and the two-grid cell selection."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from adicweights import (
    AdicInterval,
    DomainError,
    FamilyBlock,
    SelectionFamily,
    SelectionResult,
    select_family,
    select_pair,
)
from adicweights.geometry import children, distinguished_points, smallest_containing

intervals = st.builds(
    lambda base, depth, seed: AdicInterval(base, depth, 1 + seed % base**depth),
    st.sampled_from([2, 3, 5, 7]),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=10**9),
)


class TestAdicInterval:
    def test_basic_fields(self):
        cell = AdicInterval(3, 2, 4)
        assert cell.left == Fraction(1, 3)
        assert cell.right == Fraction(4, 9)
        assert cell.length == Fraction(1, 9)
        assert cell.bounds == (Fraction(1, 3), Fraction(4, 9))

    @pytest.mark.parametrize("bad", [(3, 2, 0), (3, 2, 10), (1, 2, 1), (3, -1, 1)])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(DomainError):
            AdicInterval(*bad)

    @given(intervals)
    def test_index_arithmetic(self, cell):
        width = Fraction(1, cell.base**cell.depth)
        assert cell.left == (cell.index - 1) * width
        assert cell.right == cell.index * width
        assert cell.length == width

    @given(intervals)
    def test_children_partition(self, cell):
        kids = cell.children()
        assert list(kids) == list(children(cell))
        assert len(kids) == cell.base
        assert kids[0].left == cell.left
        assert kids[-1].right == cell.right
        for a, b in zip(kids, kids[1:]):
            assert a.right == b.left
            assert a.disjoint_from(b)
        assert all(k.length * cell.base == cell.length for k in kids)
        assert all(cell.contains_bounds(k.left, k.right) for k in kids)

    @given(intervals, st.integers(min_value=0, max_value=10**6))
    def test_child_parent_round_trip(self, cell, seed):
        i = 1 + seed % cell.base
        assert cell.child(i).parent() == cell

    def test_root_has_no_parent(self):
        with pytest.raises(DomainError):
            AdicInterval(3, 0, 1).parent()

    @given(intervals)
    def test_distinguished_points(self, cell):
        # The two marked points sit one child-width inside each endpoint.
        step = cell.length / cell.base
        assert cell.upsilon == cell.left + step
        assert cell.zeta == cell.right - step
        assert distinguished_points(cell) == (cell.upsilon, cell.zeta)

    @given(intervals)
    def test_membership_semantics(self, cell):
        assert cell.contains_point(cell.left)
        assert not cell.contains_point(cell.right)
        assert cell.contains_point(cell.zeta)
        assert cell.contains_bounds(cell.left, cell.right)
        assert not cell.contains_bounds(cell.left, cell.right + cell.length)

    @given(intervals)
    def test_json_round_trip(self, cell):
        assert AdicInterval.from_json_dict(cell.to_json_dict()) == cell


class TestSmallestContaining:
    def test_frozen_example(self):
        found = smallest_containing(2, (Fraction(5, 16), Fraction(3, 8)))
        assert found == AdicInterval(2, 4, 6)
        assert found.bounds == (Fraction(5, 16), Fraction(3, 8))

    def test_straddling_midpoint_forces_root(self):
        found = smallest_containing(2, (Fraction(1, 2) - Fraction(1, 100), Fraction(1, 2)))
        assert found.depth >= 1
        wide = smallest_containing(
            2, (Fraction(1, 2) - Fraction(1, 100), Fraction(1, 2) + Fraction(1, 100))
        )
        assert wide == AdicInterval(2, 0, 1)

    @given(
        st.sampled_from([2, 3, 5]),
        st.integers(min_value=0, max_value=8),
        st.integers(min_value=0, max_value=10**9),
        st.fractions(min_value=0, max_value=1),
        st.fractions(min_value=0, max_value=1),
    )
    @settings(max_examples=80)
    def test_minimality(self, base, depth, seed, u, v):
        # Shrink a random sub-window of a random cell, then ask for the
        # smallest cell around it: the answer must contain it while none of
        # the answer's children do.
        cell = AdicInterval(base, depth, 1 + seed % base**depth)
        lo = cell.left + min(u, v) * cell.length
        hi = cell.left + max(u, v) * cell.length
        assume(lo < hi)
        found = smallest_containing(base, (lo, hi))
        assert found.contains_bounds(lo, hi)
        assert not any(kid.contains_bounds(lo, hi) for kid in found.children())
        assert found.depth >= cell.depth or found.contains_bounds(*cell.bounds)


class TestSelectPair:
    def test_frozen_guards_off_example(self):
        result = select_pair(
            3, 2, (Fraction(0), Fraction(1)), Fraction(1, 4), enforce_guards=False
        )
        assert isinstance(result, SelectionResult)
        assert result.I == AdicInterval(2, 1, 1)
        assert result.J == AdicInterval(3, 0, 1)
        assert result.gap == Fraction(1, 12)
        assert result.upsilon == Fraction(1, 3)
        assert result.zeta == Fraction(1, 4)
        assert not result.guards_enforced

    @staticmethod
    def _assert_invariants(result: SelectionResult, p: int, q: int) -> None:
        sol = result.solution
        # Exact alignment identity between the two marked points.
        expected_gap = Fraction(
            1, p ** (sol.m1 * (q - 1)) * q ** (sol.m2 * (p - 1))
        )
        assert result.upsilon - result.zeta == expected_gap
        assert result.gap == expected_gap
        assert result.gap > 0
        assert result.gap <= result.epsilon * result.I.length
        # The q-adic cell sits strictly inside the p-adic cell.
        assert result.J.contains_bounds(*result.I.bounds)
        assert result.I.length < result.J.length
        # Minimality: no child of J still contains I.
        assert not any(
            kid.contains_bounds(*result.I.bounds) for kid in result.J.children()
        )
        assert result.upsilon == result.J.upsilon
        assert result.zeta == result.I.zeta

    @given(
        st.sampled_from([(3, 2), (5, 2), (5, 3), (7, 2), (7, 3), (7, 5)]),
        st.integers(min_value=0, max_value=4),
        st.integers(min_value=0, max_value=10**6),
        st.integers(min_value=2, max_value=8),
    )
    @settings(max_examples=60)
    def test_invariants_hold(self, pq, depth, seed, eps_exp):
        p, q = pq
        target = AdicInterval(q, depth, 1 + seed % q**depth)
        epsilon = Fraction(1, q**eps_exp)
        result = select_pair(p, q, target.bounds, epsilon)
        self._assert_invariants(result, p, q)
        assert target.contains_bounds(*result.I.bounds)
        assert result.epsilon == epsilon
        assert result.guards_enforced

    def test_zero_epsilon_rejected(self):
        with pytest.raises(DomainError):
            select_pair(3, 2, (Fraction(0), Fraction(1)), Fraction(0))


class TestSelectFamily:
    def test_three_blocks_disjoint(self):
        family = select_family(2, (3,), 3, alpha_schedule=[1, 2, 3])
        assert isinstance(family, SelectionFamily)
        assert [b.alpha for b in family.blocks] == [1, 2, 3]
        roots = [b.interval for b in family.blocks]
        for i, one in enumerate(roots):
            for other in roots[i + 1 :]:
                assert one.disjoint_from(other)
        for block in family.blocks:
            assert isinstance(block, FamilyBlock)
            assert block.host.contains_bounds(*block.interval.bounds)
            for cont in block.containers:
                assert cont.contains_bounds(*block.interval.bounds)
            assert block.gap == max(block.gaps)
            assert block.epsilon == Fraction(
                1, 2 ** (family.gap_exponent * block.alpha)
            )
            assert block.gap <= block.epsilon * block.interval.length

    def test_linear_schedule_is_default(self):
        family = select_family(2, (3,), 2)
        assert [b.alpha for b in family.blocks] == [1, 2]

    def test_multi_prime_blocks(self):
        family = select_family(2, (3, 5), 2)
        for block in family.blocks:
            assert len(block.containers) == 2
            assert len(block.gaps) == 2
            for cont, prime in zip(block.containers, (3, 5)):
                assert cont.base == prime
                assert cont.contains_bounds(*block.interval.bounds)
        a, b = (blk.interval for blk in family.blocks)
        assert a.disjoint_from(b)

    def test_strict_mode_tightens_epsilon(self):
        family = select_family(2, (3,), 1, alpha_schedule=[1], strict_paper=True)
        assert family.blocks[0].epsilon == Fraction(1, 2**100)
        assert family.blocks[0].gap <= family.blocks[0].epsilon * family.blocks[
            0
        ].interval.length

    def test_hosts_separate_blocks(self):
        family = select_family(3, (5,), 3)
        hosts = [b.host for b in family.blocks]
        for i, one in enumerate(hosts):
            for other in hosts[i + 1 :]:
                assert one.disjoint_from(other)

    def test_rejects_bad_schedule(self):
        with pytest.raises(DomainError):
            select_family(2, (3,), 2, alpha_schedule=[1])
