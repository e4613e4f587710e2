"""Exact doubling scans and certified maximal-function bounds.

The scans walk base-adic interval trees over a constructed measure and
compute exact child-mass ratios or averaged-weight functionals.  Subtrees
on which the density is provably constant are pruned: every interval in
such a subtree has child ratio exactly 1 and functional value exactly 1,
so pruning never changes a supremum (which is always >= 1).

Three kinds of certificates are produced:

* doubling reports: the exact supremum of sibling mass ratios
  max_j mu(J_j) / min_j mu(J_j) over all scanned cells J, with a witness;
* exhaustion bounds: the closed-form constant C_final = A * (b/a^2)^N
  controlling base-p ratios for an aligned block construction, assembled
  from a per-case table of exact rationals;
* reverse-Holder and power-mean reports: certified suprema of
  (avg of w^r)^(1/r) / (avg of w)   and   (avg of w) * (avg of w^s)^(r-1)
  with s = -1/(r-1), decided exactly in the r-th-power domain whenever the
  relevant exponent is an integer and by directed-rounding enclosures
  otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import partial

from .enclosure import DEFAULT_PRECISION_BITS, Bounds, EnclosureContext
from .errors import DomainError, InvariantViolation, PrecisionError, ResourceError
from .geometry import AdicInterval
from .measure import (
    BlockMeasure,
    DoublingMeasure,
    WeightPair,
    chain_mass_factors,
    default_weights,
)
from .ntheory import is_prime

__all__ = [
    "DoublingReport",
    "ExhaustionBound",
    "NonDoublingWitness",
    "ViolationWitness",
    "RHReport",
    "ARReport",
    "AlphaIndependenceRow",
    "AlphaIndependenceTable",
    "adic_doubling_scan",
    "exhaustion_bound",
    "nondoubling_witness",
    "find_doubling_violation",
    "rh_admissible_range",
    "rh_constants",
    "rh_scan",
    "ar_admissible_range",
    "ar_constants",
    "ar_scan",
    "alpha_independence_table",
]

_DEFAULT_NODE_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# doubling scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoublingReport:
    """Result of an exact sibling-ratio scan over one base-adic tree."""

    base: int
    depth: int
    sup_ratio: Fraction
    witness: AdicInterval
    witness_children: tuple[int, int]
    witness_label: str
    theoretical_bound: Fraction | None
    passed: bool | None
    nodes_scanned: int
    ratio_set: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.sup_ratio < 1:
            raise InvariantViolation("sibling-ratio supremum must be >= 1")


def _classify_interval(measure: DoublingMeasure, cell: AdicInterval) -> str:
    lo, hi = cell.bounds
    touching = [
        blk for blk in measure.blocks if lo < blk.root.right and blk.root.left < hi
    ]
    if not touching:
        return "background"
    if all(lo <= blk.root.left and blk.root.right <= hi for blk in touching):
        return "contains_blocks"
    blk = touching[0]
    if blk.root.left <= lo and hi <= blk.root.right:
        zeta = blk.root.zeta
        if lo <= zeta and zeta <= hi and not (lo == zeta == hi):
            if lo < zeta < hi:
                return "at_distinguished_point"
            return "touches_distinguished_point"
        return "left_of_distinguished_point" if hi <= zeta else "right_of_distinguished_point"
    return "spans_block_boundary"


def _child_masses(measure: DoublingMeasure, cell: AdicInterval) -> list[Fraction]:
    return [measure.measure_of(*child.bounds) for child in cell.children()]


def adic_doubling_scan(
    measure: DoublingMeasure,
    base: int,
    depth: int,
    *,
    theoretical_bound: Fraction | None = None,
    collect_ratios: bool = False,
    node_budget: int = _DEFAULT_NODE_BUDGET,
    mapper=None,
) -> DoublingReport:
    """Exact supremum of sibling mass ratios over base-adic cells.

    Scans every cell of depth < ``depth`` whose subtree can contain a
    non-unit ratio; the witness is the lexicographically least (depth,
    index) cell attaining the supremum, with child indices (argmax,
    argmin), each the least index attaining its extreme.
    """
    if base < 2:
        raise DomainError(f"scan base must be >= 2, got {base}")
    if depth < 1:
        raise DomainError(f"scan depth must be >= 1, got {depth}")
    run_map = mapper if mapper is not None else map
    root = AdicInterval(base, 0, 1)
    best_ratio: Fraction | None = None
    best_cell = root
    best_pair = (1, 2)
    ratios: set[Fraction] = set()
    pruned_any = False
    nodes = 0
    frontier = [root]
    for level in range(depth):
        if not frontier:
            break
        nodes += len(frontier)
        if nodes > node_budget:
            raise ResourceError(
                f"doubling scan exceeded the node budget {node_budget} "
                f"at depth {level}"
            )
        mass_lists = list(run_map(partial(_child_masses, measure), frontier))
        next_frontier = []
        for cell, masses in zip(frontier, mass_lists):
            mx = max(masses)
            mn = min(masses)
            if mn <= 0:
                raise InvariantViolation(
                    "constructed measures are strictly positive", witness=cell
                )
            ratio = mx / mn
            if best_ratio is None or ratio > best_ratio:
                j1 = masses.index(mx) + 1
                if mx == mn:
                    j2 = 2 if j1 == 1 else 1
                else:
                    j2 = masses.index(mn) + 1
                best_ratio, best_cell, best_pair = ratio, cell, (j1, j2)
            if collect_ratios:
                for i, mi in enumerate(masses):
                    for j, mj in enumerate(masses):
                        if i != j:
                            ratios.add(mi / mj)
            if level + 1 < depth:
                for child in cell.children():
                    if measure.constant_density_on(*child.bounds):
                        pruned_any = True
                    else:
                        next_frontier.append(child)
        frontier = next_frontier
    if best_ratio is None:
        best_ratio = Fraction(1)
    if collect_ratios and (pruned_any or frontier):
        ratios.add(Fraction(1))
    passed = None if theoretical_bound is None else best_ratio <= theoretical_bound
    return DoublingReport(
        base=base,
        depth=depth,
        sup_ratio=best_ratio,
        witness=best_cell,
        witness_children=best_pair,
        witness_label=_classify_interval(measure, best_cell),
        theoretical_bound=theoretical_bound,
        passed=passed,
        nodes_scanned=nodes,
        ratio_set=tuple(sorted(ratios)) if collect_ratios else None,
    )


# ---------------------------------------------------------------------------
# exhaustion-constant table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExhaustionBound:
    """Closed-form base-p doubling constant for one aligned pair (p, q)."""

    p: int
    q: int
    a: Fraction
    b: Fraction
    N: int
    per_case_A: dict[str, Fraction]
    A: Fraction
    C_final: Fraction
    q2_recomputed: bool

    def __post_init__(self):
        if self.A != max(self.per_case_A.values()):
            raise InvariantViolation("A must be the maximum table entry")
        if self.C_final != self.A * (self.b / self.a**2) ** self.N:
            raise InvariantViolation("C_final must equal A * (b/a^2)^N")


def exhaustion_bound(p: int, q: int, a: Fraction, b: Fraction) -> ExhaustionBound:
    """Assemble the per-case ratio constants and the final bound.

    The table rows bound the sibling mass ratio of base-p cells during an
    exhaustion of one aligned block, case by case: the host cell itself,
    cells meeting no chain cell, and cells meeting the chains with zero,
    one, or more than one whole chain cell, each with sub-cases by where
    the cell sits relative to the phase change.  N is the least integer
    with p < q^N, and each exhaustion step can cost at most a factor
    b/a^2, giving C_final = A * (b/a^2)^N.

    For q = 2 several table entries above divide by q - 2, so the table
    is recomputed under the two-child specialization (flagged in the
    result).
    """
    if not is_prime(p) or not is_prime(q):
        raise DomainError(f"bases must be prime, got p={p}, q={q}")
    if p <= q:
        raise DomainError(f"need p > q, got p={p}, q={q}")
    a, b = Fraction(a), Fraction(b)
    WeightPair(q, a, b)  # validates the weight constraint
    N = 1
    while q**N <= p:
        N += 1
    if q >= 3:
        table = {
            "host_cell": Fraction(4),
            "chains_absent_shallow": 1 / a,
            "chains_absent_deep": max(
                Fraction(2 * q - 2, q - 2), Fraction(2), 2 * q / (a * (q - 2))
            ),
            "chains_zero_whole_a": max(b, 1 / a),
            "chains_zero_whole_b": b / a,
            "chains_zero_whole_c": 1 / a,
            "chains_one_whole_a": b**2 / a,
            "chains_one_whole_b": b**2,
            "chains_one_whole_c": b / a**2,
            "chains_many_whole_a": b * q**2 / (a * (q - a)),
            "chains_many_whole_b": b * q**2 / (a * (q - 1)),
        }
        q2_flag = False
    else:
        table = {
            "host_cell": Fraction(4),
            "chains_absent_shallow": max(a * b, 1 / (a * b)),
            "chains_absent_deep": max(Fraction(5), 8 / (a * b)),
            "chains_zero_whole": b / a**2,
            "chains_one_whole_a": b**2 / a,
            "chains_one_whole_b": b**2,
            "chains_one_whole_c": b / a**3,
            "chains_many_whole_a": 4 / a**2,
            "chains_many_whole_b": 4 * b / a,
        }
        q2_flag = True
    A = max(table.values())
    return ExhaustionBound(
        p=p,
        q=q,
        a=a,
        b=b,
        N=N,
        per_case_A=table,
        A=A,
        C_final=A * (b / a**2) ** N,
        q2_recomputed=q2_flag,
    )


# ---------------------------------------------------------------------------
# nondoubling witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonDoublingWitness:
    """Two adjacent same-length intervals with exact mass ratio (a/b)^alpha."""

    block_index: int
    alpha: int
    left: tuple[Fraction, Fraction]
    right: tuple[Fraction, Fraction]
    left_mass: Fraction
    right_mass: Fraction
    ratio: Fraction


def nondoubling_witness(
    measure: DoublingMeasure, block_index: int = 0
) -> NonDoublingWitness:
    """The adjacent chain cells at depth alpha of one block, with the
    exact ratio mu(left)/mu(right) = (a/b)^alpha, verified by direct
    measure queries."""
    if not 0 <= block_index < len(measure.blocks):
        raise DomainError(f"block index {block_index} out of range")
    blk = measure.blocks[block_index]
    alpha = blk.alpha
    q = blk.q
    zeta = blk.root.zeta
    h = blk.root.length / q**alpha
    left = (zeta - h, zeta)
    right = (zeta, zeta + h)
    lm = measure.measure_of(*left)
    rm = measure.measure_of(*right)
    w = measure.weights
    expect_l, expect_r = chain_mass_factors(q, alpha, w.a, w.b, alpha)
    if lm != expect_l * blk.root.length or rm != expect_r * blk.root.length:
        raise InvariantViolation(
            "chain masses disagree with their closed forms",
            witness=(block_index, alpha),
        )
    ratio = lm / rm
    if ratio != (w.a / w.b) ** alpha:
        raise InvariantViolation("nondoubling ratio must equal (a/b)^alpha")
    return NonDoublingWitness(
        block_index=block_index,
        alpha=alpha,
        left=left,
        right=right,
        left_mass=lm,
        right_mass=rm,
        ratio=ratio,
    )


@dataclass(frozen=True)
class ViolationWitness:
    """A concrete interval pair I' subset 2I' with mu(2I') > C * mu(I')."""

    constant: Fraction
    alpha: int
    inner: tuple[Fraction, Fraction]
    outer: tuple[Fraction, Fraction]
    inner_mass: Fraction
    outer_mass: Fraction

    def __post_init__(self):
        il, ir = self.inner
        ol, orr = self.outer
        if not (ol <= il and ir <= orr):
            raise InvariantViolation("outer interval must contain the inner one")
        if ir - il <= 0 or (orr - ol) != 2 * (ir - il):
            raise InvariantViolation("outer interval must have twice the length")
        if self.outer_mass <= self.constant * self.inner_mass:
            raise InvariantViolation("witness does not violate the constant")


def find_doubling_violation(
    q: int,
    constant: Fraction,
    weights: WeightPair | None = None,
    max_alpha: int = 64,
) -> ViolationWitness:
    """A doubling violation for the candidate constant: the left chain
    cell at depth alpha and its concentric double, for the first alpha
    that breaks mu(2I') <= C * mu(I').  Exists for every C because the
    ratio grows like (b/a)^alpha."""
    constant = Fraction(constant)
    if constant <= 0:
        raise DomainError(f"constant must be positive, got {constant}")
    w = weights if weights is not None else default_weights(q)
    if w.q != q:
        raise DomainError("weight base mismatch")
    for alpha in range(1, max_alpha + 1):
        m = DoublingMeasure.single_block(q, alpha, w)
        zeta = Fraction(q - 1, q)
        h = Fraction(1, q**alpha)
        inner = (zeta - h, zeta)
        outer = (zeta - h - h / 2, zeta + h / 2)
        im = m.measure_of(*inner)
        om = m.measure_of(*outer)
        if om > constant * im:
            return ViolationWitness(
                constant=constant,
                alpha=alpha,
                inner=inner,
                outer=outer,
                inner_mass=im,
                outer_mass=om,
            )
    raise ResourceError(
        f"no doubling violation found for C={constant} with alpha <= {max_alpha}"
    )


# ---------------------------------------------------------------------------
# reverse-Holder (averaged upper power) scan
# ---------------------------------------------------------------------------


def _as_lowest_terms(r) -> Fraction:
    r = Fraction(r)
    if r.denominator < 1:  # Fraction normalizes; defensive only
        raise DomainError("bad exponent")
    return r


def rh_admissible_range(q: int, b: Fraction, r: Fraction) -> None:
    """Require 1 < r < log(q)/log(b), checked exactly via b^rn < q^rd."""
    r = _as_lowest_terms(r)
    if r <= 1:
        raise DomainError(f"exponent must exceed 1, got {r}")
    b = Fraction(b)
    rn, rd = r.numerator, r.denominator
    # b^r < q  <=>  b_num^rn < b_den^rn * q^rd
    if not b.numerator**rn < b.denominator**rn * q**rd:
        raise DomainError(
            f"exponent {r} is too large: need b^r < q with b={b}, q={q}"
        )


def rh_constants(q: int, a: Fraction, b: Fraction, r: int) -> dict[str, Fraction]:
    """Exact geometric-series constants for integer exponent r.

    B1 = b^r/q and B2 = a^r/q are the per-level decay factors of the
    power integral along the two chains; the five case constants bound
    the normalized integral over the host cell, the two chains, and the
    two transition cases, and the final bound C satisfies
    C^r = max_i C_i + 1.
    """
    if not isinstance(r, int) or r < 2:
        raise DomainError(f"exact constants need an integer exponent >= 2, got {r}")
    rh_admissible_range(q, b, Fraction(r))
    a, b = Fraction(a), Fraction(b)
    B1 = b**r / q
    B2 = a**r / q
    C1 = 1 + Fraction(q - 1, q) / (1 - B1)
    C2 = 1 + (q - 1) / (1 - B1) + (B1 + B2 * (q - 2)) / (1 - B2)
    C3 = 1 + ((q - 2) * B2 + B1) / (1 - B2)
    C4 = C3 + (q - 1) * B2 / (1 - B1)
    C5 = (q - 2 + C2) * B2 + C4 * B1
    cmax = max(C1, C2, C3, C4, C5)
    return {
        "B1": B1,
        "B2": B2,
        "C1": C1,
        "C2": C2,
        "C3": C3,
        "C4": C4,
        "C5": C5,
        "bound_power": cmax + 1,
    }


def _rh_constants_enclosure(ctx: EnclosureContext, q, a, b, r):
    a_r = ctx.from_fraction(a) ** r
    b_r = ctx.from_fraction(b) ** r
    one = ctx.from_int(1)
    B1 = b_r / q
    B2 = a_r / q
    C1 = one + Fraction(q - 1, q) / (one - B1)
    C2 = one + (q - 1) / (one - B1) + (B1 + B2 * (q - 2)) / (one - B2)
    C3 = one + ((q - 2) * B2 + B1) / (one - B2)
    C4 = C3 + (q - 1) * B2 / (one - B1)
    C5 = (q - 2 + C2) * B2 + C4 * B1
    # range of the maximum: max of uppers over, max of lowers under
    cands = {"C1": C1, "C2": C2, "C3": C3, "C4": C4, "C5": C5}
    hi = max(c.upper for c in cands.values())
    lo = max(c.lower for c in cands.values())
    bits = ctx.precision_bits
    consts = {"B1": B1, "B2": B2, **cands}
    out = {name: Bounds.of_enclosure(v) for name, v in consts.items()}
    bound = Bounds(lo + 1, hi + 1, bits)
    out["bound_power"] = bound
    return out, bound


@dataclass(frozen=True)
class RHReport:
    """Certified supremum of (avg w^r)^(1/r) / (avg w) over a cell tree."""

    base: int
    depth: int
    r: Fraction
    exact: bool
    constants: dict
    bound_power: Bounds
    sup_power: Bounds
    witness: AdicInterval
    passed: bool
    nodes_scanned: int
    precision_bits: int | None = None

    @property
    def sup_functional(self) -> Bounds:
        """Certified range of the supremum itself (the 1/r-th power)."""
        bits = self.precision_bits or DEFAULT_PRECISION_BITS
        ctx = EnclosureContext(bits)
        lo = ctx.from_fraction(self.sup_power.lo) ** (1 / self.r)
        hi = ctx.from_fraction(self.sup_power.hi) ** (1 / self.r)
        return Bounds(lo.lower, hi.upper, bits)


def _scan_functional(
    measure: DoublingMeasure,
    base: int,
    depth: int,
    node_value,
    *,
    node_budget: int,
    mapper=None,
):
    """Shared pruned BFS for functional scans.

    ``node_value(cell) -> (lo, hi)`` returns an exact or enclosed value of
    the (power-domain) functional on one cell; constant-density subtrees
    are pruned because the functional is exactly 1 there.  Returns
    ((sup_lo, sup_hi), witness, nodes).
    """
    run_map = mapper if mapper is not None else map
    root = AdicInterval(base, 0, 1)
    sup_lo = sup_hi = Fraction(1)
    witness = root
    have = False
    nodes = 0
    frontier = [root]
    # level d evaluates the functional on cells of depth d; cells whose
    # density is constant are exactly 1 (and so are all their subcells),
    # which the starting sup already covers, so they are never expanded.
    for level in range(depth + 1):
        if not frontier:
            break
        nodes += len(frontier)
        if nodes > node_budget:
            raise ResourceError(
                f"functional scan exceeded the node budget {node_budget} "
                f"at depth {level}"
            )
        values = list(run_map(node_value, frontier))
        next_frontier = []
        for cell, (vlo, vhi) in zip(frontier, values):
            if not have or vhi > sup_hi:
                witness = cell
            if not have:
                sup_lo, sup_hi, have = vlo, vhi, True
            else:
                sup_lo = max(sup_lo, vlo)
                sup_hi = max(sup_hi, vhi)
            if level < depth:
                for child in cell.children():
                    if not measure.constant_density_on(*child.bounds):
                        next_frontier.append(child)
        frontier = next_frontier
    sup_lo = max(sup_lo, Fraction(1))
    sup_hi = max(sup_hi, Fraction(1))
    return (sup_lo, sup_hi), witness, nodes


class _ExactPowerNode:
    """Power-domain functional S(J) = (int_J w^r) |J|^(r-1) / mu(J)^r."""

    def __init__(self, measure: DoublingMeasure, r: int):
        self.measure = measure
        self.r = r
        self.values = {}

    def piece_value(self, x, y):
        key = (x, y)
        v = self.values.get(key)
        if v is None:
            v = self.measure.weights.monomial(x, y) ** self.r
            self.values[key] = v
        return v

    def __call__(self, cell: AdicInterval):
        lo, hi = cell.bounds
        power = self.measure.integral_of(lo, hi, self.piece_value, Fraction(1))
        mass = self.measure.measure_of(lo, hi)
        s = power * cell.length ** (self.r - 1) / mass**self.r
        return (s, s)


class _EnclosurePowerNode:
    """Enclosure version of the power-domain functional for rational r."""

    def __init__(self, measure: DoublingMeasure, r: Fraction, ctx: EnclosureContext):
        self.measure = measure
        self.r = Fraction(r)
        self.ctx = ctx
        self.values = {}

    def piece_value(self, x, y):
        key = (x, y)
        v = self.values.get(key)
        if v is None:
            v = self.ctx.from_fraction(self.measure.weights.monomial(x, y)) ** self.r
            self.values[key] = v
        return v

    def __call__(self, cell: AdicInterval):
        lo, hi = cell.bounds
        power = self.measure.integral_of(
            lo, hi, self.piece_value, self.ctx.from_int(1)
        )
        mass = self.measure.measure_of(lo, hi)
        length = self.ctx.from_fraction(cell.length)
        s = power * length ** (self.r - 1) / self.ctx.from_fraction(mass) ** self.r
        return (s.lower, s.upper)


def rh_scan(
    measure: DoublingMeasure,
    base: int,
    depth: int,
    r,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    node_budget: int = _DEFAULT_NODE_BUDGET,
    mapper=None,
    force_enclosure: bool = False,
) -> RHReport:
    """Certify sup over base-adic cells of (avg w^r)^(1/r) / (avg w) <= C.

    Both sides are compared in the r-th-power domain, where the bound is
    max_i C_i + 1.  Integer r: all quantities are exact rationals and the
    verdict is unconditional (``force_enclosure`` runs the interval route
    anyway, for cross-checking the two modes).  Rational r: every quantity
    is a directed enclosure and an undecidable comparison raises
    PrecisionError.
    """
    r = _as_lowest_terms(r)
    w = measure.weights
    rh_admissible_range(w.q, w.b, r)
    if r.denominator == 1 and not force_enclosure:
        consts = rh_constants(w.q, w.a, w.b, int(r))
        bound = Bounds.exact(consts["bound_power"])
        node = _ExactPowerNode(measure, int(r))
        exact = True
        bits = None
    else:
        ctx = EnclosureContext(precision_bits)
        consts, bound = _rh_constants_enclosure(ctx, w.q, w.a, w.b, r)
        node = _EnclosurePowerNode(measure, r, ctx)
        exact = False
        bits = precision_bits
    (sup_lo, sup_hi), witness, nodes = _scan_functional(
        measure, base, depth, node, node_budget=node_budget, mapper=mapper
    )
    if sup_hi <= bound.lo:
        passed = True
    elif sup_lo > bound.hi:
        passed = False
    else:
        raise PrecisionError(
            "cannot decide the power-mean comparison at this precision",
            lo=sup_lo,
            hi=sup_hi,
        )
    return RHReport(
        base=base,
        depth=depth,
        r=r,
        exact=exact,
        constants=consts,
        bound_power=bound,
        sup_power=Bounds(sup_lo, sup_hi, bits),
        witness=witness,
        passed=passed,
        nodes_scanned=nodes,
        precision_bits=bits,
    )


# ---------------------------------------------------------------------------
# power-mean (averaged negative power) scan
# ---------------------------------------------------------------------------


def ar_admissible_range(q: int, a: Fraction, r: Fraction) -> None:
    """Require r > 1 and a * q^(r-1) > 1, checked exactly."""
    r = _as_lowest_terms(r)
    if r <= 1:
        raise DomainError(f"exponent must exceed 1, got {r}")
    a = Fraction(a)
    rn, rd = r.numerator, r.denominator
    # a * q^(r-1) > 1  <=>  q^(rn-rd) * a^rd > 1
    lhs = Fraction(q) ** (rn - rd) * a**rd
    if not lhs > 1:
        raise DomainError(
            f"exponent {r} is too small: need a * q^(r-1) > 1 with a={a}, q={q}"
        )


def ar_constants(q: int, a: Fraction, b: Fraction, r) -> dict[str, Fraction]:
    """Exact constants when s = -1/(r-1) is a negative integer.

    B3 = a^s/q and B4 = b^s/q (note a < 1 makes a^s the large factor);
    the case constants mirror the upper-power table with the roles of the
    two chains exchanged, and the final bound is (max_i C_i + 1)^(r-1).
    """
    r = _as_lowest_terms(r)
    ar_admissible_range(q, Fraction(a), r)
    n = Fraction(1, r - 1)
    if n.denominator != 1:
        raise DomainError(
            f"exact constants need 1/(r-1) integral, got r={r}"
        )
    n = int(n)
    s = -n
    a, b = Fraction(a), Fraction(b)
    B3 = a**s / q
    B4 = b**s / q
    C1 = 1 + (q - 1) * B3 / (1 - B4)
    C2 = 1 + (B4 + (q - 2) * B3) / (1 - B3) + B3 / (1 - B4)
    C3 = 1 + ((q - 2) * B3 + B4) / (1 - B3)
    C4 = 1 + (q - 1) * B3 / (1 - B4) + ((q - 2) * B3 + B4) / (1 - B3)
    C5 = (q - 2 + C2) * B3 + C4 * B4
    cmax = max(C1, C2, C3, C4, C5)
    return {
        "B3": B3,
        "B4": B4,
        "C1": C1,
        "C2": C2,
        "C3": C3,
        "C4": C4,
        "C5": C5,
        "bound_power": cmax + 1,
    }


def _ar_constants_enclosure(ctx: EnclosureContext, q, a, b, r):
    s = -1 / (Fraction(r) - 1)
    a_s = ctx.from_fraction(a) ** s
    b_s = ctx.from_fraction(b) ** s
    one = ctx.from_int(1)
    B3 = a_s / q
    B4 = b_s / q
    C1 = one + (q - 1) * B3 / (one - B4)
    C2 = one + (B4 + (q - 2) * B3) / (one - B3) + B3 / (one - B4)
    C3 = one + ((q - 2) * B3 + B4) / (one - B3)
    C4 = one + (q - 1) * B3 / (one - B4) + ((q - 2) * B3 + B4) / (one - B3)
    C5 = (q - 2 + C2) * B3 + C4 * B4
    cands = {"C1": C1, "C2": C2, "C3": C3, "C4": C4, "C5": C5}
    hi = max(c.upper for c in cands.values())
    lo = max(c.lower for c in cands.values())
    bits = ctx.precision_bits
    out = {name: Bounds.of_enclosure(v) for name, v in {"B3": B3, "B4": B4, **cands}.items()}
    bound = Bounds(lo + 1, hi + 1, bits)
    out["bound_power"] = bound
    return out, bound


@dataclass(frozen=True)
class ARReport:
    """Certified supremum of (avg w) * (avg w^(-1/(r-1)))^(r-1)."""

    base: int
    depth: int
    r: Fraction
    exact: bool
    constants: dict
    bound_power: Bounds
    sup_power: Bounds
    witness: AdicInterval
    passed: bool
    nodes_scanned: int
    precision_bits: int | None = None


class _ExactNegPowerNode:
    """Power-domain functional S(J) = mu(J)^n (int_J w^(-n)) / |J|^(n+1)
    for n = 1/(r-1) integral; S = F^n with F the power-mean functional."""

    def __init__(self, measure: DoublingMeasure, n: int):
        self.measure = measure
        self.n = n
        self.values = {}

    def piece_value(self, x, y):
        key = (x, y)
        v = self.values.get(key)
        if v is None:
            v = self.measure.weights.monomial(x, y) ** (-self.n)
            self.values[key] = v
        return v

    def __call__(self, cell: AdicInterval):
        lo, hi = cell.bounds
        neg = self.measure.integral_of(lo, hi, self.piece_value, Fraction(1))
        mass = self.measure.measure_of(lo, hi)
        s = mass**self.n * neg / cell.length ** (self.n + 1)
        return (s, s)


class _EnclosureNegPowerNode:
    def __init__(self, measure: DoublingMeasure, r: Fraction, ctx: EnclosureContext):
        self.measure = measure
        self.r = Fraction(r)
        self.s = -1 / (self.r - 1)
        self.ctx = ctx
        self.values = {}

    def piece_value(self, x, y):
        key = (x, y)
        v = self.values.get(key)
        if v is None:
            v = self.ctx.from_fraction(self.measure.weights.monomial(x, y)) ** self.s
            self.values[key] = v
        return v

    def __call__(self, cell: AdicInterval):
        lo, hi = cell.bounds
        neg = self.measure.integral_of(lo, hi, self.piece_value, self.ctx.from_int(1))
        mass = self.ctx.from_fraction(self.measure.measure_of(lo, hi))
        length = self.ctx.from_fraction(cell.length)
        # power-domain exponent n = 1/(r-1) may be fractional here:
        # S = (mu/|J|)^n * (neg/|J|); compare against (maxC+1) directly
        n = 1 / (self.r - 1)
        s = (mass / length) ** n * (neg / length)
        return (s.lower, s.upper)


def ar_scan(
    measure: DoublingMeasure,
    base: int,
    depth: int,
    r,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    node_budget: int = _DEFAULT_NODE_BUDGET,
    mapper=None,
    force_enclosure: bool = False,
) -> ARReport:
    """Certify sup over base-adic cells of
    (avg w) * (avg w^(-1/(r-1)))^(r-1) <= (max_i C_i + 1)^(r-1).

    Comparisons happen in the 1/(r-1)-th-power domain, where the bound is
    max_i C_i + 1; for r = 1 + 1/n with integer n everything is exact."""
    r = _as_lowest_terms(r)
    w = measure.weights
    ar_admissible_range(w.q, w.a, r)
    n = Fraction(1, r - 1)
    if n.denominator == 1 and not force_enclosure:
        consts = ar_constants(w.q, w.a, w.b, r)
        bound = Bounds.exact(consts["bound_power"])
        node = _ExactNegPowerNode(measure, int(n))
        exact = True
        bits = None
    else:
        ctx = EnclosureContext(precision_bits)
        consts, bound = _ar_constants_enclosure(ctx, w.q, w.a, w.b, r)
        node = _EnclosureNegPowerNode(measure, r, ctx)
        exact = False
        bits = precision_bits
    (sup_lo, sup_hi), witness, nodes = _scan_functional(
        measure, base, depth, node, node_budget=node_budget, mapper=mapper
    )
    if sup_hi <= bound.lo:
        passed = True
    elif sup_lo > bound.hi:
        passed = False
    else:
        raise PrecisionError(
            "cannot decide the power-mean comparison at this precision",
            lo=sup_lo,
            hi=sup_hi,
        )
    return ARReport(
        base=base,
        depth=depth,
        r=r,
        exact=exact,
        constants=consts,
        bound_power=bound,
        sup_power=Bounds(sup_lo, sup_hi, bits),
        witness=witness,
        passed=passed,
        nodes_scanned=nodes,
        precision_bits=bits,
    )


# ---------------------------------------------------------------------------
# alpha independence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaIndependenceRow:
    alpha: int
    depth: int
    sup_ratio: Fraction
    ok: bool


@dataclass(frozen=True)
class AlphaIndependenceTable:
    p: int
    q: int
    a: Fraction
    b: Fraction
    bound: ExhaustionBound
    rows: tuple[AlphaIndependenceRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)


def alpha_independence_table(
    p: int,
    q: int,
    alphas,
    a: Fraction | None = None,
    b: Fraction | None = None,
    *,
    depth: int | None = None,
    bit_budget: int = 4096,
    node_budget: int = _DEFAULT_NODE_BUDGET,
    mapper=None,
) -> AlphaIndependenceTable:
    """Base-p sibling-ratio suprema of aligned one-block measures, one row
    per alpha, each checked against the alpha-free bound C_final.

    For each alpha a fresh aligned block is selected, the redistribution
    is run, and the base-p tree is scanned to a depth covering the block's
    finest pieces; the supremum must not exceed C_final, which does not
    depend on alpha."""
    from .geometry import select_family
    from .measure import assemble_global

    w = default_weights(q) if a is None else WeightPair(q, Fraction(a), Fraction(b))
    bound = exhaustion_bound(p, q, w.a, w.b)
    rows = []
    for alpha in alphas:
        fam = select_family(
            q, [p], 1, alpha_schedule=[alpha], bit_budget=bit_budget
        )
        m = assemble_global(fam, w.a, w.b)
        blk = m.blocks[0]
        if depth is None:
            finest = blk.root.length / q ** (2 * alpha)
            d = 1
            while Fraction(1, p**d) > finest:
                d += 1
            d += 2
        else:
            d = depth
        report = adic_doubling_scan(
            m,
            p,
            d,
            theoretical_bound=bound.C_final,
            node_budget=node_budget,
            mapper=mapper,
        )
        rows.append(
            AlphaIndependenceRow(
                alpha=alpha, depth=d, sup_ratio=report.sup_ratio, ok=bool(report.passed)
            )
        )
    return AlphaIndependenceTable(
        p=p, q=q, a=w.a, b=w.b, bound=bound, rows=tuple(rows)
    )
