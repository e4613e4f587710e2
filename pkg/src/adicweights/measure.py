"""Two-phase redistributed measures on base-q grids.

A block measure lives on a base-q cell I (the block root) and redistributes
its Lebesgue mass among descendants with two weights a < 1 < b satisfying
(q-1)*a + b = q, so every subdivision is mass preserving.  The
redistribution follows two chains anchored at the distinguished point
zeta(I) (the left endpoint of I's last child):

* the left chain H(1), H(2), ... of cells [zeta - |I|/q^k, zeta), each the
  last child of its predecessor, and
* the right chain G(1), G(2), ... of cells [zeta, zeta + |I|/q^k), each the
  first child of its predecessor.

Step 1 gives I's children the weight factors (a, ..., a, a, b), the last
two being H(1) and G(1).  During steps 2..alpha (phase one) each H cell
gives factor b to its first child and a to the rest (so the chain itself
continues with a), while each G cell gives b to its continuation child and
a to the rest.  During steps alpha+1..2*alpha (phase two) the roles swap:
H continues with factor b (all other children get a) and G continues with
a (its last child gets b, the middle ones a).  The subdivision stops at
step 2*alpha; the two surviving chain cells H(2*alpha) and G(2*alpha) are
adjacent at zeta with equal density a^alpha * b^alpha, and the measure is
a constant multiple a^x * b^y of length inside every resulting piece.
Consequently

    mu(H(k)) = a^k |I| / q^k                     for k <= alpha,
    mu(H(alpha+j)) = a^alpha b^j |I| / q^(alpha+j)   for 0 <= j <= alpha,

and symmetrically with a and b swapped for G(k).  The two sides reach
depth alpha with ratio mu(H(alpha)) / mu(G(alpha)) = (a/b)^alpha, which is
what breaks the doubling property at zeta as alpha grows.

``DoublingMeasure`` glues finitely many block measures over disjoint roots
onto Lebesgue measure on the rest of [0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InvariantViolation
from .geometry import AdicInterval, SelectionFamily
from . import kernels

__all__ = [
    "WeightPair",
    "default_weights",
    "BlockSpec",
    "Region",
    "RegionMap",
    "BlockMeasure",
    "DoublingMeasure",
    "build_block",
    "assemble_global",
    "density_at",
    "measure_of",
    "chain_mass_factors",
]

# Walk states: ("root",) at the block root, ("H", k) in the k-th left-chain
# cell, ("G", k) in the k-th right-chain cell, and None once the cell is a
# finished piece of constant density.
_ROOT = ("root",)


@dataclass(frozen=True)
class WeightPair:
    """Redistribution weights a < 1 < b with (q-1)*a + b == q."""

    q: int
    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.q < 2:
            raise DomainError(f"weight base must be >= 2, got {self.q}")
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (0 < a < 1 < b):
            raise DomainError(f"weights must satisfy 0 < a < 1 < b, got a={a}, b={b}")
        if (self.q - 1) * a + b != self.q:
            raise DomainError(
                f"weights must satisfy (q-1)*a + b == q, got "
                f"(q-1)*{a} + {b} != {self.q}"
            )

    def monomial(self, x: int, y: int) -> Fraction:
        return self.a**x * self.b**y


def default_weights(q: int) -> WeightPair:
    """The canonical weights a = (2q-1)/(2q), b = q - (q-1)*a = (3q-1)/(2q)."""
    a = Fraction(2 * q - 1, 2 * q)
    return WeightPair(q=q, a=a, b=q - (q - 1) * a)


@dataclass(frozen=True)
class BlockSpec:
    """One redistribution block: root cell, depth parameter, weights."""

    I: AdicInterval
    alpha: int
    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.alpha < 1:
            raise DomainError(f"alpha must be >= 1, got {self.alpha}")
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        WeightPair(self.I.base, self.a, self.b)  # validates the constraint

    @property
    def weights(self) -> WeightPair:
        return WeightPair(self.I.base, self.a, self.b)


def _step(q: int, alpha: int, state, digit: int):
    """Advance the walk into child ``digit`` (0-based).

    Returns (new_state, dx, dy): the child's state (None when the child is
    a finished piece) and the exponent increments of the monomial a^x b^y.
    The walk never descends past chain depth 2*alpha.
    """
    if state == _ROOT:
        if digit == q - 2:
            return ("H", 1), 1, 0
        if digit == q - 1:
            return ("G", 1), 0, 1
        return None, 1, 0
    kind, k = state
    if k >= 2 * alpha:  # subdivision stopped; the tail is uniform
        return None, 0, 0
    phase_one = k < alpha
    if kind == "H":
        if phase_one:
            if digit == q - 1:
                return ("H", k + 1), 1, 0
            if digit == 0:
                return None, 0, 1
            return None, 1, 0
        if digit == q - 1:
            return ("H", k + 1), 0, 1
        return None, 1, 0
    if kind == "G":
        if phase_one:
            if digit == 0:
                return ("G", k + 1), 0, 1
            return None, 1, 0
        if digit == 0:
            return ("G", k + 1), 1, 0
        if digit == q - 1:
            return None, 0, 1
        return None, 1, 0
    raise InvariantViolation("unknown walk state", witness=state)


def chain_mass_factors(q: int, alpha: int, a: Fraction, b: Fraction, k: int):
    """(mu(H(k))/|I|, mu(G(k))/|I|) for chain cells, 1 <= k <= 2*alpha."""
    if not 1 <= k <= 2 * alpha:
        raise DomainError(f"chain depth must be in [1, {2 * alpha}], got {k}")
    a, b = Fraction(a), Fraction(b)
    scale = Fraction(1, q**k)
    if k <= alpha:
        return a**k * scale, b**k * scale
    j = k - alpha
    return a**alpha * b**j * scale, b**alpha * a**j * scale


class BlockMeasure:
    """The redistributed measure on one block root, queried exactly."""

    def __init__(self, root: AdicInterval, alpha: int, weights: WeightPair):
        if weights.q != root.base:
            raise DomainError(
                f"weight base {weights.q} must match the block base {root.base}"
            )
        if alpha < 1:
            raise DomainError(f"alpha must be >= 1, got {alpha}")
        self.root = root
        self.alpha = alpha
        self.weights = weights

    @property
    def q(self) -> int:
        return self.root.base

    @property
    def spec(self) -> BlockSpec:
        return BlockSpec(self.root, self.alpha, self.weights.a, self.weights.b)

    @property
    def total_mass(self) -> Fraction:
        return self.root.length

    # -- digit walks ---------------------------------------------------

    def _digits_of(self, cell: AdicInterval) -> list[int]:
        """Base-q digits of cell's position below the root, depth-major."""
        root = self.root
        if cell.base != root.base or cell.depth < root.depth:
            raise DomainError("cell must be a descendant of the block root")
        rel_depth = cell.depth - root.depth
        offset = (cell.index - 1) - (root.index - 1) * self.q**rel_depth
        if not 0 <= offset < self.q**rel_depth:
            raise DomainError("cell must be a descendant of the block root")
        digits = []
        for _ in range(rel_depth):
            offset, d = divmod(offset, self.q)
            digits.append(d)
        digits.reverse()
        return digits

    def state_of_cell(self, cell: AdicInterval):
        """(walk state, x, y) for a descendant cell of the root."""
        state, x, y = _ROOT, 0, 0
        for d in self._digits_of(cell):
            if state is None:
                break
            state, dx, dy = _step(self.q, self.alpha, state, d)
            x += dx
            y += dy
        return state, x, y

    def exponents_of_cell(self, cell: AdicInterval) -> tuple[int, int]:
        """The monomial exponents (x, y) with density a^x b^y on the cell.

        For chain cells this is the density of the chain cell itself (its
        mass divided by its length); finished pieces are genuinely uniform.
        """
        _, x, y = self.state_of_cell(cell)
        return x, y

    def cell_mass(self, cell: AdicInterval) -> Fraction:
        x, y = self.exponents_of_cell(cell)
        return self.weights.monomial(x, y) * cell.length

    def density_at(self, x: Fraction) -> tuple[int, int]:
        """Monomial exponents of the piece containing the point x."""
        x = Fraction(x)
        if not self.root.left <= x < self.root.right:
            raise DomainError("point outside the block root")
        cell, state, ex, ey = self.root, _ROOT, 0, 0
        while state is not None:
            scale = self.q ** (cell.depth + 1)
            child_index = (x * scale).__floor__() + 1
            digit = (child_index - 1) % self.q
            state, dx, dy = _step(self.q, self.alpha, state, digit)
            ex += dx
            ey += dy
            cell = AdicInterval(self.q, cell.depth + 1, child_index)
        return ex, ey

    # -- atoms (depth 2*alpha below the root) --------------------------

    @property
    def atom_count(self) -> int:
        return self.q ** (2 * self.alpha)

    def atom_interval(self, t: int) -> AdicInterval:
        if not 0 <= t < self.atom_count:
            raise DomainError(f"atom index {t} out of range")
        depth = self.root.depth + 2 * self.alpha
        index = (self.root.index - 1) * self.q ** (2 * self.alpha) + t + 1
        return AdicInterval(self.q, depth, index)

    def atom_exponents(self, t: int) -> tuple[int, int]:
        if not 0 <= t < self.atom_count:
            raise DomainError(f"atom index {t} out of range")
        return kernels.atom_weight_exponents(self.q, self.alpha, t)

    def atom_mass(self, t: int) -> Fraction:
        x, y = self.atom_exponents(t)
        return (
            self.weights.monomial(x, y)
            * Fraction(1, self.q ** (2 * self.alpha))
            * self.root.length
        )

    def atom_histogram(self, t0: int, t1: int) -> dict[tuple[int, int], int]:
        """Counts of weight monomials over the atom index range [t0, t1)."""
        if not 0 <= t0 <= t1 <= self.atom_count:
            raise DomainError(f"atom range [{t0}, {t1}) out of bounds")
        flat = kernels.atom_histogram(self.q, self.alpha, t0, t1)
        side = self.alpha + 2
        out = {}
        for x in range(side):
            for y in range(side):
                c = flat[x * side + y]
                if c:
                    out[(x, y)] = c
        return out

    def range_mass(self, t0: int, t1: int) -> Fraction:
        """Exact mass of the union of atoms with indices in [t0, t1)."""
        hist = self.atom_histogram(t0, t1)
        unit = Fraction(1, self.q ** (2 * self.alpha)) * self.root.length
        return sum(
            (self.weights.monomial(x, y) * c * unit for (x, y), c in hist.items()),
            Fraction(0),
        )

    # -- exact interval queries ---------------------------------------

    def measure_of(self, lo: Fraction, hi: Fraction) -> Fraction:
        """mu([lo, hi)), exact; the query is clipped to the block root."""
        lo = max(Fraction(lo), self.root.left)
        hi = min(Fraction(hi), self.root.right)
        if lo >= hi:
            return Fraction(0)
        return self._recurse(self.root, _ROOT, 0, 0, lo, hi)

    def _recurse(self, cell, state, x, y, lo, hi):
        if hi <= cell.left or cell.right <= lo:
            return Fraction(0)
        weight = self.weights.monomial(x, y)
        if lo <= cell.left and cell.right <= hi:
            # mass preservation: holds for chain cells and pieces alike
            return weight * cell.length
        if state is None:
            seg = min(hi, cell.right) - max(lo, cell.left)
            return weight * seg
        total = Fraction(0)
        for digit, child in enumerate(cell.children()):
            if hi <= child.left or child.right <= lo:
                continue
            nstate, dx, dy = _step(self.q, self.alpha, state, digit)
            total += self._recurse(child, nstate, x + dx, y + dy, lo, hi)
        return total

    def integral_of(self, lo: Fraction, hi: Fraction, piece_value) -> object:
        """Integral over [lo, hi) of the piecewise-constant function whose
        value on a piece with monomial (x, y) is ``piece_value(x, y)``.

        ``piece_value`` may return exact rationals or enclosure objects;
        the result is the corresponding sum of value * overlap-length.
        """
        lo = max(Fraction(lo), self.root.left)
        hi = min(Fraction(hi), self.root.right)
        if lo >= hi:
            return Fraction(0)
        return self._recurse_value(self.root, _ROOT, 0, 0, lo, hi, piece_value)

    def _recurse_value(self, cell, state, x, y, lo, hi, piece_value):
        if hi <= cell.left or cell.right <= lo:
            return Fraction(0)
        if state is None:
            seg = min(hi, cell.right) - max(lo, cell.left)
            return piece_value(x, y) * seg
        total = Fraction(0)
        for digit, child in enumerate(cell.children()):
            if hi <= child.left or child.right <= lo:
                continue
            nstate, dx, dy = _step(self.q, self.alpha, state, digit)
            total += self._recurse_value(child, nstate, x + dx, y + dy, lo, hi, piece_value)
        return total

    def constant_on(self, lo: Fraction, hi: Fraction) -> bool:
        """True when [lo, hi) provably lies inside one constant piece."""
        from .geometry import smallest_containing

        cell = smallest_containing(self.q, (lo, hi))
        if cell.depth < self.root.depth or not self.root.contains_bounds(*cell.bounds):
            return False
        state, _, _ = self.state_of_cell(cell)
        return state is None

    # -- region decomposition ------------------------------------------

    def pieces(self) -> tuple["Region", ...]:
        """All finished pieces plus the two depth-2*alpha chain tails."""
        out = []
        cap = 2 * self.alpha

        def visit(cell, state, x, y, depth):
            for digit, child in enumerate(cell.children()):
                nstate, dx, dy = _step(self.q, self.alpha, state, digit)
                cx, cy = x + dx, y + dy
                mass = self.weights.monomial(cx, cy) * child.length
                if nstate is None:
                    out.append(Region(child, cx, cy, "interior", mass))
                elif depth == cap:
                    kind = "left_tail" if nstate[0] == "H" else "right_tail"
                    out.append(Region(child, cx, cy, kind, mass))
                else:
                    visit(child, nstate, cx, cy, depth + 1)

        visit(self.root, _ROOT, 0, 0, 1)
        out.sort(key=lambda r: r.interval.left)
        return tuple(out)


@dataclass(frozen=True)
class Region:
    """A maximal cell on which the measure is a constant multiple of length."""

    interval: AdicInterval
    x: int
    y: int
    kind: str  # "interior", "left_tail", or "right_tail"
    mass: Fraction


class RegionMap:
    """The finished-piece decomposition of one block, with named chains.

    ``pieces`` partition the block root; ``left_chain(k)``/``right_chain(k)``
    give the chain cells for k = 1..2*alpha; ``left_shell(k)``/
    ``right_shell(k)`` give the pieces that a chain cell sheds at step k+1
    (shell k is chain cell k minus chain cell k+1; shell 0 is the part of
    the root left of both chains, which is empty when q = 2).
    """

    def __init__(self, block: BlockMeasure):
        self.block = block
        self.pieces = block.pieces()
        q, alpha = block.q, block.alpha
        root = block.root
        left = [root.child(q - 1)] if q >= 2 else []
        right = [root.child(q)]
        for k in range(1, 2 * alpha):
            left.append(left[-1].child(q))
            right.append(right[-1].child(1))
        self._left_chain = tuple(left)
        self._right_chain = tuple(right)
        self._validate()

    @property
    def spec(self) -> BlockSpec:
        return self.block.spec

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        pts = [p.interval.left for p in self.pieces]
        pts.append(self.block.root.right)
        return tuple(pts)

    def left_chain(self, k: int) -> AdicInterval:
        """The k-th left-chain cell [zeta - |I|/q^k, zeta), 1 <= k <= 2*alpha."""
        if not 1 <= k <= 2 * self.block.alpha:
            raise DomainError(f"chain index {k} out of range")
        return self._left_chain[k - 1]

    def right_chain(self, k: int) -> AdicInterval:
        """The k-th right-chain cell [zeta, zeta + |I|/q^k)."""
        if not 1 <= k <= 2 * self.block.alpha:
            raise DomainError(f"chain index {k} out of range")
        return self._right_chain[k - 1]

    def left_shell(self, k: int) -> tuple[Region, ...]:
        """Pieces of left-chain cell k not in cell k+1 (k = 0..2*alpha-1)."""
        if not 0 <= k <= 2 * self.block.alpha - 1:
            raise DomainError(f"shell index {k} out of range")
        if k == 0:
            lo, hi = self.block.root.left, self.left_chain(1).left
        else:
            lo, hi = self.left_chain(k).left, self.left_chain(k + 1).left
        return tuple(
            p for p in self.pieces if lo <= p.interval.left and p.interval.right <= hi
        )

    def right_shell(self, k: int) -> tuple[Region, ...]:
        """Pieces of right-chain cell k not in cell k+1 (k = 0..2*alpha-1)."""
        if not 0 <= k <= 2 * self.block.alpha - 1:
            raise DomainError(f"shell index {k} out of range")
        if k == 0:
            return ()
        lo, hi = self.right_chain(k + 1).right, self.right_chain(k).right
        return tuple(
            p for p in self.pieces if lo <= p.interval.left and p.interval.right <= hi
        )

    def chain_masses(self, k: int) -> tuple[Fraction, Fraction]:
        w = self.block.weights
        h, g = chain_mass_factors(w.q, self.block.alpha, w.a, w.b, k)
        return h * self.block.root.length, g * self.block.root.length

    def _validate(self):
        root = self.block.root
        alpha = self.block.alpha
        q = self.block.q
        cursor = root.left
        total = Fraction(0)
        for p in self.pieces:
            if p.interval.left != cursor:
                raise InvariantViolation("pieces must tile the root without gaps")
            cursor = p.interval.right
            total += p.mass
        if cursor != root.right or total != root.length:
            raise InvariantViolation("pieces must partition the root and conserve mass")
        if len(self.pieces) > (q - 2) + (2 * alpha - 1) * 2 * (q - 1) + q + 2:
            raise InvariantViolation("piece count exceeds the expected linear bound")
        # the two surviving tails are adjacent at zeta with equal density
        tails = [p for p in self.pieces if p.kind in ("left_tail", "right_tail")]
        if len(tails) != 2:
            raise InvariantViolation("expected exactly two chain tails")
        lt = next(p for p in tails if p.kind == "left_tail")
        rt = next(p for p in tails if p.kind == "right_tail")
        zeta = root.zeta
        if lt.interval.right != zeta or rt.interval.left != zeta:
            raise InvariantViolation("chain tails must be adjacent at zeta")
        if (lt.x, lt.y) != (alpha, alpha) or (rt.x, rt.y) != (alpha, alpha):
            raise InvariantViolation("chain tails must have density a^alpha * b^alpha")
        # chain-cell masses match their closed forms
        for k in range(1, 2 * alpha + 1):
            h_cell, g_cell = self._left_chain[k - 1], self._right_chain[k - 1]
            h_mass, g_mass = self.chain_masses(k)
            if self.block.measure_of(*h_cell.bounds) != h_mass:
                raise InvariantViolation("left-chain mass mismatch", witness=k)
            if self.block.measure_of(*g_cell.bounds) != g_mass:
                raise InvariantViolation("right-chain mass mismatch", witness=k)


def build_block(spec: BlockSpec) -> RegionMap:
    """Run the redistribution for one block and return its verified pieces."""
    return RegionMap(BlockMeasure(spec.I, spec.alpha, spec.weights))


class DoublingMeasure:
    """Finitely many block measures glued onto Lebesgue measure on [0, 1)."""

    def __init__(
        self,
        weights: WeightPair,
        blocks: list[BlockMeasure] | tuple,
        family: SelectionFamily | None = None,
    ):
        self.weights = weights
        blocks = tuple(blocks)
        for blk in blocks:
            if blk.weights != weights:
                raise DomainError("all blocks must share the measure's weights")
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if not blocks[i].root.disjoint_from(blocks[j].root):
                    raise InvariantViolation("block roots must be pairwise disjoint")
        self.blocks = blocks
        self.family = family

    @classmethod
    def from_family(
        cls, family: SelectionFamily, weights: WeightPair | None = None
    ) -> "DoublingMeasure":
        w = weights if weights is not None else default_weights(family.q)
        if w.q != family.q:
            raise DomainError("weight base must match the family base")
        return cls(
            w, [BlockMeasure(b.interval, b.alpha, w) for b in family.blocks], family
        )

    @classmethod
    def single_block(
        cls,
        q: int,
        alpha: int,
        weights: WeightPair | None = None,
        root: AdicInterval | None = None,
    ) -> "DoublingMeasure":
        w = weights if weights is not None else default_weights(q)
        r = root if root is not None else AdicInterval(q, 0, 1)
        return cls(w, [BlockMeasure(r, alpha, w)])

    @classmethod
    def lebesgue(cls, q: int = 2) -> "DoublingMeasure":
        return cls(default_weights(q), [])

    def region_maps(self) -> tuple[RegionMap, ...]:
        return tuple(RegionMap(blk) for blk in self.blocks)

    def measure_of(self, lo: Fraction, hi: Fraction) -> Fraction:
        """mu([lo, hi) intersected with [0, 1)), exact."""
        lo = max(Fraction(lo), Fraction(0))
        hi = min(Fraction(hi), Fraction(1))
        if lo >= hi:
            return Fraction(0)
        total = hi - lo
        for blk in self.blocks:
            cl = max(lo, blk.root.left)
            ch = min(hi, blk.root.right)
            if cl < ch:
                total += blk.measure_of(cl, ch) - (ch - cl)
        return total

    def integral_of(self, lo: Fraction, hi: Fraction, piece_value, unit_value):
        """Integral of the piecewise function valued ``piece_value(x, y)``
        on block pieces and ``unit_value`` on the Lebesgue background."""
        lo = max(Fraction(lo), Fraction(0))
        hi = min(Fraction(hi), Fraction(1))
        if lo >= hi:
            return Fraction(0)
        total = unit_value * (hi - lo)
        for blk in self.blocks:
            cl = max(lo, blk.root.left)
            ch = min(hi, blk.root.right)
            if cl < ch:
                total += blk.integral_of(cl, ch, piece_value) - unit_value * (ch - cl)
        return total

    def density_at(self, x: Fraction) -> tuple[int, int]:
        """Monomial exponents of the density at x ((0, 0) on background)."""
        x = Fraction(x)
        if not 0 <= x < 1:
            raise DomainError(f"point must lie in [0, 1), got {x}")
        for blk in self.blocks:
            if blk.root.contains_point(x):
                return blk.density_at(x)
        return (0, 0)

    def density_value_at(self, x: Fraction) -> Fraction:
        ex, ey = self.density_at(x)
        return self.weights.monomial(ex, ey)

    def constant_density_on(self, lo: Fraction, hi: Fraction) -> bool:
        """Conservative: True only when [lo, hi) provably has one density."""
        lo = max(Fraction(lo), Fraction(0))
        hi = min(Fraction(hi), Fraction(1))
        if lo >= hi:
            return True
        touching = [
            blk for blk in self.blocks if lo < blk.root.right and blk.root.left < hi
        ]
        if not touching:
            return True
        if len(touching) > 1:
            return False
        blk = touching[0]
        if not (blk.root.left <= lo and hi <= blk.root.right):
            return False
        return blk.constant_on(lo, hi)


def assemble_global(
    family: SelectionFamily,
    a: Fraction | None = None,
    b: Fraction | None = None,
) -> DoublingMeasure:
    """Measure with one redistribution block per family block."""
    if (a is None) != (b is None):
        raise DomainError("provide both weights or neither")
    w = default_weights(family.q) if a is None else WeightPair(family.q, a, b)
    return DoublingMeasure.from_family(family, w)


def measure_of(measure: DoublingMeasure, interval) -> Fraction:
    """mu([left, right)), exact; inverted intervals are a domain error."""
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if lo > hi:
        raise DomainError(f"inverted interval [{lo}, {hi}]")
    return measure.measure_of(lo, hi)


def density_at(measure: DoublingMeasure, x: Fraction) -> tuple[int, int]:
    """Monomial exponents of the density at x ((0, 0) on background)."""
    return measure.density_at(x)
