"""Base-n interval grids, distinguished points, and two-grid selection.

An ``AdicInterval`` is a half-open cell [(k-1)/n^m, k/n^m) of the base-n
grid on [0, 1).  For a cell I, the two distinguished points are

* ``upsilon(I)`` -- the right endpoint of I's first child, and
* ``zeta(I)``    -- the left endpoint of I's last child.

The selection machinery produces a base-q cell I whose zeta point lies just
left of a grid point of a coarser prime grid -- so close that the smallest
p-adic interval J containing I has its upsilon point inside I, with
0 < upsilon(J) - zeta(I) <= epsilon * |I|.  ``select_pair`` realizes the
single-prime case with the exact alignment identity
k * q^(m2*(p-1)) - j * p^(m1*(q-1)) == 1; ``select_family`` builds a
truncated family of such blocks, simultaneously for several primes.

The simultaneous (multi-prime) case asks for an integer j such that the
residue (-j * p_i^{N_i}) mod q^T is small and lies in a fixed class modulo
p_i, for every prime at once, while j/q^T stays inside a prescribed host
window.  That is a bounded closest-vector problem in dimension
(number of primes + 1); it is solved here with an exact-arithmetic LLL
reduction followed by Babai rounding and a small local enumeration.  The
search only ever proposes candidates -- every returned block is verified
against the required identities with exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd, lcm

from .errors import DomainError, InvariantViolation, ResourceError
from .ntheory import (
    DEFAULT_BIT_BUDGET,
    DEFAULT_RESULT_BIT_BUDGET,
    PairSolution,
    PrimePair,
    checked_power,
    is_prime,
    p_power_order,
    stabilization_profile,
)

__all__ = [
    "AdicInterval",
    "SelectionResult",
    "FamilyBlock",
    "SelectionFamily",
    "children",
    "distinguished_points",
    "smallest_containing",
    "select_pair",
    "select_family",
]


@dataclass(frozen=True)
class AdicInterval:
    """The half-open cell [(index-1)/base^depth, index/base^depth)."""

    base: int
    depth: int
    index: int

    def __post_init__(self):
        if self.base < 2:
            raise DomainError(f"interval base must be >= 2, got {self.base}")
        if self.depth < 0:
            raise DomainError(f"interval depth must be >= 0, got {self.depth}")
        if not 1 <= self.index <= self.base**self.depth:
            raise DomainError(
                f"interval index {self.index} out of range for base {self.base}, "
                f"depth {self.depth}"
            )

    @property
    def left(self) -> Fraction:
        return Fraction(self.index - 1, self.base**self.depth)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index, self.base**self.depth)

    @property
    def length(self) -> Fraction:
        return Fraction(1, self.base**self.depth)

    @property
    def bounds(self) -> tuple[Fraction, Fraction]:
        return (self.left, self.right)

    @property
    def upsilon(self) -> Fraction:
        """Right endpoint of the first child."""
        return self.left + Fraction(1, self.base ** (self.depth + 1))

    @property
    def zeta(self) -> Fraction:
        """Left endpoint of the last child."""
        return self.left + Fraction(self.base - 1, self.base ** (self.depth + 1))

    def child(self, i: int) -> "AdicInterval":
        """The i-th child, 1-based from the left."""
        if not 1 <= i <= self.base:
            raise DomainError(f"child index must be in [1, {self.base}], got {i}")
        return AdicInterval(self.base, self.depth + 1, (self.index - 1) * self.base + i)

    def children(self) -> tuple["AdicInterval", ...]:
        return tuple(self.child(i) for i in range(1, self.base + 1))

    def parent(self) -> "AdicInterval":
        if self.depth == 0:
            raise DomainError("the root interval has no parent")
        return AdicInterval(self.base, self.depth - 1, (self.index - 1) // self.base + 1)

    def contains_point(self, x: Fraction) -> bool:
        return self.left <= x < self.right

    def contains_bounds(self, lo: Fraction, hi: Fraction) -> bool:
        """Whether [lo, hi) is a subset of this interval."""
        return self.left <= lo and hi <= self.right

    def disjoint_from(self, other: "AdicInterval") -> bool:
        return self.right <= other.left or other.right <= self.left

    def to_json_dict(self) -> dict:
        return {"base": self.base, "depth": self.depth, "index": self.index}

    @staticmethod
    def from_json_dict(d: dict) -> "AdicInterval":
        return AdicInterval(int(d["base"]), int(d["depth"]), int(d["index"]))


def children(interval: AdicInterval) -> list[AdicInterval]:
    """The base subcells of the next depth, left to right."""
    return list(interval.children())


def distinguished_points(interval: AdicInterval) -> tuple[Fraction, Fraction]:
    """(upsilon, zeta): first-child right endpoint, last-child left endpoint."""
    return (interval.upsilon, interval.zeta)


def smallest_containing(base: int, interval: tuple[Fraction, Fraction]) -> AdicInterval:
    """The deepest base-adic cell of [0,1) containing [left, right).

    If the target is itself a base-adic cell, that cell is returned.
    """
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    if not (0 <= lo < hi <= 1):
        raise DomainError(f"target must satisfy 0 <= left < right <= 1, got [{lo}, {hi})")
    current = AdicInterval(base, 0, 1)
    while True:
        d = current.depth + 1
        scale = base**d
        child_index = floor(lo * scale) + 1
        if Fraction(child_index, scale) < hi:
            return current
        current = AdicInterval(base, d, child_index)


def _largest_adic_inside(base: int, lo: Fraction, hi: Fraction) -> AdicInterval:
    """Shallowest base-adic cell within [lo, hi]; leftmost on ties."""
    depth = 0
    while True:
        scale = base**depth
        first = lo * scale
        i_min = -(-first.numerator // first.denominator) + 1  # least i with (i-1)/scale >= lo
        last = hi * scale
        i_max = last.numerator // last.denominator  # greatest i with i/scale <= hi
        if i_min <= i_max:
            return AdicInterval(base, depth, i_min)
        depth += 1


@dataclass(frozen=True)
class SelectionResult:
    """A verified two-grid alignment pair (I, J).

    I is base-q, J is base-p, J is the smallest p-adic interval containing
    I, and 0 < upsilon(J) - zeta(I) = gap <= epsilon * |I| -- all re-checked
    exactly on construction.
    """

    pair: PrimePair
    target: tuple[Fraction, Fraction]
    epsilon: Fraction
    I: AdicInterval
    J: AdicInterval
    upsilon: Fraction
    zeta: Fraction
    gap: Fraction
    solution: PairSolution
    guards_enforced: bool = True

    def __post_init__(self):
        p, q = self.pair.p, self.pair.q
        if self.I.base != q or self.J.base != p:
            raise InvariantViolation(
                "selection interval bases must match the prime pair",
                witness=(self.I.base, self.J.base),
            )
        if self.upsilon != self.J.upsilon or self.zeta != self.I.zeta:
            raise InvariantViolation("distinguished points inconsistent with intervals")
        if self.gap != self.upsilon - self.zeta:
            raise InvariantViolation("gap must equal upsilon - zeta", witness=self.gap)
        sol = self.solution
        expected_gap = Fraction(
            1, p ** (sol.m1 * (q - 1)) * q ** (sol.m2 * (p - 1))
        )
        if self.gap != expected_gap:
            raise InvariantViolation(
                "gap must equal 1/(p^(m1(q-1)) * q^(m2(p-1)))",
                witness=(self.gap, expected_gap),
            )
        if self.gap <= 0:
            raise InvariantViolation("gap must be positive", witness=self.gap)
        if not (self.J.contains_bounds(*self.I.bounds) and self.I.bounds != self.J.bounds):
            raise InvariantViolation("I must be a proper subset of J")
        if smallest_containing(p, self.I.bounds) != self.J:
            raise InvariantViolation("J must be the smallest p-adic interval containing I")
        if self.gap > self.epsilon * self.I.length:
            raise InvariantViolation(
                "gap must be at most epsilon * |I|",
                witness=(self.gap, self.epsilon * self.I.length),
            )
        lo, hi = self.target
        if not (lo <= self.J.left and self.J.right <= hi):
            raise InvariantViolation("J must lie inside the requested target window")
        if self.guards_enforced and not (self.I.left < self.upsilon < self.I.right):
            raise InvariantViolation("upsilon(J) must be interior to I")


def select_pair(
    p: int,
    q: int,
    target: tuple[Fraction, Fraction],
    epsilon: Fraction,
    *,
    enforce_guards: bool = True,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    result_bit_budget: int = DEFAULT_RESULT_BIT_BUDGET,
    max_m1_retries: int = 64,
) -> SelectionResult:
    """Produce a verified alignment pair (I, J) with I inside ``target``.

    Procedure: J' is the largest q-adic cell inside the target (leftmost on
    ties).  The coarse depth m1 is the least integer exceeding the
    stabilization threshold m(p,q)/(q-1) and depth(J') whose grid satisfies
    p^(-m1(q-1)) < epsilon*q.  The fine exponent m2 is then the least value
    (subject to the size guard q^(m2(p-1)) > 10*q*p^(m1(q-1))) for which
    the aligned grid point k/p^(m1(q-1)), k = (q^(p-1))^(-m2) mod
    p^(m1(q-1)), falls inside J' with J = [(k-1)/p^(m1(q-1)),
    (k+p-1)/p^(m1(q-1))) contained in J'.  Searching on m2 first keeps the
    fine depth m2*(p-1) small; picking a k first and solving for m2 would
    make m2 comparable to the multiplicative-order stride, which is
    astronomically large on deep grids.

    With ``enforce_guards=False`` (test harnesses only) the threshold and
    size guards are dropped, admitting the shallowest instances.
    """
    pair = PrimePair(p, q)
    lo, hi = Fraction(target[0]), Fraction(target[1])
    if not (0 <= lo < hi <= 1):
        raise DomainError(f"target must satisfy 0 <= left < right <= 1, got [{lo}, {hi}]")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    profile = stabilization_profile(pair, bit_budget=bit_budget)
    j_prime = _largest_adic_inside(q, lo, hi)
    m1 = j_prime.depth + 1
    if enforce_guards:
        m1 = max(m1, profile.m_pq // (q - 1) + 1)
    while Fraction(1, checked_power(p, m1 * (q - 1), bit_budget)) >= epsilon * q:
        m1 += 1
    for _ in range(max_m1_retries):
        found = _try_select(
            pair, m1, j_prime, enforce_guards, bit_budget, result_bit_budget
        )
        if found is not None:
            k, m2, stride = found
            modulus = p ** (m1 * (q - 1))
            t_exp = m2 * (p - 1)
            power = q**t_exp
            j = (k * power - 1) // modulus
            solution = PairSolution(pair=pair, m1=m1, k=k, m2=m2, j=j, stride=stride)
            interval_i = AdicInterval(q, t_exp - 1, (j + 1) // q)
            interval_j = AdicInterval(p, m1 * (q - 1) - 1, (k - 1) // p + 1)
            return SelectionResult(
                pair=pair,
                target=(lo, hi),
                epsilon=epsilon,
                I=interval_i,
                J=interval_j,
                upsilon=interval_j.upsilon,
                zeta=interval_i.zeta,
                gap=interval_j.upsilon - interval_i.zeta,
                solution=solution,
                guards_enforced=enforce_guards,
            )
        m1 += 1
    raise ResourceError(
        f"selection for (p, q) = ({p}, {q}) found no aligned grid point inside the "
        f"window after {max_m1_retries} coarse-depth retries"
    )


def _try_select(pair, m1, j_prime, enforce_guards, bit_budget, result_bit_budget):
    """One coarse depth attempt: scan m2 upward for a well-placed k."""
    p, q = pair.p, pair.q
    n_exp = m1 * (q - 1)
    modulus = checked_power(p, n_exp, bit_budget)
    g = pow(q, p - 1, modulus)
    stride = p_power_order(g, modulus, p)
    if enforce_guards:
        bound = 10 * q * modulus
        m2_min = 1
        step = q ** (p - 1)
        val = step
        while val <= bound:
            val *= step
            m2_min += 1
    else:
        m2_min = 1
    if m2_min * (p - 1) * q.bit_length() > result_bit_budget:
        raise ResourceError("fine-grid exponent exceeds the result bit budget")
    g_inv = pow(g, -1, modulus)
    k = pow(g_inv, m2_min, modulus)
    lo, hi = j_prime.left, j_prime.right
    cap = min(stride, 32 * pair.q**j_prime.depth + 4096)
    for offset in range(cap):
        m2 = m2_min + offset
        if (
            k + p - 1 <= modulus
            and lo <= Fraction(k - 1, modulus)
            and Fraction(k + p - 1, modulus) <= hi
        ):
            return k, m2, stride
        k = k * g_inv % modulus
    return None


@dataclass(frozen=True)
class FamilyBlock:
    """One block of a selection family.

    ``interval`` is the base-q block cell I; ``containers[i]`` is the
    smallest base-primes[i] cell containing I, with its individual
    ``gaps[i]`` = upsilon(containers[i]) - zeta(I); ``gap`` is the largest
    of those (the one the epsilon budget must cover).  All identities are
    re-verified exactly on construction.
    """

    primes: tuple[int, ...]
    interval: AdicInterval
    containers: tuple[AdicInterval, ...]
    gaps: tuple[Fraction, ...]
    gap: Fraction
    alpha: int
    epsilon: Fraction
    host: AdicInterval

    def __post_init__(self):
        if len(self.containers) != len(self.primes) or len(self.gaps) != len(self.primes):
            raise InvariantViolation("per-prime container/gap lists must align with primes")
        zeta = self.interval.zeta
        for prime, container, gap_i in zip(self.primes, self.containers, self.gaps):
            if container.base != prime:
                raise InvariantViolation(
                    "container base mismatch", witness=(prime, container.base)
                )
            if smallest_containing(prime, self.interval.bounds) != container:
                raise InvariantViolation(
                    "container must be the smallest prime-adic interval containing I",
                    witness=prime,
                )
            if container.upsilon - zeta != gap_i:
                raise InvariantViolation(
                    "stored per-prime gap disagrees with upsilon - zeta", witness=prime
                )
            if not 0 < gap_i <= self.epsilon * self.interval.length:
                raise InvariantViolation(
                    "per-prime gap outside (0, epsilon*|I|]", witness=(prime, gap_i)
                )
            if not (self.interval.left < container.upsilon < self.interval.right):
                raise InvariantViolation(
                    "container upsilon must be interior to I", witness=prime
                )
            if not self.host.contains_bounds(*container.bounds):
                raise InvariantViolation(
                    "container must lie inside the block host", witness=prime
                )
        if self.gap != max(self.gaps):
            raise InvariantViolation("block gap must be the largest per-prime gap")
        if self.alpha < 1:
            raise InvariantViolation("alpha must be >= 1", witness=self.alpha)


@dataclass(frozen=True)
class SelectionFamily:
    """A truncated selection family: disjoint blocks over shared primes."""

    q: int
    primes: tuple[int, ...]
    gap_exponent: int
    guard_exponent: int
    blocks: tuple[FamilyBlock, ...]

    def __post_init__(self):
        for block in self.blocks:
            if block.primes != self.primes:
                raise InvariantViolation("all blocks must use the family prime set")
            if block.interval.base != self.q:
                raise InvariantViolation("block intervals must be base q")
        n = len(self.blocks)
        for a in range(n):
            for b in range(a + 1, n):
                if not self.blocks[a].host.disjoint_from(self.blocks[b].host):
                    raise InvariantViolation("hosts must be pairwise disjoint", witness=(a, b))
                for i in range(len(self.primes)):
                    if not self.blocks[a].containers[i].disjoint_from(
                        self.blocks[b].containers[i]
                    ):
                        raise InvariantViolation(
                            "per-prime containers must be pairwise disjoint",
                            witness=(self.primes[i], a, b),
                        )
                if not self.blocks[a].interval.disjoint_from(self.blocks[b].interval):
                    raise InvariantViolation("block intervals must be pairwise disjoint")


def _round_fraction(x: Fraction) -> int:
    """Nearest integer, ties toward +infinity (deterministic)."""
    return floor(x + Fraction(1, 2))


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _gram_schmidt(basis):
    n = len(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    ortho = []
    norms = []
    for i in range(n):
        v = list(basis[i])
        for j in range(i):
            if norms[j] == 0:
                coeff = Fraction(0)
            else:
                coeff = _dot(basis[i], ortho[j]) / norms[j]
            mu[i][j] = coeff
            v = [vi - coeff * oj for vi, oj in zip(v, ortho[j])]
        ortho.append(v)
        norms.append(_dot(v, v))
    return mu, ortho, norms


def _lll_reduce(basis, tags, max_iter=20000):
    """Exact LLL (delta = 3/4) on rows of ``basis``; ``tags`` follow along."""
    basis = [list(row) for row in basis]
    tags = [list(t) for t in tags]
    n = len(basis)
    delta = Fraction(3, 4)
    mu, ortho, norms = _gram_schmidt(basis)
    k = 1
    steps = 0
    while k < n:
        steps += 1
        if steps > max_iter:
            raise ResourceError("lattice reduction did not converge")
        changed = False
        for j in range(k - 1, -1, -1):
            r = _round_fraction(mu[k][j])
            if r != 0:
                basis[k] = [x - r * y for x, y in zip(basis[k], basis[j])]
                tags[k] = [x - r * y for x, y in zip(tags[k], tags[j])]
                changed = True
        if changed:
            mu, ortho, norms = _gram_schmidt(basis)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            tags[k], tags[k - 1] = tags[k - 1], tags[k]
            mu, ortho, norms = _gram_schmidt(basis)
            k = max(k - 1, 1)
    return basis, tags


def _babai(basis, target):
    """Coefficients of the nearest-plane lattice approximation to target."""
    n = len(basis)
    _, ortho, norms = _gram_schmidt(basis)
    coeffs = [0] * n
    t = list(target)
    for i in range(n - 1, -1, -1):
        if norms[i] == 0:
            c = 0
        else:
            c = _round_fraction(_dot(t, ortho[i]) / norms[i])
        coeffs[i] = c
        t = [x - c * y for x, y in zip(t, basis[i])]
    return coeffs


def _enumeration_offsets(n, radius):
    """All offset vectors in {-radius..radius}^n, nearest-first, deterministic."""
    offsets = [()]
    for _ in range(n):
        offsets = [o + (d,) for o in offsets for d in range(-radius, radius + 1)]
    return sorted(offsets, key=lambda o: (sum(abs(d) for d in o), o))


def _solve_alignment(q, primes, depths, t_exp, window, budgets, radius=2):
    """Find j with (-j*p_i^N_i) mod q^T in [1, B_i], == q^T (mod p_i), and
    j == -1 (mod q), j/q^T inside the window.  Returns j or None.
    """
    big_q = q**t_exp
    lo, hi = window
    p_pows = [p**n for p, n in zip(primes, depths)]
    c_list = [big_q % p for p in primes]
    # j = q*jj - 1; t_i = c_i + p_i*s_i; s_i = G_i - H_i*jj (mod big_q).
    g_list = [
        pp // p + (big_q - c) // p for p, pp, c in zip(primes, p_pows, c_list)
    ]
    h_list = [q * (pp // p) for p, pp in zip(primes, p_pows)]
    s_caps = [(b - c) // p for b, c, p in zip(budgets, c_list, primes)]
    if any(s < 4 for s in s_caps):
        return None
    # Integer range for jj from lo <= (q*jj - 1)/big_q <= hi:
    r_lo_f = (lo * big_q + 1) / q
    r_hi_f = (hi * big_q + 1) / q
    r_lo = -(-r_lo_f.numerator // r_lo_f.denominator)
    r_hi = r_hi_f.numerator // r_hi_f.denominator
    if r_lo > r_hi:
        return None
    m = len(primes)
    n = m + 1
    w0 = max(Fraction(r_hi - r_lo, 2), Fraction(1))
    w_list = [max(Fraction(s, 2), Fraction(1)) for s in s_caps]
    ctr0 = Fraction(r_lo + r_hi, 2)
    ctrs = [Fraction(s, 2) for s in s_caps]
    basis = []
    tags = []
    row = [Fraction(1) / w0] + [Fraction(-h) / w for h, w in zip(h_list, w_list)]
    basis.append(row)
    tags.append([1] + [0] * m)
    for i in range(m):
        row = [Fraction(0)] * n
        row[i + 1] = Fraction(big_q) / w_list[i]
        basis.append(row)
        tag = [0] * n
        tag[i + 1] = 1
        tags.append(tag)
    target = [ctr0 / w0] + [
        (ctr - Fraction(g)) / w for ctr, g, w in zip(ctrs, g_list, w_list)
    ]
    basis, tags = _lll_reduce(basis, tags)
    coeffs = _babai(basis, target)
    base_z = [0] * n
    for c, tag in zip(coeffs, tags):
        base_z = [z + c * t for z, t in zip(base_z, tag)]
    for offset in _enumeration_offsets(n, radius):
        z = list(base_z)
        for c, tag in zip(offset, tags):
            if c:
                z = [zi + c * ti for zi, ti in zip(z, tag)]
        jj = z[0]
        if not r_lo <= jj <= r_hi:
            continue
        ok = True
        for i in range(m):
            s_i = g_list[i] - h_list[i] * jj + big_q * z[i + 1]
            if not 0 <= s_i <= s_caps[i]:
                ok = False
                break
        if ok:
            return q * jj - 1
    return None


def _build_block(q, primes, profiles, host, epsilon, alpha, *, bit_budget, e_target=100000):
    """Size the grids, solve the alignment, and assemble a verified block."""
    m = len(primes)
    depths = []
    for p, profile in zip(primes, profiles):
        floor_val = 40 * p / (epsilon * q)
        n = max(profile.m_pq + 1, 2)
        while p**n < floor_val:
            n += 1
        depths.append(n)
    for _ in range(200):
        p_pows = [p**n for p, n in zip(primes, depths)]
        budgets = [floor(epsilon * q * pp) for pp in p_pows]
        if any(b < 8 * p for b, p in zip(budgets, primes)):
            i = min(range(m), key=lambda idx: p_pows[idx])
            depths[i] += 1
            continue
        t_exp = 1
        bound = 160 * q * max(p_pows)
        while q**t_exp <= bound:
            t_exp += 1
        big_q = q**t_exp
        if big_q.bit_length() > bit_budget or max(p_pows).bit_length() > bit_budget:
            raise ResourceError("selection family grids exceeded the bit budget")
        expect = (
            Fraction(host.length, 2)
            * big_q
            / q
            * _product(Fraction(b, p * big_q) for b, p in zip(budgets, primes))
        )
        if expect < e_target:
            i = min(range(m), key=lambda idx: p_pows[idx])
            depths[i] += 1
            continue
        margin = max(Fraction(p, pp) for p, pp in zip(primes, p_pows)) + Fraction(
            2 * q, big_q
        )
        window = (host.left + margin, host.right - margin)
        if window[0] >= window[1]:
            raise ResourceError("host too small for the selection margins")
        j = _solve_alignment(q, primes, depths, t_exp, window, budgets)
        if j is None:
            depths = [n + 1 for n in depths]
            continue
        return _verify_block(q, primes, depths, t_exp, j, host, epsilon, alpha, budgets)
    raise ResourceError(
        f"selection family block for primes {primes} did not converge within budget"
    )


def _product(items):
    out = Fraction(1)
    for x in items:
        out *= x
    return out


def _verify_block(q, primes, depths, t_exp, j, host, epsilon, alpha, budgets):
    big_q = q**t_exp
    if not (1 <= j < big_q and j % q == q - 1):
        raise InvariantViolation("alignment produced an invalid fine index", witness=j)
    interval = AdicInterval(q, t_exp - 1, (j + 1) // q)
    zeta = interval.zeta
    containers = []
    gaps = []
    for p, n, b in zip(primes, depths, budgets):
        pp = p**n
        t_i = (-j * pp) % big_q
        if t_i == 0 or t_i > b:
            raise InvariantViolation(
                "alignment residue outside its budget", witness=(p, t_i, b)
            )
        k_i = (j * pp + t_i) // big_q
        if (j * pp + t_i) % big_q != 0:
            raise InvariantViolation("alignment identity failed", witness=p)
        if k_i % p != 1 or not 1 <= k_i < pp:
            raise InvariantViolation("aligned index not in the class 1 mod p", witness=p)
        gap_i = Fraction(k_i, pp) - zeta
        if gap_i != Fraction(t_i, pp * big_q):
            raise InvariantViolation("per-prime gap identity failed", witness=p)
        container = AdicInterval(p, n - 1, (k_i - 1) // p + 1)
        containers.append(container)
        gaps.append(gap_i)
    return FamilyBlock(
        primes=tuple(primes),
        interval=interval,
        containers=tuple(containers),
        gaps=tuple(gaps),
        gap=max(gaps),
        alpha=alpha,
        epsilon=epsilon,
        host=host,
    )


def select_family(
    q: int,
    primes: list[int] | tuple[int, ...],
    count: int,
    alpha_schedule: list[int] | None = None,
    gap_exponent: int = 4,
    guard_exponent: int = 2,
    *,
    strict_paper: bool = False,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> SelectionFamily:
    """Build ``count`` disjoint verified blocks over the given prime set.

    Hosts are cells of the product-base grid, chosen greedily left to right
    at depth block-number + 1; block ``l`` uses gap budget
    epsilon_l = q^(-s*alpha_l) where s is the gap exponent (100 in
    strict-paper mode).  The constraint s*alpha >= 2*alpha + guard keeps
    every gap well below the block's finest redistribution cell.
    """
    if not is_prime(q):
        raise DomainError(f"base {q} must be prime")
    primes = tuple(primes)
    if not primes:
        raise DomainError("at least one comparison prime is required")
    if len(set(primes)) != len(primes):
        raise DomainError(f"comparison primes must be distinct, got {primes}")
    if q in primes:
        raise DomainError(f"the base prime {q} must not appear in the comparison set")
    pairs = [PrimePair(p, q) for p in primes]  # validates p > q and primality
    profiles = [stabilization_profile(pair, bit_budget=bit_budget) for pair in pairs]
    if count < 1:
        raise DomainError(f"block count must be >= 1, got {count}")
    if alpha_schedule is None:
        alphas = list(range(1, count + 1))
    else:
        alphas = [int(a) for a in alpha_schedule]
        if len(alphas) != count:
            raise DomainError(
                f"alpha schedule length {len(alphas)} must equal block count {count}"
            )
    s = 100 if strict_paper else gap_exponent
    if s < 1 or guard_exponent < 0:
        raise DomainError("gap exponent must be >= 1 and guard >= 0")
    for a in alphas:
        if a < 1:
            raise DomainError(f"alpha values must be >= 1, got {a}")
        if s * a < 2 * a + guard_exponent:
            raise DomainError(
                f"gap exponent too small: need s*alpha >= 2*alpha + guard, "
                f"got s={s}, alpha={a}, guard={guard_exponent}"
            )
    base_prod = _product_int(primes)
    blocks = []
    frontier = Fraction(0)
    for ell in range(1, count + 1):
        depth = ell + 1
        scale = base_prod**depth
        pos = frontier * scale
        if pos.denominator != 1:
            raise InvariantViolation("host frontier must be grid aligned", witness=frontier)
        host = AdicInterval(base_prod, depth, int(pos) + 1)
        alpha = alphas[ell - 1]
        epsilon = Fraction(1, q ** (s * alpha))
        block = _build_block(
            q, primes, profiles, host, epsilon, alpha, bit_budget=bit_budget
        )
        blocks.append(block)
        frontier = host.right
    return SelectionFamily(
        q=q,
        primes=primes,
        gap_exponent=s,
        guard_exponent=guard_exponent,
        blocks=tuple(blocks),
    )


def _product_int(items) -> int:
    out = 1
    for x in items:
        out *= x
    return out
