"""Multiplicative-order structure of one prime power modulo another.

Everything here is exact integer arithmetic.  The central objects:

* ``PrimePair(p, q)`` -- an ordered pair of distinct primes with p > q.
* ``stabilization_profile`` -- the first exponent at which q**(p-1) stops
  being congruent to 1 (``m_pq``), the order of q**(p-1) at that level
  (``p**n0``), and the defect ``c_pq = m_pq - n0``.  From the stabilization
  threshold on, the order of q**(p-1) modulo p**m equals p**(m - 1 - c_pq).
* ``admissible_k`` -- the arithmetic progression 1 mod p**(c_pq+1), exactly
  the right-hand factors k for which the two-grid alignment below is
  solvable.
* ``solve_pair`` -- given (m1, k), the least exponent m2 with
  ``k * q**(m2*(p-1)) - j * p**(m1*(q-1)) == 1`` for an integer j >= 1 with
  j == -1 (mod q); solutions recur with period ``stride``, the
  multiplicative order of q**(p-1) modulo p**(m1*(q-1)).

The discrete logarithm runs inside the cyclic p-group generated by
q**(p-1), lifting one base-p digit per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import DomainError, InvariantViolation, ResourceError

DEFAULT_BIT_BUDGET = 4096
DEFAULT_RESULT_BIT_BUDGET = 8_000_000
DEFAULT_VERIFY_WINDOW = 12

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PRIME_LIMIT = 1 << 64


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if not isinstance(n, int):
        raise DomainError(f"primality test expects an integer, got {type(n).__name__}")
    if n >= _PRIME_LIMIT:
        raise DomainError("primality test supports n < 2**64 only")
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n == w:
            return True
        if n % w == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def checked_power(base: int, exponent: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """base**exponent, refusing results whose bit size exceeds the budget."""
    if base < 2 or exponent < 0:
        raise DomainError(f"checked_power expects base >= 2, exponent >= 0, got {base}, {exponent}")
    if (base.bit_length() - 1) * exponent > bit_budget:
        raise ResourceError(
            f"{base}**{exponent} exceeds the {bit_budget}-bit budget"
        )
    result = base**exponent
    if result.bit_length() > bit_budget:
        raise ResourceError(
            f"{base}**{exponent} has {result.bit_length()} bits, over the {bit_budget}-bit budget"
        )
    return result


@dataclass(frozen=True)
class PrimePair:
    """Ordered pair of distinct primes with p > q."""

    p: int
    q: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")
        if not is_prime(self.q):
            raise DomainError(f"q = {self.q} is not prime")
        if self.p <= self.q:
            raise DomainError(f"require p > q, got p = {self.p}, q = {self.q}")


def p_power_order(g: int, modulus: int, p: int) -> int:
    """Order of g modulo ``modulus`` when that order is a power of p.

    Raises ``DomainError`` if repeated p-th powers never reach 1 (i.e. the
    order is not a p-power).
    """
    x = g % modulus
    e = 0
    # The order divides p**e_max with p**e_max <= modulus.
    cap = 1
    m = modulus
    while m > 1:
        m //= p
        cap += 1
    while x != 1:
        if e > cap:
            raise DomainError("element order is not a power of the given prime")
        x = pow(x, p, modulus)
        e += 1
    return p**e


@dataclass(frozen=True)
class StabilizationProfile:
    """Order profile of q**(p-1) in the p-power tower.

    ``m_pq`` is the largest m with q**(p-1) == 1 (mod p**m); ``n0`` is the
    exponent of the order of q**(p-1) modulo p**(m_pq+1); ``c_pq`` is the
    defect m_pq - n0.  ``stable_from`` records the exponent from which the
    closed form order = p**(m - 1 - c_pq) was observed to hold throughout
    the verification window.
    """

    pair: PrimePair
    m_pq: int
    n0: int
    c_pq: int
    stable_from: int

    def __post_init__(self):
        if not (1 <= self.n0 <= self.m_pq):
            raise InvariantViolation(
                "stabilization profile requires 1 <= n0 <= m_pq",
                witness=(self.m_pq, self.n0),
            )
        if self.c_pq != self.m_pq - self.n0:
            raise InvariantViolation(
                "stabilization defect must equal m_pq - n0",
                witness=(self.m_pq, self.n0, self.c_pq),
            )


def order_of_base(pair: PrimePair, m: int, *, bit_budget: int = DEFAULT_BIT_BUDGET) -> int:
    """Multiplicative order of q**(p-1) modulo p**m (always a power of p)."""
    if m < 1:
        raise DomainError(f"exponent m must be >= 1, got {m}")
    modulus = checked_power(pair.p, m, bit_budget)
    g = pow(pair.q, pair.p - 1, modulus)
    order = p_power_order(g, modulus, pair.p)
    if pow(pair.p, m - 1) % order != 0:
        raise InvariantViolation(
            "order of q**(p-1) must divide p**(m-1)", witness=(pair, m, order)
        )
    return order


@lru_cache(maxsize=None)
def _profile_cached(p: int, q: int, window: int, bit_budget: int) -> StabilizationProfile:
    pair = PrimePair(p, q)
    m = 1
    while True:
        modulus = checked_power(p, m + 1, bit_budget)
        if pow(q, p - 1, modulus) != 1:
            break
        m += 1
    m_pq = m
    modulus = checked_power(p, m_pq + 1, bit_budget)
    g = pow(q, p - 1, modulus)
    order = p_power_order(g, modulus, p)
    n0 = 0
    o = order
    while o > 1:
        o //= p
        n0 += 1
    c = m_pq - n0
    failures = []
    for mm in range(m_pq + 1, m_pq + window + 1):
        if order_of_base(pair, mm, bit_budget=bit_budget) * p**c != p ** (mm - 1):
            failures.append(mm)
    if not failures:
        stable_from = m_pq + 1
    elif failures == [m_pq + 1]:
        stable_from = m_pq + 2
    else:
        raise InvariantViolation(
            "order stabilization not observed in the verification window",
            witness=(pair, tuple(failures)),
        )
    return StabilizationProfile(pair, m_pq, n0, c, stable_from)


def stabilization_profile(
    pair: PrimePair,
    *,
    window: int = DEFAULT_VERIFY_WINDOW,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> StabilizationProfile:
    """Compute and exactly verify the order profile of q**(p-1) mod p**m.

    Beyond locating (m_pq, n0, c_pq), this checks the closed-form order
    p**(m - 1 - c_pq) for every m in [m_pq + 1, m_pq + window] and records
    the first exponent from which it held.
    """
    return _profile_cached(pair.p, pair.q, window, bit_budget)


@dataclass(frozen=True)
class AdmissibleSet:
    """The arithmetic progression k == 1 (mod step) within [1, modulus].

    Supports membership tests, iteration in increasing order, and ``len``.
    """

    modulus: int
    step: int

    def __contains__(self, k: object) -> bool:
        return isinstance(k, int) and 1 <= k <= self.modulus and (k - 1) % self.step == 0

    def __iter__(self):
        return iter(range(1, self.modulus + 1, self.step))

    def __len__(self) -> int:
        return (self.modulus - 1) // self.step + 1


def admissible_k(
    pair: PrimePair, m1: int, *, bit_budget: int = DEFAULT_BIT_BUDGET
) -> AdmissibleSet:
    """Right-hand factors k for which the two-grid alignment is solvable.

    These are exactly k == 1 (mod p**(c_pq + 1)) in [1, p**(m1*(q-1))].
    """
    if m1 < 1:
        raise DomainError(f"m1 must be >= 1, got {m1}")
    profile = stabilization_profile(pair, bit_budget=bit_budget)
    modulus = checked_power(pair.p, m1 * (pair.q - 1), bit_budget)
    step = pair.p ** (profile.c_pq + 1)
    return AdmissibleSet(modulus=modulus, step=step)


def p_group_discrete_log(g: int, h: int, modulus: int, p: int, order: int | None = None) -> int:
    """Discrete log x with g**x == h (mod modulus) in the cyclic p-group <g>.

    ``order`` is the order of g (a power of p); it is computed when omitted.
    Raises ``DomainError`` if h is not in the subgroup generated by g.
    Digits are lifted one at a time; each digit is found by table lookup for
    small p and by baby-step/giant-step inside the order-p subgroup
    otherwise.
    """
    h %= modulus
    if h == 1:
        return 0
    if order is None:
        order = p_power_order(g, modulus, p)
    e = 0
    o = order
    while o > 1:
        o //= p
        e += 1
    if e == 0:
        raise DomainError("target is not in the subgroup generated by the base")
    gamma = pow(g, p ** (e - 1), modulus)

    if p <= 1 << 16:
        table = {}
        val = 1
        for d in range(p):
            table[val] = d
            val = val * gamma % modulus
        def digit_of(w: int) -> int | None:
            return table.get(w)
    else:
        step = 1
        while step * step < p:
            step += 1
        baby = {}
        val = 1
        for d in range(step):
            baby[val] = d
            val = val * gamma % modulus
        giant = pow(gamma, -step, modulus)
        def digit_of(w: int) -> int | None:
            cur = w
            for i in range(step + 1):
                d = baby.get(cur)
                if d is not None:
                    cand = i * step + d
                    if cand < p:
                        return cand
                cur = cur * giant % modulus
            return None

    g_inv = pow(g, -1, modulus)
    x = 0
    for i in range(e):
        w = pow(h * pow(g_inv, x, modulus) % modulus, p ** (e - 1 - i), modulus)
        d = digit_of(w)
        if d is None:
            raise DomainError("target is not in the subgroup generated by the base")
        x += d * p**i
    if pow(g, x, modulus) != h:
        raise DomainError("target is not in the subgroup generated by the base")
    return x


@dataclass(frozen=True)
class PairSolution:
    """A verified instance of k * q**(m2*(p-1)) - j * p**(m1*(q-1)) == 1.

    ``stride`` is the multiplicative order of q**(p-1) modulo
    p**(m1*(q-1)); replacing m2 by m2 + t*stride (t >= 0) yields all larger
    solutions with the same k.  Construction re-verifies every invariant
    with full big-integer arithmetic and rejects invalid instances.
    """

    pair: PrimePair
    m1: int
    k: int
    m2: int
    j: int
    stride: int

    def __post_init__(self):
        p, q = self.pair.p, self.pair.q
        if self.m1 < 1 or self.m2 < 1:
            raise InvariantViolation(
                "exponents m1, m2 must be positive", witness=(self.m1, self.m2)
            )
        modulus = p ** (self.m1 * (q - 1))
        if not 1 <= self.k <= modulus:
            raise InvariantViolation("k out of range", witness=self.k)
        power = q ** (self.m2 * (p - 1))
        if self.k * power - self.j * modulus != 1:
            raise InvariantViolation(
                "alignment identity k*q**(m2*(p-1)) - j*p**(m1*(q-1)) == 1 failed",
                witness=(self.k, self.m2, self.j),
            )
        if not 1 <= self.j <= power:
            raise InvariantViolation("j out of range", witness=self.j)
        if self.j % q != q - 1:
            raise InvariantViolation("j must be == -1 (mod q)", witness=self.j)
        s = self.stride
        while s % p == 0:
            s //= p
        if s != 1:
            raise InvariantViolation("stride must be a power of p", witness=self.stride)
        g = pow(q, p - 1, modulus)
        if pow(g, self.stride, modulus) != 1 or (
            self.stride > 1 and pow(g, self.stride // p, modulus) == 1
        ):
            raise InvariantViolation(
                "stride must be the exact order of q**(p-1)", witness=self.stride
            )


def solve_pair(
    pair: PrimePair,
    m1: int,
    k: int,
    min_m2: int = 1,
    *,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    result_bit_budget: int = DEFAULT_RESULT_BIT_BUDGET,
) -> PairSolution:
    """Least m2 >= max(min_m2, 1) solving the two-grid alignment for (m1, k).

    Raises ``DomainError`` when k is not admissible (no solution exists) and
    ``ResourceError`` when the resulting integers would blow past the bit
    budgets.
    """
    p, q = pair.p, pair.q
    if min_m2 < 0:
        raise DomainError(f"min_m2 must be >= 0, got {min_m2}")
    adm = admissible_k(pair, m1, bit_budget=bit_budget)
    if k not in adm:
        raise DomainError(
            f"k = {k} is not admissible for (p, q, m1) = ({p}, {q}, {m1}): "
            f"need k == 1 (mod {adm.step}) within [1, {adm.modulus}]"
        )
    modulus = adm.modulus
    g = pow(q, p - 1, modulus)
    stride = p_power_order(g, modulus, p)
    h = pow(k, -1, modulus)
    x = p_group_discrete_log(g, h, modulus, p, stride)
    lo = max(min_m2, 1)
    if x >= lo:
        m2 = x
    else:
        m2 = x + -(-(lo - x) // stride) * stride
    power_bits = m2 * (p - 1) * (q.bit_length())
    if power_bits > result_bit_budget:
        raise ResourceError(
            f"solution m2 = {m2} gives q**(m2*(p-1)) with about {power_bits} bits, "
            f"over the {result_bit_budget}-bit result budget"
        )
    power = q ** (m2 * (p - 1))
    j, rem = divmod(k * power - 1, modulus)
    if rem != 0:
        raise InvariantViolation(
            "discrete log produced a non-solution", witness=(k, m1, m2)
        )
    return PairSolution(pair=pair, m1=m1, k=k, m2=m2, j=j, stride=stride)


@dataclass(frozen=True)
class MultiPrimeProfile:
    """Stabilization profiles of one base prime against several others.

    ``profiles[i]`` is the profile of the pair (primes[i], q); ``c_max`` and
    ``m_max`` are the componentwise maxima used when all grids must be
    aligned simultaneously.
    """

    q: int
    primes: tuple[int, ...]
    profiles: tuple[StabilizationProfile, ...]
    c_max: int
    m_max: int


def multi_prime_profile(
    q: int,
    primes: tuple[int, ...] | list[int],
    *,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> MultiPrimeProfile:
    """Profiles of q against each prime in ``primes`` (all must exceed q)."""
    primes = tuple(primes)
    if not primes:
        raise DomainError("at least one comparison prime is required")
    if len(set(primes)) != len(primes):
        raise DomainError(f"comparison primes must be distinct, got {primes}")
    profiles = tuple(
        stabilization_profile(PrimePair(p, q), bit_budget=bit_budget) for p in primes
    )
    return MultiPrimeProfile(
        q=q,
        primes=primes,
        profiles=profiles,
        c_max=max(pr.c_pq for pr in profiles),
        m_max=max(pr.m_pq for pr in profiles),
    )


def crt_combine(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    """Chinese remainder combination for pairwise coprime moduli."""
    r, m = 0, 1
    for ri, mi in zip(residues, moduli):
        if gcd(m, mi) != 1:
            raise DomainError("CRT moduli must be pairwise coprime")
        inv = pow(m, -1, mi)
        t = (ri - r) * inv % mi
        r += m * t
        m *= mi
    return r % m, m
