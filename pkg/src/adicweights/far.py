"""Exact distance-to-grid constants and their sharpness structure.

A number delta is "far" from the base-n grids when its scaled distance
inf over m, k of |delta - k/n^m| * n^m is strictly positive; the scan
computes this infimum exactly for a truncated depth range together with
every (m, k) attaining it.  The sharpness witnesses solve the exact
alignment identity k/p^n - j/q^m = 1/(q^m p^n), whose solutions recur
along an arithmetic progression in m.  The window scan certifies that
1/2^m keeps a positive scaled distance to every prime-power grid p^n of
comparable size (p odd, p^n within a factor 10 of 2^m), which refutes
the conjecture that such a uniform lower bound must fail: taking
epsilon = C(m)/2 exhibits a point with no close grid neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InvariantViolation, ResourceError

__all__ = [
    "FarConstantResult",
    "KrantzReport",
    "far_constant",
    "sharpness_witnesses",
    "krantz_scan",
]

_MAX_WINDOW_EXPONENT = 22  # sieve bound 10 * 2^m stays comfortably in memory


@dataclass(frozen=True)
class FarConstantResult:
    """Exact minimum of |delta - k/n^m| * n^m over 0 <= m <= M."""

    delta: Fraction
    n: int
    M: int
    inf_value: Fraction
    argmin: tuple[int, int]
    sharp_hits: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.inf_value < 0:
            raise InvariantViolation("scaled grid distance cannot be negative")
        if self.argmin not in self.sharp_hits:
            raise InvariantViolation("argmin must be among the sharp hits")


def far_constant(delta: Fraction, n: int, M: int) -> FarConstantResult:
    """Exact inf over 0 <= m <= M, k integer of |delta - k/n^m| * n^m.

    For each depth m only the nearest integers k to delta * n^m matter;
    both are checked when equidistant.  ``sharp_hits`` lists every (m, k)
    attaining the minimum, ordered by m; a grid point gives 0.
    """
    delta = Fraction(delta)
    if n < 2:
        raise DomainError(f"grid base must be >= 2, got {n}")
    if M < 0:
        raise DomainError(f"depth cap must be >= 0, got {M}")
    best: Fraction | None = None
    hits: list[tuple[int, int]] = []
    for m in range(M + 1):
        scaled = delta * n**m
        k_lo = scaled.__floor__()
        for k in (k_lo, k_lo + 1):
            value = abs(scaled - k)
            if best is None or value < best:
                best = value
                hits = [(m, k)]
            elif value == best and (m, k) not in hits:
                hits.append((m, k))
    return FarConstantResult(
        delta=delta,
        n=n,
        M=M,
        inf_value=best,
        argmin=hits[0],
        sharp_hits=tuple(hits),
    )


def sharpness_witnesses(
    p: int, n1: int, k: int, q: int, M: int
) -> list[tuple[int, int]]:
    """All (j, m) with 1 <= m <= M solving k/p^n1 - j/q^m = 1/(q^m p^n1).

    Clearing denominators, the identity is k * q^m - j * p^n1 = 1, so j
    exists exactly when k * q^m == 1 (mod p^n1); each solution satisfies
    j == -1 (mod q), which is asserted.
    """
    if p < 2 or q < 2 or n1 < 1 or M < 0:
        raise DomainError("need p, q >= 2, n1 >= 1, M >= 0")
    if k % p == 0:
        raise DomainError(f"numerator {k} must not be divisible by p={p}")
    modulus = p**n1
    out: list[tuple[int, int]] = []
    power = 1
    for m in range(1, M + 1):
        power *= q
        num = k * power - 1
        if num % modulus == 0:
            j = num // modulus
            if (j + 1) % q != 0:
                raise InvariantViolation(
                    "witness numerator must be -1 modulo the grid base",
                    witness=(j, m),
                )
            if Fraction(k, modulus) - Fraction(j, power) != Fraction(1, power * modulus):
                raise InvariantViolation(
                    "witness fails the exact alignment identity", witness=(j, m)
                )
            out.append((j, m))
    return out


@dataclass(frozen=True)
class KrantzReport:
    """Positive scaled distance of 1/2^m to all comparable p^n grids."""

    m: int
    C_m: Fraction
    pairs_examined: int
    argmin: tuple[int, int, int]
    epsilon: Fraction
    k: int = 1

    def __post_init__(self):
        if not 0 < self.C_m <= 1:
            raise InvariantViolation("the window constant must lie in (0, 1]")
        if self.epsilon != self.C_m / 2:
            raise InvariantViolation("the instantiation must use epsilon = C_m / 2")


def _odd_primes_up_to(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    i = 2
    while i * i <= limit:
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        i += 1
    return [i for i in range(3, limit + 1) if sieve[i]]


def krantz_scan(m: int) -> KrantzReport:
    """Scaled distance of 1/2^m to every odd-prime-power grid of
    comparable size: C_m = min(1, min |1/2^m - beta/p^n| * 2^m) over all
    odd primes p and exponents n with 1/10 <= p^n/2^m <= 10 and all
    nonzero integers beta (beta = 0 contributes exactly 1, the cap).

    The prime 2 is excluded: 1/2^m lies on its own grid, and the window
    question concerns the other prime grids.  C_m > 0 is asserted
    exactly; epsilon = C_m/2 with k = 1 instantiates the refutation.
    """
    if m < 1:
        raise DomainError(f"window exponent must be >= 1, got {m}")
    if m > _MAX_WINDOW_EXPONENT:
        raise ResourceError(
            f"window exponent {m} exceeds the enumeration budget "
            f"{_MAX_WINDOW_EXPONENT}"
        )
    two_m = 2**m
    lo10 = Fraction(two_m, 10)  # p^n >= 2^m/10
    hi10 = 10 * two_m
    target = Fraction(1, two_m)
    best: Fraction | None = None
    arg = None
    first_pair = None
    pairs = 0
    for p in _odd_primes_up_to(hi10):
        pn, n = p, 1
        while pn < lo10:
            pn *= p
            n += 1
        while pn <= hi10:
            pairs += 1
            if first_pair is None:
                first_pair = (p, n)
            # only the nearest nonzero beta can attain the minimum
            b_lo = Fraction(pn, two_m).__floor__()
            for beta in (b_lo, b_lo + 1):
                if beta == 0:
                    continue
                value = abs(target - Fraction(beta, pn)) * two_m
                if best is None or value < best:
                    best = value
                    arg = (p, n, beta)
            pn *= p
            n += 1
    if pairs == 0:
        raise InvariantViolation(f"the window around 2^{m} contains no prime power")
    if best is None or best >= 1:
        # every nonzero grid numerator is at scaled distance >= 1, so the
        # cap binds and beta = 0 attains it: |1/2^m - 0| * 2^m = 1
        best = Fraction(1)
        arg = (first_pair[0], first_pair[1], 0)
    if best <= 0:
        raise InvariantViolation(
            "the target must stay off every examined grid", witness=arg
        )
    return KrantzReport(
        m=m,
        C_m=best,
        pairs_examined=pairs,
        argmin=arg,
        epsilon=best / 2,
    )
