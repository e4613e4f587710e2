"""Pure-Python hot kernels.

These are the reference semantics for the optional compiled extension
(``_kernels.pyx``); both implementations must agree bit-for-bit.  The three
kernels are deliberately elementary:

* ``order_bruteforce`` -- multiplicative order by literal repeated
  multiplication (used as an independent cross-check of the fast
  order computation, and in benchmarks).
* ``atom_weight_exponents`` -- classify one depth-``2*alpha`` cell of a
  redistribution block by walking its digit string through the
  two-phase subdivision rules, returning the weight-monomial exponents.
* ``atom_histogram`` -- the same walk aggregated over a contiguous range of
  cells, returning a flat histogram of exponent pairs.
"""

from __future__ import annotations


def order_bruteforce(g: int, modulus: int, limit: int) -> int:
    """Smallest t >= 1 with g**t == 1 (mod modulus), scanning t <= limit.

    Returns 0 if no such t was found within the scan budget.
    """
    if modulus <= 1 or limit < 1:
        return 0
    x = g % modulus
    t = 1
    while x != 1:
        if t >= limit:
            return 0
        x = x * g % modulus
        t += 1
    return t


def _walk(q: int, alpha: int, digits) -> tuple[int, int]:
    """Run the two-phase subdivision walk over MSB-first base-q digits."""
    x = 0
    y = 0
    d = digits[0]
    if d <= q - 3:
        return (1, 0)
    if d == q - 2:
        x = 1
        in_h = True
    else:
        y = 1
        in_h = False
    for i in range(2, 2 * alpha + 1):
        d = digits[i - 1]
        phase1 = i <= alpha
        if in_h:
            if phase1:
                if d == q - 1:
                    x += 1
                    continue
                if d == 0:
                    return (x, y + 1)
                return (x + 1, y)
            if d == q - 1:
                y += 1
                continue
            return (x + 1, y)
        if phase1:
            if d == 0:
                y += 1
                continue
            return (x + 1, y)
        if d == 0:
            x += 1
            continue
        if d == q - 1:
            return (x, y + 1)
        return (x + 1, y)
    return (x, y)


def atom_weight_exponents(q: int, alpha: int, t: int) -> tuple[int, int]:
    """Exponent pair (x, y) of the weight a**x * b**y on atom ``t``.

    Atoms are the q-adic cells of depth ``2*alpha`` below a block container,
    indexed 0 .. q**(2*alpha) - 1 from the left.
    """
    n = 2 * alpha
    digits = [0] * n
    for i in range(n - 1, -1, -1):
        digits[i] = t % q
        t //= q
    return _walk(q, alpha, digits)


def atom_histogram(q: int, alpha: int, t0: int, t1: int) -> list[int]:
    """Histogram of exponent pairs over atoms t0 <= t < t1.

    The result is a flat row-major list of size (alpha + 2)**2; entry
    ``x * (alpha + 2) + y`` counts atoms with weight a**x * b**y.
    """
    side = alpha + 2
    counts = [0] * (side * side)
    n = 2 * alpha
    digits = [0] * n
    tt = t0
    for i in range(n - 1, -1, -1):
        digits[i] = tt % q
        tt //= q
    t = t0
    while t < t1:
        x, y = _walk(q, alpha, digits)
        counts[x * side + y] += 1
        t += 1
        i = n - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < q:
                break
            digits[i] = 0
            i -= 1
    return counts
