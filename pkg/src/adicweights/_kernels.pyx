# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Semantics must match ``_kernels_py`` exactly; the dispatcher in ``kernels``
routes inputs that fit in 64-bit arithmetic here and everything else to the
pure-Python twin.
"""

from libc.stdlib cimport free, malloc


def order_bruteforce(unsigned long long g, unsigned long long modulus,
                     unsigned long long limit):
    """Smallest t >= 1 with g**t == 1 (mod modulus), scanning t <= limit.

    Returns 0 if no such t was found within the scan budget.  Requires
    modulus < 2**32 so products stay inside 64 bits.
    """
    cdef unsigned long long x, t
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


cdef inline void _walk(int q, int alpha, int *digits, int *out_x, int *out_y) noexcept nogil:
    cdef int x = 0
    cdef int y = 0
    cdef int in_h
    cdef int i, d
    d = digits[0]
    if d <= q - 3:
        out_x[0] = 1
        out_y[0] = 0
        return
    if d == q - 2:
        x = 1
        in_h = 1
    else:
        y = 1
        in_h = 0
    for i in range(2, 2 * alpha + 1):
        d = digits[i - 1]
        if in_h:
            if i <= alpha:
                if d == q - 1:
                    x += 1
                    continue
                if d == 0:
                    y += 1
                else:
                    x += 1
                break
            else:
                if d == q - 1:
                    y += 1
                    continue
                x += 1
                break
        else:
            if i <= alpha:
                if d == 0:
                    y += 1
                    continue
                x += 1
                break
            else:
                if d == 0:
                    x += 1
                    continue
                if d == q - 1:
                    y += 1
                else:
                    x += 1
                break
    out_x[0] = x
    out_y[0] = y


def atom_weight_exponents(int q, int alpha, unsigned long long t):
    """Exponent pair (x, y) of the weight a**x * b**y on atom ``t``."""
    cdef int n = 2 * alpha
    cdef int i
    cdef int x = 0, y = 0
    cdef int *digits = <int *> malloc(n * sizeof(int))
    if digits == NULL:
        raise MemoryError()
    try:
        for i in range(n - 1, -1, -1):
            digits[i] = <int> (t % <unsigned long long> q)
            t //= <unsigned long long> q
        _walk(q, alpha, digits, &x, &y)
        return (x, y)
    finally:
        free(digits)


def atom_histogram(int q, int alpha, unsigned long long t0, unsigned long long t1):
    """Histogram of exponent pairs over atoms t0 <= t < t1 (flat row-major)."""
    cdef int side = alpha + 2
    cdef int n = 2 * alpha
    cdef int i, x, y
    cdef unsigned long long t, tt
    cdef int *digits = <int *> malloc(n * sizeof(int))
    cdef unsigned long long *counts = <unsigned long long *> malloc(
        side * side * sizeof(unsigned long long))
    if digits == NULL or counts == NULL:
        if digits != NULL:
            free(digits)
        if counts != NULL:
            free(counts)
        raise MemoryError()
    try:
        for i in range(side * side):
            counts[i] = 0
        tt = t0
        for i in range(n - 1, -1, -1):
            digits[i] = <int> (tt % <unsigned long long> q)
            tt //= <unsigned long long> q
        t = t0
        with nogil:
            while t < t1:
                _walk(q, alpha, digits, &x, &y)
                counts[x * side + y] += 1
                t += 1
                i = n - 1
                while i >= 0:
                    digits[i] += 1
                    if digits[i] < q:
                        break
                    digits[i] = 0
                    i -= 1
        return [counts[i] for i in range(side * side)]
    finally:
        free(digits)
        free(counts)
