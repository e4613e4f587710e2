"""Kernel backend selection and dispatch.

At import time this module tries to load the compiled extension and falls
back to the pure-Python kernels when it is unavailable (or when the
environment variable ``ADICWEIGHTS_PURE=1`` forces the fallback).  The
public functions dispatch per call: inputs that fit 64-bit arithmetic go to
the active backend, larger inputs always use the pure-Python big-integer
path.  Both backends implement identical semantics, so results never depend
on which one is active.
"""

from __future__ import annotations

import os

from . import _kernels_py

_U32 = 1 << 32
_U63 = 1 << 63

if os.environ.get("ADICWEIGHTS_PURE") == "1":
    _impl = _kernels_py
    _BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        _BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        _BACKEND = "pure"


def backend_name() -> str:
    """Name of the active backend: ``"compiled"`` or ``"pure"``."""
    return _BACKEND


def order_bruteforce(g: int, modulus: int, limit: int) -> int:
    """Smallest t >= 1 with g**t == 1 (mod modulus); 0 if t > limit."""
    if modulus < _U32 and limit < _U63:
        return _impl.order_bruteforce(g, modulus, limit)
    return _kernels_py.order_bruteforce(g, modulus, limit)


def atom_weight_exponents(q: int, alpha: int, t: int) -> tuple[int, int]:
    """Exponent pair (x, y) of the weight a**x * b**y on atom ``t``."""
    if 0 <= t < _U63 and q ** (2 * alpha) < _U63:
        return tuple(_impl.atom_weight_exponents(q, alpha, t))
    return _kernels_py.atom_weight_exponents(q, alpha, t)


def atom_histogram(q: int, alpha: int, t0: int, t1: int) -> list[int]:
    """Histogram of exponent pairs over atoms t0 <= t < t1 (flat row-major)."""
    if 0 <= t0 <= t1 < _U63 and q ** (2 * alpha) < _U63:
        return [int(c) for c in _impl.atom_histogram(q, alpha, t0, t1)]
    return _kernels_py.atom_histogram(q, alpha, t0, t1)
