"""Error taxonomy shared by every module.

Four failure classes are distinguished so that callers (and the command line
front end) can map them onto distinct exit codes:

* ``DomainError`` -- the request itself is malformed (bad primes, ranges,
  non-admissible inputs).  CLI exit code 2.
* ``InvariantViolation`` -- a mathematical identity that is supposed to hold
  was checked exactly and failed; the offending witness is attached.  CLI
  exit code 1.
* ``ResourceError`` -- an explicit size/iteration budget was exceeded before
  an answer was reached.  CLI exit code 2.
* ``PrecisionError`` -- a certified-enclosure comparison was too wide to
  decide at the working precision.  CLI exit code 3.
"""

from __future__ import annotations


class AdicError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AdicError, ValueError):
    """The inputs lie outside the domain of the requested operation."""


class InvariantViolation(AdicError, RuntimeError):
    """An exact self-check failed.

    Parameters
    ----------
    message:
        Human-readable description of the violated identity.
    witness:
        Optional object pinpointing the counterexample (an exponent, an
        interval, a tuple of values, ...).
    """

    def __init__(self, message: str, witness: object | None = None):
        super().__init__(message if witness is None else f"{message} (witness: {witness!r})")
        self.witness = witness


class ConfigError(DomainError):
    """A configuration document failed validation.

    ``violations`` lists every failure (field path and message), not just
    the first, so users can fix a config in one pass.
    """

    def __init__(self, violations: list[str]):
        super().__init__(
            "invalid configuration:\n" + "\n".join(f"  - {v}" for v in violations)
        )
        self.violations = list(violations)


class ResourceError(AdicError, RuntimeError):
    """A size or iteration budget was exhausted."""


class PrecisionError(AdicError, RuntimeError):
    """An interval enclosure was too wide to certify a comparison.

    Carries the enclosure bounds and the comparison target so the caller can
    retry at higher precision.
    """

    def __init__(self, message: str, lo: object | None = None, hi: object | None = None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
