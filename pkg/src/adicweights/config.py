"""Experiment configuration: schema validation and normalization.

A configuration is a JSON document validated against the shipped schema
(`schemas/config.schema.json`) and then cross-checked against the exact
arithmetic constraints the modules enforce (weight identity, admissible
exponent ranges, prime relationships).  Validation collects *every*
violation before failing so a bad config can be fixed in one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from fractions import Fraction
from importlib import resources

import jsonschema

from .enclosure import EnclosureContext
from .errors import ConfigError
from .measure import default_weights
from .ntheory import is_prime

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "load_schema",
    "parse_rational",
    "rational_str",
    "rational_json",
    "DEFAULT_CONFIG_TEXT",
]

DEFAULT_CONFIG_TEXT = """\
{
  "q": 2,
  "primes": [3],
  "block_count": 1,
  "alpha_schedule": [2],
  "rh_exponent": 2,
  "krantz_m": 5
}
"""


def parse_rational(value) -> Fraction:
    """Parse an int or a "num/den" string into an exact rational."""
    if isinstance(value, bool):
        raise ConfigError([f"expected a rational, got boolean {value}"])
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError([f"bad rational literal {value!r}: {exc}"]) from exc
    raise ConfigError([f"expected a rational, got {type(value).__name__}"])


def rational_str(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rational_json(value: Fraction):
    """Rational as a JSON scalar: int when integral, else a "num/den" string."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def load_schema() -> dict:
    text = resources.files("adicweights").joinpath("schemas/config.schema.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated and normalized experiment description."""

    q: int
    primes: tuple[int, ...]
    block_count: int = 1
    alpha_schedule: tuple[int, ...] = (1,)
    a: Fraction = Fraction(3, 4)
    b: Fraction = Fraction(5, 4)
    gap_exponent: int = 4
    guard_exponent: int = 2
    strict_paper: bool = False
    rh_exponent: Fraction = Fraction(2)
    precision_bits: int = 256
    scan_depths: dict = field(default_factory=dict)
    workers: int = 1
    violation_constants: tuple[Fraction, ...] = (
        Fraction(10),
        Fraction(100),
        Fraction(1000),
    )
    krantz_m: int = 5
    alpha_independence: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        out = {
            "q": self.q,
            "primes": list(self.primes),
            "block_count": self.block_count,
            "alpha_schedule": list(self.alpha_schedule),
            "a": rational_json(self.a),
            "b": rational_json(self.b),
            "gap_exponent": self.gap_exponent,
            "guard_exponent": self.guard_exponent,
            "strict_paper": self.strict_paper,
            "rh_exponent": rational_json(self.rh_exponent),
            "precision_bits": self.precision_bits,
            "scan_depths": dict(sorted(self.scan_depths.items())),
            "workers": self.workers,
            "violation_constants": [rational_json(c) for c in self.violation_constants],
            "krantz_m": self.krantz_m,
        }
        if self.alpha_independence is not None:
            out["alpha_independence"] = list(self.alpha_independence)
        return out


def _enclosure_digits(value, bits: int = 64) -> str:
    """Short certified decimal range for an error message."""
    lo, hi = value.lower, value.upper
    return f"[{float(lo):.6f}, {float(hi):.6f}]"


def parse_config(text: str) -> ExperimentConfig:
    """Validate a JSON config document and normalize every field.

    Raises ``ConfigError`` carrying the complete list of violations (schema
    failures with their field paths, then cross-field arithmetic failures).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"not valid JSON: {exc}"]) from exc
    validator = jsonschema.Draft202012Validator(load_schema())
    schema_errors = [
        f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}"
        for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    ]
    if schema_errors:
        raise ConfigError(schema_errors)

    problems: list[str] = []
    q = doc["q"]
    if not is_prime(q):
        problems.append(f"q: {q} is not prime")
    primes = list(doc["primes"])
    if len(set(primes)) != len(primes):
        problems.append("primes: entries must be distinct")
    for p in primes:
        if not is_prime(p):
            problems.append(f"primes: {p} is not prime")
        elif p <= q:
            problems.append(f"primes: {p} must exceed q = {q}")

    block_count = doc.get("block_count", 1)
    alpha_raw = doc.get("alpha_schedule", "linear")
    if alpha_raw == "linear":
        alpha_schedule = tuple(range(1, block_count + 1))
    else:
        alpha_schedule = tuple(alpha_raw)
        if len(alpha_schedule) != block_count:
            problems.append(
                f"alpha_schedule: expected {block_count} entries "
                f"(one per block), got {len(alpha_schedule)}"
            )

    has_a, has_b = "a" in doc, "b" in doc
    if has_a != has_b:
        problems.append("a/b: give both weights or neither")
    if has_a and has_b:
        a = parse_rational(doc["a"])
        b = parse_rational(doc["b"])
        residual = (q - 1) * a + b - q
        if residual != 0:
            problems.append(
                f"a/b: (q-1)*a + b - q = {rational_str(residual)} (must be 0/1)"
            )
        if not 0 < a < 1:
            problems.append(f"a: must lie in (0, 1), got {rational_str(a)}")
        if not b > 1:
            problems.append(f"b: must exceed 1, got {rational_str(b)}")
    else:
        w = default_weights(q)
        a, b = w.a, w.b

    gap_exponent = doc.get("gap_exponent", 4)
    guard_exponent = doc.get("guard_exponent", 2)
    strict_paper = doc.get("strict_paper", False)
    s = 100 if strict_paper else gap_exponent
    for alpha in alpha_schedule:
        if s * alpha < 2 * alpha + guard_exponent:
            problems.append(
                f"gap_exponent: s*alpha >= 2*alpha + guard requires "
                f"{s}*{alpha} >= {2 * alpha + guard_exponent}"
            )
            break

    precision_bits = doc.get("precision_bits", 256)
    r = parse_rational(doc.get("rh_exponent", 2))
    if not problems and 0 < a < 1 < b:
        ctx = EnclosureContext(max(64, min(precision_bits, 4096)))
        # upper admissible endpoint: log(q)/log(b), exact test b^rn < q^rd
        rn, rd = r.numerator, r.denominator
        upper_ok = r > 1 and b.numerator**rn < b.denominator**rn * q**rd
        if not upper_ok:
            upper = ctx.from_fraction(Fraction(q)).log() / ctx.from_fraction(b).log()
            problems.append(
                f"rh_exponent: must lie in (1, log(q)/log(b)) = "
                f"(1, {_enclosure_digits(upper)}); got {rational_str(r)}"
            )
        # lower admissible endpoint for the negative-power scan:
        # 1 - log(a)/log(q), exact test a^rd * q^(rn-rd) > 1
        lower_ok = r > 1 and Fraction(q) ** (rn - rd) * a**rd > 1
        if not lower_ok:
            lower = 1 - ctx.from_fraction(a).log() / ctx.from_fraction(Fraction(q)).log()
            problems.append(
                f"rh_exponent: must exceed 1 - log(a)/log(q) = "
                f"{_enclosure_digits(lower)}; got {rational_str(r)}"
            )

    violation_constants = tuple(
        parse_rational(c) for c in doc.get("violation_constants", [10, 100, 1000])
    )
    for c in violation_constants:
        if c <= 0:
            problems.append(f"violation_constants: {rational_str(c)} must be positive")

    if problems:
        raise ConfigError(problems)

    return ExperimentConfig(
        q=q,
        primes=tuple(primes),
        block_count=block_count,
        alpha_schedule=alpha_schedule,
        a=a,
        b=b,
        gap_exponent=gap_exponent,
        guard_exponent=guard_exponent,
        strict_paper=strict_paper,
        rh_exponent=r,
        precision_bits=precision_bits,
        scan_depths=dict(doc.get("scan_depths", {}) or {}),
        workers=doc.get("workers", 1),
        violation_constants=violation_constants,
        krantz_m=doc.get("krantz_m", 5),
        alpha_independence=(
            tuple(doc["alpha_independence"]) if "alpha_independence" in doc else None
        ),
    )
