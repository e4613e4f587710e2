"""Canonical report serialization and the full experiment pipeline.

Every result object in this package is a frozen dataclass of exact values
(ints, rationals, certified ``Bounds``).  This module turns those objects
into canonical JSON — sorted keys, two-space indent, rationals as
``"num/den"`` strings, a ``"$type"`` discriminator on every object — and
back, losslessly.  Decoding reconstructs the original dataclasses, so
every consistency check in their ``__post_init__`` methods runs again on
load: a tampered report fails to parse.

``run`` executes the whole pipeline for one validated configuration and
returns a ``RunReport`` plus wall-clock timings.  The report content is
independent of the worker count; timings are returned separately so they
can be logged without entering the canonical bytes.
"""

from __future__ import annotations

import dataclasses
import json
import re
import time
import types
import typing
from dataclasses import dataclass
from fractions import Fraction

from .config import ExperimentConfig
from .enclosure import Bounds
from .errors import DomainError
from .geometry import (
    AdicInterval,
    FamilyBlock,
    SelectionFamily,
    SelectionResult,
    select_family,
)
from .measure import (
    BlockSpec,
    DoublingMeasure,
    Region,
    WeightPair,
    assemble_global,
)
from .ntheory import (
    AdmissibleSet,
    MultiPrimeProfile,
    PairSolution,
    PrimePair,
    StabilizationProfile,
    multi_prime_profile,
)
from .far import FarConstantResult, KrantzReport, krantz_scan
from .parallel import make_mapper
from .verify import (
    AlphaIndependenceRow,
    AlphaIndependenceTable,
    ARReport,
    DoublingReport,
    ExhaustionBound,
    NonDoublingWitness,
    RHReport,
    ViolationWitness,
    adic_doubling_scan,
    alpha_independence_table,
    ar_scan,
    exhaustion_bound,
    find_doubling_violation,
    nondoubling_witness,
    rh_scan,
)

__all__ = [
    "TYPE_KEY",
    "encode",
    "decode",
    "decode_as",
    "canonical_json",
    "dump_report",
    "load_report",
    "RunReport",
    "run",
]

TYPE_KEY = "$type"

_RATIONAL_RE = re.compile(r"^-?[0-9]+/[0-9]+$")

_REGISTRY: dict[str, type] = {
    cls.__name__: cls
    for cls in (
        PrimePair,
        StabilizationProfile,
        AdmissibleSet,
        PairSolution,
        MultiPrimeProfile,
        AdicInterval,
        SelectionResult,
        FamilyBlock,
        SelectionFamily,
        WeightPair,
        BlockSpec,
        Region,
        Bounds,
        DoublingReport,
        ExhaustionBound,
        NonDoublingWitness,
        ViolationWitness,
        RHReport,
        ARReport,
        AlphaIndependenceRow,
        AlphaIndependenceTable,
        FarConstantResult,
        KrantzReport,
        ExperimentConfig,
    )
}


def register(cls: type) -> type:
    """Add a dataclass to the decoding registry (usable as a decorator)."""
    _REGISTRY[cls.__name__] = cls
    return cls


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def encode(obj):
    """Map a result object to JSON-ready data.

    Rationals become ``"num/den"`` strings (always with the slash, so they
    are recognizable without a schema); dataclasses become dicts carrying
    their class name under ``"$type"``; tuples become lists.  Floats are
    rejected: nothing in a report is approximate unless wrapped in
    ``Bounds``.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        raise TypeError("refusing to serialize a float; use Fraction or Bounds")
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {TYPE_KEY: type(obj).__name__}
        for f in dataclasses.fields(obj):
            out[f.name] = encode(getattr(obj, f.name))
        return out
    if isinstance(obj, (tuple, list)):
        return [encode(x) for x in obj]
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"non-string dict key {key!r} cannot be serialized")
            out[key] = encode(value)
        return out
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """The one serialized form: sorted keys, two-space indent, newline end."""
    return json.dumps(encode(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def _decode_shape(data):
    """Decode without type information, recognizing values by shape."""
    if isinstance(data, dict):
        if TYPE_KEY in data:
            name = data[TYPE_KEY]
            if name not in _REGISTRY:
                raise DomainError(f"unknown report object type {name!r}")
            return _decode_dataclass(_REGISTRY[name], data)
        return {k: _decode_shape(v) for k, v in data.items()}
    if isinstance(data, list):
        return [_decode_shape(v) for v in data]
    if isinstance(data, str) and _RATIONAL_RE.match(data):
        return Fraction(data)
    return data


def _decode_dataclass(cls: type, data: dict):
    if not isinstance(data, dict):
        raise DomainError(f"expected an object for {cls.__name__}, got {type(data).__name__}")
    tag = data.get(TYPE_KEY, cls.__name__)
    if tag != cls.__name__:
        if tag in _REGISTRY and issubclass(_REGISTRY[tag], cls):
            cls = _REGISTRY[tag]
        else:
            raise DomainError(f"expected {cls.__name__}, found {tag!r}")
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in data:
            kwargs[f.name] = decode_as(hints[f.name], data[f.name])
        elif (
            f.default is dataclasses.MISSING
            and f.default_factory is dataclasses.MISSING
        ):
            raise DomainError(f"{cls.__name__} is missing required field {f.name!r}")
    return cls(**kwargs)


def decode_as(tp, data):
    """Decode JSON data into the value described by a type annotation."""
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(tp)
        if type(None) in args:
            if data is None:
                return None
            remaining = [a for a in args if a is not type(None)]
            if len(remaining) == 1:
                return decode_as(remaining[0], data)
        raise DomainError(f"cannot decode ambiguous union {tp}")
    if tp is typing.Any:
        return _decode_shape(data)
    if dataclasses.is_dataclass(tp):
        return _decode_dataclass(tp, data)
    if tp is Fraction:
        if isinstance(data, bool) or not isinstance(data, (int, str)):
            raise DomainError(f"expected a rational, got {type(data).__name__}")
        return Fraction(data)
    if tp in (int, str, bool):
        if not isinstance(data, tp) or (tp is int and isinstance(data, bool)):
            raise DomainError(f"expected {tp.__name__}, got {type(data).__name__}")
        return data
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(data, list):
            raise DomainError(f"expected a list for {tp}, got {type(data).__name__}")
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(decode_as(args[0], x) for x in data)
        if len(args) != len(data):
            raise DomainError(f"expected {len(args)} entries for {tp}, got {len(data)}")
        return tuple(decode_as(a, x) for a, x in zip(args, data))
    if origin is list:
        (arg,) = typing.get_args(tp)
        return [decode_as(arg, x) for x in data]
    if origin is dict:
        _, val_tp = typing.get_args(tp)
        if not isinstance(data, dict):
            raise DomainError(f"expected an object for {tp}, got {type(data).__name__}")
        return {k: decode_as(val_tp, v) for k, v in data.items()}
    if tp is dict:
        if not isinstance(data, dict):
            raise DomainError(f"expected an object, got {type(data).__name__}")
        return {k: _decode_shape(v) for k, v in data.items()}
    raise DomainError(f"no decoder for annotation {tp}")


def decode(data):
    """Decode JSON data produced by ``encode`` (shape-driven at the root)."""
    return _decode_shape(data)


def dump_report(obj) -> str:
    return canonical_json(obj)


def load_report(text: str):
    """Parse canonical JSON back into validated result objects."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"report is not valid JSON: {exc}") from exc
    return decode(data)


# ---------------------------------------------------------------------------
# the full pipeline
# ---------------------------------------------------------------------------


@register
@dataclass(frozen=True)
class RunReport:
    """Every artifact of one full pipeline run, with a single verdict.

    The verdict is ``"pass"`` exactly when every bounded scan stayed under
    its bound; the witness objects (non-doubling ratios, violation
    doubles, grid-distance minima) re-check their own defining identities
    on construction, so their presence is their verdict.
    """

    config: ExperimentConfig
    profiles: MultiPrimeProfile
    family: SelectionFamily
    q_scan: DoublingReport
    p_scans: tuple[DoublingReport, ...]
    exhaustion: tuple[ExhaustionBound, ...]
    nondoubling: tuple[NonDoublingWitness, ...]
    violations: tuple[ViolationWitness, ...]
    rh_scans: tuple[RHReport, ...]
    ar_scans: tuple[ARReport, ...]
    krantz: KrantzReport
    alpha_tables: tuple[AlphaIndependenceTable, ...]
    verdict: str

    def __post_init__(self):
        from .errors import InvariantViolation

        if self.verdict != ("pass" if self.components_pass else "fail"):
            raise InvariantViolation(
                "verdict does not match the component results"
            )

    @property
    def components_pass(self) -> bool:
        checks = [self.q_scan.passed]
        checks += [scan.passed for scan in self.p_scans]
        checks += [scan.passed for scan in self.rh_scans]
        checks += [scan.passed for scan in self.ar_scans]
        checks += [table.all_ok for table in self.alpha_tables]
        return all(bool(c) for c in checks)


class _Stopwatch:
    def __init__(self):
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def lap(self, label: str) -> None:
        now = time.perf_counter()
        self.timings[label] = now - self._t0
        self._t0 = now


def _auto_depth(base: int, finest: Fraction) -> int:
    """Least depth whose cells are no longer than ``finest``, plus a margin."""
    d = 1
    while Fraction(1, base**d) > finest:
        d += 1
    return d + 2


def run(
    config: ExperimentConfig, *, workers: int | None = None
) -> tuple[RunReport, dict[str, float]]:
    """Execute the full pipeline for one validated configuration.

    Stages: order-stabilization profiles for every prime; aligned block
    family selection; measure assembly; the base-q sibling-ratio scan
    against b/a; per-prime sibling-ratio scans against the closed-form
    exhaustion constants; per-block non-doubling witnesses; doubling
    violations for each requested constant; upper- and negative-power
    averaged scans in every base; the grid-distance constant; and the
    optional alpha-independence tables.

    ``workers`` overrides the configured worker count for this execution
    only; the report content never depends on it, so reports produced
    with different worker counts are byte-identical.
    """
    watch = _Stopwatch()
    q = config.q
    mapper = make_mapper(config.workers if workers is None else workers)
    try:
        profiles = multi_prime_profile(q, config.primes)
        watch.lap("profiles")

        family = select_family(
            q,
            list(config.primes),
            config.block_count,
            alpha_schedule=list(config.alpha_schedule),
            gap_exponent=config.gap_exponent,
            guard_exponent=config.guard_exponent,
            strict_paper=config.strict_paper,
        )
        watch.lap("select")

        measure = assemble_global(family, config.a, config.b)
        weights = measure.weights
        watch.lap("assemble")

        finest = min(
            blk.interval.length / Fraction(q ** (2 * blk.alpha))
            for blk in family.blocks
        )
        depth_q = config.scan_depths.get(
            "q_adic",
            max(blk.interval.depth + 2 * blk.alpha for blk in family.blocks) + 3,
        )
        q_scan = adic_doubling_scan(
            measure,
            q,
            depth_q,
            theoretical_bound=weights.b / weights.a,
            collect_ratios=True,
            mapper=mapper,
        )
        watch.lap("q_scan")

        exhaustion = tuple(
            exhaustion_bound(p, q, weights.a, weights.b) for p in config.primes
        )
        p_scans = []
        for p, exh in zip(config.primes, exhaustion):
            depth_p = config.scan_depths.get("p_adic", _auto_depth(p, finest))
            p_scans.append(
                adic_doubling_scan(
                    measure,
                    p,
                    depth_p,
                    theoretical_bound=exh.C_final,
                    mapper=mapper,
                )
            )
            watch.lap(f"p_scan[{p}]")

        nondoubling = tuple(
            nondoubling_witness(measure, i) for i in range(len(family.blocks))
        )
        watch.lap("nondoubling")

        violations = tuple(
            find_doubling_violation(q, c, weights)
            for c in config.violation_constants
        )
        watch.lap("violations")

        rh_scans = []
        ar_scans = []
        bases = (q,) + config.primes
        for base in bases:
            depth = config.scan_depths.get(
                "rh", depth_q if base == q else _auto_depth(base, finest)
            )
            rh_scans.append(
                rh_scan(
                    measure,
                    base,
                    depth,
                    config.rh_exponent,
                    precision_bits=config.precision_bits,
                    mapper=mapper,
                )
            )
            watch.lap(f"rh[{base}]")
        for base in bases:
            depth = config.scan_depths.get(
                "ar", depth_q if base == q else _auto_depth(base, finest)
            )
            ar_scans.append(
                ar_scan(
                    measure,
                    base,
                    depth,
                    config.rh_exponent,
                    precision_bits=config.precision_bits,
                    mapper=mapper,
                )
            )
            watch.lap(f"ar[{base}]")

        krantz = krantz_scan(config.krantz_m)
        watch.lap("krantz")

        alpha_tables = []
        if config.alpha_independence is not None:
            for p in config.primes:
                alpha_tables.append(
                    alpha_independence_table(
                        p,
                        q,
                        list(config.alpha_independence),
                        weights.a,
                        weights.b,
                        mapper=mapper,
                    )
                )
                watch.lap(f"alpha_table[{p}]")
    finally:
        mapper.close()

    partial = dict(
        config=config,
        profiles=profiles,
        family=family,
        q_scan=q_scan,
        p_scans=tuple(p_scans),
        exhaustion=exhaustion,
        nondoubling=nondoubling,
        violations=violations,
        rh_scans=tuple(rh_scans),
        ar_scans=tuple(ar_scans),
        krantz=krantz,
        alpha_tables=tuple(alpha_tables),
    )
    checks = [q_scan.passed]
    checks += [s.passed for s in partial["p_scans"]]
    checks += [s.passed for s in partial["rh_scans"]]
    checks += [s.passed for s in partial["ar_scans"]]
    checks += [t.all_ok for t in partial["alpha_tables"]]
    verdict = "pass" if all(bool(c) for c in checks) else "fail"
    report = RunReport(verdict=verdict, **partial)
    watch.timings["total"] = sum(watch.timings.values())
    return report, watch.timings
