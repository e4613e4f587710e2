"""Exact-arithmetic toolkit for adically aligned doubling-type measures.

The package builds weighted measures on [0, 1) by redistributing mass
along two digit chains inside blocks that are aligned, with certified
gaps, between a base-q and several base-p subdivision grids.  Everything
meaningful is computed in exact rational arithmetic; where irrational
quantities appear (logarithms, fractional powers) they are handled as
certified directed-rounding enclosures.

Layers, bottom up:

* :mod:`~adicweights.ntheory` — multiplicative orders modulo prime
  powers, their stabilization profiles, and the digit-alignment equation
  ``k*q^m2 = 1 + j*p^m1``.
* :mod:`~adicweights.geometry` — adic intervals and the selection of
  aligned block families with exact gap control.
* :mod:`~adicweights.measure` — the two-chain redistribution, its
  piecewise-monomial region decomposition, and exact integration.
* :mod:`~adicweights.verify` — exhaustive scans: sibling mass ratios in
  every grid, closed-form ratio bounds, non-doubling witnesses, doubling
  violations, and averaged power bounds (upper and negative exponents).
* :mod:`~adicweights.far` — distance-from-grid constants and their
  sharpness witnesses.
* :mod:`~adicweights.report` / :mod:`~adicweights.cli` — the canonical
  JSON report format and the command-line front end.
"""

from .config import ExperimentConfig, parse_config
from .enclosure import Bounds, Enclosure, EnclosureContext
from .errors import (
    AdicError,
    ConfigError,
    DomainError,
    InvariantViolation,
    PrecisionError,
    ResourceError,
)
from .far import (
    FarConstantResult,
    KrantzReport,
    far_constant,
    krantz_scan,
    sharpness_witnesses,
)
from .geometry import (
    AdicInterval,
    FamilyBlock,
    SelectionFamily,
    SelectionResult,
    select_family,
    select_pair,
)
from .measure import (
    BlockMeasure,
    BlockSpec,
    DoublingMeasure,
    Region,
    RegionMap,
    WeightPair,
    assemble_global,
    build_block,
    default_weights,
    density_at,
    measure_of,
)
from .ntheory import (
    AdmissibleSet,
    MultiPrimeProfile,
    PairSolution,
    PrimePair,
    StabilizationProfile,
    admissible_k,
    multi_prime_profile,
    order_of_base,
    solve_pair,
    stabilization_profile,
)
from .parallel import DeterministicMapper, make_mapper
from .report import RunReport, canonical_json, load_report, run
from .verify import (
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

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # errors
    "AdicError",
    "ConfigError",
    "DomainError",
    "InvariantViolation",
    "PrecisionError",
    "ResourceError",
    # enclosures
    "Bounds",
    "Enclosure",
    "EnclosureContext",
    # number theory
    "AdmissibleSet",
    "MultiPrimeProfile",
    "PairSolution",
    "PrimePair",
    "StabilizationProfile",
    "admissible_k",
    "multi_prime_profile",
    "order_of_base",
    "solve_pair",
    "stabilization_profile",
    # geometry
    "AdicInterval",
    "FamilyBlock",
    "SelectionFamily",
    "SelectionResult",
    "select_family",
    "select_pair",
    # measure
    "BlockMeasure",
    "BlockSpec",
    "DoublingMeasure",
    "Region",
    "RegionMap",
    "WeightPair",
    "assemble_global",
    "build_block",
    "default_weights",
    "density_at",
    "measure_of",
    # verification
    "AlphaIndependenceTable",
    "ARReport",
    "DoublingReport",
    "ExhaustionBound",
    "NonDoublingWitness",
    "RHReport",
    "ViolationWitness",
    "adic_doubling_scan",
    "alpha_independence_table",
    "ar_scan",
    "exhaustion_bound",
    "find_doubling_violation",
    "nondoubling_witness",
    "rh_scan",
    # far numbers
    "FarConstantResult",
    "KrantzReport",
    "far_constant",
    "krantz_scan",
    "sharpness_witnesses",
    # configuration and reports
    "ExperimentConfig",
    "parse_config",
    "RunReport",
    "canonical_json",
    "load_report",
    "run",
    # parallel execution
    "DeterministicMapper",
    "make_mapper",
]
