"""Command-line front end.

Every command prints one canonical JSON document to stdout (or ``--out``);
progress and timing go to stderr only, so stdout is safe to pipe or diff.
Exit codes: 0 success, 1 a checked bound or identity failed, 2 bad
usage/config/budget, 3 a certified comparison was undecidable at the
working precision.
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .config import (
    DEFAULT_CONFIG_TEXT,
    ExperimentConfig,
    parse_config,
    rational_str,
)
from .errors import (
    AdicError,
    ConfigError,
    DomainError,
    InvariantViolation,
    PrecisionError,
    ResourceError,
)
from .far import far_constant, krantz_scan, sharpness_witnesses
from .geometry import select_family
from .measure import assemble_global, density_at
from .ntheory import PrimePair, solve_pair, stabilization_profile
from .parallel import make_mapper
from .report import canonical_json, run
from .verify import (
    adic_doubling_scan,
    alpha_independence_table,
    ar_scan,
    exhaustion_bound,
    nondoubling_witness,
    rh_scan,
)

__all__ = ["main"]

_CONTEXT = {
    "auto_envvar_prefix": "ADICWEIGHTS",
    "help_option_names": ["-h", "--help"],
}


def _guard(fn):
    """Map package errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PrecisionError as exc:
            click.echo(f"undecided: {exc}", err=True)
            sys.exit(3)
        except InvariantViolation as exc:
            click.echo(f"violation: {exc}", err=True)
            sys.exit(1)
        except (ConfigError, DomainError, ResourceError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except AdicError as exc:  # pragma: no cover - defensive
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _emit(obj, out: str | None, *, failed: bool = False) -> None:
    text = canonical_json(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)
    if failed:
        sys.exit(1)


def _rational_arg(raw: str, what: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad {what} {raw!r}: expected an integer or num/den") from exc


def _load_config(path: str | None) -> ExperimentConfig:
    if path is None:
        return parse_config(DEFAULT_CONFIG_TEXT)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read config {path!r}: {exc}"]) from exc
    return parse_config(text)


def _apply_strict(cfg: ExperimentConfig, strict_paper: bool) -> ExperimentConfig:
    if not strict_paper or cfg.strict_paper:
        return cfg
    doc = cfg.to_json_dict()
    doc["strict_paper"] = True
    return parse_config(json.dumps(doc))


def _assemble(cfg: ExperimentConfig):
    family = select_family(
        cfg.q,
        list(cfg.primes),
        cfg.block_count,
        alpha_schedule=list(cfg.alpha_schedule),
        gap_exponent=cfg.gap_exponent,
        guard_exponent=cfg.guard_exponent,
        strict_paper=cfg.strict_paper,
    )
    return family, assemble_global(family, cfg.a, cfg.b)


def _auto_depth(base: int, finest: Fraction) -> int:
    d = 1
    while Fraction(1, base**d) > finest:
        d += 1
    return d + 2


def _depth_for(cfg: ExperimentConfig, family, base: int, override: int | None) -> int:
    if override is not None:
        return override
    if base == cfg.q:
        return max(blk.interval.depth + 2 * blk.alpha for blk in family.blocks) + 3
    finest = min(
        blk.interval.length / Fraction(cfg.q ** (2 * blk.alpha))
        for blk in family.blocks
    )
    return _auto_depth(base, finest)


_config_option = click.option(
    "--config", "config_path", type=click.Path(), default=None,
    help="JSON experiment description (defaults to the built-in example).",
)
_out_option = click.option(
    "--out", type=click.Path(), default=None,
    help="Write the JSON document here instead of stdout.",
)
_workers_option = click.option(
    "--workers", type=int, default=None,
    help="Process count for the scans (overrides the config).",
)
_depth_option = click.option(
    "--depth", type=int, default=None,
    help="Scan depth override (levels of the subdivision tree).",
)
_bits_option = click.option(
    "--bits", type=int, default=None,
    help="Working precision for certified enclosures (overrides the config).",
)
_strict_option = click.option(
    "--strict-paper", is_flag=True, default=False,
    help="Use the most conservative selection gap (exponent 100).",
)


@click.group(context_settings=_CONTEXT)
def main() -> None:
    """Exact two-grid alignment, chain redistribution, and scan suite."""


@main.command()
@click.argument("p", type=int)
@click.argument("q", type=int)
@click.option("--window", type=int, default=12, show_default=True,
              help="How many consecutive exponents must confirm stability.")
@_out_option
@_guard
def profile(p: int, q: int, window: int, out: str | None) -> None:
    """Multiplicative-order stabilization profile of q modulo powers of P."""
    result = stabilization_profile(PrimePair(p, q), window=window)
    _emit(result, out)


@main.command("solve-pair")
@click.argument("p", type=int)
@click.argument("q", type=int)
@click.argument("m1", type=int)
@click.argument("k", type=int)
@click.option("--min-m2", type=int, default=1, show_default=True,
              help="Smallest admissible second exponent.")
@_out_option
@_guard
def solve_pair_cmd(p: int, q: int, m1: int, k: int, min_m2: int, out: str | None) -> None:
    """Solve k*q^m2 = 1 + j*p^m1 with j = -1 mod q, verified exactly."""
    result = solve_pair(PrimePair(p, q), m1, k, min_m2)
    _emit(result, out)


@main.command()
@_config_option
@_strict_option
@_out_option
@_guard
def select(config_path: str | None, strict_paper: bool, out: str | None) -> None:
    """Select the aligned block family for a configuration."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    family, _ = _assemble(cfg)
    _emit(family, out)


@main.command()
@_config_option
@_strict_option
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Also write the flat region table as CSV here.")
@_out_option
@_guard
def build(config_path: str | None, strict_paper: bool, csv_path: str | None,
          out: str | None) -> None:
    """Build the redistributed measure and dump its constant-density regions."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    family, measure = _assemble(cfg)
    blocks = []
    rows = []
    for i, rm in enumerate(measure.region_maps()):
        pieces = rm.pieces
        blocks.append({
            "block": i,
            "alpha": family.blocks[i].alpha,
            "root": family.blocks[i].interval,
            "piece_count": len(pieces),
            "mass": sum((p.mass for p in pieces), Fraction(0)),
            "regions": list(pieces),
        })
        for piece in pieces:
            rows.append((
                i,
                piece.kind,
                rational_str(piece.interval.left),
                rational_str(piece.interval.right),
                piece.interval.depth,
                piece.x,
                piece.y,
                rational_str(piece.mass),
            ))
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["block", "kind", "left", "right", "depth", "x", "y", "mass"]
            )
            writer.writerows(rows)
        click.echo(f"wrote {csv_path}", err=True)
    _emit({"weights": measure.weights, "blocks": blocks}, out)


@main.command("eval")
@click.argument("points", nargs=-1)
@click.option("--measure", "measure_ranges", nargs=2, multiple=True,
              metavar="LO HI", help="Also report the mass of [LO, HI).")
@_config_option
@_strict_option
@_out_option
@_guard
def eval_cmd(points: tuple[str, ...], measure_ranges, config_path: str | None,
             strict_paper: bool, out: str | None) -> None:
    """Evaluate the density (and optionally interval masses) pointwise."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    _, m = _assemble(cfg)
    if not points and not measure_ranges:
        raise DomainError("give at least one point or one --measure range")
    doc: dict = {"weights": m.weights}
    if points:
        rows = []
        for raw in points:
            x = _rational_arg(raw, "point")
            dx, dy = density_at(m, x)
            rows.append({
                "point": x,
                "exponents": [dx, dy],
                "density": m.weights.monomial(dx, dy),
            })
        doc["points"] = rows
    if measure_ranges:
        rows = []
        for lo_raw, hi_raw in measure_ranges:
            lo = _rational_arg(lo_raw, "range endpoint")
            hi = _rational_arg(hi_raw, "range endpoint")
            rows.append({"lo": lo, "hi": hi, "mass": m.measure_of(lo, hi)})
        doc["masses"] = rows
    _emit(doc, out)


@main.group()
def verify() -> None:
    """Bounded scans and witness constructions."""


@verify.command("q-adic")
@_config_option
@_strict_option
@_depth_option
@_workers_option
@_out_option
@_guard
def verify_q_adic(config_path: str | None, strict_paper: bool, depth: int | None,
                  workers: int | None, out: str | None) -> None:
    """Scan base-q sibling mass ratios against the bound b/a."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    family, m = _assemble(cfg)
    d = _depth_for(cfg, family, cfg.q, depth)
    with make_mapper(workers if workers is not None else cfg.workers) as mapper:
        report = adic_doubling_scan(
            m, cfg.q, d,
            theoretical_bound=m.weights.b / m.weights.a,
            collect_ratios=True,
            mapper=mapper,
        )
    _emit(report, out, failed=not report.passed)


@verify.command("p-adic")
@click.option("--prime", type=int, default=None,
              help="Which configured prime to scan (default: every one).")
@_config_option
@_strict_option
@_depth_option
@_workers_option
@_out_option
@_guard
def verify_p_adic(prime: int | None, config_path: str | None, strict_paper: bool,
                  depth: int | None, workers: int | None, out: str | None) -> None:
    """Scan base-p sibling mass ratios against the exhaustion constant."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    primes = cfg.primes if prime is None else (prime,)
    if prime is not None and prime not in cfg.primes:
        raise DomainError(f"prime {prime} is not in the configuration")
    family, m = _assemble(cfg)
    reports = []
    ok = True
    with make_mapper(workers if workers is not None else cfg.workers) as mapper:
        for p in primes:
            bound = exhaustion_bound(p, cfg.q, m.weights.a, m.weights.b)
            report = adic_doubling_scan(
                m, p, _depth_for(cfg, family, p, depth),
                theoretical_bound=bound.C_final,
                mapper=mapper,
            )
            ok = ok and bool(report.passed)
            reports.append({"bound": bound, "scan": report})
    _emit({"scans": reports}, out, failed=not ok)


@verify.command()
@_config_option
@_strict_option
@_out_option
@_guard
def nondoubling(config_path: str | None, strict_paper: bool, out: str | None) -> None:
    """Exhibit the adjacent equal-length pair with mass ratio (a/b)^alpha."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    family, m = _assemble(cfg)
    witnesses = [nondoubling_witness(m, i) for i in range(len(family.blocks))]
    _emit({"witnesses": witnesses}, out)


def _power_scan(scan_fn, config_path, strict_paper, base, depth, exponent,
                bits, enclosure, workers, out):
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    family, m = _assemble(cfg)
    b = base if base is not None else cfg.q
    r = (_rational_arg(exponent, "exponent") if exponent is not None
         else cfg.rh_exponent)
    with make_mapper(workers if workers is not None else cfg.workers) as mapper:
        report = scan_fn(
            m, b, _depth_for(cfg, family, b, depth), r,
            precision_bits=bits if bits is not None else cfg.precision_bits,
            mapper=mapper,
            force_enclosure=enclosure,
        )
    _emit(report, out, failed=not report.passed)


_base_option = click.option(
    "--base", type=int, default=None,
    help="Subdivision base to scan (default: the configured q).",
)
_exponent_option = click.option(
    "--exponent", default=None,
    help="Averaging exponent r, an integer or num/den (default: configured).",
)
_enclosure_option = click.option(
    "--enclosure", is_flag=True, default=False,
    help="Use the certified-enclosure route even when exact is available.",
)


@verify.command()
@_config_option
@_strict_option
@_base_option
@_depth_option
@_exponent_option
@_bits_option
@_enclosure_option
@_workers_option
@_out_option
@_guard
def rh(config_path, strict_paper, base, depth, exponent, bits, enclosure,
       workers, out) -> None:
    """Certify the upper-power averaged bound over one subdivision tree."""
    _power_scan(rh_scan, config_path, strict_paper, base, depth, exponent,
                bits, enclosure, workers, out)


@verify.command()
@_config_option
@_strict_option
@_base_option
@_depth_option
@_exponent_option
@_bits_option
@_enclosure_option
@_workers_option
@_out_option
@_guard
def ar(config_path, strict_paper, base, depth, exponent, bits, enclosure,
       workers, out) -> None:
    """Certify the negative-power averaged bound over one subdivision tree."""
    _power_scan(ar_scan, config_path, strict_paper, base, depth, exponent,
                bits, enclosure, workers, out)


@verify.command("alpha-table")
@click.option("--alphas", default="2,4,8", show_default=True,
              help="Comma-separated block depths to compare.")
@click.option("--prime", type=int, default=None,
              help="Which configured prime to tabulate (default: every one).")
@_config_option
@_depth_option
@_workers_option
@_out_option
@_guard
def alpha_table(alphas: str, prime: int | None, config_path: str | None,
                depth: int | None, workers: int | None, out: str | None) -> None:
    """Show that the base-p ratio bound does not grow with the block depth."""
    cfg = _load_config(config_path)
    try:
        alpha_list = [int(x) for x in alphas.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"bad --alphas value {alphas!r}") from exc
    if not alpha_list:
        raise DomainError("--alphas must name at least one depth")
    primes = cfg.primes if prime is None else (prime,)
    if prime is not None and prime not in cfg.primes:
        raise DomainError(f"prime {prime} is not in the configuration")
    tables = []
    ok = True
    with make_mapper(workers if workers is not None else cfg.workers) as mapper:
        for p in primes:
            table = alpha_independence_table(
                p, cfg.q, alpha_list, cfg.a, cfg.b, depth=depth, mapper=mapper
            )
            ok = ok and table.all_ok
            tables.append(table)
    _emit({"tables": tables}, out, failed=not ok)


@main.command()
@click.argument("delta")
@click.argument("n", type=int)
@click.argument("m", type=int)
@click.option("--witnesses", "witness_spec", default=None, metavar="P,N1,K,Q",
              help="Also list sharpness witnesses for these parameters.")
@click.option("--csv", "csv_path", type=click.Path(), default=None,
              help="Write the per-exponent minima as CSV here.")
@_out_option
@_guard
def far(delta: str, n: int, m: int, witness_spec: str | None,
        csv_path: str | None, out: str | None) -> None:
    """Distance of DELTA from the base-N grids up to exponent M."""
    result = far_constant(_rational_arg(delta, "target point"), n, m)
    doc: dict = {"result": result}
    if witness_spec is not None:
        try:
            p, n1, k, q = (int(x) for x in witness_spec.split(","))
        except ValueError as exc:
            raise DomainError(f"bad --witnesses value {witness_spec!r}") from exc
        doc["witnesses"] = [
            {"j": wj, "m": wm} for wj, wm in sharpness_witnesses(p, n1, k, q, m)
        ]
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["exponent", "nearest_k", "scaled_distance"])
            delta_f = _rational_arg(delta, "target point")
            for expo in range(m + 1):
                grid = n**expo
                k = round(delta_f * grid)
                writer.writerow(
                    [expo, k, rational_str(abs(delta_f - Fraction(k, grid)) * grid)]
                )
        click.echo(f"wrote {csv_path}", err=True)
    _emit(doc, out)


@main.command()
@click.argument("m", type=int)
@_out_option
@_guard
def krantz(m: int, out: str | None) -> None:
    """Positive lower bound for scaled distances of 1/2^m from odd prime-power grids."""
    _emit(krantz_scan(m), out)


@main.command("run")
@_config_option
@_strict_option
@_workers_option
@_out_option
@_guard
def run_cmd(config_path: str | None, strict_paper: bool, workers: int | None,
            out: str | None) -> None:
    """Run the whole pipeline and emit the combined report."""
    cfg = _apply_strict(_load_config(config_path), strict_paper)
    report, timings = run(cfg, workers=workers)
    for label, seconds in timings.items():
        click.echo(f"{label}: {seconds:.3f}s", err=True)
    _emit(report, out, failed=report.verdict != "pass")


if __name__ == "__main__":
    main()
