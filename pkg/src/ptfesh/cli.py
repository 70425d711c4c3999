"""
Command-line interface.

Usage::

    ptfesh spectrum --config run.json --method both
    ptfesh sweep    --config sweep.json --out phase.csv
    ptfesh evolve   --config run.json --f 0+0.2i --g 1
    ptfesh check    --seed 7 --out report.json

Exit codes: 0 success, 1 a checked invariant failed, 2 solver failure,
3 configuration error.  Output is written only after the computation
succeeds, so a failing run never leaves a partial file.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from .config import METHODS, RunConfig, load_config
from .exceptions import (
    ConfigError,
    ContractError,
    CoverageError,
    DegeneracyError,
    DegenerateIntervalError,
    OracleFailure,
    PoleProximityError,
    RootCountError,
    StructureError,
)
from .runs import check_report, evolve_trace, spectrum_table, sweep_table

__all__ = ["main", "run", "cli"]

EXIT_OK, EXIT_CHECK_FAILED, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3

SOLVER_ERRORS = (
    StructureError,
    ContractError,
    CoverageError,
    DegeneracyError,
    DegenerateIntervalError,
    OracleFailure,
    PoleProximityError,
    RootCountError,
    ArithmeticError,
    np.linalg.LinAlgError,
)


def fmt(x) -> str:
    """Round-trip decimal rendering (17 significant digits)."""
    return format(float(x), ".17g")


def _writer(buf: io.StringIO):
    return csv.writer(buf, lineterminator="\n")


def render_spectrum(rows, discrepancy) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["index", "energy_re", "energy_im", "quasi_parity", "self_pseudo_norm", "residual", "method"])
    for r in rows:
        w.writerow([r.index, fmt(r.energy.real), fmt(r.energy.imag), r.quasi_parity,
                    fmt(r.self_pseudo_norm), fmt(r.residual), r.method])
    if discrepancy is not None:
        buf.write(f"# max_discrepancy_feshbach_direct = {fmt(discrepancy)}\n")
    return buf.getvalue()


def render_sweep(rows, bracket, param: str) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["param", "level", "energy_re", "energy_im", "self_pseudo_norm", "broken_count"])
    for row in rows:
        if row.error is not None:
            buf.write(f"# row {param}={fmt(row.param)} failed: {row.error}\n")
            continue
        for k, (E, s) in enumerate(zip(row.energies, row.self_pseudo_norms)):
            w.writerow([fmt(row.param), k, fmt(E.real), fmt(E.imag), fmt(s), row.broken_count])
    if bracket is None:
        buf.write(f"# transition: none in the swept range of {param}\n")
    else:
        buf.write(f"# transition: {param} in [{fmt(bracket[0])}, {fmt(bracket[1])}]\n")
    return buf.getvalue()


def render_evolve(trace, metric: str) -> str:
    buf = io.StringIO()
    p0 = complex(trace.pseudo_norms[0])
    buf.write(f"# pseudo_norm_t0 = {fmt(p0.real)} {fmt(p0.imag)}\n")
    buf.write(f"# metric = {metric}\n")
    if trace.truncated_at is not None:
        buf.write(f"# truncated_at = {fmt(trace.truncated_at)} (overflow guard)\n")
    w = _writer(buf)
    w.writerow(["t", "pseudo_re", "pseudo_im", "euclid"])
    for t, p, e in zip(trace.times, trace.pseudo_norms, trace.euclidean_norms):
        w.writerow([fmt(t), fmt(p.real), fmt(p.imag), fmt(e)])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


def _load(command: str, opts: dict) -> RunConfig:
    doc, base = {}, Path(".")
    if opts.get("config"):
        path = Path(opts["config"])
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        base = path.parent
    overrides = {k: opts.get(k) for k in ("dim", "g", "f", "method", "out", "seed")}
    overrides["command"] = command
    return load_config(doc, base, overrides)


def _execute(cfg: RunConfig) -> int:
    if cfg.command == "spectrum":
        rows, discrepancy = spectrum_table(cfg)
        _emit(render_spectrum(rows, discrepancy), cfg.csv)
        return EXIT_OK
    if cfg.command == "sweep":
        rows, bracket = sweep_table(cfg)
        _emit(render_sweep(rows, bracket, cfg.sweep.param), cfg.csv)
        return EXIT_OK
    if cfg.command == "evolve":
        trace, metric = evolve_trace(cfg)
        _emit(render_evolve(trace, metric), cfg.csv)
        return EXIT_OK
    report = check_report(cfg)
    _emit(json.dumps(report, indent=2, default=str) + "\n", cfg.json)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _dispatch(command: str, opts: dict) -> int:
    try:
        cfg = _load(command, opts)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    try:
        return _execute(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except SOLVER_ERRORS as exc:
        click.echo(f"solver failure: {type(exc).__name__}: {exc}", err=True)
        return EXIT_SOLVER


def _common(fn):
    options = [
        click.option("--config", "config", type=click.Path(dir_okay=False), help="JSON run configuration."),
        click.option("--dim", type=int, help="Basis dimension (overrides basis_dim)."),
        click.option("--g", type=float, help="Even-power coupling g."),
        click.option("--f", type=str, help="Cubic coupling as RE+IMi, e.g. 0+0.2i."),
        click.option("--method", type=click.Choice(METHODS), help="Spectrum method."),
        click.option("--out", type=click.Path(dir_okay=False), help="Output file (CSV, or JSON for check)."),
        click.option("--seed", type=int, help="Seed for randomized checks."),
    ]
    for opt in reversed(options):
        fn = opt(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Feshbach reduction and pseudo-metric tools for PT-symmetric oscillators."""


@cli.command()
@_common
def spectrum(**opts):
    """Energy levels by self-consistent reduction, direct diagonalization or both."""
    return _dispatch("spectrum", opts)


@cli.command("sweep")
@_common
def sweep_cmd(**opts):
    """Scan one coupling and report where the spectrum stops being real."""
    return _dispatch("sweep", opts)


@cli.command()
@_common
def evolve(**opts):
    """Time evolution trace with the indefinite and Euclidean norms."""
    return _dispatch("evolve", opts)


@cli.command()
@_common
def check(**opts):
    """Run the invariant suite and write a JSON report."""
    return _dispatch("check", opts)


def run(argv: list[str] | None = None) -> int:
    """Invoke the CLI and return its exit code instead of exiting."""
    try:
        code = cli.main(args=argv, prog_name="ptfesh", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_CHECK_FAILED
    return int(code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
