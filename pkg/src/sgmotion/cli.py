"""Command-line entry point: survey, construct, realize and trace
subcommands with reproducible configs and machine-readable artifacts.

Every run writes a manifest recording inputs, seeds, package version and
timings; artifacts are written atomically (temp file + rename). Exit
codes: 0 ok, 2 usage error, 3 budget exceeded, 4 verification failure.
"""

from __future__ import annotations

import json
import os
import platform
import sys
import tempfile
import time
from pathlib import Path

import click
from gmpy2 import mpq

from . import __version__
from .field import QQ
from .groebner import BudgetExceeded

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _manifest(outdir: Path, name: str, payload: dict, t0: float):
    payload = dict(payload)
    payload.update(
        {
            "tool": "sgmotion",
            "version": __version__,
            "python": platform.python_version(),
            "elapsed_seconds": round(time.time() - t0, 3),
        }
    )
    _atomic_write(outdir / f"{name}.manifest.json", json.dumps(payload, indent=2) + "\n")


@click.group()
def main():
    """Exact and numeric workbench for exceptional six-leg platforms."""


@main.command()
@click.option("--prime", default=3, show_default=True, type=int)
@click.option("--samples", default=20000, show_default=True, type=int)
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--protocol", default="distinct", show_default=True,
              type=click.Choice(["distinct", "uniform", "slice"]))
@click.option("--budget", default=80_000_000, show_default=True, type=int)
@click.option("--out", default="census.json", show_default=True, type=click.Path())
@click.option("--hits-csv", default=None, type=click.Path())
def survey(prime, samples, seed, workers, protocol, budget, out, hits_csv):
    """Random survey over a small prime field with a (dim, degree) census."""
    from .survey import SurveyConfig, run_survey

    t0 = time.time()
    cfg = SurveyConfig(
        prime=prime, samples=samples, seed=seed, workers=workers,
        budget=budget, protocol=protocol,
    )

    def progress(done, total):
        click.echo(f"  {done}/{total} samples", err=True)

    try:
        report = run_survey(cfg, progress=progress)
    except BudgetExceeded as ex:
        click.echo(f"budget exceeded: {ex}", err=True)
        sys.exit(EXIT_BUDGET)
    outp = Path(out)
    _atomic_write(outp, json.dumps(report.to_json(), indent=2) + "\n")
    _manifest(outp.parent, outp.stem, {"command": "survey", "config": report.to_json()["config"]}, t0)
    click.echo(
        f"{report.total} samples: {report.hits} exceptional "
        f"({100*report.hit_rate:.2f}%), {report.timeouts} over budget -> {out}"
    )


@main.command()
@click.option("--input", "input_path", default=None, type=click.Path(exists=True),
              help="Construction input JSON (three legs and a plane); defaults to the shipped worked example.")
@click.option("--primes", default="", help="Comma-separated scan primes (default: auto).")
@click.option("--min-primes", default=3, show_default=True, type=int)
@click.option("--seed", default=1, show_default=True, type=int)
@click.option("--census/--no-census", default=False, show_default=True,
              help="Also count triple points on the covered planes (slower).")
@click.option("--budget-seconds", default=3600, show_default=True, type=int)
@click.option("--out", default="run", show_default=True, type=click.Path())
def construct(input_path, primes, min_primes, seed, census, budget_seconds, out):
    """Build the motion-curve family, scan primes, reconstruct the
    distinguished plane, conic and septic over the rationals."""
    from .pipeline import construct_pipeline

    t0 = time.time()
    prime_list = [int(x) for x in primes.split(",") if x.strip()] or None
    try:
        result = construct_pipeline(
            input_path=input_path,
            primes=prime_list,
            min_primes=min_primes,
            seed=seed,
            census=census,
            outdir=Path(out),
            budget_seconds=budget_seconds,
        )
    except BudgetExceeded as ex:
        click.echo(f"budget exceeded: {ex}", err=True)
        sys.exit(EXIT_BUDGET)
    _manifest(Path(out), "construct", {"command": "construct", "seed": seed,
                                       "primes": result.get("primes_used")}, t0)
    if not result.get("verified"):
        click.echo("reconstruction failed holdout verification", err=True)
        sys.exit(EXIT_VERIFY)
    click.echo(f"reconstructed invariants -> {out}/invariants.json")


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--point-index", default=None, type=int,
              help="Real-point index; default: closest to the reference point.")
@click.option("--out", default="mech.json", show_default=True, type=click.Path())
def realize(run_dir, point_index, out):
    """Pick a real parameter point and recover the full six-leg mechanism."""
    from .pipeline import realize_pipeline

    t0 = time.time()
    try:
        result = realize_pipeline(Path(run_dir), point_index=point_index, out=Path(out))
    except BudgetExceeded as ex:
        click.echo(f"budget exceeded: {ex}", err=True)
        sys.exit(EXIT_BUDGET)
    _manifest(Path(out).parent, Path(out).stem, {"command": "realize", "run": str(run_dir)}, t0)
    if not result.get("ok"):
        click.echo(f"realization failed: {result.get('error')}", err=True)
        sys.exit(EXIT_VERIFY)
    click.echo(f"realized mechanism -> {out}")


@main.command()
@click.option("--mech", "mech_path", required=True, type=click.Path(exists=True))
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--coupler", default="0,0,0", show_default=True)
@click.option("--step", default=1e-3, show_default=True, type=float)
@click.option("--max-steps", default=100_000, show_default=True, type=int)
@click.option("--out", default="trace", show_default=True, type=click.Path())
def trace(mech_path, run_dir, coupler, step, max_steps, out):
    """Trace the motion curve and write CSV/SVG coupler outputs."""
    from .pipeline import trace_pipeline

    t0 = time.time()
    coupler_pt = tuple(float(v) for v in coupler.split(","))
    result = trace_pipeline(
        Path(mech_path), Path(run_dir), coupler=coupler_pt, step=step,
        max_steps=max_steps, outdir=Path(out),
    )
    _manifest(Path(out), "trace", {"command": "trace", "mech": str(mech_path)}, t0)
    click.echo(
        f"{result['components']} real components, max leg deviation "
        f"{result['max_leg_deviation']:.2e} -> {out}/"
    )


@main.command("fixture")
@click.option("--out", default="paper_example.json", show_default=True, type=click.Path())
def fixture(out):
    """Write the shipped worked-example construction input."""
    from .construct import paper_fixture

    _atomic_write(Path(out), json.dumps(paper_fixture().to_json(), indent=2) + "\n")
    click.echo(f"fixture -> {out}")


if __name__ == "__main__":
    main()
