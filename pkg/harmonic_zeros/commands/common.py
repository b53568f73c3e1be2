import logging
import time

import click

from harmonic_zeros import config
from harmonic_zeros.errors import CertificationFailed, HarmonicZerosError
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.report import RunConfig
from harmonic_zeros.services.zeros import ZeroCensus

logger = logging.getLogger(__name__)

ZEROS_HEADER = ("re", "im", "sense", "order", "residual")


def trinomial_options(fn):
    """--n --k --a --b plus the run-configuration flags shared by every command"""
    options = [
        click.option("--n", "n", type=int, required=True, help="Degree of the analytic leading term."),
        click.option("--k", "k", type=int, required=True, help="Degree of the middle terms."),
        click.option("--a", "a", type=float, required=True, help="Coefficient of z^k."),
        click.option("--b", "b", type=float, required=True, help="Coefficient of conj(z)^k."),
        click.option("--epsilon", type=float, default=None, help="Theorem margin (default HZ_EPSILON)."),
        click.option("--grid-density", type=int, default=None, help="Census seed rings (default HZ_GRID_DENSITY)."),
        click.option(
            "--samples-per-loop", type=int, default=None,
            help="Critical-curve samples per loop (default HZ_SAMPLES_PER_LOOP).",
        ),
        click.option("--residual-tol", type=float, default=None, help="Newton acceptance |f| tolerance."),
        click.option("--out", "out", default=None, help="Output directory (default HZ_OUTPUT_DIR)."),
        click.option("--format", "fmt", default="json,csv,svg", show_default=True, help="Comma list of json,csv,svg."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def build_config(n, k, a, b, epsilon, grid_density, samples_per_loop, residual_tol, out, fmt):
    """Flags override the environment defaults"""
    return RunConfig(
        n=n,
        k=k,
        a=a,
        b=b,
        grid_density=config["grid_density"] if grid_density is None else grid_density,
        samples_per_loop=config["samples_per_loop"] if samples_per_loop is None else samples_per_loop,
        residual_tol=residual_tol,
        epsilon=config["epsilon"] if epsilon is None else epsilon,
        output_dir=config["output_dir"] if out is None else out,
        formats=fmt,
    )


def fail(e: HarmonicZerosError):
    click.secho(f"✗ {e.error}: {e.message}", fg="red", err=True)
    for key, value in e.details.items():
        click.echo(f"    {key}: {value}", err=True)
    raise SystemExit(e.exit_code)


def fail_unexpected(e: Exception):
    logger.exception("unexpected failure")
    click.secho(f"✗ INTERNAL_ERROR: {e}", fg="red", err=True)
    raise SystemExit(1)


def zero_rows(census: ZeroCensus):
    for zero in census.zeros:
        yield (zero.location.real, zero.location.imag, zero.sense.value, zero.order, zero.residual)


def echo_census(census: ZeroCensus):
    click.echo(
        f"  zeros: {census.total} "
        f"({census.count_preserving} preserving, {census.count_reversing} reversing), "
        f"order sum {census.sum_orders}"
    )
    if census.certified:
        click.secho("✓ census certified", fg="green")
    else:
        click.secho("⚠️  census not certified", fg="yellow")
        for problem in census.discrepancies:
            click.echo(f"    {problem}")


def run_report(cfg: RunConfig, report, compute, emit):
    """
    Compute a report, write it, and map failures to exit codes.

    A numerical failure or an uncertified census still writes whatever was
    computed, with the error envelope in the report, before exiting.
    """
    start = time.perf_counter()
    error = None
    try:
        compute(report)
    except HarmonicZerosError as e:
        error = e
    except Exception as e:
        fail_unexpected(e)

    if error is None and report.census is not None and not report.census.certified:
        error = CertificationFailed(
            "Census could not be certified",
            {"discrepancies": list(report.census.discrepancies)},
        )
    if error is None and not report.consistent:
        error = CertificationFailed(
            "Census summary disagrees with its zero list",
            {"total": report.census.total, "zeros": len(report.census.zeros)},
        )
    if error is not None:
        report.error = error.to_dict()
    report.wall_time_ms = round(1000 * (time.perf_counter() - start), 3)

    try:
        written = []
        if cfg.wants("json"):
            written.append(OutputHelper.write_json(cfg.path("report.json"), report.to_dict()))
        written.extend(emit(report))
    except OSError as e:
        fail_unexpected(e)

    for path in written:
        click.echo(f"✓ wrote {path}")
    if error is not None:
        fail(error)
    return report
