import math
import os
import sys
import time

import click

from harmonic_zeros import config
from harmonic_zeros.commands.common import fail, fail_unexpected
from harmonic_zeros.errors import HarmonicZerosError, InvalidParameter, error_class
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.figures import FigureService
from harmonic_zeros.services.report import FORMATS, parse_formats, sweep_document
from harmonic_zeros.services.theorems import SWEEP_HEADER, stabilization_point, sweep


def parse_range(text, name):
    """'start:stop:step' (stop included) or a comma list of values"""
    text = (text or "").strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if not (step > 0 and math.isfinite(start) and math.isfinite(stop)):
                raise InvalidParameter(f"{name} range needs a positive step", {name: text})
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(max(count, 0))]
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidParameter(f"Cannot parse {name} range", {name: text}) from e
    if not values:
        raise InvalidParameter(f"{name} range is empty", {name: text})
    return values


def sweep_csv_row(row):
    dominance = f"ERROR:{row.error}" if row.failed else row.dominance
    return (
        row.n, row.k, row.a, row.b, row.total, row.predicted, row.reversing,
        dominance, row.agreement, row.certified,
    )


def stabilization(rows, a_values, b_values):
    """Where a single-parameter ray settles on its predicted count"""
    if len(a_values) == 1 and len(b_values) > 1:
        key = "b"
    elif len(b_values) == 1 and len(a_values) > 1:
        key = "a"
    else:
        return None
    last = max(rows, key=lambda row: getattr(row, key))
    if last.failed:
        return {"key": key, "value": None, "point": None}
    return {"key": key, "value": last.predicted, "point": stabilization_point(rows, last.predicted, key)}


@click.command()
@click.option("--n", "n", type=int, required=True, help="Degree of the analytic leading term.")
@click.option("--k", "k", type=int, required=True, help="Degree of the middle terms.")
@click.option("--a-range", required=True, help="a values: start:stop:step or a comma list.")
@click.option("--b-range", required=True, help="b values: start:stop:step or a comma list.")
@click.option("--epsilon", type=float, default=None, help="Theorem margin (default HZ_EPSILON).")
@click.option("--grid-density", type=int, default=None, help="Census seed rings (default HZ_GRID_DENSITY).")
@click.option("--samples-per-loop", type=int, default=None, help="Critical-curve samples per loop.")
@click.option("--out", "out", default=None, help="Output directory (default HZ_OUTPUT_DIR).")
@click.option("--format", "fmt", default="json,csv,svg", show_default=True, help="Comma list of json,csv,svg.")
@click.option("--quiet", is_flag=True, help="Hide the progress bar.")
def sweep_cmd(n, k, a_range, b_range, epsilon, grid_density, samples_per_loop, out, fmt, quiet):
    """Census every (a, b) cell of a grid and compare with the predicted counts."""
    epsilon = config["epsilon"] if epsilon is None else epsilon
    out = config["output_dir"] if out is None else out
    start = time.perf_counter()
    try:
        formats = parse_formats(fmt)
        if not formats or formats - FORMATS:
            raise InvalidParameter("formats must be a non-empty subset of json,csv,svg", {"format": fmt})
        a_values = parse_range(a_range, "a")
        b_values = parse_range(b_range, "b")
        rows = sweep(
            n, k, a_values, b_values,
            epsilon=epsilon,
            grid_density=config["grid_density"] if grid_density is None else grid_density,
            samples_per_loop=config["samples_per_loop"] if samples_per_loop is None else samples_per_loop,
            progress=not quiet and sys.stderr.isatty(),
        )
    except HarmonicZerosError as e:
        fail(e)
    except Exception as e:
        fail_unexpected(e)

    settled = stabilization(rows, a_values, b_values)
    wall_time_ms = round(1000 * (time.perf_counter() - start), 3)
    try:
        written = []
        if "csv" in formats:
            written.append(
                OutputHelper.write_csv(
                    os.path.join(out, "sweep.csv"), SWEEP_HEADER, (sweep_csv_row(row) for row in rows)
                )
            )
        if "svg" in formats:
            svg = FigureService().render_sweep(rows, title=f"Sweep n={n} k={k}")
            written.append(OutputHelper.write_text(os.path.join(out, "sweep.svg"), svg))
        if "json" in formats:
            document = sweep_document(n, k, epsilon, rows, settled, wall_time_ms)
            written.append(OutputHelper.write_json(os.path.join(out, "report.json"), document))
    except OSError as e:
        fail_unexpected(e)

    failed = [row for row in rows if row.failed]
    click.echo(f"  cells: {len(rows)}, failed: {len(failed)}")
    if settled and settled["point"] is not None:
        click.secho(
            f"✓ total settles at {settled['value']} from {settled['key']} = {settled['point']!r}",
            fg="green",
        )
    elif settled:
        click.secho(f"⚠️  total does not settle along {settled['key']}", fg="yellow")
    for path in written:
        click.echo(f"✓ wrote {path}")

    if failed and len(failed) == len(rows):
        cls = error_class(failed[0].error)
        fail(cls("Every sweep cell failed", {"cells": len(rows), "first_error": failed[0].error}))
