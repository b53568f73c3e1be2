import click

from harmonic_zeros.commands.common import (
    ZEROS_HEADER,
    build_config,
    echo_census,
    fail,
    run_report,
    trinomial_options,
    zero_rows,
)
from harmonic_zeros.errors import HarmonicZerosError
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.critical_curve import trace_critical_curve
from harmonic_zeros.services.figures import FigureService
from harmonic_zeros.services.harmonic import make_trinomial
from harmonic_zeros.services.report import ReportDocument
from harmonic_zeros.services.theorems import (
    annulus_bounds,
    predicted_count,
    rouche_critical_curve,
)
from harmonic_zeros.services.zeros import census


@click.command()
@trinomial_options
def zeros_cmd(**options):
    """Locate, classify and certify every zero of z^n + a z^k + b conj(z)^k - 1."""
    try:
        cfg = build_config(**options)
    except HarmonicZerosError as e:
        fail(e)
    params = cfg.params

    def compute(report):
        report.prediction = predicted_count(params, cfg.epsilon)
        report.census = census(make_trinomial(params), cfg.grid_density, cfg.residual_tol)
        curve = trace_critical_curve(params, cfg.samples_per_loop)
        report.curve_summary = curve.summary()
        report.certificate = rouche_critical_curve(params, cfg.samples_per_loop, curve)
        if abs(params.b - params.a) > 2:
            report.bounds = annulus_bounds(params)

    def emit(report):
        written = []
        if report.census is None:
            return written
        echo_census(report.census)
        if cfg.wants("csv"):
            written.append(
                OutputHelper.write_csv(cfg.path("zeros.csv"), ZEROS_HEADER, zero_rows(report.census))
            )
        if cfg.wants("svg"):
            svg = FigureService().render_zeros(
                report.census, title=f"Zeros n={params.n} k={params.k} a={params.a!r} b={params.b!r}"
            )
            written.append(OutputHelper.write_text(cfg.path("zeros.svg"), svg))
        return written

    run_report(cfg, ReportDocument("zeros", params, cfg), compute, emit)
