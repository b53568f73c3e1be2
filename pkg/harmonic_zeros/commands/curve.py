import click

from harmonic_zeros.commands.common import (
    build_config,
    echo_census,
    fail,
    run_report,
    trinomial_options,
)
from harmonic_zeros.errors import HarmonicZerosError
from harmonic_zeros.output import OutputHelper
from harmonic_zeros.services.critical_curve import trace_critical_curve
from harmonic_zeros.services.figures import FigureService
from harmonic_zeros.services.harmonic import make_trinomial
from harmonic_zeros.services.report import ReportDocument
from harmonic_zeros.services.zeros import census, outer_bound

CURVE_HEADER = ("loop_index", "t", "re", "im")


def curve_rows(curve):
    for index, (loop, ts) in enumerate(zip(curve.loops, curve.parameters)):
        for t, z in zip(ts, loop.points):
            yield (index, float(t), z.real, z.imag)


@click.command()
@trinomial_options
@click.option("--with-zeros", is_flag=True, help="Overlay the census zeros on curve.svg.")
def curve_cmd(with_zeros, **options):
    """Trace the critical curve |h'(z)| = |g'(z)| loop by loop."""
    try:
        cfg = build_config(**options)
    except HarmonicZerosError as e:
        fail(e)
    params = cfg.params
    state = {}

    def compute(report):
        state["curve"] = trace_critical_curve(params, cfg.samples_per_loop)
        report.curve_summary = state["curve"].summary()
        if with_zeros:
            report.census = census(make_trinomial(params), cfg.grid_density, cfg.residual_tol)

    def emit(report):
        written = []
        curve = state.get("curve")
        if curve is None:
            return written
        click.echo(f"  critical curve: {curve.loop_count} loop(s), {curve.topology.value}")
        if report.census is not None:
            echo_census(report.census)
        if cfg.wants("csv"):
            written.append(OutputHelper.write_csv(cfg.path("curve.csv"), CURVE_HEADER, curve_rows(curve)))
        if cfg.wants("svg"):
            radius = outer_bound(make_trinomial(params))
            svg = FigureService().render_curve(
                curve, radius, report.census,
                title=f"Critical curve n={params.n} k={params.k} a={params.a!r} b={params.b!r}",
            )
            written.append(OutputHelper.write_text(cfg.path("curve.svg"), svg))
        return written

    run_report(cfg, ReportDocument("curve", params, cfg), compute, emit)
