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
    CertificateStatus,
    annulus_bounds,
    closed_form_dominance,
    conjecture_probe,
    predicted_count,
    rouche_critical_curve,
    unit_disc_order_sum,
    verify_annuli,
)
from harmonic_zeros.services.zeros import census

ANNULI_OMITTED = "annulus bounds need |b - a| > 2"


def echo_verification(report):
    certificate = report.certificate
    if certificate is not None:
        if certificate.status is CertificateStatus.HOLDS:
            click.secho(
                f"✓ dominance holds on the critical curve: {certificate.implied_total} zeros implied",
                fg="green",
            )
            if report.census is not None and report.census.total != certificate.implied_total:
                click.secho(
                    f"⚠️  census found {report.census.total}, dominance implies {certificate.implied_total}",
                    fg="yellow",
                )
        else:
            click.secho(f"⚠️  dominance on the critical curve: {certificate.status.value}", fg="yellow")

    if report.annuli_report is not None:
        annuli = report.annuli_report
        if annuli.ok:
            click.secho(f"✓ annuli hold: {annuli.inner_count} inner, {annuli.outer_count} outer", fg="green")
        else:
            click.secho(
                f"⚠️  annuli: {annuli.inner_count} inner (expected {annuli.expected_inner}), "
                f"{len(annuli.gap_violations)} zero(s) outside both annuli",
                fg="yellow",
            )
    elif report.annuli_omitted:
        click.secho(f"⚠️  annuli omitted: {report.annuli_omitted}", fg="yellow")


@click.command()
@trinomial_options
def verify_cmd(**options):
    """Run the census and check it against the counting and annulus theorems."""
    try:
        cfg = build_config(**options)
    except HarmonicZerosError as e:
        fail(e)
    params = cfg.params

    def compute(report):
        report.prediction = predicted_count(params, cfg.epsilon)
        curve = trace_critical_curve(params, cfg.samples_per_loop)
        report.curve_summary = curve.summary()
        report.census = census(make_trinomial(params), cfg.grid_density, cfg.residual_tol)
        report.certificate = rouche_critical_curve(params, cfg.samples_per_loop, curve)
        report.closed_form = closed_form_dominance(params)
        if abs(params.b - params.a) > 2:
            report.bounds = annulus_bounds(params)
            report.annuli_report = verify_annuli(params, report.census)
            report.conjecture = conjecture_probe(params, report.census)
            report.unit_disc = unit_disc_order_sum(params)
        else:
            report.annuli_omitted = ANNULI_OMITTED

    def emit(report):
        written = []
        if report.census is None:
            return written
        echo_census(report.census)
        echo_verification(report)
        if cfg.wants("csv"):
            written.append(
                OutputHelper.write_csv(cfg.path("zeros.csv"), ZEROS_HEADER, zero_rows(report.census))
            )
        if cfg.wants("svg") and report.bounds is not None:
            svg = FigureService().render_annuli(
                report.bounds, report.census,
                title=f"Annuli n={params.n} k={params.k} a={params.a!r} b={params.b!r}",
            )
            written.append(OutputHelper.write_text(cfg.path("annuli.svg"), svg))
        return written

    run_report(cfg, ReportDocument("verify", params, cfg), compute, emit)
