"""
Executable zero-counting and zero-locating results for the trinomial
family z^n + a z^k + b conj(z)^k - 1.

Counting: the order sum over the plane is n. When the larger middle term
dominates the rest of f along the whole critical curve, the curve's
interior holds k sense-reversing zeros (b > a) or none (a > b), giving
n + 2k or n zeros. Locating: for |b - a| > 2 every zero lies in
[R1, R2] (k of them) or [R3, R4].
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from harmonic_zeros import get_executor
from harmonic_zeros.errors import (
    BudgetExceeded,
    HarmonicZerosError,
    HypothesisNotMet,
    InvalidParameter,
)
from harmonic_zeros.services.contour import (
    Circle,
    DominanceReport,
    dominance_check,
    winding_number,
)
from harmonic_zeros.services.critical_curve import (
    DEFAULT_SAMPLES_PER_LOOP,
    CriticalCurve,
    trace_critical_curve,
)
from harmonic_zeros.services.harmonic import Regime, TrinomialParams, make_trinomial
from harmonic_zeros.services.zeros import DEFAULT_GRID_DENSITY, ZeroCensus, census

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class AnnulusBounds:
    R1: float
    R2: float
    R3: float
    R4: float
    M: float
    m: float

    def to_dict(self):
        return {
            "R1": self.R1,
            "R2": self.R2,
            "R3": self.R3,
            "R4": self.R4,
            "M": self.M,
            "m": self.m,
        }


@dataclass(frozen=True)
class AnnulusReport:
    inner_count: int
    outer_count: int
    gap_violations: Tuple[complex, ...]
    expected_inner: int
    expected_outer: int

    @property
    def ok(self) -> bool:
        return (
            not self.gap_violations
            and self.inner_count == self.expected_inner
            and self.outer_count == self.expected_outer
        )

    def to_dict(self):
        return {
            "inner_count": self.inner_count,
            "outer_count": self.outer_count,
            "expected_inner": self.expected_inner,
            "expected_outer": self.expected_outer,
            "gap_violations": [{"re": z.real, "im": z.imag} for z in self.gap_violations],
            "ok": self.ok,
        }


class CertificateStatus(str, Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class RoucheCertificate:
    """Dominance of the larger middle term along the critical curve

    implied_reversing / implied_total are only set when the dominance holds;
    a failed or inconclusive check implies nothing about the count.
    """

    dominance: Optional[DominanceReport]
    regime: Regime
    status: CertificateStatus
    implied_reversing: Optional[int]
    implied_total: Optional[int]
    loop_reports: Tuple[DominanceReport, ...] = ()

    def to_dict(self):
        return {
            "dominance": self.dominance.to_dict() if self.dominance else None,
            "regime": self.regime.value,
            "status": self.status.value,
            "implied_reversing": self.implied_reversing,
            "implied_total": self.implied_total,
            "loops": len(self.loop_reports),
        }


@dataclass(frozen=True)
class CountPrediction:
    ratio: float
    threshold: float
    epsilon: float
    regime: Regime
    hypothesis_met: bool
    predicted_total: int
    # the theorems only guarantee the count beyond an unknown b0 / a0
    asymptotic_caveat: bool = True

    def to_dict(self):
        return {
            "ratio": self.ratio,
            "threshold": self.threshold,
            "epsilon": self.epsilon,
            "regime": self.regime.value,
            "hypothesis_met": self.hypothesis_met,
            "predicted_total": self.predicted_total,
            "asymptotic_caveat": self.asymptotic_caveat,
        }


@dataclass(frozen=True)
class ConjectureProbe:
    sharp_R2: float
    respected: bool
    inner_max_modulus: Optional[float]

    def to_dict(self):
        return {
            "sharp_R2": self.sharp_R2,
            "respected": self.respected,
            "inner_max_modulus": self.inner_max_modulus,
        }


@dataclass(frozen=True)
class ClosedFormDominance:
    factor: float
    dominant: float
    holds: bool

    def to_dict(self):
        return {"factor": self.factor, "dominant": self.dominant, "holds": self.holds}


@dataclass(frozen=True)
class UnitDiscReport:
    turns: int
    expected: int
    dominance: DominanceReport

    @property
    def agrees(self) -> bool:
        return self.turns == self.expected

    def to_dict(self):
        return {
            "turns": self.turns,
            "expected": self.expected,
            "agrees": self.agrees,
            "dominance": self.dominance.to_dict(),
        }


SWEEP_HEADER = ("n", "k", "a", "b", "total", "predicted", "reversing", "dominance", "agreement", "certified")


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    a: float
    b: float
    total: Optional[int] = None
    predicted: Optional[int] = None
    reversing: Optional[int] = None
    dominance: Optional[str] = None
    agreement: bool = False
    certified: bool = False
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def _middle_terms(params: TrinomialParams):
    """(dominant, remainder) evaluators for the regime's Rouché split"""
    n, k, a, b = params.n, params.k, params.a, params.b
    if params.regime is Regime.BIG_B:
        return (lambda z: b * z ** k), (lambda z: z ** n + a * z ** k - 1)
    return (lambda z: a * z ** k), (lambda z: z ** n + b * np.conj(z) ** k - 1)


def annulus_bounds(params: TrinomialParams) -> AnnulusBounds:
    """Radii R1 < R2 < 1 < R3 < R4 of the two zero-bearing annuli"""
    if not abs(params.b - params.a) > 2:
        raise HypothesisNotMet(
            "Annulus bounds need |b - a| > 2", {"a": params.a, "b": params.b}
        )
    big, small, k, gap = params.big, params.small, params.k, params.gap
    outer = big + small + 1
    inner = big - small - 1
    return AnnulusBounds(
        R1=outer ** (-1.0 / k),
        R2=inner ** (-1.0 / k),
        R3=inner ** (1.0 / gap),
        R4=outer ** (1.0 / gap),
        M=big,
        m=small,
    )


def annulus_ratios(bounds: AnnulusBounds) -> Tuple[float, float]:
    """(R1/R2, R3/R4); both tend to 1 as |b - a| grows"""
    return bounds.R1 / bounds.R2, bounds.R3 / bounds.R4


def verify_annuli(params: TrinomialParams, zero_census: ZeroCensus) -> AnnulusReport:
    """Check every census zero against the annuli; violations are reported, not raised"""
    bounds = annulus_bounds(params)
    if not zero_census.certified:
        logger.warning("verifying annuli against an uncertified census")

    inner = outer = 0
    violations: List[complex] = []
    for zero in zero_census.zeros:
        r = abs(zero.location)
        if bounds.R1 <= r <= bounds.R2:
            inner += 1
        elif bounds.R3 <= r <= bounds.R4:
            outer += 1
        else:
            violations.append(zero.location)

    return AnnulusReport(
        inner_count=inner,
        outer_count=outer,
        gap_violations=tuple(violations),
        expected_inner=params.k,
        expected_outer=zero_census.total - params.k,
    )


def rouche_critical_curve(
    params: TrinomialParams,
    samples_per_loop: int = DEFAULT_SAMPLES_PER_LOOP,
    curve: Optional[CriticalCurve] = None,
) -> RoucheCertificate:
    """
    Test whether the larger middle term dominates along every loop of the
    critical curve.

    b > a: b z^k against z^n + a z^k - 1; dominance puts k zeros inside the
    curve, so f has n + 2k zeros. a > b: a z^k against
    z^n + b conj(z)^k - 1; dominance leaves the inside empty, so f has n.
    """
    curve = curve or trace_critical_curve(params, samples_per_loop)
    dominant, remainder = _middle_terms(params)

    try:
        reports = tuple(dominance_check(dominant, remainder, loop) for loop in curve.loops)
    except BudgetExceeded as e:
        logger.warning("critical-curve dominance inconclusive: %s", e.message)
        return RoucheCertificate(None, params.regime, CertificateStatus.INCONCLUSIVE, None, None)

    worst = min(reports, key=lambda report: report.margin)
    combined = DominanceReport(
        holds=all(report.holds for report in reports),
        margin=worst.margin,
        argmin_point=worst.argmin_point,
        samples_used=sum(report.samples_used for report in reports),
    )
    if not combined.holds:
        return RoucheCertificate(
            combined, params.regime, CertificateStatus.FAILS, None, None, reports
        )

    if params.regime is Regime.BIG_B:
        reversing, total = params.k, params.n + 2 * params.k
    else:
        reversing, total = 0, params.n
    return RoucheCertificate(
        combined, params.regime, CertificateStatus.HOLDS, reversing, total, reports
    )


def loop_windings(params: TrinomialParams, curve: Optional[CriticalCurve] = None) -> List[int]:
    """Winding number of f along each traced critical-curve loop"""
    curve = curve or trace_critical_curve(params)
    p = make_trinomial(params)
    return [winding_number(p, loop).turns for loop in curve.loops]


def predicted_count(params: TrinomialParams, epsilon: float = DEFAULT_EPSILON) -> CountPrediction:
    """Zero count promised by the counting theorems for large enough b (or a)"""
    threshold = (params.n - params.k) / (params.n + params.k)
    if not 0 < epsilon < threshold:
        raise InvalidParameter(
            "epsilon must lie in (0, (n - k)/(n + k))",
            {"epsilon": epsilon, "threshold": threshold},
        )
    ratio = params.small / params.big
    total = params.n + 2 * params.k if params.regime is Regime.BIG_B else params.n
    return CountPrediction(
        ratio=ratio,
        threshold=threshold,
        epsilon=epsilon,
        regime=params.regime,
        hypothesis_met=ratio < threshold - epsilon,
        predicted_total=total,
    )


def conjecture_probe(params: TrinomialParams, zero_census: ZeroCensus) -> ConjectureProbe:
    """Empirical check of the sharper inner radius (b + a - 1)^(-1/k)"""
    bounds = annulus_bounds(params)
    sharp = (params.a + params.b - 1) ** (-1.0 / params.k)
    inner = [abs(zero.location) for zero in zero_census.zeros if abs(zero.location) <= bounds.R2]
    return ConjectureProbe(
        sharp_R2=sharp,
        respected=all(r <= sharp for r in inner),
        inner_max_modulus=max(inner) if inner else None,
    )


def closed_form_dominance(params: TrinomialParams) -> ClosedFormDominance:
    """
    Sampling-free dominance test on the critical curve.

    Using k(M - m)/n <= |z|^(n-k) <= k(M + m)/n on the curve, the remainder
    is at most |z|^k * (k(M + m)/n + m + (k(M - m)/n)^(-k/(n-k))).
    """
    n, k, big, small = params.n, params.k, params.big, params.small
    factor = k * (big + small) / n + small + (k * (big - small) / n) ** (-k / (n - k))
    return ClosedFormDominance(factor=factor, dominant=big, holds=factor < big)


def unit_disc_order_sum(params: TrinomialParams) -> UnitDiscReport:
    """Order sum inside |z| = 1, which is -k (b > a) or +k (a > b) when |b - a| > 2"""
    if not abs(params.b - params.a) > 2:
        raise HypothesisNotMet(
            "Unit-disc count needs |b - a| > 2", {"a": params.a, "b": params.b}
        )
    unit = Circle(0j, 1.0)
    dominant, remainder = _middle_terms(params)
    turns = winding_number(make_trinomial(params), unit).turns
    expected = -params.k if params.regime is Regime.BIG_B else params.k
    return UnitDiscReport(turns, expected, dominance_check(dominant, remainder, unit))


def _sweep_cell(cell) -> SweepRow:
    n, k, a, b, epsilon, grid_density, samples_per_loop = cell
    try:
        params = TrinomialParams(n, k, a, b)
        result = census(make_trinomial(params), grid_density, parallel=False)
        prediction = predicted_count(params, epsilon)
        certificate = rouche_critical_curve(params, samples_per_loop)
    except HarmonicZerosError as e:
        logger.debug("sweep cell (a=%s, b=%s) failed: %s", a, b, e.error)
        return SweepRow(n, k, a, b, error=e.error)
    return SweepRow(
        n,
        k,
        params.a,
        params.b,
        total=result.total,
        predicted=prediction.predicted_total,
        reversing=result.count_reversing,
        dominance=certificate.status.value,
        agreement=result.certified and result.total == prediction.predicted_total,
        certified=result.certified,
    )


def sweep(
    n: int,
    k: int,
    a_values: Iterable[float],
    b_values: Iterable[float],
    epsilon: float = DEFAULT_EPSILON,
    grid_density: int = DEFAULT_GRID_DENSITY,
    samples_per_loop: int = DEFAULT_SAMPLES_PER_LOOP,
    progress: bool = False,
) -> List[SweepRow]:
    """
    Census every (a, b) cell of the grid.

    Cells run on the worker pool; rows come back ordered by (a, b). A
    failing cell records its error code and never aborts the sweep.
    """
    if not (isinstance(n, int) and isinstance(k, int) and 1 <= k < n):
        raise InvalidParameter("Sweep needs integers 1 <= k < n", {"n": n, "k": k})
    cells = [
        (n, k, float(a), float(b), epsilon, grid_density, samples_per_loop)
        for a in sorted(set(a_values))
        for b in sorted(set(b_values))
    ]
    if not cells:
        raise InvalidParameter("Sweep ranges are empty")

    rows = get_executor().map(_sweep_cell, cells)
    return list(tqdm(rows, total=len(cells), desc="sweep", unit="cell", disable=not progress))


def stabilization_point(
    rows: Sequence[SweepRow], value: int, key: str = "b"
) -> Optional[float]:
    """
    First swept parameter after which every row's census total equals value.

    Returns None when the last row already differs.
    """
    ordered = sorted(rows, key=lambda row: getattr(row, key))
    start = None
    for row in reversed(ordered):
        if row.failed or row.total != value:
            break
        start = getattr(row, key)
    return start
