"""
Zero census: seeded harmonic Newton, deduplication, sense classification
and certification against winding numbers.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from harmonic_zeros import get_executor, worker_count
from harmonic_zeros.errors import (
    HarmonicZerosError,
    InvalidParameter,
    NoConvergence,
    NumericalError,
    SingularJacobian,
    UnsupportedShape,
)
from harmonic_zeros.services.contour import Circle, winding_number
from harmonic_zeros.services.critical_curve import critical_modulus_bounds
from harmonic_zeros.services.harmonic import (
    HarmonicPolynomial,
    Sense,
    check_finite,
    classify_sense,
    evaluate,
    wirtinger,
)

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-6
SINGULAR_TOL = 1e-14
MAX_HALVINGS = 20
DEFAULT_MAX_ITER = 60
DEFAULT_GRID_DENSITY = 24
DEDUP_FRACTION = 1e-6
# a converged point reaches this many Newton steps when clustering
MERGE_FACTOR = 8.0
SMALL_CIRCLE_FRACTION = 1e-3
EXTRA_RINGS = 4


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    sense: Sense
    order: Optional[int]
    residual: float
    jacobian_det: float
    newton_iters: int

    @property
    def singular(self) -> bool:
        return self.sense is Sense.CRITICAL

    def to_dict(self):
        return {
            "location": {"re": self.location.real, "im": self.location.imag},
            "sense": self.sense.value,
            "order": self.order,
            "residual": self.residual,
            "jacobian_det": self.jacobian_det,
            "newton_iters": self.newton_iters,
            "singular": self.singular,
        }


@dataclass(frozen=True)
class ZeroCensus:
    zeros: Tuple[ZeroRecord, ...]
    sum_orders: int
    count_preserving: int
    count_reversing: int
    total: int
    certified: bool
    outer_radius: float = 0.0
    big_circle_turns: Optional[int] = None
    discrepancies: Tuple[str, ...] = field(default=())

    def to_dict(self):
        return {
            "zeros": [zero.to_dict() for zero in self.zeros],
            "sum_orders": self.sum_orders,
            "count_preserving": self.count_preserving,
            "count_reversing": self.count_reversing,
            "total": self.total,
            "certified": self.certified,
            "outer_radius": self.outer_radius,
            "big_circle_turns": self.big_circle_turns,
            "discrepancies": list(self.discrepancies),
        }


def outer_bound(p: HarmonicPolynomial) -> float:
    """
    Radius R with every zero of p strictly inside |z| < R.

    Trinomial family: max(1, (a + b + 1)^(1/(n-k))). Otherwise, when the
    analytic degree dominates, the Cauchy-type radius
    1 + max_{j<n}(|h_j| + |g_j|) / |h_n|.
    """
    params = p.as_trinomial()
    if params is not None:
        base = max(1.0, (params.a + params.b + 1) ** (1.0 / params.gap))
        return base * (1 + BOUND_SLACK)

    n = p.degree_h
    if n < 1 or p.degree_g >= n:
        raise UnsupportedShape(
            "No outer bound: the analytic part must have the top degree",
            {"degree_h": n, "degree_g": p.degree_g},
        )
    lead = abs(p.h_coeffs[n])
    lower = [
        abs(p.h_coeffs[j]) + (abs(p.g_coeffs[j]) if j < len(p.g_coeffs) else 0.0)
        for j in range(n)
    ]
    return (1 + max(lower) / lead) * (1 + BOUND_SLACK)


def default_residual_tol(p: HarmonicPolynomial) -> float:
    params = p.as_trinomial()
    if params is not None:
        return 1e-10 * (1 + params.a + params.b)
    return 1e-10 * (1 + p.max_coefficient)


def _record(p: HarmonicPolynomial, z: complex, residual: float, iters: int) -> ZeroRecord:
    sense = classify_sense(p, z)
    fz, fzbar = wirtinger(p, z)
    order = {Sense.PRESERVING: 1, Sense.REVERSING: -1}.get(sense)
    return ZeroRecord(
        location=z,
        sense=sense,
        order=order,
        residual=residual,
        jacobian_det=abs(fz) ** 2 - abs(fzbar) ** 2,
        newton_iters=iters,
    )


def newton_refine(
    p: HarmonicPolynomial,
    z0: complex,
    residual_tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ZeroRecord:
    """
    Damped harmonic Newton on (Re f, Im f).

    Step: Delta = (conj(f_z)(-f) - f_zbar conj(-f)) / (|f_z|^2 - |f_zbar|^2),
    halved up to 20 times until |f| decreases.

    Raises:
        SingularJacobian: |D| <= 1e-14 (|f_z|^2 + |f_zbar|^2) at an iterate
        NoConvergence: max_iter reached or damping stalled
    """
    tol = default_residual_tol(p) if residual_tol is None else residual_tol
    if not tol > 0 or max_iter < 1:
        raise InvalidParameter(
            "residual_tol and max_iter must be positive",
            {"residual_tol": tol, "max_iter": max_iter},
        )
    z = check_finite(z0)
    fv = evaluate(p, z)
    iters = 0
    while abs(fv) > tol:
        if iters >= max_iter:
            raise NoConvergence(
                "Newton did not converge",
                {"iterations": iters, "residual": abs(fv), "re": z.real, "im": z.imag},
            )
        fz, fzbar = wirtinger(p, z)
        hp, gp = abs(fz) ** 2, abs(fzbar) ** 2
        det = hp - gp
        if not abs(det) > SINGULAR_TOL * (hp + gp):
            raise SingularJacobian(
                "Jacobian vanishes at a Newton iterate (possible singular zero)",
                {"re": z.real, "im": z.imag, "jacobian_det": det},
            )
        step = (fz.conjugate() * (-fv) - fzbar * (-fv).conjugate()) / det

        current = abs(fv)
        for _ in range(MAX_HALVINGS + 1):
            trial = z + step
            ft = evaluate(p, trial)
            if abs(ft) < current:
                break
            step /= 2
        else:
            raise NoConvergence(
                "Newton damping stalled",
                {"iterations": iters, "residual": current, "re": z.real, "im": z.imag},
            )
        z, fv = trial, ft
        iters += 1

    return _record(p, z, abs(fv), iters)


def _newton_batch(
    p: HarmonicPolynomial,
    seeds: np.ndarray,
    tol: float,
    max_iter: int,
    escape: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised newton_refine; returns (points, residuals, iterations) of converged seeds"""
    z = np.array(seeds, dtype=complex)
    with np.errstate(all="ignore"):
        fv = p(z)
        done = np.abs(fv) <= tol
        failed = np.zeros(z.shape, dtype=bool)
        iters = np.zeros(z.shape, dtype=np.int64)

        for _ in range(max_iter):
            active = np.flatnonzero(~done & ~failed)
            if active.size == 0:
                break
            za, fa = z[active], fv[active]
            fz, fzbar = p.derivatives(za)
            hp, gp = np.abs(fz) ** 2, np.abs(fzbar) ** 2
            det = hp - gp
            singular = ~(np.abs(det) > SINGULAR_TOL * (hp + gp))
            step = (np.conj(fz) * (-fa) - fzbar * np.conj(-fa)) / np.where(singular, 1.0, det)

            current = np.abs(fa)
            trial = za + step
            ft = p(trial)
            worse = ~(np.abs(ft) < current) & ~singular
            for _ in range(MAX_HALVINGS):
                if not worse.any():
                    break
                idx = np.flatnonzero(worse)
                step[idx] /= 2
                trial[idx] = za[idx] + step[idx]
                ft[idx] = p(trial[idx])
                worse[idx] = ~(np.abs(ft[idx]) < current[idx])

            bad = singular | worse | ~np.isfinite(trial) | (np.abs(trial) > escape)
            good = active[~bad]
            z[good] = trial[~bad]
            fv[good] = ft[~bad]
            iters[good] += 1
            done[good] = np.abs(ft[~bad]) <= tol
            failed[active[bad]] = True

    return z[done], np.abs(fv[done]), iters[done]


def seed_points(p: HarmonicPolynomial, grid_density: int, radius: float) -> np.ndarray:
    """
    Polar seed grid: grid_density rings x 8*grid_density angles over the
    disc, plus rings across the critical-curve band and the annuli of the
    trinomial family.
    """
    rings = list(radius * (np.arange(grid_density) + 0.5) / grid_density)

    params = p.as_trinomial()
    if params is not None:
        from harmonic_zeros.services.theorems import annulus_bounds

        r_lo, r_hi = critical_modulus_bounds(params)
        rings += list(np.linspace(r_lo, r_hi, EXTRA_RINGS))
        if abs(params.b - params.a) > 2:
            bounds = annulus_bounds(params)
            rings += list(np.linspace(bounds.R1, bounds.R2, EXTRA_RINGS))
            rings += list(np.linspace(bounds.R3, bounds.R4, EXTRA_RINGS))

    count = 8 * grid_density
    angles = 2 * np.pi * np.arange(count) / count
    seeds = []
    for i, r in enumerate(rings):
        if r <= 0:
            continue
        offset = (0.5 * (i % 2) + 0.1) * 2 * np.pi / count
        seeds.append(r * np.exp(1j * (angles + offset)))
    return np.concatenate(seeds)


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting points by (|z|, arg z)"""
    return np.lexsort((np.angle(points), np.abs(points)))


def newton_reach(p: HarmonicPolynomial, points: np.ndarray) -> np.ndarray:
    """Length of the next harmonic Newton step from each point (0 where D vanishes)"""
    points = np.asarray(points, dtype=complex)
    with np.errstate(all="ignore"):
        fv = p(points)
        fz, fzbar = p.derivatives(points)
        det = np.abs(fz) ** 2 - np.abs(fzbar) ** 2
        reach = np.abs(np.conj(fz) * fv - fzbar * np.conj(fv)) / np.abs(det)
    return np.where(np.isfinite(reach), reach, 0.0)


def cluster(
    points: np.ndarray,
    residuals: np.ndarray,
    radius: float,
    reach: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Greedy clustering of converged points, smallest residual first.

    Two points join when they are within radius + reach_i + reach_j of each
    other. Newton stops about tol^(1/m) short of an m-fold zero, so the
    reach term is what pulls such a ring of points into one cluster.

    Returns the representative indices in canonical order and, for each,
    the largest distance to a point merged into it.
    """
    reach = np.zeros(points.shape) if reach is None else np.asarray(reach, dtype=float)
    order = np.lexsort((np.angle(points), np.abs(points), residuals))
    kept: List[int] = []
    spread: List[float] = []
    for i in order:
        if kept:
            reps = np.array(kept, dtype=np.int64)
            dist = np.abs(points[reps] - points[i])
            hits = np.flatnonzero(dist <= radius + reach[reps] + reach[i])
            if hits.size:
                j = int(hits[np.argmin(dist[hits])])
                spread[j] = max(spread[j], float(dist[j]))
                continue
        kept.append(int(i))
        spread.append(0.0)
    kept_arr = np.array(kept, dtype=np.int64)
    canon = canonical_order(points[kept_arr])
    return kept_arr[canon], np.array(spread, dtype=float)[canon]


def deduplicate(
    points: np.ndarray,
    residuals: np.ndarray,
    radius: float,
    reach: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Indices of representatives, keeping the smallest residual in each cluster"""
    return cluster(points, residuals, radius, reach)[0]


def _refine_seeds(p, seeds, tol, max_iter, escape, parallel=True):
    workers = worker_count()
    if not parallel or workers <= 1 or seeds.size < 2 * workers:
        return _newton_batch(p, seeds, tol, max_iter, escape)
    chunks = np.array_split(seeds, workers)
    results = list(
        get_executor().map(lambda chunk: _newton_batch(p, chunk, tol, max_iter, escape), chunks)
    )
    return tuple(np.concatenate(parts) for parts in zip(*results))


def _small_circle_radius(points: np.ndarray, i: int, cap: float, spread: float = 0.0) -> float:
    radius = cap
    if points.size > 1:
        others = np.abs(np.delete(points, i) - points[i])
        radius = min(0.5 * float(others.min()), cap)
    # the circle must enclose every point merged into the cluster
    return max(radius, 2 * spread)


def census(
    p: HarmonicPolynomial,
    grid_density: int = DEFAULT_GRID_DENSITY,
    residual_tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    parallel: bool = True,
) -> ZeroCensus:
    """
    Locate, classify and certify all zeros of p.

    The census is certified when the order sum matches the winding number
    on |z| = outer_bound(p), every small-circle winding agrees with the
    sense of its zero, and no zero is singular. A failed certification is
    reported in `discrepancies`, never raised. Newton points around one
    multiple zero are merged into a single record whose order is the
    winding on a circle enclosing the whole cluster.

    parallel=False keeps Newton on the calling thread (for callers already
    running on the worker pool).
    """
    if grid_density < 1:
        raise InvalidParameter("grid_density must be >= 1", {"grid_density": grid_density})
    tol = default_residual_tol(p) if residual_tol is None else residual_tol
    radius = outer_bound(p)

    seeds = seed_points(p, grid_density, radius)
    points, residuals, iters = _refine_seeds(p, seeds, tol, max_iter, 10 * radius, parallel)
    reach = MERGE_FACTOR * newton_reach(p, points)
    kept, spread = cluster(points, residuals, DEDUP_FRACTION * radius, reach)
    points = points[kept]
    logger.debug("census: %d seeds, %d distinct zeros", seeds.size, points.size)

    discrepancies: List[str] = []
    zeros: List[ZeroRecord] = []
    cap = SMALL_CIRCLE_FRACTION * radius
    for i, z in enumerate(points):
        z = complex(z)
        record = _record(p, z, float(residuals[kept[i]]), int(iters[kept[i]]))
        if record.singular:
            discrepancies.append(f"singular zero at {z!r}")
            zeros.append(record)
            continue
        try:
            turns = winding_number(p, Circle(z, _small_circle_radius(points, i, cap, spread[i]), 64)).turns
        except HarmonicZerosError as e:
            discrepancies.append(f"small-circle winding failed at {z!r}: {e.error}")
            zeros.append(record)
            continue
        if (record.sense is Sense.PRESERVING and turns < 1) or (
            record.sense is Sense.REVERSING and turns > -1
        ):
            discrepancies.append(
                f"winding {turns} disagrees with {record.sense.value} zero at {z!r}"
            )
            zeros.append(record)
            continue
        zeros.append(
            ZeroRecord(
                location=record.location,
                sense=record.sense,
                order=turns,
                residual=record.residual,
                jacobian_det=record.jacobian_det,
                newton_iters=record.newton_iters,
            )
        )

    big_turns = None
    try:
        big_turns = winding_number(p, Circle(0j, radius, max(256, 16 * p.degree_h))).turns
    except HarmonicZerosError as e:
        discrepancies.append(f"outer winding failed: {e.error}")

    sum_orders = sum(zero.order for zero in zeros if zero.order is not None)
    if big_turns is not None and big_turns != sum_orders:
        discrepancies.append(
            f"order sum {sum_orders} differs from outer winding {big_turns}"
        )

    count_preserving = sum(1 for zero in zeros if zero.sense is Sense.PRESERVING)
    count_reversing = sum(1 for zero in zeros if zero.sense is Sense.REVERSING)
    result = ZeroCensus(
        zeros=tuple(zeros),
        sum_orders=sum_orders,
        count_preserving=count_preserving,
        count_reversing=count_reversing,
        total=count_preserving + count_reversing,
        certified=not discrepancies,
        outer_radius=radius,
        big_circle_turns=big_turns,
        discrepancies=tuple(discrepancies),
    )
    if discrepancies:
        logger.warning("census not certified: %s", "; ".join(discrepancies))
    return result


def grid_oracle(
    p: HarmonicPolynomial,
    resolution: int = 2001,
    radius: Optional[float] = None,
    residual_tol: Optional[float] = None,
) -> List[complex]:
    """
    Brute-force zero finder independent of the census seeding.

    Evaluates |f| on a resolution x resolution grid covering the bounding
    disc, keeps grid-local minima lying within about one cell of a zero of
    the local linearisation, polishes them with newton_refine and
    deduplicates.
    """
    radius = outer_bound(p) if radius is None else radius
    half = 1.02 * radius
    xs = np.linspace(-half, half, resolution)
    step = float(xs[1] - xs[0])
    grid = xs[None, :] + 1j * xs[:, None]
    with np.errstate(all="ignore"):
        modulus = np.abs(p(grid))

    centre = modulus[1:-1, 1:-1]
    is_min = np.abs(grid[1:-1, 1:-1]) <= radius
    rows, cols = modulus.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= centre <= modulus[1 + di:rows - 1 + di, 1 + dj:cols - 1 + dj]

    candidates = grid[1:-1, 1:-1][is_min]
    fz, fzbar = p.derivatives(candidates)
    near = centre[is_min] <= 1.5 * step * (np.abs(fz) + np.abs(fzbar))

    found, residuals = [], []
    for z0 in candidates[near]:
        try:
            record = newton_refine(p, complex(z0), residual_tol)
        except NumericalError:
            continue
        found.append(record.location)
        residuals.append(record.residual)
    if not found:
        return []
    points = np.array(found, dtype=complex)
    reach = MERGE_FACTOR * newton_reach(p, points)
    kept = deduplicate(points, np.array(residuals), DEDUP_FRACTION * radius, reach)
    return [complex(z) for z in points[kept]]
