"""
Critical curve of z^n + a z^k + b conj(z)^k - 1.

On the curve |n z^(n-k) + a k| = b k, so with m = n - k the curve is the
z^m-preimage of the circle

    w(t) = (-a k + b k e^{it}) / n,   z = w^(1/m).

The argument of w is lifted analytically (never via principal roots):

    b > a:  arg w = t + angle(1 - (a/b) e^{-it})        winds once per 2*pi
    a > b:  arg w = pi + angle(1 - (b/a) e^{it})         never winds

so b > a gives one loop around the origin (t over [0, 2*pi*m)) and a > b
gives m pockets, one per branch of the m-th root.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np

from harmonic_zeros.errors import InvalidParameter
from harmonic_zeros.services.contour import Polyline
from harmonic_zeros.services.harmonic import Regime, TrinomialParams, check_finite

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES_PER_LOOP = 1024
MIN_SAMPLES_PER_LOOP = 64
MAX_SAMPLES_PER_LOOP = 2 ** 18
# max gap between consecutive traced points, as a fraction of r_hi
GAP_FRACTION = 0.01


class Topology(str, Enum):
    SINGLE_LOOP = "SingleLoop"
    MULTI_LOOP = "MultiLoop"


@dataclass(frozen=True)
class CriticalCurve:
    loops: Tuple[Polyline, ...]
    topology: Topology
    params: TrinomialParams
    parameters: Tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)
    degenerate_points: Tuple[complex, ...] = ()

    @property
    def loop_count(self) -> int:
        return len(self.loops)

    def summary(self):
        r_lo, r_hi = critical_modulus_bounds(self.params)
        return {
            "topology": self.topology.value,
            "loop_count": self.loop_count,
            "points_per_loop": [len(loop.points) for loop in self.loops],
            "r_lo": r_lo,
            "r_hi": r_hi,
            "degenerate_points": [{"re": z.real, "im": z.imag} for z in self.degenerate_points],
        }


def critical_modulus_bounds(params: TrinomialParams) -> Tuple[float, float]:
    """Bounds r_lo <= |z| <= r_hi for every point on the critical curve"""
    n, k, m = params.n, params.k, params.gap
    r_lo = (k * abs(params.b - params.a) / n) ** (1.0 / m)
    r_hi = (k * (params.b + params.a) / n) ** (1.0 / m)
    return r_lo, r_hi


def lifted_argument(params: TrinomialParams, t: np.ndarray) -> np.ndarray:
    """Continuous argument of w(t) = (-a k + b k e^{it}) / n"""
    t = np.asarray(t, dtype=float)
    if params.regime is Regime.BIG_B:
        return t + np.angle(1 - (params.a / params.b) * np.exp(-1j * t))
    return np.pi + np.angle(1 - (params.b / params.a) * np.exp(1j * t))


def branch_points(params: TrinomialParams, t: np.ndarray, branch: int = 0) -> np.ndarray:
    """Points z(t) on the given branch of the m-th root of w(t)"""
    n, k, m = params.n, params.k, params.gap
    t = np.asarray(t, dtype=float)
    modulus = np.abs(-params.a * k + params.b * k * np.exp(1j * t)) / n
    theta = (lifted_argument(params, t) + 2 * np.pi * branch) / m
    return modulus ** (1.0 / m) * np.exp(1j * theta)


def sweep_length(params: TrinomialParams) -> float:
    """Parameter length of one closed loop"""
    if params.regime is Regime.BIG_B:
        return 2 * np.pi * params.gap
    return 2 * np.pi


def _trace(params: TrinomialParams, samples: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    length = sweep_length(params)
    t = length * np.arange(samples) / samples
    branches = 1 if params.regime is Regime.BIG_B else params.gap
    return [t] * branches, [branch_points(params, t, j) for j in range(branches)]


def _max_gap(loop: np.ndarray) -> float:
    return float(np.abs(np.roll(loop, -1) - loop).max())


def trace_critical_curve(
    params: TrinomialParams, samples_per_loop: int = DEFAULT_SAMPLES_PER_LOOP
) -> CriticalCurve:
    """
    Trace every loop of the critical curve.

    samples_per_loop is doubled until consecutive points are closer than
    1% of r_hi. Loops are returned in branch order.
    """
    if samples_per_loop < MIN_SAMPLES_PER_LOOP:
        raise InvalidParameter(
            f"samples_per_loop must be >= {MIN_SAMPLES_PER_LOOP}",
            {"samples_per_loop": samples_per_loop},
        )

    _, r_hi = critical_modulus_bounds(params)
    samples = samples_per_loop
    while True:
        ts, loops = _trace(params, samples)
        gap = max(_max_gap(loop) for loop in loops)
        if gap < GAP_FRACTION * r_hi or samples >= MAX_SAMPLES_PER_LOOP:
            break
        samples *= 2
    logger.debug("critical curve: %d loop(s), %d samples, max gap %.3g", len(loops), samples, gap)

    topology = Topology.SINGLE_LOOP if len(loops) == 1 else Topology.MULTI_LOOP
    return CriticalCurve(
        loops=tuple(Polyline(tuple(loop.tolist()), base_samples=samples) for loop in loops),
        topology=topology,
        params=params,
        parameters=tuple(ts),
        degenerate_points=(0j,) if params.k >= 2 else (),
    )


def point_on_curve_residual(params: TrinomialParams, z: complex) -> float:
    """
    Relative defect | |h'(z)| - |g'(z)| | / (|h'(z)| + |g'(z)|).

    Returns 0 at z = 0 when k >= 2 (both derivatives vanish there; see
    is_degenerate_point).
    """
    z = check_finite(z)
    n, k = params.n, params.k
    zk1 = z ** (k - 1)
    hp = abs(n * z ** (n - 1) + params.a * k * zk1)
    gp = abs(params.b * k * zk1)
    scale = hp + gp
    if scale == 0:
        return 0.0
    return abs(hp - gp) / scale


def is_degenerate_point(params: TrinomialParams, z: complex) -> bool:
    """The origin belongs to the critical set for k >= 2 but to no traced loop"""
    return params.k >= 2 and check_finite(z) == 0


def loop_closure_gap(params: TrinomialParams, branch: int = 0) -> float:
    """Distance between z(0) and z(end of sweep) on one branch"""
    ends = branch_points(params, np.array([0.0, sweep_length(params)]), branch)
    return float(abs(ends[1] - ends[0]))
