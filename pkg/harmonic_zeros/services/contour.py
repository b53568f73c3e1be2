"""
Closed contours, adaptive winding numbers (argument principle) and
Rouché dominance checks.

Both refinements work on the contour *parameter*: a segment between two
samples is bisected in parameter space, so circles keep their exact
trigonometric geometry and only the sampled function is discretised.
Refinement is a sequence of vectorised rounds; every round inserts the
midpoints of all flagged segments in contour order, which keeps the
result independent of how the evaluator is scheduled.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from harmonic_zeros.errors import (
    BudgetExceeded,
    NonIntegerWinding,
    ValidationError,
    ZeroOnContour,
)
from harmonic_zeros.services.harmonic import HarmonicPolynomial, check_finite

logger = logging.getLogger(__name__)

MAX_SAMPLES = 2 ** 20
MAX_ROUNDS = 64
STEP_LIMIT = math.pi / 2
RATIO_LIMIT = 4.0
ROUNDING_RESIDUE = 0.1
# dominance segments narrower than this fraction of the period are final
MIN_WIDTH = 2.0 ** -24

Evaluator = Callable[[np.ndarray], np.ndarray]


class Contour(ABC):
    """A closed curve sampled through a periodic parameter u in [0, period)"""

    base_samples: int

    @property
    @abstractmethod
    def period(self) -> float: ...

    @abstractmethod
    def sample(self, u: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def base_parameters(self) -> np.ndarray: ...

    @abstractmethod
    def to_dict(self): ...


@dataclass(frozen=True)
class Circle(Contour):
    center: complex
    radius: float
    base_samples: int = 256

    def __post_init__(self):
        object.__setattr__(self, "center", check_finite(self.center))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("Circle radius must be > 0", {"radius": self.radius})
        if self.base_samples < 4:
            raise ValidationError("base_samples must be >= 4", {"base_samples": self.base_samples})

    @property
    def period(self) -> float:
        return 1.0

    def sample(self, u):
        return self.center + self.radius * np.exp(2j * np.pi * np.asarray(u, dtype=float))

    def base_parameters(self):
        return np.arange(self.base_samples, dtype=float) / self.base_samples

    def to_dict(self):
        return {
            "kind": "Circle",
            "center": {"re": self.center.real, "im": self.center.imag},
            "radius": self.radius,
            "base_samples": self.base_samples,
        }


@dataclass(frozen=True)
class Polyline(Contour):
    """Closed polygon; the edge from the last point back to the first is implicit"""

    points: Tuple[complex, ...]
    base_samples: int = 256

    def __post_init__(self):
        pts = tuple(check_finite(z) for z in self.points)
        if len(pts) < 8:
            raise ValidationError("Polyline needs at least 8 points", {"points": len(pts)})
        for i, z in enumerate(pts):
            if z == pts[i - 1]:
                raise ValidationError(
                    "Polyline has repeated consecutive points", {"index": i}
                )
        object.__setattr__(self, "points", pts)

    @property
    def period(self) -> float:
        return float(len(self.points))

    def sample(self, u):
        pts = self._array
        u = np.asarray(u, dtype=float)
        base = np.floor(u)
        frac = u - base
        i = base.astype(np.int64) % len(pts)
        j = (i + 1) % len(pts)
        return pts[i] + frac * (pts[j] - pts[i])

    def base_parameters(self):
        per = max(1, math.ceil(self.base_samples / len(self.points)))
        return np.arange(len(self.points) * per, dtype=float) / per

    def reversed(self) -> "Polyline":
        return Polyline(self.points[::-1], self.base_samples)

    @cached_property
    def _array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    def to_dict(self):
        return {
            "kind": "Polyline",
            "points": len(self.points),
            "base_samples": self.base_samples,
        }


@dataclass(frozen=True)
class WindingResult:
    turns: int
    min_modulus: float
    samples_used: int
    max_step_arg: float
    residue: float = 0.0

    def to_dict(self):
        return {
            "turns": self.turns,
            "min_modulus": self.min_modulus,
            "samples_used": self.samples_used,
            "max_step_arg": self.max_step_arg,
            "residue": self.residue,
        }


@dataclass(frozen=True)
class DominanceReport:
    holds: bool
    margin: float
    argmin_point: complex
    samples_used: int

    def to_dict(self):
        return {
            "holds": self.holds,
            "margin": self.margin,
            "argmin_point": {"re": self.argmin_point.real, "im": self.argmin_point.imag},
            "samples_used": self.samples_used,
        }


def default_modulus_floor(p: HarmonicPolynomial) -> float:
    return 1e-12 * (1.0 + p.max_coefficient)


def _apply(fn: Evaluator, zs: np.ndarray) -> np.ndarray:
    values = np.asarray(fn(zs), dtype=complex)
    return np.broadcast_to(values, zs.shape)


def _next_parameters(u: np.ndarray, period: float) -> np.ndarray:
    return np.append(u[1:], u[0] + period)


def _speeds(p: HarmonicPolynomial, zs: np.ndarray) -> np.ndarray:
    fz, fzbar = p.derivatives(zs)
    return np.abs(fz) + np.abs(fzbar)


def winding_number(
    p: HarmonicPolynomial,
    c: Contour,
    modulus_floor: Optional[float] = None,
    max_samples: int = MAX_SAMPLES,
) -> WindingResult:
    """
    Count the turns of f around 0 along c.

    Principal-value argument steps between neighbouring samples are summed.
    A segment is bisected while its step is >= pi/2, the moduli at its ends
    differ by more than a factor 4, or the first-order bound on the turn of
    arg f along it, |dz| (|f_z| + |f_zbar|) / |f|, reaches pi/2. The last
    test catches a zero passing close to a long polygon edge, where the
    endpoint values alone look harmless.

    Raises:
        ZeroOnContour: some sample has |f| <= modulus_floor
        BudgetExceeded: refinement needs more than max_samples samples
        NonIntegerWinding: the accumulated angle is not within 0.1 of a full turn
    """
    floor = default_modulus_floor(p) if modulus_floor is None else modulus_floor
    u = c.base_parameters()
    zs = c.sample(u)
    values = _apply(p, zs)
    speeds = _speeds(p, zs)

    for round_no in range(MAX_ROUNDS):
        moduli = np.abs(values)
        lowest = int(np.argmin(moduli))
        if moduli[lowest] <= floor:
            z = complex(zs[lowest])
            raise ZeroOnContour(
                "Contour passes through a zero",
                {"min_modulus": float(moduli[lowest]), "re": z.real, "im": z.imag},
            )

        nxt = np.roll(values, -1)
        nxt_moduli = np.roll(moduli, -1)
        steps = np.angle(nxt / values)
        low = np.minimum(moduli, nxt_moduli)
        ratio = np.maximum(moduli, nxt_moduli) / low
        reach = np.abs(np.roll(zs, -1) - zs) * np.maximum(speeds, np.roll(speeds, -1)) / low
        flagged = np.flatnonzero(
            (np.abs(steps) >= STEP_LIMIT) | (ratio > RATIO_LIMIT) | (reach >= STEP_LIMIT)
        )
        if flagged.size == 0:
            break

        if u.size + flagged.size > max_samples:
            raise BudgetExceeded(
                "Winding refinement exceeded the sample budget",
                {"max_samples": max_samples, "samples": int(u.size)},
            )
        mids = 0.5 * (u[flagged] + _next_parameters(u, c.period)[flagged])
        mz = c.sample(mids)
        u = np.insert(u, flagged + 1, mids)
        zs = np.insert(zs, flagged + 1, mz)
        values = np.insert(values, flagged + 1, _apply(p, mz))
        speeds = np.insert(speeds, flagged + 1, _speeds(p, mz))
        logger.debug("winding round %d: %d segments bisected", round_no, flagged.size)
    else:
        raise BudgetExceeded("Winding refinement did not settle", {"rounds": MAX_ROUNDS})

    total = float(np.sum(steps)) / (2 * math.pi)
    turns = int(round(total))
    residue = abs(total - turns)
    if residue > ROUNDING_RESIDUE:
        raise NonIntegerWinding(
            "Accumulated argument is not an integer number of turns",
            {"turns": total, "residue": residue},
        )

    return WindingResult(
        turns=turns,
        min_modulus=float(moduli.min()),
        samples_used=int(u.size),
        max_step_arg=float(np.abs(steps).max()),
        residue=residue,
    )


def dominance_check(
    dominant: Evaluator,
    remainder: Evaluator,
    c: Contour,
    max_samples: int = MAX_SAMPLES,
) -> DominanceReport:
    """
    Sample |dominant| - |remainder| along c and report its minimum.

    Segments are bisected where the margin changes sign or changes by more
    than 50% between neighbours. The margin is a sampled estimate, not an
    interval bound.
    """
    u = c.base_parameters()
    zs = c.sample(u)
    margin = np.abs(_apply(dominant, zs)) - np.abs(_apply(remainder, zs))
    min_width = c.period * MIN_WIDTH

    for round_no in range(MAX_ROUNDS):
        nxt = np.roll(margin, -1)
        width = _next_parameters(u, c.period) - u
        sign_change = margin * nxt < 0
        jump = np.abs(nxt - margin) > 0.5 * np.maximum(np.abs(margin), np.abs(nxt))
        flagged = np.flatnonzero((sign_change | jump) & (width > min_width))
        if flagged.size == 0:
            break

        if u.size + flagged.size > max_samples:
            raise BudgetExceeded(
                "Dominance refinement exceeded the sample budget",
                {"max_samples": max_samples, "samples": int(u.size)},
            )
        mids = 0.5 * (u[flagged] + _next_parameters(u, c.period)[flagged])
        mz = c.sample(mids)
        u = np.insert(u, flagged + 1, mids)
        margin = np.insert(
            margin, flagged + 1, np.abs(_apply(dominant, mz)) - np.abs(_apply(remainder, mz))
        )
        logger.debug("dominance round %d: %d segments bisected", round_no, flagged.size)
    else:
        raise BudgetExceeded("Dominance refinement did not settle", {"rounds": MAX_ROUNDS})

    lowest = int(np.argmin(margin))
    value = float(margin[lowest])
    return DominanceReport(
        holds=value > 0,
        margin=value,
        argmin_point=complex(c.sample(u[lowest])),
        samples_used=int(u.size),
    )


def sum_orders_inside(
    p: HarmonicPolynomial,
    c: Contour,
    modulus_floor: Optional[float] = None,
    max_samples: int = MAX_SAMPLES,
) -> int:
    """Sum of orders of the zeros enclosed by c (assumes no singular zeros inside)"""
    return winding_number(p, c, modulus_floor, max_samples).turns
