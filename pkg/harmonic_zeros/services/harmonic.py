"""
Harmonic polynomials f = h + conj(g): evaluation, Wirtinger derivatives
and local sense classification.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from harmonic_zeros.errors import (
    DegenerateFamily,
    HarmonicZerosError,
    InvalidParameter,
    NonFiniteInput,
    ValidationError,
)

SENSE_TOL = 1e-10
SENSE_FLOOR = 1e-300


class Sense(str, Enum):
    PRESERVING = "Preserving"
    REVERSING = "Reversing"
    CRITICAL = "Critical"


class Regime(str, Enum):
    BIG_B = "BigB"  # b > a
    BIG_A = "BigA"  # a > b


def check_finite(z: complex) -> complex:
    """Coerce to complex and reject NaN / infinite parts"""
    try:
        z = complex(z)
    except (TypeError, ValueError) as e:
        raise NonFiniteInput(f"Not a complex number: {z!r}") from e
    if not cmath.isfinite(z):
        raise NonFiniteInput(f"Non-finite input: {z!r}", {"re": z.real, "im": z.imag})
    return z


@dataclass(frozen=True)
class TrinomialParams:
    """Parameters of f(z) = z^n + a z^k + b conj(z)^k - 1"""

    n: int
    k: int
    a: float
    b: float

    def __post_init__(self):
        errors = {}
        for name in ("n", "k"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                errors[name] = f"{name} must be an integer"
        for name in ("a", "b"):
            if not math.isfinite(getattr(self, name)):
                raise NonFiniteInput(f"{name} must be finite", {name: getattr(self, name)})
        if errors:
            raise InvalidParameter("Invalid trinomial parameters", errors)

        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

        if self.k < 1:
            errors["k"] = "k must be >= 1"
        if self.n <= self.k:
            errors["n"] = "n must be greater than k"
        if self.a <= 0:
            errors["a"] = "a must be > 0"
        if self.b <= 0:
            errors["b"] = "b must be > 0"
        if errors:
            raise InvalidParameter("Invalid trinomial parameters", errors)
        if self.a == self.b:
            raise DegenerateFamily(
                "a = b is outside the family (critical curve meets the origin)",
                {"a": self.a, "b": self.b},
            )

    @property
    def regime(self) -> Regime:
        return Regime.BIG_B if self.b > self.a else Regime.BIG_A

    @property
    def big(self) -> float:
        """M = max(a, b)"""
        return max(self.a, self.b)

    @property
    def small(self) -> float:
        """m = min(a, b)"""
        return min(self.a, self.b)

    @property
    def gap(self) -> int:
        """n - k, the exponent of the critical-curve preimage map"""
        return self.n - self.k

    def to_dict(self):
        return {"n": self.n, "k": self.k, "a": self.a, "b": self.b}


def _trim(coeffs: Sequence[complex]) -> Tuple[complex, ...]:
    out = [check_finite(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _horner(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _derivative(coeffs: Sequence[complex]) -> Tuple[complex, ...]:
    return tuple(j * c for j, c in enumerate(coeffs))[1:]


def _polyval(zs: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    if coeffs.size == 0:
        return np.zeros_like(zs, dtype=complex)
    return npoly.polyval(zs, coeffs)


@dataclass(frozen=True)
class HarmonicPolynomial:
    """f = h + conj(g) with dense ascending-power coefficient tuples

    Calling the instance evaluates f on scalars or numpy arrays, so it can
    be handed directly to the contour engine as an evaluator.
    """

    h_coeffs: Tuple[complex, ...]
    g_coeffs: Tuple[complex, ...] = ()

    def __post_init__(self):
        h = _trim(self.h_coeffs)
        g = _trim(self.g_coeffs)
        if not h and not g:
            raise ValidationError("Harmonic polynomial must have a nonzero coefficient")
        object.__setattr__(self, "h_coeffs", h)
        object.__setattr__(self, "g_coeffs", g)

    @property
    def degree_h(self) -> int:
        return len(self.h_coeffs) - 1

    @property
    def degree_g(self) -> int:
        return len(self.g_coeffs) - 1

    @property
    def is_analytic(self) -> bool:
        return not self.g_coeffs

    @property
    def max_coefficient(self) -> float:
        return max(abs(c) for c in self.h_coeffs + self.g_coeffs)

    @cached_property
    def _h(self) -> np.ndarray:
        return np.array(self.h_coeffs, dtype=complex)

    @cached_property
    def _g(self) -> np.ndarray:
        return np.array(self.g_coeffs, dtype=complex)

    @cached_property
    def _dh(self) -> np.ndarray:
        return np.array(_derivative(self.h_coeffs), dtype=complex)

    @cached_property
    def _dg(self) -> np.ndarray:
        return np.array(_derivative(self.g_coeffs), dtype=complex)

    def __call__(self, z):
        zs = np.asarray(z, dtype=complex)
        return _polyval(zs, self._h) + np.conj(_polyval(zs, self._g))

    def derivatives(self, z) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorised (f_z, f_zbar) = (h'(z), conj(g'(z)))"""
        zs = np.asarray(z, dtype=complex)
        return _polyval(zs, self._dh), np.conj(_polyval(zs, self._dg))

    def as_trinomial(self) -> Optional[TrinomialParams]:
        """Recover (n, k, a, b) when p has the exact trinomial-family shape"""
        h, g = self.h_coeffs, self.g_coeffs
        if not h or not g:
            return None
        n, k = len(h) - 1, len(g) - 1
        if k < 1 or n <= k or h[0] != -1 or h[n] != 1:
            return None
        a, b = h[k], g[k]
        if a.imag != 0 or b.imag != 0:
            return None
        if any(c != 0 for j, c in enumerate(h) if j not in (0, k, n)):
            return None
        if any(c != 0 for c in g[:k]):
            return None
        try:
            return TrinomialParams(n, k, a.real, b.real)
        except HarmonicZerosError:
            return None


def make_trinomial(params: TrinomialParams) -> HarmonicPolynomial:
    """Build z^n + a z^k + b conj(z)^k - 1"""
    h = [0j] * (params.n + 1)
    h[0] = -1
    h[params.k] = params.a
    h[params.n] = 1
    g = [0j] * (params.k + 1)
    g[params.k] = params.b
    return HarmonicPolynomial(tuple(h), tuple(g))


def evaluate(p: HarmonicPolynomial, z: complex) -> complex:
    z = check_finite(z)
    return _horner(p.h_coeffs, z) + _horner(p.g_coeffs, z).conjugate()


def wirtinger(p: HarmonicPolynomial, z: complex) -> Tuple[complex, complex]:
    """Return (f_z, f_zbar) = (h'(z), conj(g'(z)))"""
    z = check_finite(z)
    fz = _horner(_derivative(p.h_coeffs), z)
    fzbar = _horner(_derivative(p.g_coeffs), z).conjugate()
    return fz, fzbar


def jacobian_det(p: HarmonicPolynomial, z: complex) -> float:
    """Real Jacobian determinant |h'|^2 - |g'|^2"""
    fz, fzbar = wirtinger(p, z)
    return abs(fz) ** 2 - abs(fzbar) ** 2


def classify_sense(p: HarmonicPolynomial, z: complex, tol: float = SENSE_TOL) -> Sense:
    """
    Classify z as sense-preserving, sense-reversing or critical.

    Critical is returned inside the relative band
    |D| <= tol * (|f_z|^2 + |f_zbar|^2 + 1e-300).
    """
    if not tol > 0:
        raise InvalidParameter("tol must be > 0", {"tol": tol})
    fz, fzbar = wirtinger(p, z)
    hp, gp = abs(fz) ** 2, abs(fzbar) ** 2
    det = hp - gp
    if abs(det) <= tol * (hp + gp + SENSE_FLOOR):
        return Sense.CRITICAL
    return Sense.PRESERVING if det > 0 else Sense.REVERSING
