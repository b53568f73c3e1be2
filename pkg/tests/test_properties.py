"""
Randomised cross-checks; every generator is seeded so failures reproduce.
"""
import numpy as np
import pytest

from harmonic_zeros.services.contour import Polyline, winding_number
from harmonic_zeros.services.harmonic import (
    HarmonicPolynomial,
    TrinomialParams,
    make_trinomial,
    wirtinger,
)
from harmonic_zeros.services.zeros import census, grid_oracle


def random_polygon(rng, vertices=16):
    """Star-shaped polygon around a random centre"""
    centre = complex(*rng.uniform(-1.5, 1.5, size=2))
    angles = np.sort(rng.uniform(0, 2 * np.pi, size=vertices))
    radii = rng.uniform(0.3, 1.5, size=vertices)
    points = centre + radii * np.exp(1j * angles)
    return Polyline(tuple(complex(z) for z in points), base_samples=vertices)


def test_winding_antisymmetry_and_count(f2_params, f2_census):
    p = make_trinomial(f2_params)
    rng = np.random.default_rng(2024)
    for _ in range(50):
        contour = random_polygon(rng)
        forward = winding_number(p, contour).turns
        backward = winding_number(p, contour.reversed()).turns
        assert forward == -backward

        # enclosed order sum, with each zero located by winding z - z0 around the contour
        enclosed = sum(
            zero.order * winding_number(HarmonicPolynomial((-zero.location, 1)), contour).turns
            for zero in f2_census.zeros
        )
        assert forward == enclosed


def test_wirtinger_matches_finite_differences(f2_params):
    p = make_trinomial(f2_params)
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(25):
        z = complex(*rng.uniform(-1.5, 1.5, size=2))
        dx = (p(z + h) - p(z - h)) / (2 * h)
        dy = (p(z + 1j * h) - p(z - 1j * h)) / (2 * h)
        fz, fzbar = wirtinger(p, z)
        scale = abs(fz) + abs(fzbar)
        assert abs(fz - 0.5 * (dx - 1j * dy)) <= 1e-6 * scale
        assert abs(fzbar - 0.5 * (dx + 1j * dy)) <= 1e-6 * scale


@pytest.mark.parametrize("fixture", ["f1_census", "f2_census", "annuli_census"])
def test_zeros_come_in_conjugate_pairs(fixture, request):
    result = request.getfixturevalue(fixture)
    points = np.array([zero.location for zero in result.zeros])
    for z in points:
        assert np.min(np.abs(points - np.conj(z))) <= 1e-8


def test_census_is_deterministic(f2_params, f2_census):
    again = census(make_trinomial(f2_params))
    assert again.to_dict() == f2_census.to_dict()


def random_small_params(rng):
    while True:
        k = int(rng.integers(1, 3))
        n = int(rng.integers(k + 1, 6))
        a, b = (float(x) for x in np.round(rng.uniform(0.1, 6.0, size=2), 2))
        if a != b:
            return TrinomialParams(n, k, a, b)


def test_grid_oracle_agrees_with_census():
    rng = np.random.default_rng(5)
    for _ in range(10):
        params = random_small_params(rng)
        p = make_trinomial(params)
        result = census(p)
        found = grid_oracle(p)
        print(f"{params}: census {result.total}, oracle {len(found)}")
        assert len(found) == result.total
