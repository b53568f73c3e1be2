import numpy as np
import pytest

from harmonic_zeros.errors import InvalidParameter, SingularJacobian, UnsupportedShape
from harmonic_zeros.services.harmonic import HarmonicPolynomial, Sense, evaluate, make_trinomial
from harmonic_zeros.services.zeros import (
    census,
    cluster,
    deduplicate,
    newton_refine,
    outer_bound,
)

PHI = HarmonicPolynomial((1, 0, 3, 0, 0, 1))


def test_f1_census(f1_census):
    assert f1_census.total == 9
    assert f1_census.count_preserving == 9
    assert f1_census.count_reversing == 0
    assert f1_census.sum_orders == 9
    assert f1_census.big_circle_turns == 9
    assert f1_census.certified, f1_census.discrepancies
    assert max(zero.residual for zero in f1_census.zeros) <= 1e-9


def test_f2_census(f2_census):
    assert f2_census.total == 17
    assert f2_census.count_reversing == 4
    assert f2_census.count_preserving == 13
    assert f2_census.sum_orders == 9
    assert f2_census.certified, f2_census.discrepancies


def test_orders_match_sense(f2_census):
    for zero in f2_census.zeros:
        expected = 1 if zero.sense is Sense.PRESERVING else -1
        assert zero.order == expected
        assert np.sign(zero.jacobian_det) == expected


def test_zeros_are_canonically_ordered(f2_census):
    keys = [(abs(z.location), np.angle(z.location)) for z in f2_census.zeros]
    assert keys == sorted(keys)


def test_analytic_census_inside_radius_two():
    result = census(PHI)
    assert result.total == 5
    assert result.certified
    assert all(abs(zero.location) < 2 for zero in result.zeros)


def test_newton_refine_converges(f2_census, f2_params):
    p = make_trinomial(f2_params)
    target = f2_census.zeros[0].location
    record = newton_refine(p, target + 1e-4 * (1 + 1j))
    assert abs(record.location - target) < 1e-8
    assert abs(evaluate(p, record.location)) <= record.residual + 1e-15


def test_newton_refine_singular_start(f2_params):
    with pytest.raises(SingularJacobian):
        newton_refine(make_trinomial(f2_params), 0)


def test_outer_bound(f1_params):
    assert outer_bound(make_trinomial(f1_params)) == pytest.approx(2.5 ** 0.2, rel=1e-5)
    assert outer_bound(PHI) == pytest.approx(4.0, rel=1e-5)
    with pytest.raises(UnsupportedShape):
        outer_bound(HarmonicPolynomial((0, 1), (0, 0, 1)))


def test_zeros_inside_outer_bound(f2_census):
    assert all(abs(zero.location) < f2_census.outer_radius for zero in f2_census.zeros)


def test_deduplicate_keeps_best_residual():
    points = np.array([1.0, 1.0 + 1e-9, 2.0], dtype=complex)
    residuals = np.array([1e-10, 1e-12, 1e-11])
    kept = deduplicate(points, residuals, 1e-6)
    assert len(kept) == 2
    assert 1 in kept
    assert 0 not in kept


def test_serial_and_parallel_agree(f1_params, f1_census):
    serial = census(make_trinomial(f1_params), parallel=False)
    assert serial.total == f1_census.total
    for a, b in zip(serial.zeros, f1_census.zeros):
        assert a.location == pytest.approx(b.location, abs=1e-10)


def test_grid_density_must_be_positive(f1_params):
    with pytest.raises(InvalidParameter):
        census(make_trinomial(f1_params), grid_density=0)


def test_newton_refine_linear_maps():
    identity = newton_refine(HarmonicPolynomial((0, 1)), 0.3 + 0.2j)
    assert identity.location == 0
    assert identity.newton_iters <= 3
    assert identity.sense is Sense.PRESERVING

    conjugate = newton_refine(HarmonicPolynomial((), (0, 1)), 0.5)
    assert conjugate.location == 0
    assert conjugate.jacobian_det == -1
    assert conjugate.sense is Sense.REVERSING


@pytest.mark.parametrize("coeffs, root", [((0, 0, 1), 0j), ((1, -2, 1), 1 + 0j)])
def test_double_zero_is_one_record(coeffs, root):
    result = census(HarmonicPolynomial(coeffs))
    assert result.total == 1
    (zero,) = result.zeros
    assert zero.order == 2
    assert zero.sense is Sense.PRESERVING
    assert abs(zero.location - root) < 1e-4
    assert result.sum_orders == result.big_circle_turns == 2
    assert result.certified, result.discrepancies


def test_cluster_merges_points_within_newton_reach():
    points = np.array([1e-5, -1e-5j, 2.0], dtype=complex)
    residuals = np.array([1e-10, 2e-10, 1e-12])
    reach = np.array([4e-5, 4e-5, 0.0])
    assert len(deduplicate(points, residuals, 1e-9)) == 3
    kept, spread = cluster(points, residuals, 1e-9, reach)
    assert sorted(kept.tolist()) == [0, 2]
    assert spread.max() == pytest.approx(abs(1e-5 + 1e-5j))
