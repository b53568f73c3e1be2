import numpy as np
import pytest

from harmonic_zeros.errors import InvalidParameter
from harmonic_zeros.services.contour import winding_number
from harmonic_zeros.services.critical_curve import (
    Topology,
    critical_modulus_bounds,
    is_degenerate_point,
    loop_closure_gap,
    point_on_curve_residual,
    trace_critical_curve,
)
from harmonic_zeros.services.harmonic import (
    HarmonicPolynomial,
    Sense,
    TrinomialParams,
    classify_sense,
    make_trinomial,
)

IDENTITY = HarmonicPolynomial((0, 1))


def test_f1_has_five_loops(f1_params):
    curve = trace_critical_curve(f1_params)
    assert curve.loop_count == 5
    assert curve.topology is Topology.MULTI_LOOP


def test_f2_has_one_loop(f2_params):
    curve = trace_critical_curve(f2_params)
    assert curve.loop_count == 1
    assert curve.topology is Topology.SINGLE_LOOP


@pytest.mark.parametrize("fixture", ["f1_params", "f2_params", "annuli_params"])
def test_traced_points_lie_on_curve(fixture, request):
    params = request.getfixturevalue(fixture)
    curve = trace_critical_curve(params)
    n, k = params.n, params.k
    lower = k * (params.big - params.small) / n
    upper = k * (params.big + params.small) / n
    for loop in curve.loops:
        points = np.array(loop.points)
        band = np.abs(points) ** (n - k)
        assert np.all(band >= lower * (1 - 1e-9))
        assert np.all(band <= upper * (1 + 1e-9))
        assert max(point_on_curve_residual(params, z) for z in loop.points) <= 1e-9


def test_loops_close(f1_params, f2_params):
    for branch in range(f1_params.gap):
        assert loop_closure_gap(f1_params, branch) <= 1e-12
    assert loop_closure_gap(f2_params) <= 1e-12


def test_loop_topology_around_origin(f1_params, f2_params):
    # one loop around the origin when b > a; pockets that exclude it when a > b
    (single,) = trace_critical_curve(f2_params).loops
    assert winding_number(IDENTITY, single).turns == 1
    for loop in trace_critical_curve(f1_params).loops:
        assert winding_number(IDENTITY, loop).turns == 0


def test_modulus_bounds_small_case():
    params = TrinomialParams(2, 1, 1.0, 3.0)
    assert critical_modulus_bounds(params) == pytest.approx((1.0, 2.0))
    assert point_on_curve_residual(params, 1) == 0.0


def test_degenerate_origin(f2_params):
    curve = trace_critical_curve(f2_params)
    assert curve.degenerate_points == (0j,)
    assert is_degenerate_point(f2_params, 0)
    assert point_on_curve_residual(f2_params, 0) == 0.0
    assert trace_critical_curve(TrinomialParams(2, 1, 1.0, 3.0)).degenerate_points == ()


def test_summary(f1_params):
    summary = trace_critical_curve(f1_params).summary()
    assert summary["loop_count"] == 5
    assert summary["topology"] == "MultiLoop"
    assert summary["r_lo"] < summary["r_hi"]


def test_too_few_samples(f2_params):
    with pytest.raises(InvalidParameter):
        trace_critical_curve(f2_params, samples_per_loop=16)


def test_sense_flips_across_single_loop(f2_params):
    p = make_trinomial(f2_params)
    (loop,) = trace_critical_curve(f2_params).loops
    for z in loop.points[::64]:
        assert classify_sense(p, 0.97 * z) is Sense.REVERSING
        assert classify_sense(p, 1.03 * z) is Sense.PRESERVING


def test_single_loop_covers_circle_gap_times(f2_params):
    n, k, a, b = f2_params.n, f2_params.k, f2_params.a, f2_params.b
    (loop,) = trace_critical_curve(f2_params).loops
    points = np.array(loop.points)
    w = n * points ** (n - k) + a * k
    assert np.max(np.abs(np.abs(w) - b * k)) <= 1e-9 * b * k
    turns = np.sum(np.angle(np.roll(w, -1) / w)) / (2 * np.pi)
    assert round(turns) == n - k


def test_gap_one_curve_is_explicit_circle():
    # |2z + 1| = 3: centre -1/2, radius 3/2
    (loop,) = trace_critical_curve(TrinomialParams(2, 1, 1.0, 3.0)).loops
    points = np.array(loop.points)
    assert np.allclose(np.abs(points + 0.5), 1.5, rtol=0, atol=1e-12)
    assert np.min(np.abs(points)) == pytest.approx(1.0, abs=1e-4)
    assert np.max(np.abs(points)) == pytest.approx(2.0, abs=1e-4)
