import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracorlicz.errors import EmptyDomain, TooCoarse
from fracorlicz.geometry import (
    Ball,
    Box,
    Domain,
    GridFunction,
    Lattice,
    inscribed_ball,
    schwarz_rearrange,
    symmetric_difference_measure,
    symmetrized_set,
    unit_ball_volume,
)

L_SHAPE = "box(0,0,2,1)+box(0,0,1,2)"


def test_parse_roundtrip():
    D = Domain.parse("box(0,1) + box(2,4)")
    assert len(D.pieces) == 2 and D.dim == 1
    assert Domain.parse(str(D)) == D
    B = Domain.parse("ball(0,0,1)")
    assert isinstance(B.pieces[0], Ball) and B.dim == 2


@pytest.mark.parametrize("bad", ["", "box(0,1,2)", "circle(0,1)", "box(0,1)-box(2,3)"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, EmptyDomain)):
        Domain.parse(bad)


def test_measure_exact_and_counted():
    assert Domain.parse("box(0,1)+box(2,4)").measure() == pytest.approx(3.0)
    assert Domain.parse(L_SHAPE).measure() == pytest.approx(3.0)
    assert Domain.ball((0, 0), 1).measure() == pytest.approx(math.pi, rel=1e-3)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_symmetrized_set():
    S = symmetrized_set(Domain.parse("box(0,1)+box(2,4)"))
    assert S.pieces[0].radius == pytest.approx(1.5)
    S2 = symmetrized_set(Domain.parse(L_SHAPE))
    assert S2.pieces[0].radius == pytest.approx(math.sqrt(3 / math.pi))


def test_symmetric_difference_oracle():
    # two intervals overlapping on (0.5, 1): |D1 delta D2| = 1
    d = symmetric_difference_measure(Domain.interval(0, 1), Domain.interval(0.5, 1.5))
    assert d == pytest.approx(1.0, abs=1e-2)
    # L-shape against its symmetrized ball: positive, below 2|D|
    D = Domain.parse(L_SHAPE)
    d2 = symmetric_difference_measure(D, symmetrized_set(D), resolution=256)
    assert 0.1 < d2 < 6.0


def test_distance_to_boundary():
    D = Domain.parse("box(0,1)+box(2,4)")
    assert D.distance_to_boundary(np.array([[0.25], [3.0]])) == pytest.approx([0.25, 1.0])
    L = Domain.parse(L_SHAPE)
    # the reentrant corner (1, 1) is the nearest boundary point
    assert L.distance_to_boundary(np.array([[0.6, 0.6]]))[0] == pytest.approx(0.4 * math.sqrt(2), abs=1e-2)


def test_inscribed_ball():
    x0, R0 = inscribed_ball(Domain.parse("box(0,1)+box(2,4)"), resolution=256)
    assert x0[0] == pytest.approx(3.0, abs=4 / 256)
    assert R0 == pytest.approx(1.0, abs=3 * 4 / 256)
    with pytest.raises(TooCoarse):
        inscribed_ball(Domain.interval(0, 1), resolution=8)


def test_single_ball_detection():
    assert Domain.interval(-1, 1).is_single_ball
    assert Domain.interval(-1, 1).as_ball() == Ball((0.0,), 1.0)
    assert not Domain.parse("box(0,1)+box(2,4)").is_single_ball
    assert not Domain.parse("box(0,0,1,1)").is_single_ball


def test_lattice_covering_anchor():
    lat = Lattice.covering([0.0], [1.0], 0.1, anchor=[0.35])
    axis = lat.axes()[0]
    assert np.any(np.isclose(axis, 0.35))
    assert axis[0] - 0.05 <= 1e-12 and axis[-1] + 0.05 >= 1 - 1e-12


def test_interpolant_and_refine():
    lat = Lattice((0.5,), 1.0, (3,))
    u = GridFunction(np.array([1.0, 2.0, 0.0]), lat)
    assert u.at(np.array([[1.0], [-0.5], [0.0]])) == pytest.approx([1.5, 0.0, 0.5])
    r = u.refined(2)
    assert r.shape == (6,) and r.h == 0.5
    assert r.at(np.array([[1.0]]))[0] == pytest.approx(1.5)


def test_grid_rejects_negative():
    with pytest.raises(ValueError):
        GridFunction(np.array([1.0, -1.0]), Lattice((0.0,), 1.0, (2,)))


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    lat = Lattice((0.25, -1.0), 0.5, (4, 3))
    u = GridFunction(rng.random((4, 3)), lat)
    p = tmp_path / "u.csv"
    u.to_csv(p)
    v = GridFunction.from_csv(p)
    assert v.lattice == lat
    assert np.array_equal(v.values, u.values)


def _random_grid(rng, dim, n):
    lat = Lattice((0.0,) * dim, 1.0 / n, (n,) * dim)
    vals = rng.random((n,) * dim)
    vals[rng.random((n,) * dim) < 0.3] = 0.0
    vals[rng.random((n,) * dim) < 0.1] = 0.5  # ties
    return GridFunction(vals, lat)


def test_rearrangement_example_1d():
    lat = Lattice((0.0,), 1.0, (4,))
    u = GridFunction(np.array([0.0, 3.0, 1.0, 2.0]), lat)
    us = schwarz_rearrange(u, shape=(5,))
    # center first, then left before right at equal distance
    assert us.values.tolist() == [0.0, 2.0, 3.0, 1.0, 0.0]


@settings(max_examples=60, deadline=None)
@given(
    vals=arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
                elements=st.floats(0, 10, allow_nan=False)),
    shift=st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
)
def test_rearrangement_properties(vals, shift):
    u = GridFunction(vals, Lattice((0.0, 0.0), 0.1, vals.shape))
    us = schwarz_rearrange(u)
    assert np.array_equal(np.sort(us.values[us.values > 0]), np.sort(vals[vals > 0]))
    assert np.array_equal(schwarz_rearrange(u.translated(shift)).values, us.values)
    assert np.array_equal(schwarz_rearrange(us, shape=us.shape).values, us.values)


def test_rearrangement_radial_monotone():
    u = _random_grid(np.random.default_rng(0), 2, 16)
    us = schwarz_rearrange(u)
    C = us.centers().reshape(-1, 2)
    v = us.values.reshape(-1)
    order = np.argsort(np.linalg.norm(C, axis=1), kind="stable")
    assert np.all(np.diff(v[order]) <= 0)


def test_rearrangement_domain_is_ball():
    D = Domain.interval(0, 1)
    u = GridFunction.sample(lambda X: 1 - np.abs(2 * X[..., 0] - 1), Lattice((0.05,), 0.1, (10,)), D)
    us = schwarz_rearrange(u)
    assert us.domain == symmetrized_set(D)


def test_box_ray_exit():
    b = Box((0.0, 0.0), (1.0, 1.0))
    t0, t1 = b.ray(np.array([[0.5, 0.5]]), np.array([[1.0, 0.0]]))
    assert t1[0] == pytest.approx(0.5)
