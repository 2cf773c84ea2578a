import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gifs_lab.metric import (BoundedSeq, CompactNet, as_points, diameter, hausdorff_distance,
                             neighborhood_contains, seq_metric, set_distance)


def net(*pts, res=0.0):
    return CompactNet(np.array(pts, dtype=float).reshape(len(pts), -1), res)


def hausdorff_oracle(A, B):
    """Plain double loop over point pairs."""
    def directed(X, Y):
        return max(min(math.dist(x, y) for y in Y) for x in X)
    X, Y = A.points.tolist(), B.points.tolist()
    return max(directed(X, Y), directed(Y, X))


@pytest.mark.parametrize("A, B, expected", [
    ([0], [0], 0.0),
    ([0], [0, 1], 1.0),
    ([0, 2], [1], 1.0),
])
def test_hausdorff_examples(A, B, expected):
    assert hausdorff_distance(net(*A), net(*B)) == expected


@pytest.mark.parametrize("A, B, expected", [([0], [0, 1], 0.0), ([0], [3, 5], 3.0),
                                            ([0, 2], [5, 9], 3.0)])
def test_set_distance_examples(A, B, expected):
    assert set_distance(net(*A), net(*B)) == expected


def test_diameter_examples():
    assert diameter(net(7)) == 0
    assert diameter(net(0, 1)) == 1
    assert diameter(net((0, 0), (3, 4))) == 5


def test_neighborhood_is_open():
    assert neighborhood_contains(net(0), 1, 0.5)
    assert not neighborhood_contains(net(0), 1, 1.0)
    assert neighborhood_contains(net(0, 10), 2, 9)


def test_dedup_and_sorting():
    A = CompactNet(np.array([[2.0], [0.0], [2.0]]))
    assert len(A) == 2
    assert A.points[:, 0].tolist() == [0.0, 2.0]
    with pytest.raises(ValueError):
        A.points[0, 0] = 5.0


def test_rejects_non_finite_and_dim_mismatch():
    with pytest.raises(ValueError):
        CompactNet(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        hausdorff_distance(net(0), net((0, 0)))


def test_json_round_trip_is_bit_exact(rng):
    A = CompactNet(rng.normal(size=(50, 3)) * 1e-7, 1 / 3)
    B = CompactNet.from_json(A.to_json())
    assert np.array_equal(A.points, B.points) and B.resolution == A.resolution
    d = json.loads(A.to_json())
    assert set(d) == {"dim", "resolution", "points"}
    assert len(A.to_csv().strip().splitlines()) == 50


def test_accelerated_route_agrees(rng):
    for _ in range(20):
        A = CompactNet(rng.uniform(size=(rng.integers(1, 60), 2)))
        B = CompactNet(rng.uniform(size=(rng.integers(1, 60), 2)))
        exact = hausdorff_oracle(A, B)
        assert hausdorff_distance(A, B) == pytest.approx(exact, abs=1e-12)
        assert hausdorff_distance(A, B, accelerate=True) == pytest.approx(exact, abs=1e-12)


clouds = st.lists(st.lists(st.floats(-100, 100), min_size=2, max_size=2), min_size=1, max_size=12)


@settings(max_examples=200, deadline=None)
@given(clouds, clouds, clouds)
def test_hausdorff_is_a_metric(a, b, c):
    A, B, C = (CompactNet(np.array(x)) for x in (a, b, c))
    ab, bc, ac = hausdorff_distance(A, B), hausdorff_distance(B, C), hausdorff_distance(A, C)
    assert ab == hausdorff_distance(B, A)
    assert ab >= 0 and hausdorff_distance(A, A) == 0
    assert ac <= ab + bc + 1e-9
    assert ab == pytest.approx(hausdorff_oracle(A, B), abs=1e-9)


def test_seq_metric_examples():
    zero = BoundedSeq(np.zeros((3, 1)))
    ones = BoundedSeq(np.ones((3, 1)))
    assert seq_metric(1.0, zero, ones).value == 1.0
    y = BoundedSeq(np.array([[0.0], [0.0], [4.0], [0.0]]))
    x = BoundedSeq(np.zeros((4, 1)))
    assert seq_metric(0.5, x, y).value == 1.0
    assert seq_metric(0.5, x, x) == (0.0, 0.0)


def test_seq_metric_reports_tail_slack():
    x = BoundedSeq(np.zeros((2, 1)))
    y = BoundedSeq(np.zeros((2, 1)), "point", [8.0])
    value, slack = seq_metric(0.5, x, y)
    assert value == 0.0 and slack == 2.0


def test_seq_metric_validation():
    x = BoundedSeq(np.zeros((2, 1)))
    with pytest.raises(ValueError):
        seq_metric(1.5, x, x)
    with pytest.raises(ValueError):
        seq_metric(0.5, x, BoundedSeq(np.zeros((3, 1))))
    with pytest.raises(ValueError):
        BoundedSeq(np.zeros((2, 1)), "point")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=1, max_size=15))
def test_seq_metric_q1_is_coordinate_max(pairs):
    xs = np.array([p[0] for p in pairs])[:, None]
    ys = np.array([p[1] for p in pairs])[:, None]
    d = seq_metric(1.0, BoundedSeq(xs), BoundedSeq(ys))
    # repeat-last tails add nothing beyond the last stored term
    assert d.value == max(abs(a - b) for a, b in pairs)
    assert d.slack == 0.0


def test_as_points_shapes():
    assert as_points([1.0, 2.0]).shape == (2, 1)
    assert as_points([1.0, 2.0], 2).shape == (1, 2)
    assert as_points(np.zeros((3, 2))).shape == (3, 2)


def test_union_keeps_max_resolution():
    A, B = net(0, res=0.1), net(1, res=0.2)
    U = A.union(B)
    assert len(U) == 2 and U.resolution == 0.2


def test_small_nets_exhaustive_against_brute_force():
    pts = [0.0, 0.5, 1.5, 4.0]
    subsets = [s for k in range(1, 5) for s in itertools.combinations(pts, k)]
    for a, b in itertools.product(subsets, repeat=2):
        A, B = net(*a), net(*b)
        assert hausdorff_distance(A, B) == hausdorff_oracle(A, B)
