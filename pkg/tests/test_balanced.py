import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gifs_lab.addresses import ArityProfile, build_indexing_function
from gifs_lab.balanced import (STRICT_TOL, CellTree, NotInSet, address_of_point, addresses_of,
                               build_balanced_set, materialize_net, point_of_address,
                               verify_conditions)
from gifs_lab.metric import hausdorff_distance


def hand_tree(cells, b, arities=(2, 2), q=2.0):
    prof = ArityProfile(arities)
    return CellTree(prof, q, b, cells, build_indexing_function(prof))


HAND_DEPTH1 = {(1,): (0.0, 0.2), (2,): (0.8, 1.0)}
HAND_DEPTH2 = {**HAND_DEPTH1, (1, 1): (0.0, 0.01), (1, 2): (0.19, 0.2),
               (2, 1): (0.8, 0.81), (2, 2): (0.85, 0.86)}


def test_hand_layout_depth1():
    rep = verify_conditions(hand_tree(HAND_DEPTH1, (0.2,), arities=(2,)))
    assert rep.passed
    assert rep.conditions["iv"].margin == pytest.approx(0.6 - 0.4)


def test_hand_layout_depth2():
    rep = verify_conditions(hand_tree(HAND_DEPTH2, (0.2, 0.01)))
    assert rep.passed, rep.to_dict()
    # spread gap 0.18 against cluster span 0.06
    assert rep.conditions["v"].margin == pytest.approx(0.18 - 0.06)


def test_gap_exactly_q_b_fails():
    cells = {(1,): (0.0, 0.2), (2,): (0.6, 0.8)}
    rep = verify_conditions(hand_tree(cells, (0.2,), arities=(2,)))
    assert not rep.conditions["iv"].passed


def test_child_outside_parent_fails():
    cells = dict(HAND_DEPTH2)
    cells[(1, 2)] = (0.19, 0.21)
    rep = verify_conditions(hand_tree(cells, (0.2, 0.02)))
    assert not rep.conditions["ii"].passed


def test_cluster_wider_than_spread_gap_fails():
    cells = dict(HAND_DEPTH2)
    cells[(2, 2)] = (0.99, 1.0)
    rep = verify_conditions(hand_tree(cells, (0.2, 0.01)))
    assert not rep.conditions["v"].passed


@pytest.mark.parametrize("q", [2.0, 3.0, 4.5])
def test_builder_output_verifies(profile, q):
    tree = build_balanced_set(q, profile)
    rep = verify_conditions(tree)
    assert rep.passed, rep.to_dict()
    tol = STRICT_TOL * tree.scale
    for key in ("ii", "iii", "iv", "v"):
        assert rep.conditions[key].margin > tol
    assert len(tree.addresses(3)) == 32


def test_builder_deeper_profile():
    tree = build_balanced_set(2.0, ArityProfile((2, 2, 8, 96)))
    assert verify_conditions(tree).passed


def test_builder_rejects_small_q(profile):
    with pytest.raises(ValueError):
        build_balanced_set(1.5, profile)


def test_builder_respects_ambient(profile):
    tree = build_balanced_set(2.0, profile, ambient=(-3.0, 5.0))
    iv = tree.intervals(1)
    assert iv[0, 0] == -3.0 and iv[-1, 1] == 5.0
    assert verify_conditions(tree).passed


@settings(max_examples=25, deadline=None)
@given(st.floats(2.0, 8.0), st.floats(-10, 10), st.floats(0.1, 100))
def test_builder_property(q, lo, width):
    tree = build_balanced_set(q, ArityProfile((2, 2, 8)), ambient=(lo, lo + width))
    assert verify_conditions(tree).passed


def test_tree_json_round_trip(tree):
    back = CellTree.from_json(tree.to_json())
    assert back.cells == tree.cells and back.b == tree.b and back.q == tree.q
    d = tree.to_dict()
    assert set(d) >= {"q", "arities", "b", "phi", "cells"}
    assert d["cells"]["1.2.3"] == list(tree.cell((1, 2, 3)))


def test_materialize(tree, net3):
    net1 = materialize_net(tree, 1)
    assert len(net1) == 2 and net1.resolution <= tree.b[0]
    assert len(net3) == 32
    net2 = materialize_net(tree, 2)
    assert hausdorff_distance(net3, net2) <= tree.b[1]


def test_address_round_trip(tree, net3):
    for addr in tree.addresses(3):
        x = point_of_address(tree, addr)
        assert address_of_point(tree, x) == addr
    assert address_of_point(tree, point_of_address(tree, (1, 2)))[:2] == (1, 2)
    assert addresses_of(tree, net3).shape == (32, 3)


def test_not_in_set(tree):
    with pytest.raises(NotInSet):
        address_of_point(tree, 0.5)
    with pytest.raises(NotInSet):
        addresses_of(tree, np.array([[tree.representative((1,)), 1.0]]))


def test_cell_widths_below_bounds(tree):
    for k in range(1, 4):
        iv = tree.intervals(k)
        assert np.all(iv[:, 1] - iv[:, 0] < tree.b[k - 1])


def test_siblings_ordered_left_to_right(tree):
    for k in range(1, 3):
        for parent in tree.addresses(k):
            kids = [tree.cell(parent + (s,)) for s in range(1, tree.profile.arity(k + 1) + 1)]
            assert all(a[1] < b[0] for a, b in itertools.pairwise(kids))
            lo, hi = tree.cell(parent)
            assert lo < kids[0][0] and kids[-1][1] < hi
