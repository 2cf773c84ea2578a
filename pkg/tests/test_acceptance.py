"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from gifs_lab import io as gio
from gifs_lab.addresses import ArityProfile
from gifs_lab.appendix import build_example_space, discontinuity_witness
from gifs_lab.balanced import STRICT_TOL, build_balanced_set, materialize_net, verify_conditions
from gifs_lab.extension import extend_system, sampled_ratio
from gifs_lab.measure import (CANTOR_DIMENSION, GaugeFunction, cell_cover, premeasure_upper,
                              ternary_cantor_cells)
from gifs_lab.metric import BoundedSeq, CompactNet, hausdorff_distance, seq_metric
from gifs_lab.systems import hutchinson_step_ifs, hutchinson_step_inf, iterate_to_fixed_point
from gifs_lab.witness import (build_refined_system, build_union_system, build_witness_system,
                              certify_lipschitz, check_image_characterization)

RESULTS = {}
PROFILE = ArityProfile((2, 2, 8))


def record(k, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k:>2}: {title}" + (f" ({detail})" if detail else "")
    RESULTS[k] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def tree():
    return build_balanced_set(2.0, PROFILE)


@pytest.fixture(scope="module")
def net3(tree):
    return materialize_net(tree, 3)


def test_c01_balanced_construction():
    t0 = time.perf_counter()
    details, ok = [], True
    for q in (2.0, 3.0):
        tree = build_balanced_set(q, PROFILE)
        rep = verify_conditions(tree)
        tol = STRICT_TOL * tree.scale
        c = rep.conditions
        # (i) is integer arithmetic and holds with equality for this profile (a_2 = 1*a_1)
        strict = c["i"].margin >= 0 and all(c[k].margin >= tol for k in ("ii", "iii", "iv", "v"))
        ok &= rep.passed and strict and len(tree.addresses(3)) == 32
        details.append(f"q={q:g}: " + ", ".join(f"{k}={c[k].margin:.3g}" for k in c))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    record(1, "balanced construction verifies", ok, "; ".join(details) + f"; {elapsed:.2f}s")


def test_c02_self_similarity(tree, net3):
    w = build_witness_system(tree)
    r = build_refined_system(tree, 0.3)
    hw = hausdorff_distance(hutchinson_step_inf(w, net3), net3)
    hr = hausdorff_distance(hutchinson_step_inf(r, net3), net3)
    ok = (hutchinson_step_inf(w, net3).same_points(net3) and
          hutchinson_step_inf(r, net3).same_points(net3) and hw == 0 and hr == 0)
    record(2, "witness and p=2 systems fix the depth-3 net", ok, f"H={hw}, {hr}")


def test_c03_lipschitz_certificate(tree):
    w = certify_lipschitz(build_witness_system(tree))
    refined = build_refined_system(tree, 0.3)
    r = certify_lipschitz(refined)
    ok = (w.passed and r.passed and w.violations == 0 and r.violations == 0
          and w.bound == 0.5 and r.bound == 0.25 and refined.meta["p"] == 2)
    record(3, "exact Lipschitz certificates", ok,
           f"bounds {w.bound}, {r.bound}; max certified ratios "
           f"{max(m.certified for m in w.maps):.4f}, {max(m.certified for m in r.maps):.4f}; "
           f"pairs {sum(m.pairs for m in w.maps)}, {sum(m.pairs for m in r.maps)}")


def test_c04_fixed_point(tree, net3):
    sys = build_witness_system(tree)
    res = iterate_to_fixed_point(sys, CompactNet(net3.points[:1]), 1e-6)
    h = hausdorff_distance(res.net, net3)
    dominated = all(t <= 0.5 ** k * res.trace[0] + 1e-9 for k, t in enumerate(res.trace))
    record(4, "iteration from one point reaches the net", res.converged and h <= tree.b[2] and dominated,
           f"H={h}, trace={[round(t, 6) for t in res.trace]}")


def test_c05_cantor_baseline():
    cantor = gio.system_from_dict(gio.cantor_ifs_dict())
    S = [CompactNet(np.linspace(0, 1, 11)[:, None], 0.05)]
    for _ in range(11):
        S.append(hutchinson_step_ifs(cantor, S[-1]))
    d = [hausdorff_distance(S[m], S[m + 1]) for m in range(11)]
    ok = all(d[m] <= 3.0 ** -m * d[0] * (1 + 1e-9) for m in range(11))
    worst = max(d[m] / (3.0 ** -m * d[0]) for m in range(11))
    record(5, "Cantor IFS contracts at rate 1/3", ok, f"max ratio to envelope {worst:.6f}")


def test_c06_extension(tree):
    details, ok = [], True
    for n, r in [(1, 0.6), (2, 0.5)]:
        ext = extend_system(build_witness_system(tree, dim=n), r, n)
        net = materialize_net(tree, 3, n)
        rng = np.random.default_rng(n)
        agree, worst = True, 0.0
        for f in ext.maps:
            reps = f.class_representatives()
            agree &= np.array_equal(f.evaluate(reps), np.array([f.base(t) for t in reps]))
            tuples = net.points[rng.integers(0, len(net), (1000, f.entries_read))]
            agree &= np.array_equal(f.evaluate(tuples), np.array([f.base(t) for t in tuples]))
            ratio = sampled_ratio(f, 10 ** 4, seed=n)
            ok &= ratio <= math.sqrt(n) * f.coord_lip + 1e-9
            worst = max(worst, ratio)
        fixes = hutchinson_step_inf(ext, net).same_points(net)
        ok &= bool(agree) and fixes
        details.append(f"n={n}: p={ext.meta['p']}, ratio {worst:.6f} <= {ext.contraction:.6f}")
    record(6, "extension agrees on anchors, keeps sqrt(n) L, fixes the net", ok, "; ".join(details))


def test_c07_union(tree, net3):
    P = CompactNet(np.array([[5.0]]))
    sys = build_union_system(tree, P, 0.3)
    R = net3.union(P)
    bounds = [f.lip for f in sys.maps]
    ok = all(b <= 0.3 for b in bounds) and bounds[-1] == 0.0
    ok &= hutchinson_step_inf(sys, R).same_points(R)
    record(7, "union system reproduces K plus P", ok, f"{len(bounds)} maps, max bound {max(bounds)}")


def test_c08_image_characterization(tree, net3):
    rng = np.random.default_rng(8)
    maps = build_witness_system(tree).maps + build_refined_system(tree, 0.3).maps
    configs = 0
    ok = True
    for f in itertools.islice(itertools.cycle(maps), 24):
        Ks = [CompactNet(net3.points[rng.choice(32, rng.integers(1, 8), replace=False)])
              for _ in range(f.entries_read)]
        ok &= check_image_characterization(f, Ks)
        configs += 1
    record(8, "image characterization equals brute force", ok, f"{configs} configurations")


def test_c09_appendix():
    space = build_example_space(50, 1e-4)
    rows = {n: discontinuity_witness(n, space) for n in (5, 10, 20, 50)}
    ok = abs(rows[5][0] - 0.2236) <= space.resolution + 1e-3
    ok &= rows[50][0] <= 0.05
    ok &= all(h2 == 1.0 for _, h2 in rows.values())
    record(9, "retraction is discontinuous", ok,
           ", ".join(f"n={n}: h1={h1:.5f} h2={h2}" for n, (h1, h2) in rows.items()))


def test_c10_measure(tree):
    h = GaugeFunction.power(CANTOR_DIMENSION)
    sums = [cell_cover(ternary_cantor_cells(m), h, 3.0 ** -m) for m in range(1, 9)]
    ok = all(abs(s - 1.0) <= 1e-9 for s in sums)
    deltas = np.geomspace(0.3, tree.b[2], 25)
    vals = [premeasure_upper(tree, h, d, "cell") for d in deltas]
    ok &= all(b >= a for a, b in zip(vals, vals[1:]))
    record(10, "Cantor cover sums to 1; premeasure monotone in delta", ok,
           f"max |sum-1| = {max(abs(s - 1) for s in sums):.2e}")


def test_c11_metric_axioms():
    rng = np.random.default_rng(11)
    worst = -np.inf
    for _ in range(1000):
        A, B, C = (CompactNet(rng.normal(size=(rng.integers(1, 12), 2))) for _ in range(3))
        worst = max(worst, hausdorff_distance(A, C) - hausdorff_distance(A, B) - hausdorff_distance(B, C))
    ok = worst <= 1e-9
    for _ in range(200):
        T = int(rng.integers(1, 20))
        x, y = rng.normal(size=(T, 1)), rng.normal(size=(T, 1))
        brute = max(abs(float(a) - float(b)) for a, b in zip(x[:, 0], y[:, 0]))
        ok &= seq_metric(1.0, BoundedSeq(x), BoundedSeq(y)).value == brute
    record(11, "triangle inequality and sup metric", ok, f"max triangle excess {worst:.3g}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
