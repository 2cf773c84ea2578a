"""The countable-plus-perfect example space on which K -> K ∩ X* fails to be
continuous.

X is the union of the perfect part {0} x ([0,1] ∪ [2,3]) and the isolated
points (1/n, i/n) with i in {0..n} ∪ {2n..3n}.  The perfect part is stored as
a grid net; isolated points are exact.

Empty sets are represented by ``EMPTY``; its distance to any nonempty set is 1
and to itself 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import CompactNet, as_points, hausdorff_distance, neighborhood_contains

EMPTY = None


@dataclass(frozen=True, eq=False)
class ExampleSpace:
    n_max: int
    resolution: float
    perfect_part: CompactNet
    isolated_part: CompactNet

    def line_segment(self) -> CompactNet:
        """Net of {0} x [0, 1], the limit set of the witness sequence."""
        pts = self.perfect_part.points
        return CompactNet(pts[pts[:, 1] <= 1.0], self.resolution)

    def in_perfect(self, points) -> np.ndarray:
        p = as_points(points, 2)
        y = p[:, 1]
        return (p[:, 0] == 0) & (((0 <= y) & (y <= 1)) | ((2 <= y) & (y <= 3)))

    def in_space(self, points) -> np.ndarray:
        p = as_points(points, 2)
        ok = self.in_perfect(p)
        rest = np.flatnonzero(~ok)
        if len(rest):
            iso = self.isolated_part.points
            ok[rest] = np.any(np.all(p[rest, None, :] == iso[None, :, :], axis=2), axis=1)
        return ok


def _segment(lo: float, hi: float, resolution: float) -> np.ndarray:
    # spacing 2*resolution keeps every point of the segment within resolution of the grid
    count = int(np.ceil((hi - lo) / (2 * resolution))) + 1
    return np.linspace(lo, hi, count)


def build_example_space(n_max: int, resolution: float) -> ExampleSpace:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    ys = np.concatenate([_segment(0.0, 1.0, resolution), _segment(2.0, 3.0, resolution)])
    perfect = CompactNet(np.stack([np.zeros_like(ys), ys], axis=1), resolution)
    iso = [(1.0 / n, i / n) for n in range(1, n_max + 1)
           for i in list(range(0, n + 1)) + list(range(2 * n, 3 * n + 1))]
    return ExampleSpace(n_max, resolution, perfect, CompactNet(np.array(iso)))


def retract(K: CompactNet, space: ExampleSpace):
    """K ∩ X*, or EMPTY when K has no point on the perfect part."""
    if not np.all(space.in_space(K.points)):
        raise ValueError("K is not contained in the example space")
    keep = space.in_perfect(K.points)
    if not np.any(keep):
        return EMPTY
    return CompactNet(K.points[keep], K.resolution)


def appendix_distance(A, B) -> float:
    """Hausdorff distance extended by d(EMPTY, nonempty) = 1."""
    if A is EMPTY and B is EMPTY:
        return 0.0
    if A is EMPTY or B is EMPTY:
        return 1.0
    return hausdorff_distance(A, B)


def witness_set(n: int) -> CompactNet:
    """K_n = {(0,0)} ∪ {(1/n, i/n) : i = 0..n}."""
    pts = [(0.0, 0.0)] + [(1.0 / n, i / n) for i in range(n + 1)]
    return CompactNet(np.array(pts))


def discontinuity_witness(n: int, space: ExampleSpace) -> tuple:
    """(H(K_n, K), H(R(K_n), R(K))) for K = {0} x [0, 1]: the first shrinks
    like sqrt(5)/(2n), the second stays 1."""
    if not 1 <= n <= space.n_max:
        raise ValueError(f"n = {n} outside 1..{space.n_max}")
    Kn = witness_set(n)
    K = space.line_segment()
    h1 = hausdorff_distance(Kn, K)
    h2 = appendix_distance(retract(Kn, space), retract(K, space))
    return h1, h2


def ball_union_identity(space: ExampleSpace, A: CompactNet, B: CompactNet, r: float,
                        probes=None) -> bool:
    """B(A ∪ B, r) = B(A, r) ∪ B(B, r), tested on probe points (default: all of X)."""
    probes = np.vstack([space.perfect_part.points, space.isolated_part.points]) if probes is None else probes
    AB = A.union(B)
    return all(neighborhood_contains(AB, r, x) == (neighborhood_contains(A, r, x) or neighborhood_contains(B, r, x))
               for x in as_points(probes, 2))
