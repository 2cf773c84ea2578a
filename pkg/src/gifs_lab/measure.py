"""Gauge functions and upper bounds on the delta-premeasure H^h_delta.

Only explicit covers are built, so every value here is an upper bound on the
infimum over all delta-covers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .balanced import CellTree, materialize_net
from .metric import CompactNet, as_points


@dataclass(frozen=True)
class GaugeFunction:
    evaluator: Callable
    descriptor: str

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, self.evaluator(np.maximum(t, 0.0)), 0.0)

    @classmethod
    def power(cls, s: float) -> "GaugeFunction":
        if s <= 0:
            raise ValueError("exponent must be positive")
        return cls(lambda t: t ** s, f"t^{s!r}")

    @classmethod
    def tabulated(cls, knots, values) -> "GaugeFunction":
        """Right-continuous step function: h(t) = values[k] on [knots[k], knots[k+1])."""
        x = np.asarray(knots, dtype=float)
        y = np.asarray(values, dtype=float)
        if len(x) != len(y) or np.any(np.diff(x) <= 0) or np.any(np.diff(y) < 0):
            raise ValueError("knots must increase and values must not decrease")
        if x[0] <= 0 or y[0] <= 0:
            raise ValueError("need h(t) > 0 for t > 0 and h(0) = 0")

        def h(t):
            k = np.searchsorted(x, t, side="right") - 1
            # below the first knot the step takes its first value
            return np.where(k < 0, y[0], y[np.clip(k, 0, None)])
        return cls(h, f"table{len(x)}")

    @classmethod
    def parse(cls, text: str) -> "GaugeFunction":
        m = re.fullmatch(r"\s*t\s*(?:\^\s*([0-9.eE+-]+))?\s*", text)
        if not m:
            raise ValueError(f"unrecognised gauge {text!r}; expected 't^s'")
        return cls.power(float(m.group(1) or 1.0))


def _cover_check(points: np.ndarray, cells: np.ndarray):
    x = points[:, 0]
    inside = (cells[None, :, 0] <= x[:, None]) & (x[:, None] <= cells[None, :, 1])
    if not np.all(inside.any(axis=1)):
        raise ValueError("cells do not cover the set")


def cell_cover(cells, gauge: GaugeFunction, delta: float, points=None) -> float:
    """Sum of h(diam) over the given closed intervals, all of diameter <= delta."""
    iv = np.asarray(cells, dtype=float).reshape(-1, 2)
    widths = iv[:, 1] - iv[:, 0]
    if np.any(widths > delta * (1 + 1e-12)):
        raise ValueError("a cell is wider than delta")
    if points is not None:
        _cover_check(as_points(points), iv)
    return float(np.sum(gauge(widths)))


def interval_cover(A: CompactNet, gauge: GaugeFunction, delta: float) -> float:
    """Cheapest cover of a 1-D net by intervals of length <= delta.

    Each point is inflated by the net resolution on both sides.  Some optimal
    cover uses runs of consecutive points (a point lying inside another
    group's hull can join that group at no cost), so a dynamic programme over
    the cut positions finds the exact minimum for the finite set.
    """
    if A.dim != 1:
        raise ValueError("interval covers need 1-D points")
    pad = A.resolution
    span = delta - 2 * pad
    if span < 0:
        raise ValueError("delta is below twice the net resolution")
    x = A.points[:, 0]
    k = len(x)
    best = np.full(k + 1, np.inf)
    best[0] = 0.0
    first = np.searchsorted(x, x - span, side="left")   # earliest start of a run ending at i
    for i in range(k):
        j = np.arange(first[i], i + 1)
        best[i + 1] = np.min(best[j] + gauge(x[i] - x[j] + 2 * pad))
    return float(best[k])


def premeasure_upper(target, gauge: GaugeFunction, delta: float, strategy: str = "interval") -> float:
    """Upper bound on H^h_delta.

    strategy ``interval`` (alias ``greedy``): cheapest interval cover of a 1-D net.
    ``cell:n``: all depth-n cells of a tree (requires b_n <= delta).
    ``cell``: the cheapest admissible depth, so the value never decreases as
    delta shrinks.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if strategy in ("interval", "greedy"):
        if isinstance(target, CellTree):
            raise ValueError("interval covers need a net")
        return interval_cover(target, gauge, delta)
    if not isinstance(target, CellTree):
        raise ValueError("cell covers need a cell tree")
    if strategy == "cell":
        ok = [n for n in range(1, target.depth + 1) if target.b[n - 1] <= delta]
        if not ok:
            raise ValueError(f"no level has b_n <= {delta}")
        return min(cell_cover(target.intervals(n), gauge, delta) for n in ok)
    m = re.fullmatch(r"cell:(\d+)", strategy)
    if not m:
        raise ValueError(f"unknown strategy {strategy!r}")
    n = int(m.group(1))
    if not 1 <= n <= target.depth:
        raise ValueError(f"depth {n} outside 1..{target.depth}")
    if target.b[n - 1] > delta:
        raise ValueError(f"b_{n} = {target.b[n - 1]} exceeds delta = {delta}")
    return cell_cover(target.intervals(n), gauge, delta)


def ternary_cantor_cells(m: int) -> np.ndarray:
    """The 2**m intervals of length 3**-m left at stage m of the middle-thirds construction."""
    lo = np.array([0.0])
    for k in range(1, m + 1):
        lo = np.concatenate([lo, lo + 2 * 3.0 ** -k])
    lo.sort()
    return np.stack([lo, lo + 3.0 ** -m], axis=1)


def ternary_cantor_net(m: int) -> CompactNet:
    cells = ternary_cantor_cells(m)
    return CompactNet(cells[:, :1], 3.0 ** -m)


CANTOR_DIMENSION = math.log(2) / math.log(3)


def overlap_upper(tree: CellTree, f, gauge: GaugeFunction, delta: float, net: CompactNet | None = None) -> float:
    """Interval-cover premeasure bound for the part of the net lying within the
    net resolution of its own image under f.

    ``f`` maps an array of points (k, dim) to their images.
    """
    net = materialize_net(tree, tree.depth) if net is None else net
    image = as_points(f(net.points), net.dim)
    d = np.linalg.norm(net.points[:, None, :] - image[None, :, :], axis=-1).min(axis=1)
    close = net.points[d <= net.resolution]
    if len(close) == 0:
        return 0.0
    return premeasure_upper(CompactNet(close, net.resolution), gauge, delta, "interval")
