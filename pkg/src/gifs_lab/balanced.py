"""Concrete q-balanced Cantor sets on the line.

Cells are closed intervals indexed by addresses.  The builder places
children left to right inside each parent: at odd levels the children of
cells lying inside the cell named by the indexing function are spread over
the whole parent, every other parent gets a cluster at its left end whose
span is smaller than the spread gaps.  Even levels are spread everywhere.
Children stay a sliver (``INSET``) away from the parent's ends, so nesting
holds with room to spare.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .addresses import (ArityProfile, IndexingFunction, address_key,
                        build_indexing_function, enumerate_addresses,
                        parse_address_key)
from .metric import CompactNet, as_points

SAFETY = 1.1
STRICT_TOL = 1e-12
INSET = 0.01  # children keep this fraction of a child width clear of the parent's ends


class InfeasibleLayout(ValueError):
    pass


class NotInSet(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CellTree:
    profile: ArityProfile
    q: float
    b: tuple
    cells: dict
    phi: IndexingFunction
    ambient: tuple = field(default=(0.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "cells", {tuple(k): (float(v[0]), float(v[1]))
                                           for k, v in self.cells.items()})
        if len(self.b) != self.profile.depth:
            raise ValueError("need one diameter bound per level")

    @property
    def depth(self) -> int:
        return self.profile.depth

    @property
    def scale(self) -> float:
        return self.ambient[1] - self.ambient[0]

    def addresses(self, k: int) -> list:
        return enumerate_addresses(self.profile, k)

    def cell(self, addr) -> tuple:
        return self.cells[tuple(addr)]

    def intervals(self, k: int) -> np.ndarray:
        """(a_1...a_k, 2) array of depth-k cells in lexicographic address order."""
        return np.array([self.cells[a] for a in self.addresses(k)])

    def representative(self, addr) -> float:
        # left end of the deepest all-ones descendant
        addr = tuple(addr)
        return self.cells[addr + (1,) * (self.depth - len(addr))][0]

    def contains(self, outer, inner) -> bool:
        lo, hi = self.cells[tuple(outer)]
        ilo, ihi = self.cells[tuple(inner)]
        return lo <= ilo and ihi <= hi

    @property
    def shrink_factor(self) -> float:
        ratios = [self.b[0] / self.scale] + [self.b[n + 1] / self.b[n] for n in range(self.depth - 1)]
        return max(ratios)

    @cached_property
    def _leaf_index(self):
        leaves = self.addresses(self.depth)
        order = sorted(range(len(leaves)), key=lambda i: self.cells[leaves[i]][0])
        los = [self.cells[leaves[i]][0] for i in order]
        his = [self.cells[leaves[i]][1] for i in order]
        digits = np.array([leaves[i] for i in order], dtype=np.int64)
        return np.array(los), np.array(his), digits

    def to_dict(self) -> dict:
        return {"q": self.q, "arities": list(self.profile.arities), "b": list(self.b),
                "phi": self.phi.to_dict(), "ambient": list(self.ambient),
                "cells": {address_key(a): [lo, hi] for a, (lo, hi) in sorted(self.cells.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CellTree":
        return cls(profile=ArityProfile(tuple(data["arities"])), q=float(data["q"]),
                   b=tuple(data["b"]), phi=IndexingFunction.from_dict(data["phi"]),
                   cells={parse_address_key(k): tuple(v) for k, v in data["cells"].items()},
                   ambient=tuple(data.get("ambient", (0.0, 1.0))))

    @classmethod
    def from_json(cls, text: str) -> "CellTree":
        return cls.from_dict(json.loads(text))


def _spread(lo: float, width: float, count: int, child: float) -> list:
    gap = (width - count * child) / (count - 1)
    cells = [(lo + k * (child + gap), lo + k * (child + gap) + child) for k in range(count)]
    cells[-1] = (lo + width - child, lo + width)
    return cells


def _cluster(lo: float, count: int, child: float, gap: float) -> list:
    return [(lo + k * (child + gap), lo + k * (child + gap) + child) for k in range(count)]


def build_balanced_set(q: float, profile: ArityProfile, ambient=(0.0, 1.0),
                       safety: float = SAFETY) -> CellTree:
    """Lay out a q-balanced cell tree of depth N inside ``ambient``.

    Every diameter bound b_n is 10% (``safety``) above the actual cell width
    and every required gap is exceeded by the same factor.
    """
    if q < 2:
        raise ValueError(f"q = {q} < 2")
    lo, hi = float(ambient[0]), float(ambient[1])
    if not hi > lo:
        raise ValueError("ambient interval must be nonempty")
    s = safety
    phi = build_indexing_function(profile)
    cells = {}
    b = []

    a = profile.arity(1)
    b1 = (hi - lo) / (a / s + s * q * (a - 1))
    width = b1 / s
    for k, c in enumerate(_spread(lo, hi - lo, a, width), start=1):
        cells[(k,)] = c
    b.append(b1)

    for n in range(1, profile.depth):
        a = profile.arity(n + 1)
        parent_width = width
        odd = n % 2 == 1
        if odd:
            bn = parent_width / (a / s + s * (a - 1) * (a / s + s * q * (a - 1)))
        else:
            bn = parent_width / (a / s + s * q * (a - 1))
        width = bn / s
        gap = s * q * bn
        inside = phi(n) if odd else None
        m = INSET * width
        for parent in enumerate_addresses(profile, n):
            plo, phi_ = cells[parent]
            if odd and parent[:len(inside)] != inside:
                kids = _cluster(plo + m, a, width, gap)
            else:
                kids = _spread(plo + m, phi_ - plo - 2 * m, a, width)
            if kids[-1][1] >= phi_ or width <= 0:
                raise InfeasibleLayout(f"cannot place {a} children under {parent}")
            for k, c in enumerate(kids, start=1):
                cells[parent + (k,)] = c
        b.append(bn)

    return CellTree(profile, float(q), tuple(b), cells, phi, (lo, hi))


@dataclass
class ConditionResult:
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class VerificationReport:
    conditions: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "conditions": {k: {"passed": c.passed, "margin": c.margin, "detail": c.detail}
                               for k, c in self.conditions.items()}}


def _min_gap(intervals: np.ndarray) -> float:
    """Minimum distance between distinct closed intervals (negative if two overlap)."""
    if len(intervals) < 2:
        return float("inf")
    iv = intervals[np.argsort(intervals[:, 0], kind="stable")]
    reach = np.maximum.accumulate(iv[:-1, 1])
    return float(np.min(iv[1:, 0] - reach))


def verify_conditions(tree: CellTree) -> VerificationReport:
    """Check the five defining conditions directly on the stored intervals.

    Conditions (i)-(iii) are non-strict: (i) is integer arithmetic and needs
    margin >= 0, (ii) and (iii) accept rounding down to -1e-12 * scale.
    (iv) and (v) are strict and need margin > 1e-12 * scale.
    """
    prof = tree.profile
    tol = STRICT_TOL * tree.scale
    out = {}

    growth = [prof.arity(1) - 2] + prof.growth_margins()
    out["i"] = ConditionResult(min(growth) >= 0, float(min(growth)), "a_1 >= 2, a_{n+1} >= n a_1...a_n")

    missing = [a for k in range(1, tree.depth + 1) for a in tree.addresses(k) if a not in tree.cells]
    if missing:
        out["ii"] = ConditionResult(False, float("-inf"), f"missing cells, e.g. {missing[0]}")
        return VerificationReport(out)
    empty = [a for a, (lo, hi) in tree.cells.items() if not lo <= hi]
    nest = float("inf")
    worst = None
    for k in range(2, tree.depth + 1):
        for a in tree.addresses(k):
            plo, phi_ = tree.cells[a[:-1]]
            lo, hi = tree.cells[a]
            m = min(lo - plo, phi_ - hi)
            if m < nest:
                nest, worst = m, a
    out["ii"] = ConditionResult(nest >= -tol and not empty, nest,
                                f"tightest child {worst}" if worst else "single level")

    diam = float("inf")
    for k in range(1, tree.depth + 1):
        iv = tree.intervals(k)
        diam = min(diam, float(np.min(tree.b[k - 1] - (iv[:, 1] - iv[:, 0]))))
    out["iii"] = ConditionResult(diam >= -tol, diam, "min over n of b_n - diam")

    sep = float("inf")
    for k in range(1, tree.depth + 1):
        sep = min(sep, _min_gap(tree.intervals(k)) - tree.q * tree.b[k - 1])
    out["iv"] = ConditionResult(sep > tol, sep, "min over n of gap - q b_n")

    spread = float("inf")
    checked = []
    for n in range(1, tree.depth, 2):
        target = tree.phi(n)
        inside_gap, outside_span = float("inf"), 0.0
        have_outside = False
        for a in tree.addresses(n):
            kids = np.array([tree.cells[a + (s,)] for s in range(1, prof.arity(n + 1) + 1)])
            if tree.contains(target, a):
                inside_gap = min(inside_gap, _min_gap(kids))
            else:
                have_outside = True
                outside_span = max(outside_span, float(kids[:, 1].max() - kids[:, 0].min()))
        if have_outside:
            spread = min(spread, inside_gap - outside_span)
        checked.append(n)
    out["v"] = ConditionResult(spread > tol and tree.phi.is_valid(prof), spread,
                               f"odd levels checked: {checked}")
    return VerificationReport(out)


def materialize_net(tree: CellTree, k: int, dim: int = 1) -> CompactNet:
    """One representative point per depth-k cell, embedded on the first axis."""
    if not 1 <= k <= tree.depth:
        raise ValueError(f"depth {k} outside 1..{tree.depth}")
    xs = [tree.representative(a) for a in tree.addresses(k)]
    pts = np.zeros((len(xs), dim))
    pts[:, 0] = xs
    return CompactNet(pts, tree.b[k - 1])


def addresses_of(tree: CellTree, points) -> np.ndarray:
    """Depth-N address (one row of digits) of every point; raises NotInSet."""
    pts = points.points if isinstance(points, CompactNet) else as_points(points)
    if pts.shape[1] > 1 and np.any(pts[:, 1:] != 0):
        raise NotInSet("point off the axis carrying the set")
    los, his, digits = tree._leaf_index
    x = pts[:, 0]
    idx = np.searchsorted(los, x, side="right") - 1
    ok = (idx >= 0) & (x <= his[np.clip(idx, 0, None)])
    if not np.all(ok):
        bad = x[~ok][0]
        raise NotInSet(f"{bad!r} lies in no leaf cell")
    return digits[idx]


def address_of_point(tree: CellTree, x) -> tuple:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return tuple(int(d) for d in addresses_of(tree, arr.reshape(1, -1))[0])


def point_of_address(tree: CellTree, addr, dim: int = 1) -> np.ndarray:
    p = np.zeros(dim)
    p[0] = tree.representative(addr)
    return p
