"""Finite representations of compact sets and the metrics acting on them.

A :class:`CompactNet` is a finite, deduplicated point set together with a
``resolution``: the guaranteed Hausdorff distance to the (possibly infinite)
compact set it stands for.  All distances are Euclidean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

# rows of the pairwise distance block evaluated at once
_CHUNK = 2048


def as_points(points, dim: int | None = None) -> np.ndarray:
    """Coerce scalars, 1-D sequences or 2-D arrays to a float (k, dim) array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim in (None, 1) else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"points must be a 2-D array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class CompactNet:
    points: np.ndarray
    resolution: float = 0.0

    def __post_init__(self):
        pts = as_points(self.points)
        if len(pts) == 0:
            raise ValueError("a CompactNet must be nonempty")
        if self.resolution < 0 or not np.isfinite(self.resolution):
            raise ValueError("resolution must be a finite nonnegative real")
        pts = np.unique(pts, axis=0)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "resolution", float(self.resolution))

    @classmethod
    def from_points(cls, points, resolution: float = 0.0, dim: int | None = None) -> "CompactNet":
        return cls(as_points(points, dim), resolution)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompactNet):
            return NotImplemented
        return (self.resolution == other.resolution
                and self.points.shape == other.points.shape
                and bool(np.all(self.points == other.points)))

    def same_points(self, other: "CompactNet") -> bool:
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def union(self, other: "CompactNet") -> "CompactNet":
        _check_dims(self, other)
        return CompactNet(np.vstack([self.points, other.points]),
                          max(self.resolution, other.resolution))

    def to_json(self) -> str:
        # repr() of a Python float is the shortest round-tripping form
        return json.dumps({"dim": self.dim, "resolution": self.resolution,
                           "points": self.points.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "CompactNet":
        data = json.loads(text)
        pts = np.asarray(data["points"], dtype=float).reshape(-1, int(data["dim"]))
        return cls(pts, float(data["resolution"]))

    def to_csv(self) -> str:
        return "".join(",".join(repr(float(c)) for c in row) + "\n" for row in self.points)


def euclidean(diff: np.ndarray) -> np.ndarray:
    """Euclidean norm over the last axis, scaled so tiny differences do not
    underflow to zero when squared."""
    if diff.shape[-1] == 1:
        return np.abs(diff[..., 0])
    m = np.max(np.abs(diff), axis=-1)
    safe = np.where(m > 0, m, 1.0)
    scaled = diff / safe[..., None]
    return m * np.sqrt(np.einsum("...k,...k->...", scaled, scaled))


def _check_dims(A: CompactNet, B: CompactNet):
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")


def _directed(A: np.ndarray, B: np.ndarray, accelerate: bool) -> float:
    """sup over a in A of the distance from a to B."""
    if accelerate:
        d, _ = cKDTree(B).query(A, k=1)
        return float(np.max(d))
    worst = 0.0
    for start in range(0, len(A), _CHUNK):
        block = A[start:start + _CHUNK]
        diff = block[:, None, :] - B[None, :, :]
        d = euclidean(diff)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst


def hausdorff_distance(A: CompactNet, B: CompactNet, accelerate: bool = False) -> float:
    """Hausdorff-Pompeiu distance between two nets.

    The default is an exhaustive chunked double loop; ``accelerate=True``
    answers the nearest-neighbour queries with a k-d tree, which is exact too.
    """
    _check_dims(A, B)
    if A.same_points(B):
        return 0.0
    return max(_directed(A.points, B.points, accelerate),
               _directed(B.points, A.points, accelerate))


def set_distance(A: CompactNet, B: CompactNet) -> float:
    """Minimum pairwise distance between the two point sets."""
    _check_dims(A, B)
    d, _ = cKDTree(B.points).query(A.points, k=1)
    return float(np.min(d))


def diameter(A: CompactNet) -> float:
    pts = A.points
    if len(pts) == 1:
        return 0.0
    if pts.shape[1] == 1:
        return float(pts[-1, 0] - pts[0, 0])
    worst = 0.0
    for start in range(0, len(pts), _CHUNK):
        diff = pts[start:start + _CHUNK, None, :] - pts[None, :, :]
        worst = max(worst, float(euclidean(diff).max()))
    return worst


def neighborhood_contains(A: CompactNet, r: float, x) -> bool:
    """True iff some a in A has d(a, x) < r (open neighbourhood)."""
    if r <= 0:
        raise ValueError("r must be positive")
    x = as_points(x, A.dim)[0]
    return bool(np.min(euclidean(A.points - x)) < r)


@dataclass(frozen=True, eq=False)
class BoundedSeq:
    """Truncated bounded sequence of points.

    ``entries`` holds the first T terms.  Entries beyond T are given by the
    tail rule: ``"repeat-last"`` repeats entry T forever, ``"point"`` repeats
    ``tail_point`` forever.
    """

    entries: np.ndarray
    tail_rule: str = "repeat-last"
    tail_point: np.ndarray | None = field(default=None)

    def __post_init__(self):
        ent = as_points(self.entries)
        if len(ent) < 1:
            raise ValueError("truncation depth T must be at least 1")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)
        if self.tail_rule == "point":
            if self.tail_point is None:
                raise ValueError("tail rule 'point' needs a tail_point")
            tp = as_points(self.tail_point, ent.shape[1])[0]
            object.__setattr__(self, "tail_point", tp)
        elif self.tail_rule != "repeat-last":
            raise ValueError(f"unknown tail rule {self.tail_rule!r}")

    @property
    def depth(self) -> int:
        return len(self.entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[1]

    def tail(self) -> np.ndarray:
        return self.entries[-1] if self.tail_rule == "repeat-last" else self.tail_point

    def entry(self, k: int) -> np.ndarray:
        """k-th term, 0-based, following the tail rule past the truncation."""
        return self.entries[k] if k < self.depth else self.tail()

    def head(self, length: int) -> np.ndarray:
        return np.array([self.entry(k) for k in range(length)])


class SeqDistance(NamedTuple):
    value: float  # sup over the stored entries
    slack: float  # how much the infinite tail could raise the sup beyond value


def seq_metric(q: float, x: BoundedSeq, y: BoundedSeq) -> SeqDistance:
    """Weighted supremum distance sup_n q**(n-1) d(x_n, y_n).

    q = 1 gives the plain supremum metric.  The tail beyond T is constant for
    both sequences, so its contribution is exactly q**T * d(tail_x, tail_y);
    the returned slack is the excess of that over the truncated value.
    """
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    if x.depth != y.depth:
        raise ValueError("truncation depths differ")
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    d = euclidean(x.entries - y.entries)
    weights = q ** np.arange(x.depth)
    head = float(np.max(weights * d))
    tail = q ** x.depth * float(euclidean(x.tail() - y.tail()))
    return SeqDistance(head, max(0.0, tail - head))


def seq_metric_window(x: np.ndarray, y: np.ndarray) -> float:
    """Supremum metric between two equal-length stacks of points (entries × dim)."""
    return float(np.max(euclidean(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))))
