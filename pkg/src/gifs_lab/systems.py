"""Iterated function systems of finite and infinite order, their Hutchinson
operators and fixed-point iteration on finite nets.

Maps of infinite order act on sequences of points.  Each one declares a
consumption window: for every leading entry of the input sequence, the digit
positions of its address that the map reads.  Entries past the window never
influence the output, so images of products of finite sets are computed by
enumerating the window only.  Since such images are finite, the closure taken
in the infinite-order Hutchinson operator changes nothing here.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .addresses import ArityProfile, digit_transform, read_window
from .balanced import CellTree, NotInSet, addresses_of, point_of_address
from .metric import BoundedSeq, CompactNet, as_points, hausdorff_distance

TUPLE_CAP = 10 ** 6


class TupleExplosion(RuntimeError):
    pass


def _guard(count: int, cap: int):
    if count > cap:
        raise TupleExplosion(f"{count} tuples exceed the cap of {cap}")


@dataclass
class IfsSystem:
    maps: list
    lips: list

    def __post_init__(self):
        if not self.maps or len(self.maps) != len(self.lips):
            raise ValueError("need a nonempty list of maps with one bound each")
        if any(not 0 <= L < 1 for L in self.lips):
            raise ValueError("declared Lipschitz bounds must lie in [0, 1)")

    @property
    def contraction(self) -> float:
        return max(self.lips)


@dataclass
class GifsSystem:
    """Maps X^m -> X; each map takes m arrays of shape (k, dim)."""

    order: int
    maps: list
    lips: list

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if not self.maps or len(self.maps) != len(self.lips):
            raise ValueError("need a nonempty list of maps with one bound each")
        if any(not 0 <= L < 1 for L in self.lips):
            raise ValueError("declared Lipschitz bounds must lie in [0, 1)")

    @property
    def contraction(self) -> float:
        return max(self.lips)


def affine_map(scale, shift) -> Callable:
    A = np.atleast_2d(np.asarray(scale, dtype=float))
    t = np.asarray(shift, dtype=float).reshape(-1)

    def f(x):
        return x @ A.T + t
    return f


def hutchinson_step_ifs(sys: IfsSystem, S: CompactNet) -> CompactNet:
    images = [np.asarray(f(S.points), dtype=float).reshape(len(S), -1) for f in sys.maps]
    return CompactNet(np.vstack(images), sys.contraction * S.resolution)


def hutchinson_step_gifs(sys: GifsSystem, S: CompactNet, cap: int = TUPLE_CAP) -> CompactNet:
    """Union of g_i(S x ... x S) over every m-tuple of points of S."""
    m = sys.order
    _guard(len(S) ** m, cap)
    idx = np.indices((len(S),) * m).reshape(m, -1)
    args = [S.points[row] for row in idx]
    images = [np.asarray(g(*args), dtype=float).reshape(idx.shape[1], -1) for g in sys.maps]
    return CompactNet(np.vstack(images), sys.contraction * S.resolution)


# -- infinite order -------------------------------------------------------

def _entries(seq, count: int) -> np.ndarray:
    if isinstance(seq, BoundedSeq):
        return seq.head(count)
    arr = as_points(seq) if np.ndim(seq) != 1 else as_points(np.asarray(seq).reshape(-1, 1))
    if len(arr) < count:
        raise ValueError(f"sequence has {len(arr)} entries, the map reads {count}")
    return arr[:count]


def _all_entries(seq) -> np.ndarray:
    if isinstance(seq, BoundedSeq):
        return np.vstack([seq.entries, seq.tail()[None, :]])
    return as_points(seq) if np.ndim(seq) != 1 else as_points(np.asarray(seq).reshape(-1, 1))


class InfMap:
    """A map from bounded sequences of points to points."""

    kind = "abstract"
    lip: float = 0.0

    @property
    def window(self) -> list:
        return []

    @property
    def entries_read(self) -> int:
        return len(self.window)

    def __call__(self, seq) -> np.ndarray:
        raise NotImplementedError

    def image(self, S: CompactNet, policy: str = "classes", cap: int = TUPLE_CAP) -> np.ndarray:
        """Image of S x S x ... as an array of points."""
        if policy == "product":
            return self._product_image(S, cap)
        return self._class_image(S, cap)

    def _class_image(self, S, cap):
        return self._product_image(S, cap)

    def _product_image(self, S: CompactNet, cap: int) -> np.ndarray:
        # literal enumeration over the window, constant tail
        E = max(self.entries_read, 1)
        _guard(len(S) ** E, cap)
        out = []
        for combo in itertools.product(range(len(S)), repeat=E):
            out.append(self(BoundedSeq(S.points[list(combo)])))
        return np.array(out)


class AddressMap(InfMap):
    """x_{a_1}, x_{a_2}, ... -> x_{(prefix, beta_1, beta_2, ...)} on the net.

    Output digit p + j is one plus the number of odd digit-j values among the
    first a_{j+p} - 1 inputs.  The output is truncated at ``depth`` digits and
    rendered as that cell's representative point.
    """

    kind = "address"

    def __init__(self, tree: CellTree, prefix, depth: int | None = None, dim: int = 1):
        self.tree = tree
        self.prefix = (prefix,) if isinstance(prefix, int) else tuple(prefix)
        self.depth = tree.depth if depth is None else depth
        self.dim = dim
        if not len(self.prefix) <= self.depth <= tree.depth:
            raise ValueError("prefix longer than the output depth")
        self.lip = tree.q ** -len(self.prefix)
        self._window = read_window(tree.profile, len(self.prefix), self.depth)

    @property
    def window(self) -> list:
        return self._window

    def output_address(self, input_addresses: Sequence[Sequence[int]]) -> tuple:
        return digit_transform(self.prefix, input_addresses, self.tree.profile, self.depth)

    def point(self, address) -> np.ndarray:
        return point_of_address(self.tree, address, self.dim)

    def __call__(self, seq) -> np.ndarray:
        E = self.entries_read
        if E == 0:
            return self.point(self.prefix)
        addrs = addresses_of(self.tree, _entries(seq, E))
        return self.point(self.output_address([tuple(r) for r in addrs]))

    def parity_classes(self, S: CompactNet) -> list:
        """Per window entry, the distinct parity patterns of S on the digits read."""
        digits = addresses_of(self.tree, S) % 2
        return [np.unique(digits[:, [j - 1 for j in pos]], axis=0) for pos in self.window]

    def class_outputs(self, classes: list, cap: int = TUPLE_CAP) -> np.ndarray:
        """Output addresses for every combination of parity classes, one row each."""
        p = len(self.prefix)
        prof = self.tree.profile
        sizes = [len(c) for c in classes]
        _guard(math.prod(sizes), cap)
        idx = np.indices(sizes).reshape(len(sizes), -1) if sizes else np.zeros((0, 1), dtype=int)
        total = idx.shape[1]
        out = np.empty((total, self.depth), dtype=np.int64)
        out[:, :p] = self.prefix
        for j in range(1, self.depth - p + 1):
            count = np.zeros(total, dtype=np.int64)
            for m in range(prof.arity(j + p) - 1):
                col = self.window[m].index(j)
                count += classes[m][idx[m], col]
            out[:, p + j - 1] = 1 + count
        return out

    def _class_image(self, S, cap):
        rows = np.unique(self.class_outputs(self.parity_classes(S), cap), axis=0)
        return np.array([self.point(tuple(r)) for r in rows])


class PiecewiseMap(InfMap):
    """Base address map on sequences inside K; on any sequence touching the
    extra finite set it returns base(x, x, ...) for a fixed anchor x in K."""

    kind = "piecewise"

    def __init__(self, base: AddressMap, anchor, extra: CompactNet, lip: float):
        self.base = base
        self.anchor = as_points(anchor, base.dim)[0]
        self.extra = extra
        self.lip = lip
        self._anchor_value = base(BoundedSeq(self.anchor[None, :]))

    @property
    def window(self) -> list:
        return self.base.window

    def in_K(self, points) -> np.ndarray:
        pts = as_points(points, self.base.dim)
        ok = np.zeros(len(pts), dtype=bool)
        for k, p in enumerate(pts):
            try:
                addresses_of(self.base.tree, p[None, :])
                ok[k] = True
            except NotInSet:
                if not np.any(np.all(self.extra.points == p, axis=1)):
                    raise NotInSet(f"{p} lies neither in K nor in the extra set") from None
        return ok

    def __call__(self, seq) -> np.ndarray:
        if np.all(self.in_K(_all_entries(seq))):
            return self.base(seq)
        return self._anchor_value

    def _class_image(self, S, cap):
        ok = self.in_K(S.points)
        parts = []
        if np.any(ok):
            parts.append(self.base.image(CompactNet(S.points[ok]), "classes", cap))
        if not np.all(ok):
            parts.append(self._anchor_value[None, :])
        return np.vstack(parts)


class ConstantMap(InfMap):
    kind = "constant"

    def __init__(self, point, dim: int | None = None):
        self.value = as_points(point, dim)[0]
        self.lip = 0.0

    def __call__(self, seq) -> np.ndarray:
        return self.value

    def image(self, S, policy="classes", cap=TUPLE_CAP):
        return self.value[None, :]


@dataclass
class GifsInfSystem:
    maps: list
    tree: CellTree | None = None
    extra: CompactNet | None = None
    depth: int | None = None
    dim: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.maps:
            raise ValueError("a system needs at least one map")
        if any(not 0 <= f.lip < 1 for f in self.maps):
            raise ValueError("declared Lipschitz bounds must lie in [0, 1)")

    @property
    def contraction(self) -> float:
        return max(f.lip for f in self.maps)


def apply_inf_map(f: InfMap, s) -> np.ndarray:
    return f(s)


def hutchinson_step_inf(sys: GifsInfSystem, S: CompactNet, tuple_policy: str = "classes",
                        cap: int = TUPLE_CAP) -> CompactNet:
    """Union over maps of the image of S x S x ...

    ``classes`` enumerates parity classes of the digits each map reads (exact
    for maps that factor through addresses); ``product`` enumerates every
    tuple of points over the window.
    """
    images = [f.image(S, tuple_policy, cap) for f in sys.maps]
    return CompactNet(np.vstack(images), sys.contraction * S.resolution)


@dataclass
class FixedPointResult:
    net: CompactNet
    trace: list
    converged: bool
    contraction: float

    @property
    def steps(self) -> int:
        return len(self.trace)


def trace_dominated(trace: Sequence[float], c: float, slack: float = 1e-9) -> bool:
    """Is trace[k] <= c**k * trace[0] + slack for every k?"""
    return all(t <= c ** k * trace[0] + slack for k, t in enumerate(trace))


def hutchinson_step(sys, S: CompactNet, **kw) -> CompactNet:
    if isinstance(sys, IfsSystem):
        return hutchinson_step_ifs(sys, S)
    if isinstance(sys, GifsSystem):
        return hutchinson_step_gifs(sys, S, **kw)
    return hutchinson_step_inf(sys, S, **kw)


def iterate_to_fixed_point(sys, S0: CompactNet, tol: float, max_iter: int = 64,
                           **step_kw) -> FixedPointResult:
    """Iterate the Hutchinson operator until successive nets are within
    tol * (1 - c) / c, which puts the last net within tol of the attractor."""
    c = sys.contraction
    if not 0 <= c < 1:
        raise ValueError(f"declared contraction factor {c} is not below 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    stop = float("inf") if c == 0 else tol * (1 - c) / c
    S = S0
    trace = []
    for _ in range(max_iter):
        nxt = hutchinson_step(sys, S, **step_kw)
        trace.append(hausdorff_distance(S, nxt))
        S = nxt
        if trace[-1] <= stop:
            return FixedPointResult(S, trace, True, c)
    warnings.warn(f"no convergence within {max_iter} iterations", RuntimeWarning)
    return FixedPointResult(S, trace, False, c)
