"""Lipschitz constants and McShane extensions.

Each coordinate is extended by the min-form
    f~_c(x) = min_a f_c(a) + L d(x, a),
which keeps the coordinate L-Lipschitz; the vector map is then
sqrt(n) L-Lipschitz for n coordinates.

Sequence inputs are compared with the supremum metric over the entries in
the map's consumption window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .balanced import NotInSet, addresses_of, materialize_net
from .metric import CompactNet, as_points
from .systems import TUPLE_CAP, AddressMap, GifsInfSystem, InfMap, _entries, _guard
from .witness import build_refined_system, minimal_power

CONSISTENCY_SLACK = 1e-12


def _as_sequences(inputs) -> np.ndarray:
    """Coerce to (k, entries, dim); plain points become one-entry sequences."""
    arr = np.asarray(inputs, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None, None]
    elif arr.ndim == 2:
        arr = arr[:, None, :]
    return arr


def _sup_dist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.max(np.linalg.norm(x - y, axis=-1), axis=-1)


@dataclass
class SampledMap:
    """Finitely many (input, output) anchors with a declared Lipschitz bound."""

    inputs: np.ndarray
    outputs: np.ndarray
    lip: float

    def __post_init__(self):
        self.inputs = _as_sequences(self.inputs)
        self.outputs = as_points(self.outputs)
        if len(self.inputs) != len(self.outputs):
            raise ValueError("one output per anchor input")

    def pairwise(self):
        din = _sup_dist(self.inputs[:, None], self.inputs[None, :])
        dout = np.linalg.norm(self.outputs[:, None] - self.outputs[None, :], axis=-1)
        return din, dout

    def is_consistent(self) -> bool:
        din, dout = self.pairwise()
        scale = max(1.0, float(np.abs(self.outputs).max()))
        return bool(np.all(dout <= self.lip * din + CONSISTENCY_SLACK * scale))


def estimate_lipschitz(f: SampledMap) -> float:
    """Largest output/input distance ratio over anchor pairs (inf if two
    equal inputs carry different outputs)."""
    if len(f.inputs) < 2:
        raise ValueError("need at least two anchors")
    din, dout = f.pairwise()
    iu = np.triu_indices(len(f.inputs), 1)
    din, dout = din[iu], dout[iu]
    if np.any((din == 0) & (dout > 0)):
        return math.inf
    ok = din > 0
    return float(np.max(dout[ok] / din[ok])) if np.any(ok) else 0.0


def mcshane_extend(f: SampledMap, x) -> np.ndarray:
    """Value of the coordinatewise min-form extension at a single query x."""
    return mcshane_extend_many(f, np.asarray(x, dtype=float).reshape((1,) + f.inputs.shape[1:]))[0]


def mcshane_extend_many(f: SampledMap, queries) -> np.ndarray:
    """Extension at a stack of queries shaped like the anchor inputs."""
    if not f.is_consistent():
        raise ValueError("anchors violate the declared Lipschitz bound")
    Q = np.asarray(queries, dtype=float).reshape((-1,) + f.inputs.shape[1:])
    d = _sup_dist(Q[:, None], f.inputs[None, :])            # (queries, anchors)
    return np.min(f.outputs[None, :, :] + f.lip * d[:, :, None], axis=1)


class ExtendedMap(InfMap):
    """Min-form extension of an address map from the K-net to all point
    sequences.

    The anchor set is every window tuple of net points.  It is never listed:
    for each candidate output cell the smallest achievable sup-distance to a
    preimage tuple is found by a bottleneck dynamic programme over the
    entries, whose states are the odd-digit counts feeding each output digit.
    """

    kind = "extended"

    def __init__(self, base: AddressMap, ambient_dim: int):
        self.base = base
        self.dim = ambient_dim
        self.lip = math.sqrt(ambient_dim) * base.lip
        self.coord_lip = base.lip
        tree = base.tree
        self.net = materialize_net(tree, tree.depth, ambient_dim)
        parities = addresses_of(tree, self.net) % 2
        self._patterns = []
        for pos in base.window:
            pats = parities[:, [j - 1 for j in pos]]
            uniq, label = np.unique(pats, axis=0, return_inverse=True)
            self._patterns.append((uniq, label.reshape(-1), pos))

    @property
    def window(self) -> list:
        return self.base.window

    def _bottleneck(self, Q: np.ndarray) -> dict:
        """count vector -> (queries,) smallest sup-distance to a preimage tuple."""
        p = len(self.base.prefix)
        width = self.base.depth - p
        states = {(0,) * width: np.zeros(len(Q))}
        for m, (uniq, label, pos) in enumerate(self._patterns):
            d = np.linalg.norm(Q[:, m, None, :] - self.net.points[None, :, :], axis=-1)
            per = [d[:, label == v].min(axis=1) for v in range(len(uniq))]
            nxt = {}
            for counts, val in states.items():
                for v, pat in enumerate(uniq):
                    c = list(counts)
                    for j, bit in zip(pos, pat):
                        c[j - 1] += int(bit)
                    key = tuple(c)
                    cand = np.maximum(val, per[v])
                    nxt[key] = np.minimum(nxt[key], cand) if key in nxt else cand
            states = nxt
        return states

    def evaluate(self, queries) -> np.ndarray:
        """f~ at a stack of sequences shaped (k, entries >= window, dim)."""
        Q = np.asarray(queries, dtype=float)
        E = self.entries_read
        if E == 0:
            return np.repeat(self.base.point(self.base.prefix)[None, :], len(Q), axis=0)
        if Q.shape[1] < E:
            raise ValueError(f"sequences need {E} entries")
        Q = Q[:, :E, :]
        best = np.full((len(Q), self.dim), np.inf)
        for counts, D in self._bottleneck(Q).items():
            o = self.base.point(self.base.prefix + tuple(1 + c for c in counts))
            best = np.minimum(best, o[None, :] + self.coord_lip * D[:, None])
        return best

    def __call__(self, seq) -> np.ndarray:
        return self.evaluate(_entries(seq, max(self.entries_read, 1))[None])[0]

    def class_representatives(self, S: CompactNet | None = None) -> np.ndarray:
        """One window tuple of net points per combination of parity classes."""
        S = self.net if S is None else S
        digits = addresses_of(self.base.tree, S) % 2
        reps = []
        for pos in self.window:
            _, first = np.unique(digits[:, [j - 1 for j in pos]], axis=0, return_index=True)
            reps.append(S.points[np.sort(first)])
        sizes = [len(r) for r in reps]
        if not sizes:
            return np.zeros((1, 0, self.dim))
        _guard(math.prod(sizes), TUPLE_CAP)
        idx = np.indices(sizes).reshape(len(sizes), -1)
        return np.stack([reps[m][idx[m]] for m in range(len(reps))], axis=1)

    def _class_image(self, S, cap):
        try:
            tuples = self.class_representatives(S)
        except NotInSet:
            return self._product_image(S, cap)
        return self.evaluate(tuples)

    def _product_image(self, S, cap):
        E = max(self.entries_read, 1)
        _guard(len(S) ** E, cap)
        idx = np.indices((len(S),) * E).reshape(E, -1)
        return self.evaluate(np.stack([S.points[row] for row in idx], axis=1))

    def anchor_table(self) -> dict:
        """Class-level anchors: read-digit parity pattern per entry -> output coordinates."""
        tuples = self.class_representatives()
        outs = self.evaluate(tuples)
        parities = [addresses_of(self.base.tree, tuples[:, m, :]) % 2 for m in range(tuples.shape[1])]
        rows = {}
        for t in range(len(tuples)):
            key = "|".join("".join(str(int(parities[m][t, j - 1])) for j in pos)
                           for m, pos in enumerate(self.window))
            rows[key] = outs[t].tolist()
        return {"prefix": list(self.base.prefix), "window": self.window,
                "coord_lip": self.coord_lip, "anchors": rows}


def extend_system(sys: GifsInfSystem, r: float, dim: int | None = None) -> GifsInfSystem:
    """Extend a balanced-set system to all of (R^n)^N with bounds <= r.

    The base is rebuilt with bound q**-p <= r / sqrt(n) and each map is
    extended coordinatewise.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    n = dim or sys.dim
    target = r / math.sqrt(n)
    p = minimal_power(sys.tree.q, target, strict=False)
    if p > sys.depth:
        raise ValueError(f"bound {r} in dimension {n} needs p = {p} > depth {sys.depth}")
    base = build_refined_system(sys.tree, target, sys.depth, n, strict=False)
    maps = [ExtendedMap(f, n) for f in base.maps]
    return GifsInfSystem(maps, sys.tree, depth=sys.depth, dim=n,
                         meta={"construction": "extended", "p": p, "r": r, "dim": n,
                               "c1": "automatic for contractions into Euclidean space"})


def sampled_ratio(f: InfMap, pairs: int, seed: int = 0, box=None) -> float:
    """Largest |f(x) - f(y)| / d(x, y) over random pairs of window sequences.

    x is uniform in the box (default: the cell hull padded by its width) and
    y = x + a perturbation whose size is drawn log-uniformly from 1e-4 to 1,
    so both near and far pairs are tried.
    """
    if pairs < 1:
        raise ValueError("need at least one pair")
    rng = np.random.default_rng(seed)
    E = max(f.entries_read, 1)
    if box is None:
        iv = f.base.tree.intervals(1)
        lo, hi = float(iv[:, 0].min()), float(iv[:, 1].max())
        box = (lo - (hi - lo), hi + (hi - lo))
    x = rng.uniform(box[0], box[1], size=(pairs, E, f.dim))
    step = 10.0 ** rng.uniform(-4, 0, size=(pairs, 1, 1))
    y = x + step * rng.standard_normal((pairs, E, f.dim))
    num = np.linalg.norm(f.evaluate(x) - f.evaluate(y), axis=-1)
    den = _sup_dist(x, y)
    ok = den > 0
    return float(np.max(num[ok] / den[ok])) if np.any(ok) else 0.0


def anchor_tables_json(sys: GifsInfSystem) -> str:
    return json.dumps([f.anchor_table() for f in sys.maps])
