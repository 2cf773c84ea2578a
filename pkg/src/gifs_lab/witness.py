"""Systems of infinite order whose attractor is a given balanced set, and the
exact checks run against them.

Certificates work on the stored cell intervals, never on distances between
float representatives: an output pair is bounded above by the width of the
deepest cell both outputs share, an input pair below by the minimum gap
between distinct cells at the first level where a read digit differs.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .addresses import digit_transform
from .balanced import CellTree, _min_gap, addresses_of, materialize_net
from .metric import CompactNet, as_points, diameter
from .systems import (TUPLE_CAP, AddressMap, ConstantMap, GifsInfSystem, InfMap,
                      PiecewiseMap, _guard)


def minimal_power(q: float, r: float, strict: bool = True) -> int:
    """Smallest p >= 1 with q**-p < r (or <= r when not strict)."""
    p = 1
    while (q ** -p >= r) if strict else (q ** -p > r):
        p += 1
    return p


def build_witness_system(tree: CellTree, depth: int | None = None, dim: int = 1) -> GifsInfSystem:
    """One address map per first digit, each with declared bound 1/q."""
    maps = [AddressMap(tree, i, depth, dim) for i in range(1, tree.profile.arity(1) + 1)]
    return GifsInfSystem(maps, tree, depth=depth or tree.depth, dim=dim,
                         meta={"construction": "witness", "p": 1,
                               "c1": "maps send K^N into K; images of products of compacta "
                                     "have compact closure inside K"})


def build_refined_system(tree: CellTree, r: float, depth: int | None = None, dim: int = 1,
                         strict: bool = True) -> GifsInfSystem:
    """Maps indexed by depth-p prefixes, p minimal with q**-p < r."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    depth = depth or tree.depth
    p = minimal_power(tree.q, r, strict)
    if p > depth:
        raise ValueError(f"bound {r} needs p = {p}, deeper than the tree depth {depth}")
    maps = [AddressMap(tree, a, depth, dim) for a in tree.addresses(p)]
    return GifsInfSystem(maps, tree, depth=depth, dim=dim,
                         meta={"construction": "refined", "p": p, "r": r})


def _axis_distance(tree: CellTree, points: np.ndarray) -> np.ndarray:
    """Distance from each point to the union of leaf intervals on the first axis."""
    iv = tree.intervals(tree.depth)
    x = points[:, :1]
    dx = np.maximum(0.0, np.maximum(iv[None, :, 0] - x, x - iv[None, :, 1])).min(axis=1)
    return np.sqrt(dx ** 2 + np.sum(points[:, 1:] ** 2, axis=1))


def hull_diameter(tree: CellTree) -> float:
    iv = tree.intervals(tree.depth)
    return float(iv[:, 1].max() - iv[:, 0].min())


def build_union_system(tree: CellTree, P: CompactNet, r: float, depth: int | None = None) -> GifsInfSystem:
    """System whose attractor is K together with the finite set P."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    dim = P.dim
    gap = float(_axis_distance(tree, P.points).min())
    if gap <= 0:
        raise ValueError("P meets the balanced set")
    diam = hull_diameter(tree)
    target = r * min(1.0, gap / diam)
    base = build_refined_system(tree, target, depth, dim)
    anchor = np.zeros(dim)
    anchor[0] = tree.representative((1,))
    lip = base.contraction * max(1.0, diam / gap)
    maps = [PiecewiseMap(f, anchor, P, lip) for f in base.maps]
    maps += [ConstantMap(x) for x in P.points]
    return GifsInfSystem(maps, tree, extra=P, depth=base.depth, dim=dim,
                         meta={"construction": "union", "p": base.meta["p"], "r": r,
                               "eta": gap, "diam_K": diam, "base_bound": base.contraction})


def domain_net(sys: GifsInfSystem, depth: int | None = None) -> CompactNet:
    """The materialized net the system should fix (K-net, plus P if present)."""
    net = materialize_net(sys.tree, depth or sys.depth, sys.dim)
    return net if sys.extra is None else net.union(sys.extra)


# -- Lipschitz certificate ----------------------------------------------------

@dataclass
class MapCertificate:
    kind: str
    declared: float
    certified: float
    pairs: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and self.certified <= self.declared


@dataclass
class LipschitzCertificate:
    maps: list

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.maps)

    @property
    def bound(self) -> float:
        return max(m.declared for m in self.maps)

    @property
    def violations(self) -> int:
        return sum(len(m.violations) for m in self.maps)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "bound": self.bound, "violations": self.violations,
                "maps": [{"kind": m.kind, "declared": m.declared, "certified_ratio": m.certified,
                          "pairs": m.pairs, "violations": m.violations[:5]} for m in self.maps]}


def _level_separation(tree: CellTree) -> np.ndarray:
    """sep[k] = min distance between distinct depth-k cells (index 0 unused)."""
    return np.array([np.inf] + [_min_gap(tree.intervals(k)) for k in range(1, tree.depth + 1)])


def _cell_widths(tree: CellTree, outputs: np.ndarray) -> np.ndarray:
    """widths[t, k] = width of the depth-k cell containing output row t (k = 0 unused)."""
    T, L = outputs.shape
    widths = np.full((T, L + 1), np.inf)
    for t in range(T):
        row = tuple(int(d) for d in outputs[t])
        for k in range(1, L + 1):
            lo, hi = tree.cells[row[:k]]
            widths[t, k] = hi - lo
    return widths


def _combos(f: AddressMap, classes: list) -> tuple:
    sizes = [len(c) for c in classes]
    # a map that reads nothing has exactly one (empty) combination
    idx = np.indices(sizes).reshape(len(sizes), -1) if sizes else np.zeros((0, 1), dtype=int)
    return idx, f.class_outputs(classes)


def _address_pairs(f: AddressMap, cap: int):
    tree = f.tree
    net = materialize_net(tree, tree.depth, f.dim)
    classes = f.parity_classes(net)
    idx, out = _combos(f, classes)
    T = out.shape[0]
    _guard(T * T, cap)
    sep = _level_separation(tree)
    # lower bound on d_1 for every pair of class combinations
    den = np.zeros((T, T))
    for m, (cls, pos) in enumerate(zip(classes, f.window)):
        diff = cls[:, None, :] != cls[None, :, :]
        first = np.where(diff.any(axis=2), np.argmax(diff, axis=2), -1)
        table = np.where(first >= 0, sep[np.array(pos)[np.clip(first, 0, None)]], 0.0)
        den = np.maximum(den, table[idx[m][:, None], idx[m][None, :]])
    return out, den


def _certify_address(f: AddressMap, declared: float, cap: int) -> MapCertificate:
    tree = f.tree
    out, den = _address_pairs(f, cap)
    T, L = out.shape
    p = len(f.prefix)
    widths = _cell_widths(tree, out)
    differ = out[:, None, :] != out[None, :, :]
    any_diff = differ.any(axis=2)
    first = np.argmax(differ, axis=2)            # 0-based output position
    shared = first                               # depth of the deepest common cell
    num = np.where(any_diff, widths[np.arange(T)[:, None], np.clip(shared, 1, None)], 0.0)
    eta = first - p + 1                          # index of the first differing beta
    violations = []
    mask = np.triu(any_diff, 1)
    a_idx, b_idx = np.nonzero(mask)
    b = np.array((np.inf,) + tree.b)
    ratio = 0.0
    for a_, b_ in zip(a_idx, b_idx):
        n, d, e, k = num[a_, b_], den[a_, b_], eta[a_, b_], shared[a_, b_]
        rec = None
        if n > b[k]:
            rec = "numerator exceeds b"
        elif not d > tree.q * b[e]:
            rec = "denominator not above q b"
        elif n > declared * d:
            rec = "ratio exceeds declared bound"
        if rec:
            violations.append({"pair": [out[a_].tolist(), out[b_].tolist()], "reason": rec})
        if d > 0:
            ratio = max(ratio, n / d)
    return MapCertificate(f.kind, declared, ratio, int(mask.sum()), violations)


def _certify_piecewise(f: PiecewiseMap, cap: int) -> MapCertificate:
    base = _certify_address(f.base, f.lip, cap)
    tree = f.base.tree
    net = materialize_net(tree, tree.depth, f.base.dim)
    _, out = _combos(f.base, f.base.parity_classes(net))
    anchor_out = np.array(addresses_of(tree, f._anchor_value[None, :])[0][:f.base.depth])
    gap = float(_axis_distance(tree, f.extra.points).min())
    widths = _cell_widths(tree, out)
    violations = list(base.violations)
    ratio = base.certified
    for t, row in enumerate(out):
        diff = row != anchor_out
        if not diff.any():
            continue
        n = widths[t, int(np.argmax(diff))]
        if n > f.lip * gap:
            violations.append({"pair": [row.tolist(), "anchor"], "reason": "mixed case exceeds bound"})
        ratio = max(ratio, n / gap)
    # sequences that both touch P map to the same point: ratio 0
    return MapCertificate(f.kind, f.lip, ratio, base.pairs + len(out), violations)


def _certify_one(f: InfMap, cap: int) -> MapCertificate:
    if isinstance(f, AddressMap):
        return _certify_address(f, f.lip, cap)
    if isinstance(f, PiecewiseMap):
        return _certify_piecewise(f, cap)
    if isinstance(f, ConstantMap):
        return MapCertificate(f.kind, 0.0, 0.0, 0)
    raise TypeError(f"cannot certify maps of kind {f.kind!r}")


def worker_count() -> int:
    """Worker threads allowed by GIFS_LAB_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("GIFS_LAB_THREADS", "1")))
    except ValueError:
        raise ValueError("GIFS_LAB_THREADS must be a positive integer") from None


def certify_lipschitz(sys: GifsInfSystem, cap: int = TUPLE_CAP) -> LipschitzCertificate:
    workers = min(worker_count(), len(sys.maps))
    if workers <= 1:
        return LipschitzCertificate([_certify_one(f, cap) for f in sys.maps])
    with ThreadPoolExecutor(workers) as pool:
        return LipschitzCertificate(list(pool.map(lambda f: _certify_one(f, cap), sys.maps)))


# -- images of products -------------------------------------------------------

def brute_force_image(f: AddressMap, Ks: list) -> set:
    """Output addresses over every combination of read digits of K_1, K_2, ..."""
    E = f.entries_read
    if len(Ks) < E:
        raise ValueError(f"map reads {E} entries, got {len(Ks)} sets")
    options = []
    for K, pos in zip(Ks, f.window):
        digits = addresses_of(f.tree, K)
        options.append(sorted({tuple(int(row[j - 1]) for j in pos) for row in digits}))
    _guard(math.prod(len(o) for o in options), TUPLE_CAP)
    out = set()
    depth_in = max((max(p) for p in f.window), default=0)
    for combo in itertools.product(*options):
        inputs = []
        for pos, digs in zip(f.window, combo):
            addr = [2] * depth_in
            for j, d in zip(pos, digs):
                addr[j - 1] = d
            inputs.append(tuple(addr))
        out.add(digit_transform(f.prefix, inputs, f.tree.profile, f.depth))
    if E == 0:
        out.add(f.prefix)
    return out


def combinatorial_image(f: AddressMap, Ks: list) -> set:
    """Output addresses from achievable odd-digit counts.

    Each entry contributes one of its achievable parity patterns; the reachable
    count vectors are the Minkowski sum of those pattern sets, built entry by
    entry.  When every pattern set is a product this is the product of
    per-digit achievable sums.
    """
    E = f.entries_read
    if len(Ks) < E:
        raise ValueError(f"map reads {E} entries, got {len(Ks)} sets")
    p = len(f.prefix)
    outputs = f.depth - p
    reach = {(0,) * outputs}
    for K, pos in zip(Ks, f.window):
        pats = {tuple(int(row[j - 1]) % 2 for j in pos) for row in addresses_of(f.tree, K)}
        step = set()
        for counts in reach:
            for pat in pats:
                c = list(counts)
                for j, bit in zip(pos, pat):
                    c[j - 1] += bit
                step.add(tuple(c))
        reach = step
    return {f.prefix + tuple(1 + c for c in counts) for counts in reach}


def check_image_characterization(f: AddressMap, Ks: list) -> bool:
    return brute_force_image(f, Ks) == combinatorial_image(f, Ks)


def product_image(f: InfMap, Ks: list, cap: int = TUPLE_CAP) -> np.ndarray:
    """f(K_1 x K_2 x ...) with constant tail past the window."""
    if isinstance(f, AddressMap):
        rows = sorted(brute_force_image(f, Ks))
        return np.array([f.point(r) for r in rows])
    if isinstance(f, ConstantMap):
        return f.value[None, :]
    E = max(f.entries_read, 1)
    if len(Ks) < E:
        raise ValueError(f"map reads {E} entries, got {len(Ks)} sets")
    _guard(math.prod(len(K) for K in Ks[:E]), cap)
    return np.array([f(np.array(combo)) for combo in itertools.product(*(K.points for K in Ks[:E]))])


def check_c1_boundedness(f: InfMap, Ks: list, lip: float | None = None, slack: float = 1e-9) -> bool:
    """diam f(K_1 x K_2 x ...) <= Lip(f) diam(K_1 u K_2 u ...)."""
    lip = f.lip if lip is None else lip
    img = CompactNet(product_image(f, Ks))
    union = CompactNet(np.vstack([K.points for K in Ks]))
    return diameter(img) <= lip * diameter(union) + slack
