"""JSON descriptions of systems.

    {"kind": "ifs" | "gifs" | "gifs_inf", "maps": [...], "domain": {...}}

Finite-order maps are affine: ``scale`` (matrix) and ``shift`` for IFS maps,
``weights`` (one scalar per argument) and ``shift`` for GIFS maps.  Maps of
infinite order are described by their kind and parameters; the balanced cell
tree they act on is embedded under ``domain``.
"""

from __future__ import annotations

import json

import numpy as np

from .balanced import CellTree
from .extension import ExtendedMap
from .metric import CompactNet
from .systems import (AddressMap, ConstantMap, GifsInfSystem, GifsSystem, IfsSystem,
                      PiecewiseMap, affine_map)


def _net_dict(net: CompactNet | None):
    return None if net is None else json.loads(net.to_json())


def _net_from(d) -> CompactNet | None:
    return None if d is None else CompactNet.from_json(json.dumps(d))


def system_to_dict(sys: GifsInfSystem) -> dict:
    maps = []
    for f in sys.maps:
        if isinstance(f, AddressMap):
            maps.append({"type": "address", "prefix": list(f.prefix), "lip": f.lip,
                         "window": f.window})
        elif isinstance(f, PiecewiseMap):
            maps.append({"type": "piecewise", "prefix": list(f.base.prefix), "lip": f.lip,
                         "base_lip": f.base.lip, "anchor": f.anchor.tolist(), "window": f.window})
        elif isinstance(f, ConstantMap):
            maps.append({"type": "constant", "point": f.value.tolist(), "lip": 0.0})
        elif isinstance(f, ExtendedMap):
            maps.append({"type": "extended", "prefix": list(f.base.prefix), "lip": f.lip,
                         "coord_lip": f.coord_lip, "window": f.window})
        else:
            raise TypeError(f"cannot serialise maps of kind {f.kind!r}")
    return {"kind": "gifs_inf", "meta": sys.meta, "maps": maps,
            "domain": {"tree": sys.tree.to_dict(), "extra": _net_dict(sys.extra),
                       "depth": sys.depth, "dim": sys.dim}}


def _affine_ifs(m: dict):
    A = np.atleast_2d(np.asarray(m["scale"], dtype=float))
    return affine_map(A, m["shift"])


def _affine_gifs(m: dict):
    w = [float(x) for x in m["weights"]]
    t = np.asarray(m["shift"], dtype=float).reshape(-1)

    def g(*xs):
        return sum(wk * x for wk, x in zip(w, xs)) + t
    return g


def system_from_dict(data: dict):
    kind = data["kind"]
    if kind == "ifs":
        return IfsSystem([_affine_ifs(m) for m in data["maps"]], [float(m["lip"]) for m in data["maps"]])
    if kind == "gifs":
        return GifsSystem(int(data["order"]), [_affine_gifs(m) for m in data["maps"]],
                          [float(m["lip"]) for m in data["maps"]])
    if kind != "gifs_inf":
        raise ValueError(f"unknown system kind {kind!r}")
    dom = data["domain"]
    tree = CellTree.from_dict(dom["tree"])
    extra = _net_from(dom.get("extra"))
    depth, dim = int(dom["depth"]), int(dom.get("dim", 1))
    maps = []
    for m in data["maps"]:
        if m["type"] == "address":
            maps.append(AddressMap(tree, tuple(m["prefix"]), depth, dim))
        elif m["type"] == "piecewise":
            base = AddressMap(tree, tuple(m["prefix"]), depth, dim)
            maps.append(PiecewiseMap(base, m["anchor"], extra, float(m["lip"])))
        elif m["type"] == "constant":
            maps.append(ConstantMap(m["point"], dim))
        elif m["type"] == "extended":
            maps.append(ExtendedMap(AddressMap(tree, tuple(m["prefix"]), depth, dim), dim))
        else:
            raise ValueError(f"unknown map type {m['type']!r}")
    for f, m in zip(maps, data["maps"]):
        if abs(f.lip - float(m["lip"])) > 1e-12:
            raise ValueError(f"declared bound {m['lip']} disagrees with the rebuilt map ({f.lip})")
    return GifsInfSystem(maps, tree, extra, depth, dim, meta=data.get("meta", {}))


def cantor_ifs_dict() -> dict:
    return {"kind": "ifs", "maps": [
        {"type": "affine", "scale": [[1 / 3]], "shift": [0.0], "lip": 1 / 3},
        {"type": "affine", "scale": [[1 / 3]], "shift": [2 / 3], "lip": 1 / 3}]}


def averaging_gifs_dict() -> dict:
    """The order-2 fixture g(x, y) = (x + y)/4, h(x, y) = (x + y)/4 + 1/2."""
    return {"kind": "gifs", "order": 2, "maps": [
        {"type": "affine", "weights": [0.25, 0.25], "shift": [0.0], "lip": 0.5},
        {"type": "affine", "weights": [0.25, 0.25], "shift": [0.5], "lip": 0.5}]}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
