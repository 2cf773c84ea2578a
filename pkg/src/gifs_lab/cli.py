"""Command-line front end.

Every command writes its main output, a JSON report carrying the resolved
configuration and its hash, and (where it makes sense) an SVG figure.  The
exit status is 0 iff every check the command ran passed, 1 if a check
failed and 2 on bad input.

Settings come from flags, then from ``--config file.json`` (keys are the
long flag names with dashes as underscores), then from the defaults.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as gio
from .addresses import ArityProfile
from .appendix import build_example_space, discontinuity_witness, witness_set
from .balanced import (CellTree, InfeasibleLayout, build_balanced_set, materialize_net,
                       verify_conditions)
from .extension import anchor_tables_json, extend_system, sampled_ratio
from .measure import GaugeFunction, premeasure_upper
from .metric import CompactNet, hausdorff_distance
from .systems import GifsInfSystem, hutchinson_step, iterate_to_fixed_point, trace_dominated
from .witness import (build_refined_system, build_union_system, build_witness_system,
                      certify_lipschitz, domain_net)


class UsageError(Exception):
    """Bad input: reported and turned into exit status 2."""


# -- helpers ------------------------------------------------------------------

def _sibling(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: not valid JSON ({e})") from None


def _decode(path, loader, data):
    try:
        return loader(data)
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"{path}: {e}") from None


def _load_tree(path) -> CellTree:
    data = _read_json(path)
    if "cells" not in data:
        raise UsageError(f"{path}: not a cell tree (no 'cells' key); run build-balanced first")
    return _decode(path, CellTree.from_dict, data)


def _load_net(path) -> CompactNet:
    data = _read_json(path)
    if "points" not in data:
        raise UsageError(f"{path}: not a net (expected keys dim, resolution, points)")
    return _decode(path, lambda d: CompactNet.from_json(json.dumps(d)), data)


def _load_system(path):
    data = _read_json(path)
    if "kind" not in data:
        raise UsageError(f"{path}: not a system description (no 'kind' key)")
    return _decode(path, gio.system_from_dict, data)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _report(args, path, body: dict, passed: bool) -> bool:
    cfg = config_of(args)
    out = {"command": args.command, "config": cfg, "config_hash": config_hash(cfg),
           "passed": passed, **body}
    Path(path).write_text(gio.dumps(out))
    print(f"{args.command}: {'PASS' if passed else 'FAIL'} (report {path})")
    return passed


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


# -- commands -----------------------------------------------------------------

def cmd_build_balanced(args) -> bool:
    from .plotting import plot_cells
    if not args.q >= 2:
        raise UsageError(f"--q {args.q} rejected: q must be at least 2")
    try:
        profile = ArityProfile.parse(args.profile)
    except ValueError as e:
        raise UsageError(f"--profile {args.profile} rejected: {e}") from None
    if args.depth is not None:
        if args.depth < 1:
            raise UsageError("--depth must be at least 1")
        profile = ArityProfile(profile.arities[:args.depth])
    ambient = tuple(_floats(args.ambient))
    if len(ambient) != 2 or not ambient[0] < ambient[1]:
        raise UsageError("--ambient takes 'lo,hi' with lo < hi")
    report = args.report or _sibling(args.out, ".report.json")
    try:
        tree = build_balanced_set(args.q, profile, ambient, args.safety)
    except InfeasibleLayout as e:
        return _report(args, report, {"error": str(e)}, False)
    Path(args.out).write_text(gio.dumps(tree.to_dict()))
    ver = verify_conditions(tree)
    plot_cells(tree, args.figure or _sibling(args.out, ".svg"))
    return _report(args, report, {"tree": args.out, "leaves": len(tree.addresses(tree.depth)),
                                  "verification": ver.to_dict()}, ver.passed)


def cmd_verify(args) -> bool:
    tree = _load_tree(args.tree)
    ver = verify_conditions(tree)
    return _report(args, args.report or _sibling(args.tree, ".verify.json"),
                   {"verification": ver.to_dict()}, ver.passed)


def _write_system(args, sys_: GifsInfSystem, extra: dict | None = None, passed: bool = True) -> bool:
    Path(args.out).write_text(gio.dumps(gio.system_to_dict(sys_)))
    body = {"system": args.out, "maps": len(sys_.maps),
            "declared_bounds": [f.lip for f in sys_.maps], "contraction": sys_.contraction,
            "meta": sys_.meta, **(extra or {})}
    return _report(args, args.report or _sibling(args.out, ".report.json"), body, passed)


def cmd_witness(args) -> bool:
    tree = _load_tree(args.tree)
    return _write_system(args, build_witness_system(tree, args.depth, args.dim))


def cmd_refine(args) -> bool:
    tree = _load_tree(args.tree)
    try:
        sys_ = build_refined_system(tree, args.r, args.depth, args.dim)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return _write_system(args, sys_)


def cmd_union(args) -> bool:
    tree = _load_tree(args.tree)
    if args.points_file:
        P = _load_net(args.points_file)
    elif args.points:
        P = CompactNet(np.array(_floats(args.points))[:, None])
    else:
        raise UsageError("give the extra points with --points or --points-file")
    try:
        sys_ = build_union_system(tree, P, args.r, args.depth)
    except ValueError as e:
        raise UsageError(str(e)) from None
    ok = all(f.lip <= args.r for f in sys_.maps)
    return _write_system(args, sys_, {"bounds_below_r": ok}, ok)


def cmd_certify(args) -> bool:
    sys_ = _load_system(args.system)
    if not isinstance(sys_, GifsInfSystem):
        raise UsageError("certify works on systems of kind gifs_inf")
    cert = certify_lipschitz(sys_, args.cap)
    return _report(args, args.report or _sibling(args.system, ".certificate.json"),
                   {"certificate": cert.to_dict()}, cert.passed)


def cmd_attractor(args) -> bool:
    from .plotting import plot_net, plot_trace
    sys_ = _load_system(args.system)
    if args.s0:
        S0 = _load_net(args.s0)
    elif isinstance(sys_, GifsInfSystem):
        S0 = CompactNet(materialize_net(sys_.tree, sys_.depth, sys_.dim).points[:1])
    else:
        S0 = CompactNet(np.zeros((1, 1)))
    kw = {"tuple_policy": args.policy, "cap": args.cap} if isinstance(sys_, GifsInfSystem) else {}
    res = iterate_to_fixed_point(sys_, S0, args.tol, args.max_iter, **kw)
    Path(args.out).write_text(res.net.to_json() + "\n")
    _write_csv(args.trace or _sibling(args.out, ".trace.csv"), ["step", "hausdorff_delta"],
               [(k, repr(t)) for k, t in enumerate(res.trace)])
    plot_trace(res.trace, res.contraction, args.figure or _sibling(args.out, ".trace.svg"))
    plot_net(res.net, _sibling(args.out, ".svg"))
    dominated = trace_dominated(res.trace, res.contraction)
    body = {"attractor": args.out, "steps": res.steps, "converged": res.converged,
            "contraction": res.contraction, "trace": res.trace, "trace_dominated": dominated,
            "points": len(res.net)}
    passed = res.converged and dominated
    if isinstance(sys_, GifsInfSystem):
        h = hausdorff_distance(res.net, domain_net(sys_))
        body["distance_to_domain_net"] = h
        body["domain_resolution"] = float(sys_.tree.b[sys_.depth - 1])
        passed = passed and h <= body["domain_resolution"]
    return _report(args, args.report or _sibling(args.out, ".report.json"), body, passed)


def cmd_extend(args) -> bool:
    sys_ = _load_system(args.system)
    if not isinstance(sys_, GifsInfSystem):
        raise UsageError("extend works on systems of kind gifs_inf")
    try:
        ext = extend_system(sys_, args.r, args.dim)
    except ValueError as e:
        raise UsageError(str(e)) from None
    Path(args.out).write_text(anchor_tables_json(ext) + "\n")
    if args.system_out:
        Path(args.system_out).write_text(gio.dumps(gio.system_to_dict(ext)))
    agree, worst = True, 0.0
    for f in ext.maps:
        reps = f.class_representatives()
        base = np.array([f.base(t) for t in reps])
        agree = agree and bool(np.array_equal(f.evaluate(reps), base))
        worst = max(worst, sampled_ratio(f, args.pairs, args.seed) / f.lip)
    net = materialize_net(ext.tree, ext.depth, ext.dim)
    fixes = hutchinson_step(ext, net).same_points(net)
    bound_ok = ext.contraction <= args.r
    body = {"anchors": args.out, "maps": len(ext.maps), "p": ext.meta["p"],
            "declared_bounds": [f.lip for f in ext.maps], "anchor_agreement": agree,
            "sampled_ratio_over_bound": worst, "pairs_per_map": args.pairs,
            "fixes_net": fixes, "bound_below_r": bound_ok}
    passed = agree and fixes and bound_ok and worst <= 1 + 1e-9
    return _report(args, args.report or _sibling(args.out, ".report.json"), body, passed)


def cmd_premeasure(args) -> bool:
    data = _read_json(args.set)
    if "cells" in data:
        target = CellTree.from_dict(data)
        args.strategy = args.strategy or "cell"
    elif "points" in data:
        target = CompactNet.from_json(json.dumps(data))
        args.strategy = args.strategy or "interval"
        if args.strategy not in ("interval", "greedy"):
            raise UsageError("cell strategies need a cell tree (from build-balanced); "
                             "use --strategy interval for a net")
    else:
        raise UsageError(f"{args.set}: neither a cell tree nor a net")
    try:
        gauge = GaugeFunction.parse(args.gauge)
        deltas = sorted(_floats(args.delta), reverse=True)
        values = [premeasure_upper(target, gauge, d, args.strategy) for d in deltas]
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = args.out or _sibling(args.set, ".premeasure.csv")
    _write_csv(out, ["delta", "upper_bound"], [(repr(d), repr(v)) for d, v in zip(deltas, values)])
    monotone = all(b >= a - 1e-12 * max(1.0, a) for a, b in zip(values, values[1:]))
    body = {"table": str(out), "gauge": gauge.descriptor, "strategy": args.strategy,
            "deltas": deltas, "values": values, "monotone_in_delta": monotone}
    return _report(args, args.report or _sibling(out, ".report.json"), body, monotone)


def cmd_appendix(args) -> bool:
    from .plotting import plot_example_space
    ns = _ints(args.n)
    if not ns or min(ns) < 1:
        raise UsageError("--n takes positive integers")
    space = build_example_space(max(ns), args.resolution)
    rows = [(n, *discontinuity_witness(n, space)) for n in ns]
    _write_csv(args.out, ["n", "h1", "h2"], [(n, repr(h1), repr(h2)) for n, h1, h2 in rows])
    plot_example_space(space, [(n, witness_set(n)) for n in ns],
                       args.figure or _sibling(args.out, ".svg"))
    passed = all(h2 == 1.0 for _, _, h2 in rows)
    body = {"table": args.out, "rows": [{"n": n, "h1": h1, "h2": h2} for n, h1, h2 in rows],
            "reference_h1": {str(n): math.sqrt(5) / (2 * n) for n in ns}}
    return _report(args, args.report or _sibling(args.out, ".report.json"), body, passed)


def cmd_export(args) -> bool:
    from .plotting import plot_net
    if bool(args.tree) == bool(args.net):
        raise UsageError("give exactly one of --tree or --net")
    if args.tree:
        tree = _load_tree(args.tree)
        depth = args.depth or tree.depth
        if not 1 <= depth <= tree.depth:
            raise UsageError(f"--depth {depth} outside 1..{tree.depth}")
        net = materialize_net(tree, depth, args.dim)
    else:
        net = _load_net(args.net)
    if args.out:
        Path(args.out).write_text(net.to_json() + "\n")
    stem = args.out or args.net or args.tree
    csv_path = args.csv or _sibling(stem, ".csv")
    Path(csv_path).write_text(net.to_csv())
    plot_net(net, args.figure or _sibling(stem, ".net.svg"))
    print(f"export: {len(net)} points -> {csv_path}")
    return True


# -- parser -------------------------------------------------------------------

def build_parser() -> tuple:
    parser = argparse.ArgumentParser(prog="gifs-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="JSON file of defaults (flags still win)")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    def add(name, func, help_, aliases=()):
        p = sub.add_parser(name, help=help_, aliases=list(aliases))
        p.set_defaults(func=func)
        subs[name] = p
        for a in aliases:
            subs[a] = p
        return p

    p = add("build-balanced", cmd_build_balanced, "construct and verify a balanced cell tree")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--profile", required=True, help="comma-separated arities, e.g. 2,2,8")
    p.add_argument("--depth", type=int, help="truncate the profile to this many levels")
    p.add_argument("--ambient", default="0,1")
    p.add_argument("--safety", type=float, default=1.1)
    p.add_argument("--out", default="tree.json")
    p.add_argument("--report")
    p.add_argument("--figure")

    p = add("verify", cmd_verify, "re-check the defining conditions of a stored tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--report")

    for name, func, help_ in [("witness", cmd_witness, "one address map per first digit"),
                              ("refine", cmd_refine, "maps indexed by depth-p prefixes"),
                              ("union", cmd_union, "system for the balanced set plus finitely many points")]:
        p = add(name, func, help_)
        p.add_argument("--tree", required=True)
        p.add_argument("--depth", type=int)
        p.add_argument("--out", default=f"{name}.json")
        p.add_argument("--report")
        if name != "union":
            p.add_argument("--dim", type=int, default=1)
        if name != "witness":
            p.add_argument("--r", type=float, required=True)
        if name == "union":
            p.add_argument("--points", help="comma-separated 1-D points, e.g. 5")
            p.add_argument("--points-file", help="net JSON with the extra points")

    p = add("certify", cmd_certify, "exact Lipschitz certificate for a system")
    p.add_argument("--system", required=True)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.add_argument("--report")

    p = add("attractor", cmd_attractor, "iterate the Hutchinson operator to its fixed point")
    p.add_argument("--system", required=True)
    p.add_argument("--s0", help="starting net JSON (default: a single point)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=64)
    p.add_argument("--policy", choices=["classes", "product"], default="classes")
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.add_argument("--out", default="attractor.json")
    p.add_argument("--trace")
    p.add_argument("--figure")
    p.add_argument("--report")

    p = add("extend", cmd_extend, "extend a system to all of R^n")
    p.add_argument("--system", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--pairs", type=int, default=10 ** 4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="anchors.json")
    p.add_argument("--system-out")
    p.add_argument("--report")

    p = add("premeasure", cmd_premeasure, "upper bounds on the delta-premeasure")
    p.add_argument("--set", required=True, help="net JSON or cell tree JSON")
    p.add_argument("--gauge", default="t^0.6309")
    p.add_argument("--delta", default="1e-3", help="one value or a comma-separated list")
    p.add_argument("--strategy", default=None,
                   help="interval (alias greedy), cell or cell:n; default cell for a tree, interval for a net")
    p.add_argument("--out")
    p.add_argument("--report")

    p = add("appendix-demo", cmd_appendix, "discontinuity of the retraction onto the perfect part",
            aliases=("appendix",))
    p.add_argument("--n", default="5,10,20,50")
    p.add_argument("--resolution", type=float, default=1e-4)
    p.add_argument("--out", default="appendix.csv")
    p.add_argument("--figure")
    p.add_argument("--report")

    p = add("export", cmd_export, "write a net as JSON, CSV and SVG")
    p.add_argument("--tree")
    p.add_argument("--net")
    p.add_argument("--depth", type=int)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.add_argument("--figure")
    return parser, subs


def parse_args(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser, subs = build_parser()
    if known.config:
        cfg = _read_json(known.config)
        if not isinstance(cfg, dict):
            raise UsageError(f"{known.config}: expected a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        # config values only replace defaults, so flags still win
        for sp in {id(p): p for p in subs.values()}.values():
            dests = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in dests})
            for a in sp._actions:
                if a.dest in cfg:
                    a.required = False
        args = parser.parse_args(argv)
        unknown = set(cfg) - {a.dest for a in subs[args.command]._actions}
        if unknown:
            raise UsageError(f"{known.config}: unknown settings {sorted(unknown)}")
    else:
        args = parser.parse_args(argv)
    if args.command == "appendix":
        args.command = "appendix-demo"
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return 0 if args.func(args) else 1
    except UsageError as e:
        print(f"gifs-lab: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
