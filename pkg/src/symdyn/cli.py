"""Command-line front end.

Subcommands mirror the library surface: orbit search, rotation numbers,
twist-forcing verification, censuses, coprime counts, sketch building and
validation, limit circles, and plot-data emission.  Exit status is 0 on
success, 2 when a sketch fails validation, and 1 on input errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diskmaps, foliation, jsonio, mapspec, orbits, pb, rotation, suspension
from .errors import SymdynError


@dataclass
class RunConfig:
    map_spec: str | None = None
    n: int = 1
    grid: tuple = (48, 96)
    tolerances: dict = field(default_factory=dict)
    output_dir: str = "."
    seed: int = 0

    @classmethod
    def from_file(cls, path):
        obj = jsonio.load(path)
        cfg = cls()
        cfg.map_spec = obj.get("map_spec", cfg.map_spec)
        cfg.n = int(obj.get("n", cfg.n))
        if "grid" in obj:
            cfg.grid = tuple(int(v) for v in obj["grid"])
        cfg.tolerances = dict(obj.get("tolerances", {}))
        cfg.output_dir = obj.get("output_dir", cfg.output_dir)
        cfg.seed = int(obj.get("seed", cfg.seed))
        for key, value in cfg.tolerances.items():
            if not (isinstance(value, (int, float)) and value > 0):
                raise SymdynError(f"tolerance override {key!r} must be positive")
        return cfg


def _parse_grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise SymdynError(f"grid must look like 48x96, got {text!r}") from None


def _merge_config(args):
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "map", None):
        cfg.map_spec = args.map
    if getattr(args, "n", None) is not None:
        cfg.n = args.n
    if getattr(args, "grid", None):
        cfg.grid = _parse_grid(args.grid)
    if getattr(args, "out", None):
        cfg.output_dir = args.out
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _load_torus(cfg, action_constant=10.0):
    if not cfg.map_spec:
        raise SymdynError("no map description given (--map or config map_spec)")
    iso = mapspec.load(cfg.map_spec)
    return suspension.MappingTorus(iso, 1, action_constant)


def _search_kwargs(cfg):
    kw = {}
    tol_map = {"residual": "residual_tol", "dedup": "dedup_tol",
               "circle_gap": "circle_gap_tol"}
    for key, target in tol_map.items():
        if key in cfg.tolerances:
            kw[target] = float(cfg.tolerances[key])
    return kw


def _outdir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_orbits(args) -> int:
    cfg = _merge_config(args)
    torus = _load_torus(cfg)
    db = orbits.find_periodic_points(torus, n=cfg.n, grid=cfg.grid, **_search_kwargs(cfg))
    out = _outdir(cfg)
    jsonio.dump(db.to_json(include_linking=args.linking), out / "orbits.json")
    print(f"{len(db.records)} interior orbit(s), {len(db.circles)} circle(s), "
          f"{len(db.boundary_records)} boundary record(s) -> {out / 'orbits.json'}")
    return 0


def cmd_rotation(args) -> int:
    cfg = _merge_config(args)
    torus = _load_torus(cfg)
    db = orbits.find_periodic_points(torus, n=cfg.n, grid=cfg.grid, **_search_kwargs(cfg))
    data = rotation.rotation_data(torus, db)
    out = _outdir(cfg)
    jsonio.dump(data.to_json(), out / "rotation.json")
    print(f"boundary rotation {data.boundary_rot!r} over {cfg.n} period(s) "
          f"-> {out / 'rotation.json'}")
    return 0


def cmd_pb(args) -> int:
    cfg = _merge_config(args)
    torus = _load_torus(cfg)
    db = orbits.find_periodic_points(torus, n=cfg.n, grid=cfg.grid, **_search_kwargs(cfg))
    center = None
    if args.center:
        center = db.find(args.center)
    else:
        origin_recs = [r for r in db.records if r.radius < 1e-6]
        if not origin_recs:
            raise SymdynError("no orbit at the origin; pass --center <id>")
        center = origin_recs[0]
    report = pb.verify_pb(torus, center, cfg.n, args.k, db=db)
    out = _outdir(cfg)
    jsonio.dump(report.to_json(), out / "pb_report.json")
    status = "vacuous" if report.vacuous else ("satisfied" if report.satisfied else "NOT satisfied")
    print(f"k = {args.k}: {status}; witnesses {report.witnesses}, "
          f"circles {report.circle_witnesses} -> {out / 'pb_report.json'}")
    return 0


def cmd_census(args) -> int:
    cfg = _merge_config(args)
    torus = _load_torus(cfg)
    twist = None
    if args.twist:
        lo, hi = (float(v) for v in args.twist.split(","))
        twist = (lo, hi)
    report = pb.census(torus, args.N, twist=twist, grid=cfg.grid)
    out = _outdir(cfg)
    jsonio.dump(report.to_json(), out / "census.json")
    jsonio.write_csv(out / "census.csv",
                     ["N", "mu", "coprime_count", "bound_constant_times_N2"],
                     report.csv_rows())
    for n in range(1, args.N + 1):
        line = f"N={n}: mu={report.counts[n]}"
        if twist:
            line += f", lattice={report.lattice[n]}"
        print(line)
    return 0


def cmd_coprime(args) -> int:
    print(pb.coprime_count(args.a, args.b, args.N))
    return 0


def cmd_growth_bound(args) -> int:
    print(jsonio.format_float(pb.growth_bound(args.a, args.b)))
    return 0


def cmd_foliation_validate(args) -> int:
    sketch = foliation.FoliationSketch.from_json(jsonio.load(args.sketch))
    orbit_db = None
    if args.orbits:
        orbit_db = orbits.OrbitDatabase.from_json(jsonio.load(args.orbits))
    rot_data = None
    if args.rotation:
        obj = jsonio.load(args.rotation)
        rot_data = {entry["id"]: rotation.TwistInterval(*entry["twist"])
                    for entry in obj.get("orbits", [])}
    report = foliation.validate(sketch, orbit_db=orbit_db, rotation_data=rot_data)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        jsonio.dump(report.to_json(), out / "validation.json")
    shape = "simple" if report.simple else "non-simple"
    for name, check in report.checks.items():
        flag = "pass" if check.passed else "FAIL"
        print(f"{flag} {name}: {check.evidence}")
    print(f"sketch is {shape}; {'all checks pass' if report.valid else 'INVALID'}")
    return 0 if report.valid else 2


def cmd_foliation_sketch(args) -> int:
    cfg = _merge_config(args)
    iso = mapspec.load(cfg.map_spec) if cfg.map_spec else None
    if iso is None:
        raise SymdynError("foliation sketch requires --map")
    profile = iso.radial_profile()
    if profile is None:
        raise SymdynError("sketch building needs a purely radial family")
    sketch = foliation.build_integrable_sketch(
        profile, n=cfg.n, k=args.k, allow_zero_k=args.allow_zero_k)
    out = _outdir(cfg)
    jsonio.dump(sketch.to_json(), out / "sketch.json")
    print(f"{len(sketch.nodes)} node(s), {len(sketch.leaves)} rigid leaf(s) "
          f"-> {out / 'sketch.json'}")
    return 0


def cmd_circles(args) -> int:
    cfg = _merge_config(args)
    iso = mapspec.load(cfg.map_spec) if cfg.map_spec else None
    if iso is None:
        raise SymdynError("circles requires --map")
    profile = iso.radial_profile()
    if profile is None:
        raise SymdynError("limit circles need a purely radial family")
    omega = args.omega

    def k_seq(n):
        return math.floor(n * omega)

    limit = foliation.asymptotic_circles(profile, (0.0, 0.0), omega, k_seq)
    out = _outdir(cfg)
    jsonio.dump(limit.to_json(), out / "circles.json")
    jsonio.write_csv(out / "circles.csv", ["radius", "rotation"],
                     [[c.radius, c.rotation] for c in limit.circles])
    print(f"{len(limit.circles)} circle(s) at rotation {omega!r} -> {out / 'circles.json'}")
    return 0


def _node_position(node, orbit_db, idx, total):
    if orbit_db is not None:
        try:
            found = orbit_db.find(node.ref)
            if hasattr(found, "base"):
                return float(found.base[0]), float(found.base[1])
            return float(found.radius), 0.0
        except (KeyError, AttributeError):
            pass
    if node.circle:
        marker = node.ref.rsplit("_r", 1)
        if len(marker) == 2:
            try:
                return float(marker[1]), 0.0
            except ValueError:
                pass
    angle = 2.0 * math.pi * idx / max(total, 1)
    radius = 0.25 + 0.5 * idx / max(total, 1)
    return radius * math.cos(angle), radius * math.sin(angle)


def cmd_plotdata(args) -> int:
    cfg = _merge_config(args)
    torus = _load_torus(cfg)
    out = _outdir(cfg)
    written = []

    seeds = diskmaps.polar_grid(8, 8, r_max=0.98)
    iterations = max(1, math.ceil(10_000 / len(seeds)))
    rows = []
    cur = seeds.copy()
    for _ in range(iterations):
        cur = diskmaps.advance(torus.iso, cur, 1)
        rows.extend([float(p[0]), float(p[1]), i] for i, p in enumerate(cur))
    jsonio.write_csv(out / "portrait.csv", ["x", "y", "orbit_id"], rows)
    written.append("portrait.csv")

    db = None
    if args.orbits:
        db = orbits.OrbitDatabase.from_json(jsonio.load(args.orbits))
    elif args.search:
        db = orbits.find_periodic_points(torus, n=cfg.n, grid=cfg.grid)
    if db is not None:
        rows = [[float(r.base[0]), float(r.base[1]), r.stability,
                 "degenerate" if r.cz_index is None else r.cz_index,
                 "even" if (r.cz_index or 1) % 2 == 0 else "odd"]
                for r in db.records]
        jsonio.write_csv(out / "fixed_points.csv",
                         ["x", "y", "stability", "cz", "parity"], rows)
        jsonio.write_csv(out / "invariant_circles.csv", ["radius", "k"],
                         [[c.radius, c.rotation_integer] for c in db.circles])
        written.extend(["fixed_points.csv", "invariant_circles.csv"])

    if args.sketch:
        sketch = foliation.FoliationSketch.from_json(jsonio.load(args.sketch))
        total = len(sketch.nodes)
        positions = [_node_position(nd, db, i, total) for i, nd in enumerate(sketch.nodes)]
        rows = []
        for li, leaf in enumerate(sketch.leaves):
            p0 = positions[leaf.ends[0]]
            if leaf.kind == "half_cylinder":
                norm = math.hypot(*p0) or 1.0
                p1 = (p0[0] / norm, p0[1] / norm) if norm > 1e-9 else (1.0, 0.0)
            else:
                p1 = positions[leaf.ends[1]]
            rows.append([li, 0, float(p0[0]), float(p0[1])])
            rows.append([li, 1, float(p1[0]), float(p1[1])])
        jsonio.write_csv(out / "leaf_traces.csv", ["leaf", "seq", "x", "y"], rows)
        cylinders = [lf for lf in sketch.leaves if lf.kind == "cylinder"]
        vertices = set()
        for lf in cylinders:
            vertices.update(lf.node_ends())
        components = _component_count(len(sketch.nodes), cylinders)
        loops = len(cylinders) - len(vertices) + components
        loops += sum(1 for nd in sketch.nodes if nd.circle)
        jsonio.dump({"closed_loops": int(loops)}, out / "trace_summary.json")
        written.extend(["leaf_traces.csv", "trace_summary.json"])

    print(f"wrote {', '.join(written)} to {out}")
    return 0


def _component_count(n_nodes, cylinders):
    used = sorted({e for lf in cylinders for e in lf.node_ends()})
    index = {v: i for i, v in enumerate(used)}
    parent = list(range(len(used)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for lf in cylinders:
        a, b = (index[e] for e in lf.node_ends())
        ra, rb = root(a), root(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return len({root(i) for i in range(len(used))})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdyn",
        description="Suspension-flow toolkit for area-preserving disk maps")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_map=True):
        p.add_argument("--map", help="path to a map description JSON")
        p.add_argument("--n", type=int, default=None, help="iterate level")
        p.add_argument("--grid", help="Newton seed grid, e.g. 48x96")
        p.add_argument("--out", help="output directory")
        p.add_argument("--config", help="RunConfig JSON file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed for sampling")

    p = sub.add_parser("orbits", help="find and classify periodic points")
    common(p)
    p.add_argument("--linking", action="store_true", help="store pairwise linking numbers")
    p.set_defaults(fn=cmd_orbits)

    p = sub.add_parser("rotation", help="boundary/orbit rotation numbers and twists")
    common(p)
    p.set_defaults(fn=cmd_rotation)

    p = sub.add_parser("pb", help="verify the twist-forcing fixed point count")
    common(p)
    p.add_argument("--k", type=int, required=True, help="target linking number")
    p.add_argument("--center", help="orbit id of the center (default: origin)")
    p.set_defaults(fn=cmd_pb)

    p = sub.add_parser("census", help="distinct-orbit counts by minimal period")
    common(p)
    p.add_argument("--N", type=int, required=True, help="maximum period")
    p.add_argument("--twist", help="a,b twist interval for the lattice comparison")
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("coprime", help="lattice count of lowest-form rationals")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(fn=cmd_coprime)

    p = sub.add_parser("growth-bound", help="print 3|b-a|/pi^2")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(fn=cmd_growth_bound)

    p = sub.add_parser("foliation", help="sketch building and validation")
    fsub = p.add_subparsers(dest="subcommand", required=True)
    pv = fsub.add_parser("validate", help="run the structural checks on a sketch")
    pv.add_argument("--sketch", required=True)
    pv.add_argument("--orbits", help="orbit database JSON with linking table")
    pv.add_argument("--rotation", help="rotation data JSON for twist intervals")
    pv.add_argument("--out", help="where to write validation.json")
    pv.set_defaults(fn=cmd_foliation_validate)
    ps = fsub.add_parser("sketch", help="build the radial-family sketch")
    common(ps)
    ps.add_argument("--k", type=int, required=True)
    ps.add_argument("--allow-zero-k", action="store_true")
    ps.set_defaults(fn=cmd_foliation_sketch)

    p = sub.add_parser("circles", help="limit invariant circles of a radial family")
    common(p)
    p.add_argument("--omega", type=float, required=True)
    p.set_defaults(fn=cmd_circles)

    p = sub.add_parser("plotdata", help="emit CSV point sets for external plotting")
    common(p)
    p.add_argument("--orbits", help="orbit database JSON")
    p.add_argument("--search", action="store_true", help="search orbits before plotting")
    p.add_argument("--sketch", help="sketch JSON for leaf traces")
    p.set_defaults(fn=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SymdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
