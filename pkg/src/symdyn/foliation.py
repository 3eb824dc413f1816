"""Combinatorial models of transversal leaf systems on a mapping torus.

A sketch records only the rigid skeleton: spanning orbit nodes (points or
degenerate invariant circles), rigid leaves as edges (cylinders between
nodes, half cylinders from a node to the torus boundary), puncture signs,
and leaf areas.  That is enough structure to check the lemma-level
consistency conditions: pairwise linking of spanning orbits equals the
boundary condition, boundary-connected nodes keep the boundary condition
out of their twist interval, non-simple sketches own a twisted node,
leaf areas satisfy the action balance, and the local models bound the
number of rigid leaves per node parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SketchError
from .rotation import TwistInterval

ODD = "odd"
EVEN = "even"
BOUNDARY_END = "boundary"

AREA_TOL = 1e-8


@dataclass
class SpanningOrbitNode:
    ref: str
    parity: str
    twist: TwistInterval | None = None
    action: float | None = None
    circle: bool = False
    degenerate: bool = False

    def to_json(self):
        obj = {"ref": self.ref, "parity": self.parity}
        if self.twist is not None:
            obj["twist"] = self.twist.to_json()
        if self.action is not None:
            obj["action"] = self.action
        if self.circle:
            obj["circle"] = True
        if self.degenerate:
            obj["degenerate"] = True
        return obj

    @classmethod
    def from_json(cls, obj):
        tw = obj.get("twist")
        return cls(ref=obj["ref"], parity=obj["parity"],
                   twist=None if tw is None else TwistInterval(float(tw[0]), float(tw[1])),
                   action=obj.get("action"),
                   circle=bool(obj.get("circle", False)),
                   degenerate=bool(obj.get("degenerate", False)))


@dataclass
class Leaf:
    kind: str  # "cylinder" | "half_cylinder"
    ends: tuple  # (i, j) node indices, or (i, "boundary")
    signs: tuple  # "+" / "-" per end
    area: float | None = None

    def __post_init__(self):
        if self.kind not in ("cylinder", "half_cylinder"):
            raise SketchError(f"unknown leaf kind {self.kind!r}")
        if len(self.ends) != 2 or len(self.signs) != 2:
            raise SketchError("a leaf has exactly two ends")
        if self.kind == "half_cylinder" and self.ends[1] != BOUNDARY_END:
            raise SketchError("half cylinder second end must be 'boundary'")
        if self.kind == "cylinder" and not all(isinstance(e, int) for e in self.ends):
            raise SketchError("cylinder ends must be node indices")
        if set(self.signs) - {"+", "-"}:
            raise SketchError("leaf signs must be '+' or '-'")

    def node_ends(self):
        return [e for e in self.ends if isinstance(e, int)]

    def to_json(self):
        return {"kind": self.kind, "ends": list(self.ends),
                "signs": list(self.signs), "area": self.area}

    @classmethod
    def from_json(cls, obj):
        ends = tuple(e if isinstance(e, int) else str(e) for e in obj["ends"])
        return cls(kind=obj["kind"], ends=ends, signs=tuple(obj["signs"]),
                   area=obj.get("area"))


@dataclass
class FoliationSketch:
    n: int
    k: int
    nodes: list
    leaves: list
    boundary_actions: tuple = (None, None)  # (longitude, meridian)
    linking: dict = field(default_factory=dict)  # optional assumed lk table

    def __post_init__(self):
        for leaf in self.leaves:
            for e in leaf.node_ends():
                if not 0 <= e < len(self.nodes):
                    raise SketchError(f"leaf end {e} out of range")
        if not any(leaf.kind == "half_cylinder" for leaf in self.leaves):
            raise SketchError("a mapping-torus leaf system needs at least one "
                              "half cylinder reaching the boundary")

    def incident(self, i: int):
        return [leaf for leaf in self.leaves if i in leaf.node_ends()]

    def boundary_term(self):
        longitude, meridian = self.boundary_actions
        if longitude is None or meridian is None:
            return None
        return float(longitude) + self.k * float(meridian)

    def to_json(self):
        obj = {
            "n": self.n,
            "k": self.k,
            "nodes": [node.to_json() for node in self.nodes],
            "leaves": [leaf.to_json() for leaf in self.leaves],
            "boundary": {"L": self.boundary_actions[0], "m": self.boundary_actions[1]},
        }
        if self.linking:
            obj["linking"] = [[a, b, v] for (a, b), v in sorted(self.linking.items())]
        return obj

    @classmethod
    def from_json(cls, obj):
        boundary = obj.get("boundary", {})
        linking = {}
        for a, b, v in obj.get("linking", []):
            key = (a, b) if a <= b else (b, a)
            linking[key] = int(v)
        return cls(n=int(obj["n"]), k=int(obj["k"]),
                   nodes=[SpanningOrbitNode.from_json(nd) for nd in obj["nodes"]],
                   leaves=[Leaf.from_json(lf) for lf in obj["leaves"]],
                   boundary_actions=(boundary.get("L"), boundary.get("m")),
                   linking=linking)


class StaticOrbitData:
    """Linking/twist lookups backed by plain tables (no flow needed)."""

    def __init__(self, linking: dict | None = None, twists: dict | None = None):
        self._linking = {}
        for key, v in (linking or {}).items():
            a, b = key
            self._linking[(a, b) if a <= b else (b, a)] = int(v)
        self.twists = dict(twists or {})

    def linking(self, a: str, b: str) -> int:
        key = (a, b) if a <= b else (b, a)
        if key not in self._linking:
            raise SketchError(f"no linking number recorded for {key}")
        return self._linking[key]


@dataclass
class CheckResult:
    name: str
    passed: bool
    evidence: str
    skipped: bool = False

    def to_json(self):
        return {"name": self.name, "passed": self.passed,
                "evidence": self.evidence, "skipped": self.skipped}


@dataclass
class ValidationReport:
    checks: dict
    simple: bool

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_json(self):
        return {
            "valid": self.valid,
            "simple": self.simple,
            "checks": {name: c.to_json() for name, c in self.checks.items()},
        }


def _boundary_connected(sketch: FoliationSketch) -> set:
    out = set()
    for leaf in sketch.leaves:
        if leaf.kind == "half_cylinder":
            out.add(leaf.ends[0])
    return out


def _has_leaf_cycle(sketch: FoliationSketch) -> bool:
    """Cycle among rigid leaves in the disk-slice trace.

    Half cylinders land at pairwise distinct boundary points, so they can
    never close a loop; only node-to-node cylinders can.  A degenerate
    circle node is itself a closed trace curve and counts as a cycle.
    """
    if any(node.circle for node in sketch.nodes):
        return True
    parent = list(range(len(sketch.nodes)))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for leaf in sketch.leaves:
        if leaf.kind != "cylinder":
            continue
        a, b = leaf.ends
        if a == b:
            return True
        ra, rb = root(a), root(b)
        if ra == rb:
            return True
        parent[max(ra, rb)] = min(ra, rb)
    return False


def is_simple(sketch: FoliationSketch) -> bool:
    """True iff every spanning orbit is connected directly to the boundary.

    Cross-checked against acyclicity of the rigid-leaf trace; the two
    characterizations agree on any geometrically realizable sketch, so a
    disagreement is reported as a hard failure rather than a value.
    """
    direct = _boundary_connected(sketch) >= set(range(len(sketch.nodes)))
    acyclic = not _has_leaf_cycle(sketch)
    if direct != acyclic:
        raise SketchError(
            f"simplicity characterizations disagree (direct={direct}, "
            f"acyclic={acyclic}): sketch is not realizable")
    return direct


def _resolve_twist(sketch, node, rotation_data):
    if rotation_data is not None:
        twists = getattr(rotation_data, "twists", rotation_data)
        if node.ref in twists:
            return twists[node.ref]
    if node.twist is not None:
        return node.twist
    raise SketchError(f"no twist interval available for node {node.ref!r}")


def _lookup_linking(sketch, orbit_db, ref_a, ref_b):
    if orbit_db is not None:
        return orbit_db.linking(ref_a, ref_b)
    key = (ref_a, ref_b) if ref_a <= ref_b else (ref_b, ref_a)
    if key in sketch.linking:
        return sketch.linking[key]
    raise SketchError(f"no orbit data to resolve linking of {ref_a!r}, {ref_b!r}")


def validate(sketch: FoliationSketch, orbit_db=None, rotation_data=None) -> ValidationReport:
    """Run the five structural checks; each is independent of the others.

    (a) every pair of distinct spanning orbits links exactly k times;
    (b) a boundary-connected node never has k strictly inside its twist;
    (c) if some node is enclosed (not boundary-connected), some node has k
        strictly inside its twist;
    (d) each leaf area is positive and balances the end actions;
    (e) rigid-leaf counts per node match the parity local models.
    """
    k = sketch.k
    checks = {}

    # (a) pairwise linking
    fails = []
    pairs = 0
    try:
        for i, na in enumerate(sketch.nodes):
            for nb in sketch.nodes[i + 1:]:
                pairs += 1
                lk = _lookup_linking(sketch, orbit_db, na.ref, nb.ref)
                if lk != k:
                    fails.append(f"lk({na.ref},{nb.ref}) = {lk} != {k}")
        checks["pairwise_linking"] = CheckResult(
            "pairwise_linking", not fails,
            "; ".join(fails) if fails else f"{pairs} pair(s) all link {k}")
    except SketchError as exc:
        if pairs == 0 and len(sketch.nodes) <= 1:
            checks["pairwise_linking"] = CheckResult(
                "pairwise_linking", True, "fewer than two spanning orbits", skipped=True)
        else:
            raise exc

    connected = _boundary_connected(sketch)

    # (b) boundary-connected nodes must not have k inside their twist
    fails = []
    for i in sorted(connected):
        node = sketch.nodes[i]
        tw = _resolve_twist(sketch, node, rotation_data)
        if tw.contains(k):
            fails.append(f"{node.ref}: {k} in twist ({tw.lo:.6g}, {tw.hi:.6g})")
    checks["boundary_twist"] = CheckResult(
        "boundary_twist", not fails,
        "; ".join(fails) if fails else f"{len(connected)} boundary-connected node(s) clear of {k}")

    # (c) an enclosed node forces a twisted node somewhere
    enclosed = [i for i in range(len(sketch.nodes)) if i not in connected]
    if enclosed:
        twisted = []
        for node in sketch.nodes:
            tw = _resolve_twist(sketch, node, rotation_data)
            if tw.contains(k):
                twisted.append(node.ref)
        checks["enclosed_twist"] = CheckResult(
            "enclosed_twist", bool(twisted),
            f"enclosed nodes {[sketch.nodes[i].ref for i in enclosed]}, twisted nodes {twisted}")
    else:
        checks["enclosed_twist"] = CheckResult(
            "enclosed_twist", True, "every node is boundary-connected", skipped=True)

    # (d) leaf areas: positivity and the action balance
    fails = []
    checked = 0
    for idx, leaf in enumerate(sketch.leaves):
        if leaf.area is None:
            continue
        if leaf.area <= AREA_TOL:
            fails.append(f"leaf {idx}: area {leaf.area:.3g} not positive")
            continue
        terms = []
        missing = False
        for end, sign in zip(leaf.ends, leaf.signs):
            if end == BOUNDARY_END:
                term = sketch.boundary_term()
            else:
                term = sketch.nodes[end].action
            if term is None:
                missing = True
                break
            terms.append(term if sign == "+" else -term)
        if missing:
            continue
        checked += 1
        balance = sum(terms)
        if abs(balance - leaf.area) > AREA_TOL:
            fails.append(f"leaf {idx}: area {leaf.area:.6g} vs balance {balance:.6g}")
    checks["leaf_areas"] = CheckResult(
        "leaf_areas", not fails,
        "; ".join(fails) if fails else f"{checked} leaf balance(s) hold")

    # (e) local models: even nodes have exactly 4 rigid leaves, odd at least 1
    fails = []
    for i, node in enumerate(sketch.nodes):
        count = len(sketch.incident(i))
        if node.degenerate or node.circle:
            continue
        if node.parity == EVEN and count != 4:
            fails.append(f"{node.ref}: even node with {count} rigid leaves")
        elif node.parity == ODD and count < 1:
            fails.append(f"{node.ref}: odd node with no rigid leaf")
    checks["local_models"] = CheckResult(
        "local_models", not fails,
        "; ".join(fails) if fails else "leaf counts match parity local models")

    return ValidationReport(checks=checks, simple=is_simple(sketch))


# -- integrable sketches -------------------------------------------------------


def build_integrable_sketch(profile, e_center=(0.0, 0.0), n: int = 1, k: int = 1,
                            action_constant: float = 10.0,
                            allow_zero_k: bool = False) -> FoliationSketch:
    """Sketch for a radial-profile map: center orbit plus everything that
    links it k times, chained radially outward to the boundary.

    The spanning set for a nonzero boundary condition k consists of the
    center together with the invariant circles on which the n-th iterate
    rotates exactly k full turns.  k = 0 carries no such characterization
    without extra information about the map, so it requires an explicit
    override and produces the center-only sketch.
    """
    if k == 0 and not allow_zero_k:
        raise SketchError("k = 0 needs allow_zero_k: the spanning set is not "
                          "determined by linking data alone")
    c = float(action_constant)
    rot_center = float(n * profile.value_u(0.0))
    rot_boundary = float(n * profile.value_u(1.0))
    longitude, meridian = c * n, math.pi

    nodes = [SpanningOrbitNode(
        ref="center", parity=ODD,
        twist=TwistInterval(min(rot_center, rot_boundary), max(rot_center, rot_boundary)),
        action=c * n,
        degenerate=abs(rot_center - round(rot_center)) < 1e-9)]
    radii = []
    if k != 0:
        for u in profile.solve_value(k / n):
            if 1e-10 < u < 1.0 - 1e-10:
                radii.append(math.sqrt(u))
    for r in radii:
        nodes.append(SpanningOrbitNode(
            ref=f"circle_r{r:.6f}", parity=ODD,
            twist=TwistInterval(min(float(k), rot_boundary), max(float(k), rot_boundary)),
            action=c * n + math.pi * k * r * r,
            circle=True, degenerate=True))

    leaves = []

    def oriented(kind, ends, a_in, a_out):
        if a_out >= a_in:
            return Leaf(kind, ends, ("-", "+"), area=a_out - a_in)
        return Leaf(kind, ends, ("+", "-"), area=a_in - a_out)

    for i in range(len(nodes) - 1):
        leaves.append(oriented("cylinder", (i, i + 1),
                               nodes[i].action, nodes[i + 1].action))
    outer = len(nodes) - 1
    leaves.append(oriented("half_cylinder", (outer, BOUNDARY_END),
                           nodes[outer].action, longitude + k * meridian))

    linking = {}
    for i, na in enumerate(nodes):
        for nb in nodes[i + 1:]:
            key = (na.ref, nb.ref) if na.ref <= nb.ref else (nb.ref, na.ref)
            linking[key] = k

    return FoliationSketch(n=n, k=k, nodes=nodes, leaves=leaves,
                           boundary_actions=(longitude, meridian), linking=linking)


# -- asymptotic invariant circles ----------------------------------------------


@dataclass
class LimitCircle:
    radius: float
    rotation: float
    zero_energy: bool = True

    def to_json(self):
        return {"radius": self.radius, "rotation": self.rotation,
                "zero_energy": self.zero_energy}


@dataclass
class LimitFoliation:
    omega: float
    circles: list
    regions: list

    def to_json(self):
        return {"omega": self.omega,
                "circles": [c.to_json() for c in self.circles],
                "regions": [[lo, hi] for lo, hi in self.regions]}


def asymptotic_circles(profile, e_center, omega: float, k_sequence,
                       check_to: int = 1000) -> LimitFoliation:
    """Invariant circles selected by leaf systems whose average boundary
    condition k_n / n approaches omega.

    Returns every radius where the profile rotates by omega (ordered
    outward) and the annular regions between consecutive circles.  The
    circles are the loci crossed by zero-area leaves of the limit; each
    region between them is swept by strip leaves joining its two edges.
    """
    tail = [abs(k_sequence(m) / m - omega) for m in range(max(2, check_to - 99), check_to + 1)]
    if max(tail) > 5e-3:
        raise ValueError(
            f"k_sequence does not approach omega = {omega}: tail error {max(tail):.3g}")
    radii = [math.sqrt(u) for u in profile.solve_value(float(omega))
             if u > 1e-12]
    circles = [LimitCircle(radius=r, rotation=float(omega)) for r in radii]
    cuts = [0.0] + radii + [1.0]
    regions = [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]
    return LimitFoliation(omega=float(omega), circles=circles, regions=regions)


# -- structured random sketches (for the characterization agreement suite) -----


def random_sketch(rng: np.random.Generator) -> FoliationSketch:
    """A random realizable sketch: a boundary-connected star, optionally
    wrapped in island-chain rings that enclose the inner structure.

    Rings always enclose at least one node and enclosed nodes connect only
    inward, which is exactly the planarity constraint under which the two
    simplicity characterizations coincide.  Even nodes end up with exactly
    four rigid leaves (two ring edges, one inward, one outward), so the
    output also respects the parity local models.
    """
    nodes = [SpanningOrbitNode(ref="n0", parity=ODD)]
    leaves = []
    inward_targets = [0]  # odd nodes the next ring may hook into
    outward_sources = [0]  # nodes still needing a route toward the boundary
    for _ in range(int(rng.integers(0, 3))):
        ring = []
        evens, odds = [], []
        for _ in range(int(rng.integers(1, 3))):  # island pairs in this ring
            e_idx = len(nodes)
            nodes.append(SpanningOrbitNode(ref=f"n{e_idx}", parity=EVEN))
            o_idx = len(nodes)
            nodes.append(SpanningOrbitNode(ref=f"n{o_idx}", parity=ODD))
            ring.extend([e_idx, o_idx])
            evens.append(e_idx)
            odds.append(o_idx)
        for pos, idx in enumerate(ring):
            leaves.append(Leaf("cylinder", (idx, ring[(pos + 1) % len(ring)]),
                               ("-", "+")))
        for e_idx in evens:
            leaves.append(Leaf("cylinder",
                               (e_idx, int(rng.choice(inward_targets))), ("-", "+")))
        for src in outward_sources:
            if src != 0:  # the center's outward route is the ring enclosing it
                leaves.append(Leaf("cylinder", (src, int(rng.choice(odds))), ("-", "+")))
        inward_targets = odds
        outward_sources = evens
    for src in outward_sources:
        leaves.append(Leaf("half_cylinder", (src, BOUNDARY_END), ("-", "+")))
    # sprinkle extra boundary-connected odd satellites
    for _ in range(int(rng.integers(0, 3))):
        idx = len(nodes)
        nodes.append(SpanningOrbitNode(ref=f"n{idx}", parity=ODD))
        leaves.append(Leaf("half_cylinder", (idx, BOUNDARY_END), ("-", "+")))
    return FoliationSketch(n=1, k=0, nodes=nodes, leaves=leaves)
