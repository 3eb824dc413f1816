"""Twist-forced orbit verification and orbit-growth censuses.

An integer k strictly between the rotation number of an interior fixed
point and the boundary rotation number forces at least two further fixed
points of the iterate whose trajectories link the center exactly k times.
`verify_pb` checks that prediction directly on a searched orbit set.

The census accumulates distinct orbits by minimal period and compares the
count against the number of coprime lattice points under the twist lines,
whose density gives the quadratic growth floor 3|b-a|/pi^2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import orbits, rotation, suspension


def coprime_count(a: float, b: float, n_max: int) -> int:
    """Lattice points (p, q) with q*a < p < q*b, 1 <= q <= n_max, gcd(p, q) = 1.

    This counts exactly the rationals p/q in the open interval (a, b) whose
    lowest-form denominator is at most n_max.
    """
    if not a < b:
        raise ValueError("need a < b")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    count = 0
    for q in range(1, n_max + 1):
        p_lo = math.floor(q * a) + 1
        p_hi = math.ceil(q * b) - 1
        for p in range(p_lo, p_hi + 1):
            if q * a < p < q * b and math.gcd(abs(p), q) == 1:
                count += 1
    return count


def growth_bound(a: float, b: float) -> float:
    """Asymptotic density floor 3|b-a|/pi^2 of the coprime lattice count."""
    return 3.0 * abs(b - a) / math.pi ** 2


@dataclass
class PBReport:
    """Outcome of one twist-forcing check."""

    n: int
    center_id: str
    k: int
    witnesses: list
    circle_witnesses: list
    satisfied: bool
    vacuous: bool
    twist: rotation.TwistInterval

    def to_json(self):
        return {
            "n": self.n,
            "center": self.center_id,
            "k": self.k,
            "witnesses": list(self.witnesses),
            "circle_witnesses": list(self.circle_witnesses),
            "satisfied": self.satisfied,
            "vacuous": self.vacuous,
            "twist": self.twist.to_json(),
        }


def verify_pb(torus: suspension.MappingTorus, center: orbits.PeriodicOrbitRecord,
              n: int, k: int, db: orbits.OrbitDatabase | None = None,
              grid: tuple = (48, 96)) -> PBReport:
    """Count fixed points of psi^n linking the center exactly k times.

    The report is satisfied with two or more isolated witnesses; a fixed
    circle linking k times also satisfies it (flagged separately, since a
    degenerate family trivially contains many fixed points).  If k is not
    strictly inside the center's twist interval the check is vacuous.
    """
    tw = rotation.twist_interval(torus, center)
    vacuous = k not in rotation.integers_in(tw)
    if db is None:
        db = orbits.find_periodic_points(torus, n=n, grid=grid)
    witnesses = []
    for rec in db.records:
        if np.linalg.norm(rec.base - center.base) < 1e-8:
            continue
        if orbits.linking_number(torus, rec, center) == k:
            witnesses.append(rec.id)
    circle_witnesses = []
    for circ in db.circles:
        if orbits.linking_number(torus, circ, center) == k:
            circle_witnesses.append(circ.id)
    satisfied = (len(witnesses) >= 2) or bool(circle_witnesses)
    return PBReport(n=n, center_id=center.id or "center", k=k,
                    witnesses=witnesses, circle_witnesses=circle_witnesses,
                    satisfied=satisfied, vacuous=vacuous, twist=tw)


@dataclass
class CensusReport:
    """Distinct-orbit counts by minimal period, with the lattice comparison."""

    n_max: int
    counts: dict
    lattice: dict
    bound_constant: float
    flagged_circles: dict
    orbit_index: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def csv_rows(self):
        rows = []
        for n in range(1, self.n_max + 1):
            rows.append([
                n,
                self.counts.get(n, 0),
                self.lattice.get(n, ""),
                self.bound_constant * n * n if self.bound_constant else "",
            ])
        return rows

    def to_json(self):
        return {
            "N_max": self.n_max,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "lattice": {str(k): v for k, v in sorted(self.lattice.items())},
            "bound_constant": self.bound_constant,
            "flagged_circles": {str(k): v for k, v in sorted(self.flagged_circles.items())},
            "diagnostics": self.diagnostics,
        }


def _census_threads() -> int:
    raw = os.environ.get("SYMDYN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def census(torus: suspension.MappingTorus, n_max: int,
           twist: tuple | None = None, grid: tuple = (48, 96),
           threads: int | None = None) -> CensusReport:
    """Count distinct orbits of minimal period <= N for every N <= n_max.

    Orbits found at different iterate levels are merged by point-set
    proximity; invariant circles are merged by radius, counted once each,
    and flagged, since the census is only sharp for maps whose resonances
    have split into isolated chains.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > 12:
        raise ValueError("census beyond N = 12 is not a desk-scale computation")
    threads = _census_threads() if threads is None else max(1, threads)
    levels = list(range(1, n_max + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            dbs = dict(zip(levels, pool.map(
                lambda n: orbits.find_periodic_points(torus, n=n, grid=grid), levels)))
    else:
        dbs = {n: orbits.find_periodic_points(torus, n=n, grid=grid) for n in levels}

    known_orbits: list[dict] = []
    known_circles: list[dict] = []
    diagnostics = {}
    for n in levels:
        db = dbs[n]
        diagnostics[str(n)] = db.diagnostics
        for rec in db.records:
            pts = rec.orbit_points or [rec.base]
            match = None
            for entry in known_orbits:
                gap = min(float(np.linalg.norm(p - q))
                          for p in pts for q in entry["points"])
                if gap < 1e-6:
                    match = entry
                    break
            if match is None:
                known_orbits.append({
                    "points": list(pts),
                    "minimal_period": rec.minimal_period,
                    "first_level": n,
                    "id": f"n{n}:{rec.id}",
                })
            else:
                # keep the sharper attribution and learn new orbit points
                match["minimal_period"] = min(match["minimal_period"], rec.minimal_period)
                for p in pts:
                    if min(float(np.linalg.norm(p - q)) for q in match["points"]) > 1e-6:
                        match["points"].append(p)
        for circ in db.circles:
            match = None
            for entry in known_circles:
                if abs(entry["radius"] - circ.radius) < 1e-3:
                    match = entry
                    break
            if match is None:
                known_circles.append({
                    "radius": circ.radius,
                    "first_level": n,
                    "id": f"n{n}:{circ.id}",
                    "boundary": circ.boundary,
                })

    counts = {}
    flagged = {}
    for n in levels:
        iso_count = sum(1 for o in known_orbits if o["minimal_period"] <= n)
        circ_count = sum(1 for c in known_circles
                         if c["first_level"] <= n and not c["boundary"])
        counts[n] = iso_count + circ_count
        flagged[n] = circ_count

    lattice = {}
    bound = 0.0
    if twist is not None:
        a, b = float(twist[0]), float(twist[1])
        bound = growth_bound(a, b)
        for n in levels:
            lattice[n] = coprime_count(a, b, n)
        for n in levels:
            if counts[n] < lattice[n]:
                diagnostics[f"deficit_at_{n}"] = lattice[n] - counts[n]

    orbit_index = [
        {"id": o["id"], "minimal_period": o["minimal_period"],
         "base": [float(o["points"][0][0]), float(o["points"][0][1])]}
        for o in known_orbits
    ]
    return CensusReport(n_max=n_max, counts=counts, lattice=lattice,
                        bound_constant=bound, flagged_circles=flagged,
                        orbit_index=orbit_index, diagnostics=diagnostics)
