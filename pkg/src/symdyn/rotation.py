"""Real-valued rotation numbers, in turns, and the derived twist intervals.

Two rates are attached to the suspension of an iterate: how fast boundary
points go around (via the canonical lift of the boundary circle map) and how
fast tangent directions turn at an interior fixed point (via the winding of
the linearized path).  The open interval between them is the twist interval;
each integer strictly inside it forces extra orbits, which is what the
verification harness checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import orbits, suspension
from .errors import EstimatorMismatchError


@dataclass(frozen=True)
class TwistInterval:
    """Open interval between the two rotation numbers; may be empty."""

    lo: float
    hi: float

    @property
    def empty(self) -> bool:
        return not (self.lo < self.hi)

    def contains(self, x: float, margin: float = 1e-9) -> bool:
        return self.lo + margin < x < self.hi - margin

    def to_json(self):
        return [self.lo, self.hi]


def integers_in(tw: TwistInterval, margin: float = 1e-9) -> list[int]:
    """All integers strictly inside the open interval."""
    if tw.empty:
        return []
    first = math.floor(tw.lo) + 1
    out = []
    m = first
    while m < tw.hi:
        if tw.contains(m, margin):
            out.append(m)
        m += 1
    return out


def boundary_rotation(torus: suspension.MappingTorus, n: int | None = None,
                      max_iters: int = 10_000, tol: float = 1e-9) -> float:
    """Total boundary rotation of the n-th iterate, in turns.

    Families whose boundary restriction is a rigid rotation give the exact
    value n * turns; otherwise the canonical lift is iterated and the
    translation-number estimates are compared at doubling iteration counts
    until two agree within tolerance.
    """
    if n is None:
        n = torus.n
    turns = torus.iso.boundary_turns()
    if turns is not None:
        return n * turns
    lift = suspension.boundary_lift(orbits.torus_at(torus, n))
    # a lift with f(s) = s + k somewhere has rotation number exactly k
    grid = np.linspace(0.0, 1.0, 257)
    disp = lift(grid) - grid
    lo, hi = float(np.min(disp)), float(np.max(disp))
    for k in range(math.floor(lo), math.ceil(hi) + 1):
        if lo <= k <= hi:
            return float(k)
    s = 0.17  # arbitrary base point; the limit does not depend on it
    value = lift(s)
    m = 1
    prev = value - s
    est = prev
    while m < max_iters:
        target = min(2 * m, max_iters)
        while m < target:
            value = lift(value)
            m += 1
        est = (value - s) / m
        if abs(est - prev) < tol:
            return est
        prev = est
    warnings.warn(f"boundary rotation estimate at low precision: bracket "
                  f"({min(prev, est)}, {max(prev, est)})", stacklevel=2)
    return est


def infinitesimal_rotation(torus: suspension.MappingTorus,
                           record: orbits.PeriodicOrbitRecord,
                           chain_periods: int = 200,
                           dt: float = 1e-2) -> float:
    """Turn rate of tangent directions along the orbit, per ambient period.

    Hyperbolic fixed points give exact integer (positive) or half-integer
    (negative) values read off an eigendirection.  Elliptic and degenerate
    ones use the mean winding over `chain_periods` chained periods; for
    non-degenerate records this is cross-checked against the index of the
    chained cover, and a disagreement beyond 1/chain_periods is treated as
    an internal bug, not a tolerance issue.
    """
    if record.boundary:
        raise ValueError("infinitesimal rotation is defined at interior fixed points")
    n = record.ambient_period
    st = record.stability
    if st in (orbits.H_POSITIVE, orbits.H_NEGATIVE):
        lo, hi, _ = orbits.winding_interval(torus, record.base, n, k=1, dt=dt)
        # the eigendirection winding is the unique half-integer in the interval
        value = round(lo + hi) / 2.0
        if not lo - 1e-6 <= value <= hi + 1e-6:
            raise EstimatorMismatchError(
                f"no half-integer winding inside [{lo}, {hi}] for {st} orbit")
        parity_ok = (abs(value - round(value)) < 1e-9) == (st == orbits.H_POSITIVE)
        if not parity_ok:
            raise EstimatorMismatchError(
                f"eigendirection winding {value} inconsistent with {st}")
        estimate = float(value)
    else:
        k = chain_periods
        lo, hi, _ = orbits.winding_interval(torus, record.base, n, k=k,
                                            directions=16, dt=dt)
        estimate = 0.5 * (lo + hi) / k
    if st != orbits.DEGENERATE:
        # the chained cover itself can be degenerate (k * theta on a half
        # turn); cross-check against the nearest non-degenerate cover
        for k_check in (chain_periods, chain_periods + 1, chain_periods + 3):
            if orbits.stability_of_power(record.monodromy, k_check) != orbits.DEGENERATE:
                mu = orbits.conley_zehnder(torus, record, k=k_check, dt=dt)
                quotient = 0.5 * mu / k_check
                if abs(estimate - quotient) > 1.0 / k_check + 1e-6:
                    raise EstimatorMismatchError(
                        f"winding estimate {estimate} vs index quotient {quotient} "
                        f"differ beyond 1/{k_check}")
                break
    return estimate


def twist_interval(torus: suspension.MappingTorus,
                   record: orbits.PeriodicOrbitRecord,
                   boundary: float | None = None,
                   dt: float = 1e-2) -> TwistInterval:
    """Open interval between the orbit and boundary rotation numbers."""
    rot_p = infinitesimal_rotation(torus, record, dt=dt)
    rot_b = boundary_rotation(torus, record.ambient_period) if boundary is None else boundary
    return TwistInterval(min(rot_p, rot_b), max(rot_p, rot_b))


@dataclass
class RotationData:
    """Boundary and per-orbit rotation numbers for one iterate."""

    n: int
    boundary_rot: float
    orbit_rot: dict
    twists: dict

    def twist(self, ref: str) -> TwistInterval:
        return self.twists[ref]

    def to_json(self):
        return {
            "n": self.n,
            "boundary_rot": self.boundary_rot,
            "orbits": [
                {
                    "id": ref,
                    "rot": self.orbit_rot[ref],
                    "twist": self.twists[ref].to_json(),
                    "integers": integers_in(self.twists[ref]),
                }
                for ref in sorted(self.orbit_rot)
            ],
        }


def rotation_data(torus: suspension.MappingTorus, db: orbits.OrbitDatabase,
                  chain_periods: int = 200, dt: float = 1e-2) -> RotationData:
    """Rotation numbers for every interior record of a search result."""
    rot_b = boundary_rotation(torus, db.n)
    orbit_rot: dict = {}
    twists: dict = {}
    for rec in db.records:
        rot_p = infinitesimal_rotation(torus, rec, chain_periods=chain_periods, dt=dt)
        orbit_rot[rec.id] = rot_p
        twists[rec.id] = TwistInterval(min(rot_p, rot_b), max(rot_p, rot_b))
    for circ in db.circles:
        rot_c = float(circ.rotation_integer)
        orbit_rot[circ.id] = rot_c
        twists[circ.id] = TwistInterval(min(rot_c, rot_b), max(rot_c, rot_b))
    return RotationData(db.n, rot_b, orbit_rot, twists)


def approximant_rotations(alpha: float, n_max: int) -> list[tuple[int, float]]:
    """Boundary rotation numbers floor(n*alpha)/n of the periodic approximants."""
    return [(n, math.floor(n * alpha) / n) for n in range(1, n_max + 1)]
