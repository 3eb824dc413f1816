"""Suspension bookkeeping: solid-torus lifts, winding sums, loop actions.

A `MappingTorus` pairs an isotopy with the number n of unit blocks glued
into the solid torus, so closed trajectories of the n-th iterate become
loops winding once around the longitude.  Winding counts, the canonical
boundary lift, and the loop action are all computed from sampled tracks of
the suspension flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import diskmaps
from .errors import OrbitCollisionError, ResolutionError

_COLLISION_TOL = 1e-10
_REFINE_ANGLE = 0.5 * np.pi


@dataclass(frozen=True)
class MappingTorus:
    """Length-n suspension of a disk isotopy with a recorded action offset.

    Only differences and orderings of actions are meaningful; the constant
    keeps every loop action positive so they can serve as leaf-area weights.
    """

    iso: diskmaps.DiskIsotopy
    n: int = 1
    action_constant: float = 10.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("torus length n must be >= 1")
        if self.action_constant <= 0:
            raise ValueError("action constant must be positive")
        bound = self.iso.max_abs_h()
        if bound is not None and self.action_constant <= 2.0 * bound + 1.0:
            raise ValueError(
                f"action constant {self.action_constant} too small for generating "
                f"function bound {bound:.3g}; need > {2.0 * bound + 1.0:.3g}")

    def lifted(self, k: int) -> "MappingTorus":
        """The k-fold cover: same flow, k*n unit blocks."""
        return MappingTorus(self.iso, self.n * k, self.action_constant)


@dataclass
class SuspensionLoop:
    """A closed trajectory of the suspension flow, sampled on a time grid."""

    period: int
    times: np.ndarray
    points: np.ndarray

    CLOSURE_TOL = 1e-8
    MAX_SPACING = 1e-2

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        gap = float(np.linalg.norm(self.points[0] - self.points[-1]))
        if gap > self.CLOSURE_TOL:
            raise ValueError(f"loop not closed: endpoint gap {gap:.3g}")
        spacing = float(np.max(np.diff(self.times)))
        if spacing > self.MAX_SPACING + 1e-12:
            raise ValueError(f"sample spacing {spacing:.3g} too coarse for winding")

    @property
    def base(self):
        return self.points[0]

    def to_json(self):
        samples = [[float(t), float(p[0]), float(p[1])]
                   for t, p in zip(self.times, self.points)]
        return {"period": self.period, "samples": samples}

    @classmethod
    def from_json(cls, obj):
        samples = np.asarray(obj["samples"], dtype=float)
        return cls(int(obj["period"]), samples[:, 0], samples[:, 1:3])


def suspension_loop(torus: MappingTorus, base, dt: float = 1e-2) -> SuspensionLoop:
    """Sample the trajectory of a fixed point of the n-th iterate."""
    times, states = diskmaps.flow_track(torus.iso, base, torus.n, dt=dt)
    return SuspensionLoop(torus.n, times, states[:, 0, :])


def angle_increments(vectors):
    """Signed angle steps between consecutive plane vectors, in (-pi, pi].

    The step axis is the second-to-last one, so both a single track (T, 2)
    and a bundle of tracks (N, T, 2) work.
    """
    x, y = vectors[..., 0], vectors[..., 1]
    cross = x[..., :-1] * y[..., 1:] - y[..., :-1] * x[..., 1:]
    dot = x[..., :-1] * x[..., 1:] + y[..., :-1] * y[..., 1:]
    return np.arctan2(cross, dot)


def winding_of_samples(vectors, what: str = "loop"):
    """Total turns of a sampled closed curve of nonzero plane vectors."""
    norms = np.hypot(vectors[..., 0], vectors[..., 1])
    low = float(np.min(norms))
    if low < _COLLISION_TOL:
        raise OrbitCollisionError(f"{what} passes within {low:.3g} of the origin")
    steps = angle_increments(vectors)
    worst = float(np.max(np.abs(steps))) if len(steps) else 0.0
    if worst > np.pi - 1e-9:
        raise ResolutionError(f"angular step {worst:.3g} rad too large along {what}")
    return float(np.sum(steps)) / (2.0 * np.pi), worst


def winding_number(loop_fn, t_range, samples: int | None = None, max_refine: int = 6) -> int:
    """Integer winding of a closed nonvanishing loop around the origin.

    Angle increments are summed on a uniform grid, refined (doubling the
    sample count) whenever a step exceeds pi/2, which guards the integer
    against aliasing.
    """
    t0, t1 = float(t_range[0]), float(t_range[1])
    if samples is None:
        samples = max(8, int(math.ceil((t1 - t0) / 1e-2)))
    for attempt in range(max_refine + 1):
        ts = np.linspace(t0, t1, samples + 1)
        vecs = np.asarray([loop_fn(t) for t in ts], dtype=float)
        gap = float(np.linalg.norm(vecs[0] - vecs[-1]))
        if gap > 1e-6 * max(1.0, float(np.max(np.abs(vecs)))):
            raise ValueError(f"loop_fn is not closed over {t_range}: gap {gap:.3g}")
        turns, worst = winding_of_samples(vecs)
        if worst <= _REFINE_ANGLE or attempt == max_refine:
            if worst > _REFINE_ANGLE:
                raise ResolutionError("winding did not stabilize under refinement")
            break
        samples *= 2
    nearest = round(turns)
    if abs(turns - nearest) > 1e-6:
        raise ResolutionError(f"winding sum {turns!r} is not close to an integer")
    return int(nearest)


def _loop_radius(loop: SuspensionLoop) -> float:
    norms = np.hypot(loop.points[:, 0], loop.points[:, 1])
    return float(np.mean(norms))


def action(torus: MappingTorus, orbit: SuspensionLoop) -> float:
    """Loop action: the recorded constant per block plus the loop integral.

    Purely radial families use the closed form c*n + n*pi*rho(r)*r^2; any
    family with a true generating-function factor is integrated as
    sum of swept areas minus the time integral of the generating function
    (trapezoid on the sample grid).
    """
    n = orbit.period
    c = torus.action_constant
    profile = torus.iso.radial_profile()
    if profile is not None:
        r = _loop_radius(orbit)
        return c * n + n * math.pi * float(profile(r)) * r * r
    pts = orbit.points
    swept = 0.5 * float(np.sum(pts[:-1, 0] * pts[1:, 1] - pts[:-1, 1] * pts[1:, 0]))
    dens = np.empty(len(pts))
    for i, t in enumerate(orbit.times):
        frac = t - math.floor(t + 1e-12)
        dens[i] = torus.iso.action_density(frac, pts[i:i + 1])[0]
    dts = np.diff(orbit.times)
    h_term = float(np.sum(0.5 * (dens[:-1] + dens[1:]) * dts))
    return c * n + swept - h_term


class BoundaryLift:
    """Canonical lift of the boundary circle map of the n-th iterate.

    Equivariance f(s + 1) = f(s) + 1 holds exactly by construction: the
    fractional part indexes the sampled lift and the integer part shifts.
    """

    def __init__(self, n: int, rigid_turns: float | None = None,
                 grid: np.ndarray | None = None, values: np.ndarray | None = None):
        self.n = n
        self.rigid_turns = rigid_turns
        self._grid = grid
        self._values = values
        self.exact = rigid_turns is not None

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.exact:
            out = s + self.rigid_turns
        else:
            whole = np.floor(s)
            frac = s - whole
            out = whole + np.interp(frac, self._grid, self._values)
        return float(out) if out.ndim == 0 else out


def boundary_lift(torus: MappingTorus, samples: int = 1024, dt: float = 1e-2) -> BoundaryLift:
    """Lift of the boundary restriction, tracked along the suspension flow."""
    turns = torus.iso.boundary_turns()
    if turns is not None:
        return BoundaryLift(torus.n, rigid_turns=torus.n * turns)
    s_grid = np.arange(samples) / samples
    ang = 2.0 * np.pi * s_grid
    bpts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    _, states = diskmaps.flow_track(torus.iso, bpts, torus.n, dt=dt)
    steps = angle_increments(np.swapaxes(states, 0, 1))
    worst = float(np.max(np.abs(steps)))
    if worst > np.pi - 1e-9:
        raise ResolutionError(
            f"boundary tracking step {worst:.3g} rad exceeds pi; reduce dt")
    values = s_grid + np.sum(steps, axis=-1) / (2.0 * np.pi)
    grid = np.concatenate([s_grid, [1.0]])
    values = np.concatenate([values, [values[0] + 1.0]])
    return BoundaryLift(torus.n, grid=grid, values=values)
