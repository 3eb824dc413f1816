"""Periodic point search and topological invariants of the found orbits.

Fixed points of the n-th iterate are located by damped Newton iteration on
F(p) = psi^n(p) - p from a polar seed grid, deduplicated, grouped into
map-orbits by minimal period, and classified by the monodromy D psi^n.
Degenerate solutions clustering on a common radius are reported as invariant
circles rather than as isolated orbits, which is what integrable families
genuinely produce.

Indices and linking numbers are winding counts along the suspension:
the index comes from the winding interval of the linearized path, the
linking number from the winding of the difference of two trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diskmaps, suspension
from .diskmaps import advance, advance_jac, solve_2x2
from .errors import (DegenerateOrbitError, OrbitCollisionError, ResolutionError,
                     SymdynError)

DEGENERATE_TRACE_TOL = 1e-8
RESIDUAL_TOL = 1e-12
DEDUP_TOL = 1e-6
CIRCLE_MIN_POINTS = 16
# Degenerate families of a perturbed map are wavy circles: their radius
# varies with angle on the order of the perturbation size, so membership is
# decided by gap-connectivity in radius, not by a fixed total spread.
CIRCLE_GAP_TOL = 1e-3

ELLIPTIC = "elliptic"
H_POSITIVE = "hyperbolic_positive"
H_NEGATIVE = "hyperbolic_negative"
DEGENERATE = "degenerate"

_IDENT = np.eye(2)


def stability_from_monodromy(m, tol: float = DEGENERATE_TRACE_TOL) -> str:
    tr = float(m[0, 0] + m[1, 1])
    if abs(abs(tr) - 2.0) < tol:
        return DEGENERATE
    if abs(tr) < 2.0:
        return ELLIPTIC
    return H_POSITIVE if tr > 2.0 else H_NEGATIVE


def stability_of_power(m, k: int, tol: float = DEGENERATE_TRACE_TOL) -> str:
    """Stability class of m^k without forming the (possibly huge) power.

    An elliptic matrix conjugate to rotation by angle theta has k-th power
    trace 2*cos(k*theta), which can land on +-2: such powers are degenerate
    even though the base is elliptic.
    """
    st = stability_from_monodromy(m, tol)
    if st in (DEGENERATE, H_POSITIVE):
        return st
    if st == H_NEGATIVE:
        return H_NEGATIVE if k % 2 else H_POSITIVE
    theta = math.acos(min(1.0, max(-1.0, float(m[0, 0] + m[1, 1]) / 2.0)))
    tr_k = 2.0 * math.cos(k * theta)
    if abs(abs(tr_k) - 2.0) < tol:
        return DEGENERATE
    return ELLIPTIC


@dataclass
class PeriodicOrbitRecord:
    """One orbit of the disk map, recorded at a fixed point of psi^n."""

    base: np.ndarray
    minimal_period: int
    ambient_period: int
    monodromy: np.ndarray
    stability: str
    cz_index: int | None
    action: float
    residual: float
    boundary: bool = False
    id: str = ""
    orbit_points: list = field(default_factory=list)

    @property
    def radius(self) -> float:
        return float(np.hypot(self.base[0], self.base[1]))

    def to_json(self):
        return {
            "id": self.id,
            "base": [float(self.base[0]), float(self.base[1])],
            "minimal_period": self.minimal_period,
            "stability": self.stability,
            "cz": "degenerate" if self.cz_index is None else self.cz_index,
            "action": self.action,
            "residual": self.residual,
            "boundary": self.boundary,
        }


@dataclass
class FixedCircle:
    """A radius of non-isolated fixed points of psi^n (degenerate family)."""

    radius: float
    rotation_integer: int
    ambient_period: int
    sample_point: np.ndarray
    member_count: int
    boundary: bool = False
    id: str = ""

    def to_json(self):
        return {
            "id": self.id,
            "radius": self.radius,
            "k": self.rotation_integer,
            "members": self.member_count,
            "boundary": self.boundary,
        }


# -- linearized path and Conley-Zehnder index ---------------------------------


def _phi_track(iso, base, periods: int, dt: float):
    """Samples of D psi_t(base) for t in [0, periods]."""
    _, _, jacs = diskmaps.flow_track(iso, np.asarray(base, float)[None, :],
                                     periods, dt=dt, jac=True)
    return jacs[:, 0]


def _direction_windings(phis, monodromy, k: int, vecs):
    """Winding in turns of t -> Phi_t v over k chained periods.

    phis holds one period of the linearized path; later periods reuse it via
    Phi_{t+jn} = Phi_t M^j, with the direction renormalized each period so
    hyperbolic growth cannot overflow.
    """
    total = np.zeros(vecs.shape[1])
    v = vecs.copy()
    for _ in range(k):
        w = np.einsum("tij,jd->dti", phis, v)
        steps = suspension.angle_increments(w)
        worst = float(np.max(np.abs(steps)))
        if worst > 0.5 * np.pi:
            raise ResolutionError(
                f"linearized path step {worst:.3g} rad too coarse")
        total += np.sum(steps, axis=-1)
        v = monodromy @ v
        v = v / np.linalg.norm(v, axis=0, keepdims=True)
    return total / (2.0 * np.pi)


def _real_eigvecs(m):
    tr = float(m[0, 0] + m[1, 1])
    disc = tr * tr - 4.0 * float(np.linalg.det(m))
    if disc <= 0:
        return None
    root = math.sqrt(disc)
    vecs = []
    for lam in ((tr + root) / 2.0, (tr - root) / 2.0):
        cand1 = np.array([m[0, 1], lam - m[0, 0]])
        cand2 = np.array([lam - m[1, 1], m[1, 0]])
        v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
        nv = np.linalg.norm(v)
        if nv > 1e-14:
            vecs.append(v / nv)
    return np.stack(vecs, axis=-1) if vecs else None


def winding_interval(torus: suspension.MappingTorus, base, ambient_period: int,
                     k: int = 1, directions: int = 64, dt: float = 1e-2):
    """Min/max winding of the linearized path over the direction circle.

    Also returns the one-period monodromy.  The interval of a closed
    symplectic path is shorter than half a turn; anything wider means the
    sampling lost track of an angle and is reported as a hard failure.
    """
    for attempt in range(4):
        phis = _phi_track(torus.iso, base, ambient_period, dt)
        monodromy = phis[-1]
        angles = np.pi * np.arange(directions) / directions
        vecs = np.stack([np.cos(angles), np.sin(angles)], axis=0)
        eig = _real_eigvecs(monodromy)
        if eig is not None:
            vecs = np.concatenate([vecs, eig], axis=1)
        try:
            deltas = _direction_windings(phis, monodromy, k, vecs)
        except ResolutionError:
            if attempt == 3:
                raise
            dt *= 0.5
            continue
        break
    lo, hi = float(np.min(deltas)), float(np.max(deltas))
    if hi - lo > 0.5 + 1e-6:
        raise SymdynError(
            f"winding interval [{lo}, {hi}] wider than 1/2: sampling bug")
    return lo, hi, monodromy


def conley_zehnder(torus: suspension.MappingTorus, record: PeriodicOrbitRecord,
                   k: int = 1, directions: int = 64, dt: float = 1e-2) -> int:
    """Index of the k-fold cover of the orbit in the product trivialization.

    The winding interval decides: an interval containing an integer m gives
    the even index 2m (positively hyperbolic), otherwise the index is odd,
    two times the common floor plus one.  The parity must match the
    stability class of the k-th power of the monodromy.
    """
    st_k = stability_of_power(record.monodromy, k)
    if st_k == DEGENERATE:
        raise DegenerateOrbitError("index undefined for degenerate monodromy")
    lo, hi, _ = winding_interval(torus, record.base, record.ambient_period,
                                 k=k, directions=directions, dt=dt)
    candidates = [m for m in range(math.floor(lo - 1e-9), math.ceil(hi + 1e-9) + 1)
                  if lo - 1e-9 <= m <= hi + 1e-9]
    if st_k == H_POSITIVE:
        if len(candidates) != 1:
            raise SymdynError(
                f"positive hyperbolic path must wind an integer; interval [{lo},{hi}]")
        return 2 * candidates[0]
    mid = 0.5 * (lo + hi)
    if candidates and min(abs(mid - m) for m in candidates) > 1e-6:
        raise SymdynError(
            f"odd-parity path has integer strictly inside winding interval [{lo},{hi}]")
    return 2 * math.floor(mid) + 1


# -- linking numbers -----------------------------------------------------------


def _representative(obj):
    if isinstance(obj, PeriodicOrbitRecord):
        return np.asarray(obj.base, float), obj.ambient_period
    if isinstance(obj, FixedCircle):
        return np.asarray(obj.sample_point, float), obj.ambient_period
    return np.asarray(obj, float), None


def linking_number(torus: suspension.MappingTorus, a, b, k: int = 1,
                   dt: float = 1e-2) -> int:
    """Winding of the difference of two suspension trajectories over [0, k*n].

    Both arguments must be fixed points of the same iterate and lie on
    disjoint orbits; the difference vector is tracked with the same
    refinement guard as any other winding count.
    """
    pa, na = _representative(a)
    pb, nb = _representative(b)
    n = na or nb or torus.n
    if na is not None and nb is not None and na != nb:
        raise ValueError(f"ambient periods differ: {na} vs {nb}")
    for attempt in range(5):
        _, states = diskmaps.flow_track(torus.iso, np.stack([pa, pb]), k * n, dt=dt)
        diff = states[:, 0, :] - states[:, 1, :]
        sep = float(np.min(np.hypot(diff[:, 0], diff[:, 1])))
        if sep <= 1e-8:
            raise OrbitCollisionError(
                f"suspension loops approach within {sep:.3g}; same orbit or grid too coarse")
        try:
            turns, worst = suspension.winding_of_samples(diff, "orbit difference")
        except ResolutionError:
            if attempt == 4:
                raise
            dt *= 0.5
            continue
        if worst > 0.5 * np.pi:
            dt *= 0.5
            continue
        break
    nearest = round(turns)
    if abs(turns - nearest) > 1e-6:
        raise ResolutionError(f"linking winding {turns!r} far from integer")
    return int(nearest)


def trajectory_winding(torus: suspension.MappingTorus, point, ambient_period: int,
                       dt: float = 1e-2) -> int:
    """Turns of a single trajectory around the origin over [0, n]."""
    _, states = diskmaps.flow_track(torus.iso, np.asarray(point, float)[None, :],
                                    ambient_period, dt=dt)
    turns, _ = suspension.winding_of_samples(states[:, 0, :], "trajectory")
    nearest = round(turns)
    if abs(turns - nearest) > 1e-4:
        raise ResolutionError(f"trajectory winding {turns!r} far from integer")
    return int(nearest)


# -- Newton search -------------------------------------------------------------


def _solve_step(jac_f, f_vals):
    """Newton step solving (Dpsi^n - I) s = -F, ridged when near singular."""
    det = jac_f[:, 0, 0] * jac_f[:, 1, 1] - jac_f[:, 0, 1] * jac_f[:, 1, 0]
    frob = np.einsum("nij,nij->n", jac_f, jac_f)
    ill = np.abs(det) < 1e-12 * np.maximum(1.0, frob)
    step = np.empty_like(f_vals)
    if np.any(~ill):
        step[~ill] = solve_2x2(jac_f[~ill], -f_vals[~ill])
    if np.any(ill):
        jt = np.swapaxes(jac_f[ill], -1, -2)
        jtj = np.einsum("nij,njk->nik", jt, jac_f[ill])
        mu = 1e-10 * (frob[ill] + 1.0)
        jtj[:, 0, 0] += mu
        jtj[:, 1, 1] += mu
        rhs = -np.einsum("nij,nj->ni", jt, f_vals[ill])
        step[ill] = solve_2x2(jtj, rhs)
    return step


def _newton_batch(iso, n, seeds, iters, tol, escape_radius=1.3, max_halvings=8,
                  stall_window=8):
    """Damped Newton on F(p) = psi^n(p) - p over a whole seed batch at once.

    Seeds drop out when they converge, leave the working annulus, or stop
    making progress for `stall_window` rounds (the generic fate in twist
    regions with no nearby fixed point).  The residual of the accepted
    damped trial is carried into the next round, so each round costs one
    variational evaluation plus the line-search evaluations.
    """
    cur = np.array(seeds, dtype=float)
    f_vals = advance(iso, cur, n) - cur
    res = np.linalg.norm(f_vals, axis=-1)
    best = res.copy()
    stall = np.zeros(len(cur), dtype=int)
    converged = []
    diverged = 0
    stalled = 0
    for _ in range(iters):
        done = res <= tol
        if np.any(done):
            converged.append(cur[done])
        give_up = stall >= stall_window
        stalled += int(np.sum(give_up & ~done))
        keep = ~done & ~give_up
        if not np.any(keep):
            cur = cur[:0]
            break
        cur, f_vals, res = cur[keep], f_vals[keep], res[keep]
        best, stall = best[keep], stall[keep]

        _, jacs = advance_jac(iso, cur, n)
        step = _solve_step(jacs - _IDENT, f_vals)
        step[~np.isfinite(step)] = 0.0
        accepted = np.zeros(len(cur), dtype=bool)
        trial = cur + step
        for _ in range(max_halvings + 1):
            need = ~accepted
            if not np.any(need):
                break
            res_t = np.full(int(np.sum(need)), np.inf)
            f_t = np.zeros((int(np.sum(need)), 2))
            safe = np.linalg.norm(trial[need], axis=-1) <= escape_radius
            if np.any(safe):
                sub = trial[need][safe]
                f_sub = advance(iso, sub, n) - sub
                f_t[safe] = f_sub
                res_t[safe] = np.linalg.norm(f_sub, axis=-1)
            ok = (res_t < res[need]) | (res_t <= tol)
            need_idx = np.nonzero(need)[0]
            good = need_idx[ok]
            accepted[good] = True
            cur[good] = trial[good]
            f_vals[good] = f_t[ok]
            res[good] = res_t[ok]
            bad = need_idx[~ok]
            step[bad] *= 0.5
            trial[bad] = cur[bad] + step[bad]
        progressed = res < 0.9 * best
        stall = np.where(progressed, 0, stall + 1)
        best = np.minimum(best, res)
        radii = np.linalg.norm(cur, axis=-1)
        esc = (radii > escape_radius) | ~np.isfinite(radii)
        if np.any(esc):
            diverged += int(np.sum(esc))
            keep = ~esc
            cur, f_vals, res = cur[keep], f_vals[keep], res[keep]
            best, stall = best[keep], stall[keep]
    if len(cur):
        final_done = res <= tol
        if np.any(final_done):
            converged.append(cur[final_done])
        stalled += int(np.sum(~final_done))
    if converged:
        out = np.concatenate(converged, axis=0)
    else:
        out = np.empty((0, 2))
    return out, {"diverged": diverged, "stalled": stalled}


def _polish(iso, n, pts, tol, rounds=6):
    """Drive converged points toward the machine floor of the residual.

    Newton halts on a residual threshold, which near degenerate circles and
    weakly split chains leaves a plateau of near-solutions; a few undamped
    extra steps collapse the plateau so deduplication sees tight clusters.
    """
    if not len(pts):
        return pts
    cur = np.array(pts, dtype=float)
    f_vals = advance(iso, cur, n) - cur
    res = np.linalg.norm(f_vals, axis=-1)
    for _ in range(rounds):
        _, jacs = advance_jac(iso, cur, n)
        step = _solve_step(jacs - _IDENT, f_vals)
        step[~np.isfinite(step)] = 0.0
        trial = cur + step
        wild = np.linalg.norm(trial, axis=-1) > 1.3
        trial[wild] = cur[wild]
        f_t = advance(iso, trial, n) - trial
        res_t = np.linalg.norm(f_t, axis=-1)
        better = res_t < res
        if not np.any(better):
            break
        cur[better] = trial[better]
        f_vals[better] = f_t[better]
        res[better] = res_t[better]
    return cur[res <= tol]


def _dedup(pts, tol):
    """Greedy deduplication in a deterministic (radius, angle) order."""
    if not len(pts):
        return pts
    radii = np.linalg.norm(pts, axis=-1)
    angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * np.pi)
    order = np.lexsort((angles, radii))
    accepted = []
    acc_arr = np.empty((0, 2))
    for i in order:
        if len(accepted):
            d = np.min(np.linalg.norm(acc_arr - pts[i], axis=-1))
            if d < tol:
                continue
        accepted.append(i)
        acc_arr = pts[np.array(accepted)]
    return pts[np.array(accepted)]


def _seed_profile(iso):
    """Best-effort radial profile for seeding: radial parts of the family."""
    p = iso.radial_profile()
    if p is not None:
        return p
    if isinstance(iso, diskmaps.Composition):
        combined = None
        for factor in iso.factors:
            fp = _seed_profile(factor)
            if fp is not None:
                combined = fp if combined is None else combined.added(fp)
        return combined
    if isinstance(iso, diskmaps.Iterate):
        fp = _seed_profile(iso.base)
        return None if fp is None else fp.scaled(iso.count)
    return None


def _resonance_radii(profile, n):
    """Radii where n * rho(r) is an integer: candidate fixed circles of psi^n."""
    us = np.linspace(0.0, 1.0, 513)
    vals = n * profile.value_u(us)
    radii = []
    for m in range(int(math.floor(vals.min())) , int(math.ceil(vals.max())) + 1):
        for u in profile.solve_value(m / n):
            if 1e-10 < u <= 1.0 - 1e-10:
                radii.append(math.sqrt(u))
    return sorted(radii)


@dataclass
class OrbitDatabase:
    """Search output for one iterate: isolated orbits, circles, diagnostics."""

    n: int
    records: list
    circles: list
    boundary_records: list
    diagnostics: dict
    torus: suspension.MappingTorus | None = None
    _lk_cache: dict = field(default_factory=dict)

    def all_isolated(self):
        return list(self.records)

    def find(self, ref: str):
        for rec in self.records + self.boundary_records:
            if rec.id == ref:
                return rec
        for circ in self.circles:
            if circ.id == ref:
                return circ
        raise KeyError(f"no orbit or circle with id {ref!r}")

    def linking(self, ref_a: str, ref_b: str) -> int:
        key = (ref_a, ref_b) if ref_a <= ref_b else (ref_b, ref_a)
        if key in self._lk_cache:
            return self._lk_cache[key]
        if self.torus is None:
            raise SymdynError(
                f"linking {ref_a},{ref_b} not stored and no flow available")
        value = linking_number(self.torus, self.find(ref_a), self.find(ref_b))
        self._lk_cache[key] = value
        return value

    def linking_table(self):
        ids = [r.id for r in self.records] + [c.id for c in self.circles]
        table = []
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                table.append([a, b, self.linking(a, b)])
        return table

    def to_json(self, include_linking: bool = False):
        obj = {
            "n": self.n,
            "records": [r.to_json() for r in self.records],
            "circles": [c.to_json() for c in self.circles],
            "boundary_records": [r.to_json() for r in self.boundary_records],
            "diagnostics": self.diagnostics,
        }
        if include_linking:
            obj["linking"] = self.linking_table()
        return obj

    @classmethod
    def from_json(cls, obj):
        def rec_from(r):
            cz = r.get("cz")
            return PeriodicOrbitRecord(
                base=np.asarray(r["base"], float),
                minimal_period=int(r["minimal_period"]),
                ambient_period=int(obj["n"]),
                monodromy=np.full((2, 2), np.nan),
                stability=r["stability"],
                cz_index=None if cz in (None, "degenerate") else int(cz),
                action=float(r.get("action", math.nan)),
                residual=float(r.get("residual", math.nan)),
                boundary=bool(r.get("boundary", False)),
                id=r["id"],
            )

        db = cls(
            n=int(obj["n"]),
            records=[rec_from(r) for r in obj.get("records", [])],
            circles=[FixedCircle(radius=float(c["radius"]),
                                 rotation_integer=int(c["k"]),
                                 ambient_period=int(obj["n"]),
                                 sample_point=np.array([float(c["radius"]), 0.0]),
                                 member_count=int(c.get("members", 0)),
                                 boundary=bool(c.get("boundary", False)),
                                 id=c["id"])
                     for c in obj.get("circles", [])],
            boundary_records=[rec_from(r) for r in obj.get("boundary_records", [])],
            diagnostics=dict(obj.get("diagnostics", {})),
        )
        for a, b, v in obj.get("linking", []):
            key = (a, b) if a <= b else (b, a)
            db._lk_cache[key] = int(v)
        return db


def find_periodic_points(torus: suspension.MappingTorus, n: int | None = None,
                         grid: tuple = (48, 96), newton_iters: int = 60,
                         residual_tol: float = RESIDUAL_TOL,
                         dedup_tol: float = DEDUP_TOL,
                         circle_min_points: int = CIRCLE_MIN_POINTS,
                         circle_gap_tol: float = CIRCLE_GAP_TOL,
                         boundary_seeds: int = 32,
                         resonance_seeds: bool = True,
                         with_actions: bool = True,
                         dt: float = 1e-2) -> OrbitDatabase:
    """Locate and classify the fixed points of psi^n.

    Returns isolated interior orbits (one record per map-orbit, minimal
    period attributed by divisors of n), fixed circles detected as clusters
    of degenerate solutions on a common radius, and boundary fixed points
    reported separately.
    """
    iso = torus.iso
    if n is None:
        n = torus.n
    if grid[0] < 4 or grid[1] < 4:
        raise ValueError("grid counts must be at least 4")
    seeds = [diskmaps.polar_grid(grid[0], grid[1]), np.zeros((1, 2))]
    bturns = iso.boundary_turns()
    boundary_fixed = bturns is not None and abs(n * bturns - round(n * bturns)) < 1e-9
    if boundary_fixed or bturns is None:
        ang = 2.0 * np.pi * np.arange(boundary_seeds) / boundary_seeds
        seeds.append(np.stack([np.cos(ang), np.sin(ang)], axis=-1))
    if resonance_seeds:
        profile = _seed_profile(iso)
        if profile is not None:
            for r in _resonance_radii(profile, n):
                if r < 1.0 - 1e-9:
                    ang = 2.0 * np.pi * np.arange(48) / 48
                    seeds.append(np.stack([r * np.cos(ang), r * np.sin(ang)], axis=-1))
    seeds = np.concatenate(seeds, axis=0)

    raw, diag = _newton_batch(iso, n, seeds, newton_iters, residual_tol)
    diag["seeds"] = int(len(seeds))
    pts = _polish(iso, n, raw, residual_tol)
    inside = np.linalg.norm(pts, axis=-1) <= 1.0 + 1e-9
    diag["outside_disk"] = int(np.sum(~inside))
    pts = _dedup(pts[inside], dedup_tol)
    diag["distinct_solutions"] = int(len(pts))
    if not len(pts):
        return OrbitDatabase(n, [], [], [], diag, torus=torus)

    final = advance(iso, pts, n)
    residuals = np.linalg.norm(final - pts, axis=-1)
    _, monodromies = advance_jac(iso, pts, n)
    stabilities = [stability_from_monodromy(m) for m in monodromies]
    radii = np.linalg.norm(pts, axis=-1)

    # cluster degenerate solutions on a common (possibly wavy) radius
    degenerate_idx = [i for i, s in enumerate(stabilities) if s == DEGENERATE]
    circle_members: list[list[int]] = []
    if degenerate_idx:
        deg = sorted(degenerate_idx, key=lambda i: radii[i])
        cluster = [deg[0]]
        for i in deg[1:]:
            if radii[i] - radii[cluster[-1]] <= circle_gap_tol:
                cluster.append(i)
            else:
                circle_members.append(cluster)
                cluster = [i]
        circle_members.append(cluster)
    in_circle = set()
    circles = []
    for cluster in circle_members:
        if len(cluster) >= circle_min_points:
            in_circle.update(cluster)
            rad = float(np.mean(radii[cluster]))
            sample = pts[cluster[0]]
            rot = trajectory_winding(torus, sample, n, dt=dt) if rad > 1e-8 else 0
            circles.append(FixedCircle(
                radius=rad, rotation_integer=rot, ambient_period=n,
                sample_point=np.array(sample), member_count=len(cluster),
                boundary=rad > 1.0 - 1e-7))

    iso_idx = [i for i in range(len(pts)) if i not in in_circle]

    # group isolated points into map-orbits
    records = []
    if iso_idx:
        sub = pts[iso_idx]
        images = [sub]
        cur = sub
        for _ in range(n - 1):
            cur = advance(iso, cur, 1)
            images.append(cur)
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        minimal = np.full(len(sub), n, dtype=int)
        for d in divisors[:-1]:
            gap = np.linalg.norm(images[d] - sub, axis=-1)
            minimal[(gap < 1e-8) & (minimal == n)] = d
        parent = list(range(len(sub)))

        def root(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        match_tol = max(dedup_tol, 1e-7)
        for i in range(len(sub)):
            for j in range(1, int(minimal[i])):
                dists = np.linalg.norm(sub - images[j][i], axis=-1)
                hit = int(np.argmin(dists))
                if dists[hit] < match_tol:
                    ri, rj = root(i), root(hit)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
        groups: dict[int, list[int]] = {}
        for i in range(len(sub)):
            groups.setdefault(root(i), []).append(i)

        for members in groups.values():
            angles = np.mod(np.arctan2(sub[members, 1], sub[members, 0]), 2 * np.pi)
            order = np.lexsort((angles, np.linalg.norm(sub[members], axis=-1)))
            chosen = members[int(order[0])]
            gi = iso_idx[chosen]
            rec = PeriodicOrbitRecord(
                base=pts[gi].copy(),
                minimal_period=int(minimal[chosen]),
                ambient_period=n,
                monodromy=monodromies[gi].copy(),
                stability=stabilities[gi],
                cz_index=None,
                action=math.nan,
                residual=float(residuals[gi]),
                boundary=bool(radii[gi] > 1.0 - 1e-7),
                orbit_points=[sub[m].copy() for m in members],
            )
            records.append(rec)

    interior = [r for r in records if not r.boundary]
    boundary_recs = [r for r in records if r.boundary]
    interior.sort(key=lambda r: (round(r.radius, 9), round(math.atan2(r.base[1], r.base[0]) % (2 * math.pi), 9)))
    boundary_recs.sort(key=lambda r: round(math.atan2(r.base[1], r.base[0]) % (2 * math.pi), 9))
    circles.sort(key=lambda c: c.radius)

    for i, rec in enumerate(interior):
        rec.id = f"p{i}"
    for i, rec in enumerate(boundary_recs):
        rec.id = f"b{i}"
    for i, circ in enumerate(circles):
        circ.id = f"c{i}"

    torus_n = torus_at(torus, n)
    for rec in interior + boundary_recs:
        if rec.stability != DEGENERATE:
            try:
                rec.cz_index = conley_zehnder(torus, rec, dt=dt)
            except DegenerateOrbitError:
                rec.cz_index = None
        if with_actions:
            try:
                loop = suspension.suspension_loop(torus_n, rec.base, dt=dt)
                rec.action = suspension.action(torus_n, loop)
            except SymdynError:
                rec.action = math.nan

    diag["isolated_orbits"] = len(interior)
    diag["circles"] = len(circles)
    return OrbitDatabase(n, interior, circles, boundary_recs, diag, torus=torus)


def torus_at(torus: suspension.MappingTorus, n: int) -> suspension.MappingTorus:
    """The same suspension flow presented at ambient period n."""
    if torus.n == n:
        return torus
    return suspension.MappingTorus(torus.iso, n, torus.action_constant)
