"""Area-preserving disk map families given as isotopies from the identity.

Every family realizes a path of disk diffeomorphisms psi_t, t in [0, 1],
with psi_0 = id, psi_t preserving the closed unit disk and its boundary, and
psi_1 area-preserving.  All downstream quantities (winding, linking,
rotation numbers, indices, actions) are defined through the path, not just
the endpoint map, so the isotopy is the primitive object here.

Times beyond [0, 1] follow the convention psi_{t+1} = psi_t o psi_1, which
is what `flow_track` implements when asked for several periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .errors import ActionUndefinedError, ConvergenceError, EscapeError, MapSpecError
from .expressions import ScalarField

# Disk membership allows 1e-9 of slack: closed-form families stay on the
# circle to machine precision, but a long numerical flow accumulates inner
# solver noise of about tolerance-per-step times step count.
_ESCAPE_TOL = 1e-9
_IDENT = np.eye(2)


def rotation_matrix(theta):
    """Rotation matrices for an array of angles, shape (..., 2, 2)."""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(theta.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def polar_grid(radial_count: int, angular_count: int, r_max: float = 1.0):
    """Interior sample points on concentric rings, shape (nr*na, 2)."""
    radii = (np.arange(radial_count) + 0.5) / radial_count * r_max
    angles = 2.0 * np.pi * np.arange(angular_count) / angular_count
    r, a = np.meshgrid(radii, angles, indexing="ij")
    pts = np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    return pts.reshape(-1, 2)


def _as_points(p):
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def check_in_disk(pts, slack: float = _ESCAPE_TOL, what: str = "point"):
    r = np.hypot(pts[..., 0], pts[..., 1])
    worst = float(np.max(r)) if r.size else 0.0
    if worst > 1.0 + slack:
        raise EscapeError(f"{what} outside the closed unit disk (|p| = {worst:.6g})")


def solve_2x2(a, b):
    """Solve a @ x = b for stacked 2x2 systems via the adjugate."""
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    x0 = (a[..., 1, 1] * b[..., 0] - a[..., 0, 1] * b[..., 1]) / det
    x1 = (a[..., 0, 0] * b[..., 1] - a[..., 1, 0] * b[..., 0]) / det
    return np.stack([x0, x1], axis=-1)


@dataclass(frozen=True)
class RadialProfile:
    """Rotation speed in turns as a polynomial in r^2.

    Storing the profile in the variable u = r^2 keeps the induced twist map
    smooth at the origin.
    """

    coeffs: tuple

    @classmethod
    def from_coeffs(cls, seq):
        return cls(tuple(float(c) for c in seq))

    def value_u(self, u):
        return npoly.polyval(np.asarray(u, dtype=float), self.coeffs)

    def deriv_u(self, u):
        return npoly.polyval(np.asarray(u, dtype=float), npoly.polyder(self.coeffs))

    def integral_u(self, u):
        return npoly.polyval(np.asarray(u, dtype=float), npoly.polyint(self.coeffs))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.value_u(r * r)

    def scaled(self, factor: float) -> "RadialProfile":
        return RadialProfile(tuple(factor * c for c in self.coeffs))

    def added(self, other: "RadialProfile") -> "RadialProfile":
        return RadialProfile(tuple(npoly.polyadd(self.coeffs, other.coeffs)))

    def solve_value(self, target: float):
        """All u in [0, 1] with profile(u) = target, via monotone pieces."""
        knots = [0.0, 1.0]
        dcoeffs = npoly.polyder(self.coeffs)
        if len(dcoeffs) > 1 or abs(dcoeffs[0]) > 0:
            for root in npoly.polyroots(dcoeffs):
                if abs(root.imag) < 1e-12 and 1e-12 < root.real < 1.0 - 1e-12:
                    knots.append(float(root.real))
        knots = sorted(set(knots))
        roots = []
        for lo, hi in zip(knots[:-1], knots[1:]):
            flo = float(self.value_u(lo)) - target
            fhi = float(self.value_u(hi)) - target
            if abs(flo) < 1e-14:
                roots.append(lo)
            if flo * fhi < 0.0:
                roots.append(brentq(lambda u: float(self.value_u(u)) - target, lo, hi,
                                    xtol=1e-15, rtol=8.9e-16))
        fend = float(self.value_u(knots[-1])) - target
        if abs(fend) < 1e-14:
            roots.append(knots[-1])
        out = []
        for u in sorted(roots):
            if not out or u - out[-1] > 1e-10:
                out.append(float(u))
        return out


class DiskIsotopy:
    """Base class for disk map isotopies.

    Instances are immutable after construction and the evaluation methods are
    pure, so an isotopy may be shared freely between threads.
    """

    def states(self, taus, pts):
        """psi_tau(pts) for ascending taus in [0, 1]; shape (T, N, 2)."""
        raise NotImplementedError

    def states_jac(self, taus, pts):
        """States plus the differentials D psi_tau(pts), shape (T, N, 2, 2)."""
        raise NotImplementedError

    def boundary_turns(self):
        """Per-unit-time boundary rotation in turns, or None if not rigid."""
        return None

    def radial_profile(self):
        """Combined RadialProfile when the family is purely radial, else None."""
        return None

    def action_density(self, t: float, pts):
        """Effective generating-function value at external time t in [0, 1)."""
        raise ActionUndefinedError(f"no action model for {type(self).__name__}")

    def max_abs_h(self):
        """Bound on |action_density| over the disk, or None when H-free."""
        return None

    # -- convenience evaluation ------------------------------------------------

    def evaluate(self, t: float, p):
        pts, single = _as_points(p)
        check_in_disk(pts, what="input point")
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t = {t} outside [0, 1]")
        if t == 0.0:
            out = pts.copy()
        else:
            out = self.states(np.array([float(t)]), pts)[0]
        check_in_disk(out, what="image point")
        return out[0] if single else out

    def jacobian(self, t: float, p):
        pts, single = _as_points(p)
        check_in_disk(pts, what="input point")
        if t == 0.0:
            jac = np.broadcast_to(_IDENT, (len(pts), 2, 2)).copy()
        else:
            _, jacs = self.states_jac(np.array([float(t)]), pts)
            jac = jacs[0]
        return jac[0] if single else jac

    def time_one_map(self):
        def psi(p):
            return self.evaluate(1.0, p)

        return psi


@dataclass(frozen=True)
class RigidRotation(DiskIsotopy):
    """Rotation by alpha turns; psi_t rotates by 2*pi*alpha*t."""

    alpha: float

    def states(self, taus, pts):
        taus = np.asarray(taus, dtype=float)
        rot = rotation_matrix(2.0 * np.pi * self.alpha * taus)
        return np.einsum("tij,nj->tni", rot, pts)

    def states_jac(self, taus, pts):
        taus = np.asarray(taus, dtype=float)
        rot = rotation_matrix(2.0 * np.pi * self.alpha * taus)
        states = np.einsum("tij,nj->tni", rot, pts)
        jacs = np.broadcast_to(rot[:, None, :, :], (len(taus), len(pts), 2, 2)).copy()
        return states, jacs

    def boundary_turns(self):
        return self.alpha

    def radial_profile(self):
        return RadialProfile((self.alpha,))

    def action_density(self, t, pts):
        u = pts[:, 0] ** 2 + pts[:, 1] ** 2
        return np.pi * self.alpha * u

    def max_abs_h(self):
        return None


@dataclass(frozen=True)
class RadialTwist(DiskIsotopy):
    """Each circle of radius r rotates rigidly by profile(r) turns per unit time."""

    profile: RadialProfile

    @classmethod
    def from_coeffs(cls, seq):
        return cls(RadialProfile.from_coeffs(seq))

    def _phases(self, taus, pts):
        u = pts[:, 0] ** 2 + pts[:, 1] ** 2
        rho = self.profile.value_u(u)
        phi = 2.0 * np.pi * np.asarray(taus, dtype=float)[:, None] * rho[None, :]
        return u, phi

    def states(self, taus, pts):
        _, phi = self._phases(taus, pts)
        c, s = np.cos(phi), np.sin(phi)
        x, y = pts[:, 0], pts[:, 1]
        return np.stack([c * x - s * y, s * x + c * y], axis=-1)

    def states_jac(self, taus, pts):
        taus = np.asarray(taus, dtype=float)
        u, phi = self._phases(taus, pts)
        c, s = np.cos(phi), np.sin(phi)
        x, y = pts[:, 0], pts[:, 1]
        sx = c * x - s * y
        sy = s * x + c * y
        states = np.stack([sx, sy], axis=-1)
        # D = R(phi) + coef * (J p') p^T with coef = 4*pi*tau*drho/du
        coef = 4.0 * np.pi * taus[:, None] * self.profile.deriv_u(u)[None, :]
        jacs = np.empty((len(taus), len(pts), 2, 2))
        jacs[..., 0, 0] = c + coef * (-sy) * x
        jacs[..., 0, 1] = -s + coef * (-sy) * y
        jacs[..., 1, 0] = s + coef * sx * x
        jacs[..., 1, 1] = c + coef * sx * y
        return states, jacs

    def boundary_turns(self):
        return float(self.profile.value_u(1.0))

    def radial_profile(self):
        return self.profile

    def action_density(self, t, pts):
        u = pts[:, 0] ** 2 + pts[:, 1] ** 2
        return np.pi * self.profile.integral_u(u)

    def max_abs_h(self):
        return None


@dataclass(frozen=True)
class HamiltonianSpec:
    """An autonomous generating function, constant on the disk boundary."""

    h: object
    grad: object
    hess: object
    step: float = 1e-3
    expression: str | None = None
    boundary_constant: bool = True

    @classmethod
    def from_expression(cls, text: str, step: float = 1e-3):
        fld = ScalarField(text)

        def h(x, y):
            return fld.value(x, y)

        def grad(x, y):
            return fld.grad(x, y)

        def hess(x, y):
            return fld.hess(x, y)

        spec = cls(h=h, grad=grad, hess=hess, step=step, expression=text)
        spec.validate()
        return spec

    @classmethod
    def from_callables(cls, h, grad, hess, step: float = 1e-3):
        spec = cls(h=h, grad=grad, hess=hess, step=step)
        spec.validate()
        return spec

    def validate(self, samples: int = 256, tol: float = 1e-9):
        ang = 2.0 * np.pi * np.arange(samples) / samples
        vals = self.h(np.cos(ang), np.sin(ang))
        dev = float(np.max(vals) - np.min(vals))
        if dev >= tol:
            raise MapSpecError(
                f"generating function not constant on the boundary (deviation {dev:.3g})")


class HamiltonianTimeOne(DiskIsotopy):
    """Flow of the area-form-dual vector field of H, integrated by the
    implicit midpoint rule.

    The midpoint scheme is symplectic for arbitrary (non-separable) H, so the
    time-1 map preserves area at machine scale regardless of step size; the
    step only controls how closely the numerical flow follows the exact one.
    The number of steps per unit time is fixed at construction, which makes
    psi_t a single well-defined map no matter how it is sampled: requests at
    off-grid times are answered with one partial step from the last grid
    state and do not perturb the committed trajectory.
    """

    def __init__(self, spec: HamiltonianSpec):
        self.spec = spec
        self.n_steps = max(1, int(round(1.0 / spec.step)))
        self.h_step = 1.0 / self.n_steps
        self._boundary_turns_cache = None

    def __repr__(self):
        label = self.spec.expression or "<callable>"
        return f"HamiltonianTimeOne({label!r}, step={self.spec.step})"

    def _velocity(self, pts):
        gx, gy = self.spec.grad(pts[..., 0], pts[..., 1])
        return np.stack([-gy, gx], axis=-1)

    def _dfield(self, pts):
        hxx, hxy, hyy = self.spec.hess(pts[..., 0], pts[..., 1])
        a = np.empty(pts.shape[:-1] + (2, 2))
        a[..., 0, 0] = -hxy
        a[..., 0, 1] = -hyy
        a[..., 1, 0] = hxx
        a[..., 1, 1] = hxy
        return a

    def _step(self, pts, h, want_jac=False, jacs=None):
        nxt = pts + h * self._velocity(pts)
        finite = np.all(np.isfinite(pts), axis=-1)
        for _ in range(50):
            mid = 0.5 * (pts + nxt)
            resid = pts + h * self._velocity(mid) - nxt
            open_rows = finite & ~(np.max(np.abs(resid), axis=-1) < 1e-12)
            if not np.any(open_rows):
                break
            a = self._dfield(mid[open_rows])
            m = np.broadcast_to(_IDENT, a.shape).copy() - (0.5 * h) * a
            nxt[open_rows] = nxt[open_rows] + solve_2x2(m, resid[open_rows])
        else:
            raise ConvergenceError(
                "implicit midpoint iteration stalled; integrator step too large")
        nxt[~finite] = np.nan
        if not want_jac:
            return nxt
        a = self._dfield(0.5 * (pts + nxt))
        eye = np.broadcast_to(_IDENT, a.shape)
        minus = eye - (0.5 * h) * a
        plus = eye + (0.5 * h) * a
        rhs = np.einsum("nij,njk->nik", plus, jacs)
        new_jacs = np.stack([solve_2x2(minus, rhs[..., k]) for k in range(2)], axis=-1)
        return nxt, new_jacs

    def _walk(self, taus, pts, want_jac):
        taus = np.asarray(taus, dtype=float)
        n = len(pts)
        states = np.empty((len(taus), n, 2))
        jacs_out = np.empty((len(taus), n, 2, 2)) if want_jac else None
        cur = np.array(pts, dtype=float)
        cur_jac = np.broadcast_to(_IDENT, (n, 2, 2)).copy() if want_jac else None
        k_cur = 0
        for idx, tau in enumerate(taus):
            k_full = int(math.floor(tau * self.n_steps + 1e-9))
            while k_cur < k_full:
                if want_jac:
                    cur, cur_jac = self._step(cur, self.h_step, True, cur_jac)
                else:
                    cur = self._step(cur, self.h_step)
                k_cur += 1
            rem = tau - k_cur * self.h_step
            if rem > 1e-12:
                if want_jac:
                    states[idx], jacs_out[idx] = self._step(cur, rem, True, cur_jac)
                else:
                    states[idx] = self._step(cur, rem)
            else:
                states[idx] = cur
                if want_jac:
                    jacs_out[idx] = cur_jac
        return (states, jacs_out) if want_jac else states

    def states(self, taus, pts):
        return self._walk(taus, pts, False)

    def states_jac(self, taus, pts):
        return self._walk(taus, pts, True)

    def boundary_turns(self):
        if self._boundary_turns_cache is None:
            ang = 2.0 * np.pi * np.arange(256) / 256
            bpts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
            vel = self._velocity(bpts)
            speed = bpts[:, 0] * vel[:, 1] - bpts[:, 1] * vel[:, 0]
            if float(np.max(np.abs(speed))) < 1e-13:
                value = 0.0
            elif float(np.max(speed) - np.min(speed)) < 1e-12 * max(1.0, float(np.max(np.abs(speed)))):
                value = float(np.mean(speed)) / (2.0 * np.pi)
            else:
                value = None
            self._boundary_turns_cache = (value,)
        return self._boundary_turns_cache[0]

    def action_density(self, t, pts):
        return self.spec.h(pts[:, 0], pts[:, 1])

    def max_abs_h(self):
        pts = np.vstack([polar_grid(48, 64), [[0.0, 0.0]]])
        return float(np.max(np.abs(self.spec.h(pts[:, 0], pts[:, 1]))))


@dataclass(frozen=True)
class Composition(DiskIsotopy):
    """Run the factors one after another in equal time windows.

    Composition([A, B]) ends at B o A: factor A acts during the first half of
    the unit interval, B during the second.
    """

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise MapSpecError("composition needs at least one factor")

    @classmethod
    def of(cls, *factors):
        return cls(tuple(factors))

    def _split(self, taus, pts, want_jac):
        taus = np.asarray(taus, dtype=float)
        m = len(self.factors)
        n = len(pts)
        states = np.empty((len(taus), n, 2))
        jacs = np.empty((len(taus), n, 2, 2)) if want_jac else None
        idx_factor = np.minimum(np.floor(taus * m + 1e-12).astype(int), m - 1)
        cur = np.array(pts, dtype=float)
        cur_jac = np.broadcast_to(_IDENT, (n, 2, 2)).copy()
        for i, factor in enumerate(self.factors):
            sel = np.nonzero(idx_factor == i)[0]
            if len(sel):
                locs = np.clip(taus[sel] * m - i, 0.0, 1.0)
                zero = locs <= 1e-15
                if np.any(zero):
                    states[sel[zero]] = cur
                    if want_jac:
                        jacs[sel[zero]] = cur_jac
                run = sel[~zero]
                if len(run):
                    if want_jac:
                        s, j = factor.states_jac(locs[~zero], cur)
                        states[run] = s
                        jacs[run] = np.einsum("tnij,njk->tnik", j, cur_jac)
                    else:
                        states[run] = factor.states(locs[~zero], cur)
            if i < m - 1:
                if want_jac:
                    s, j = factor.states_jac(np.array([1.0]), cur)
                    cur = s[0]
                    cur_jac = np.einsum("nij,njk->nik", j[0], cur_jac)
                else:
                    cur = factor.states(np.array([1.0]), cur)[0]
        return (states, jacs) if want_jac else states

    def states(self, taus, pts):
        return self._split(taus, pts, False)

    def states_jac(self, taus, pts):
        return self._split(taus, pts, True)

    def boundary_turns(self):
        total = 0.0
        for factor in self.factors:
            v = factor.boundary_turns()
            if v is None:
                return None
            total += v
        return total

    def radial_profile(self):
        combined = None
        for factor in self.factors:
            p = factor.radial_profile()
            if p is None:
                return None
            combined = p if combined is None else combined.added(p)
        return combined

    def action_density(self, t, pts):
        m = len(self.factors)
        i = min(int(math.floor(t * m + 1e-12)), m - 1)
        return m * self.factors[i].action_density(t * m - i, pts)

    def max_abs_h(self):
        total = 0.0
        seen = False
        m = len(self.factors)
        for factor in self.factors:
            v = factor.max_abs_h()
            if v is not None:
                total = max(total, m * v)
                seen = True
        return total if seen else None


@dataclass(frozen=True)
class Iterate(DiskIsotopy):
    """psi_t runs `count` copies of the base isotopy back to back."""

    base: DiskIsotopy
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise MapSpecError("iterate count must be a positive integer")

    def _split(self, taus, pts, want_jac):
        taus = np.asarray(taus, dtype=float)
        k = self.count
        n = len(pts)
        states = np.empty((len(taus), n, 2))
        jacs = np.empty((len(taus), n, 2, 2)) if want_jac else None
        te = taus * k
        block = np.minimum(np.floor(te + 1e-12).astype(int), k - 1)
        cur = np.array(pts, dtype=float)
        cur_jac = np.broadcast_to(_IDENT, (n, 2, 2)).copy()
        for b in range(k):
            sel = np.nonzero(block == b)[0]
            if len(sel):
                locs = np.clip(te[sel] - b, 0.0, 1.0)
                zero = locs <= 1e-15
                if np.any(zero):
                    states[sel[zero]] = cur
                    if want_jac:
                        jacs[sel[zero]] = cur_jac
                run = sel[~zero]
                if len(run):
                    if want_jac:
                        s, j = self.base.states_jac(locs[~zero], cur)
                        states[run] = s
                        jacs[run] = np.einsum("tnij,njk->tnik", j, cur_jac)
                    else:
                        states[run] = self.base.states(locs[~zero], cur)
            if b < k - 1:
                if want_jac:
                    s, j = self.base.states_jac(np.array([1.0]), cur)
                    cur = s[0]
                    cur_jac = np.einsum("nij,njk->nik", j[0], cur_jac)
                else:
                    cur = self.base.states(np.array([1.0]), cur)[0]
        return (states, jacs) if want_jac else states

    def states(self, taus, pts):
        return self._split(taus, pts, False)

    def states_jac(self, taus, pts):
        return self._split(taus, pts, True)

    def boundary_turns(self):
        v = self.base.boundary_turns()
        return None if v is None else self.count * v

    def radial_profile(self):
        p = self.base.radial_profile()
        return None if p is None else p.scaled(self.count)

    def action_density(self, t, pts):
        te = t * self.count
        b = min(int(math.floor(te + 1e-12)), self.count - 1)
        return self.count * self.base.action_density(te - b, pts)

    def max_abs_h(self):
        v = self.base.max_abs_h()
        return None if v is None else self.count * v


# -- module-level operation surface ------------------------------------------


def evaluate(iso: DiskIsotopy, t: float, p):
    """psi_t(p); exact identity at t = 0."""
    return iso.evaluate(t, p)


def jacobian(iso: DiskIsotopy, t: float, p):
    """D psi_t(p), analytic for closed-form families and variational otherwise."""
    return iso.jacobian(t, p)


def time_one_map(iso: DiskIsotopy):
    """psi_1 as a reusable evaluator."""
    return iso.time_one_map()


def advance(iso: DiskIsotopy, pts, steps: int = 1):
    """Apply psi_1 `steps` times to an (N, 2) batch."""
    cur = np.asarray(pts, dtype=float)
    one = np.array([1.0])
    for _ in range(steps):
        cur = iso.states(one, cur)[0]
    return cur


def advance_jac(iso: DiskIsotopy, pts, steps: int = 1):
    """psi_1^steps and its differential, chained by the variational rule."""
    cur = np.asarray(pts, dtype=float)
    jac = np.broadcast_to(_IDENT, (len(cur), 2, 2)).copy()
    one = np.array([1.0])
    for _ in range(steps):
        s, j = iso.states_jac(one, cur)
        cur = s[0]
        jac = np.einsum("nij,njk->nik", j[0], jac)
    return cur, jac


def evaluate_extended(iso: DiskIsotopy, t: float, p):
    """psi_t for t >= 0 under the convention psi_{t+1} = psi_t o psi_1."""
    pts, single = _as_points(p)
    whole = int(math.floor(t + 1e-12))
    frac = t - whole
    cur = advance(iso, pts, whole) if whole else np.array(pts, dtype=float)
    if frac > 1e-12:
        cur = iso.states(np.array([frac]), cur)[0]
    return cur[0] if single else cur


def flow_track(iso: DiskIsotopy, pts, periods: int, dt: float = 1e-2, jac: bool = False):
    """Sampled trajectories of psi_t for t in [0, periods].

    Returns (times, states) or (times, states, jacs); times has shape (T,),
    states (T, N, 2), jacs (T, N, 2, 2).  The grid spacing is at most dt and
    hits every integer time exactly.
    """
    pts, _ = _as_points(pts)
    m = int(math.ceil(1.0 / dt - 1e-9))
    taus = np.arange(1, m + 1) / m
    total = periods * m + 1
    times = np.empty(total)
    times[0] = 0.0
    states = np.empty((total, len(pts), 2))
    states[0] = pts
    jacs = None
    if jac:
        jacs = np.empty((total, len(pts), 2, 2))
        jacs[0] = np.broadcast_to(_IDENT, (len(pts), 2, 2))
    cur = np.array(pts, dtype=float)
    cur_jac = np.broadcast_to(_IDENT, (len(pts), 2, 2)).copy()
    for b in range(periods):
        sl = slice(1 + b * m, 1 + (b + 1) * m)
        times[sl] = b + taus
        if jac:
            s, j = iso.states_jac(taus, cur)
            states[sl] = s
            jacs[sl] = np.einsum("tnij,njk->tnik", j, cur_jac)
            cur = s[-1]
            cur_jac = jacs[sl][-1]
        else:
            s = iso.states(taus, cur)
            states[sl] = s
            cur = s[-1]
    if jac:
        return times, states, jacs
    return times, states
