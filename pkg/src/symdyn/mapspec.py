"""Loading disk map families from structured JSON descriptions.

Recognized forms:

    {"family": "rigid_rotation", "alpha": 0.3}
    {"family": "radial_twist", "rho_coeffs_r2": [a0, a1, ...]}
    {"family": "hamiltonian", "H": "<expression>", "step": 1e-3}
    {"family": "composition", "factors": [<spec>, ...]}
    {"family": "iterate", "base": <spec>, "n": 3}

Hamiltonian expressions use the minimal grammar over x, y, r2 with
sin/cos/exp (see `expressions`).
"""

from __future__ import annotations

import json
from pathlib import Path

from . import diskmaps
from .errors import MapSpecError


def from_dict(obj) -> diskmaps.DiskIsotopy:
    if not isinstance(obj, dict):
        raise MapSpecError(f"map spec must be an object, got {type(obj).__name__}")
    family = obj.get("family")
    if family == "rigid_rotation":
        if "alpha" not in obj:
            raise MapSpecError("rigid_rotation requires 'alpha'")
        return diskmaps.RigidRotation(float(obj["alpha"]))
    if family == "radial_twist":
        coeffs = obj.get("rho_coeffs_r2")
        if not coeffs:
            raise MapSpecError("radial_twist requires nonempty 'rho_coeffs_r2'")
        return diskmaps.RadialTwist.from_coeffs(coeffs)
    if family == "hamiltonian":
        if "H" not in obj:
            raise MapSpecError("hamiltonian requires an 'H' expression")
        step = float(obj.get("step", 1e-3))
        if step <= 0 or step > 0.5:
            raise MapSpecError(f"integrator step {step} out of range (0, 0.5]")
        spec = diskmaps.HamiltonianSpec.from_expression(obj["H"], step=step)
        return diskmaps.HamiltonianTimeOne(spec)
    if family == "composition":
        factors = obj.get("factors")
        if not factors:
            raise MapSpecError("composition requires nonempty 'factors'")
        return diskmaps.Composition(tuple(from_dict(f) for f in factors))
    if family == "iterate":
        if "base" not in obj or "n" not in obj:
            raise MapSpecError("iterate requires 'base' and 'n'")
        return diskmaps.Iterate(from_dict(obj["base"]), int(obj["n"]))
    raise MapSpecError(f"unknown family {family!r}")


def to_dict(iso: diskmaps.DiskIsotopy) -> dict:
    if isinstance(iso, diskmaps.RigidRotation):
        return {"family": "rigid_rotation", "alpha": iso.alpha}
    if isinstance(iso, diskmaps.RadialTwist):
        return {"family": "radial_twist", "rho_coeffs_r2": list(iso.profile.coeffs)}
    if isinstance(iso, diskmaps.HamiltonianTimeOne):
        if iso.spec.expression is None:
            raise MapSpecError("cannot serialize a callable-backed hamiltonian")
        return {"family": "hamiltonian", "H": iso.spec.expression, "step": iso.spec.step}
    if isinstance(iso, diskmaps.Composition):
        return {"family": "composition", "factors": [to_dict(f) for f in iso.factors]}
    if isinstance(iso, diskmaps.Iterate):
        return {"family": "iterate", "base": to_dict(iso.base), "n": iso.count}
    raise MapSpecError(f"cannot serialize {type(iso).__name__}")


def load(path) -> diskmaps.DiskIsotopy:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MapSpecError(f"map spec {path}: invalid JSON at line {exc.lineno}, "
                           f"column {exc.colno}") from exc
    return from_dict(obj)
