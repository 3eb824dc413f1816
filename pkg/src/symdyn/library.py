"""Named map families used by the test benches and the demo scripts."""

from __future__ import annotations

import math

from . import diskmaps

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0

# epsilon * (1 - r^2)^2 * r^3 * cos(3 theta); the (1 - r2)^2 factor kills the
# field and its gradient on the boundary, so boundary behavior is untouched.
_PERTURBATION_EXPR = "{eps} * (1 - r2)^2 * (x^3 - 3*x*y^2)"


def golden_rotation() -> diskmaps.RigidRotation:
    """Rigid rotation by the golden mean: the model pseudo-rotation."""
    return diskmaps.RigidRotation(GOLDEN_MEAN)


def radial_twist_25() -> diskmaps.RadialTwist:
    """Monotone twist rho(r) = 2.5 r^2: two integer-rotation circles."""
    return diskmaps.RadialTwist.from_coeffs([0.0, 2.5])


def threefold_perturbation(eps: float = 1e-3, step: float = 5e-2) -> diskmaps.HamiltonianTimeOne:
    spec = diskmaps.HamiltonianSpec.from_expression(
        _PERTURBATION_EXPR.format(eps=repr(eps)), step=step)
    return diskmaps.HamiltonianTimeOne(spec)


def perturbed_twist(eps: float = 1e-3, step: float = 5e-2) -> diskmaps.Composition:
    """The workhorse benchmark: rho = 2.5 r^2 twist with a small threefold
    interior kick that breaks the integer-rotation circles into chains.

    The kick is weak, so a coarse integrator step pins down a perfectly
    good area-preserving map; every invariant is computed for the map the
    integrator defines, not for the ideal flow.
    """
    return diskmaps.Composition.of(radial_twist_25(), threefold_perturbation(eps, step))


def interior_perturbed_twist(boundary_turns: float = 0.7, eps: float = 1e-3,
                             step: float = 5e-2) -> diskmaps.Composition:
    """A twist reaching `boundary_turns` at the edge, kicked only inside."""
    twist = diskmaps.RadialTwist.from_coeffs([0.0, boundary_turns])
    return diskmaps.Composition.of(twist, threefold_perturbation(eps, step))


def wiggly_profile() -> diskmaps.RadialProfile:
    """Non-monotone profile 8u^3 - 12u^2 + 4.4u + 0.3 (u = r^2).

    Values sweep 0.3 -> 0.776 -> 0.224 -> 0.7, so every target in
    (0.3, 0.7) is hit on three separate radii.
    """
    return diskmaps.RadialProfile.from_coeffs([0.3, 4.4, -12.0, 8.0])


def radial_hamiltonian_r2(step: float = 2.5e-4) -> diskmaps.HamiltonianTimeOne:
    """H = pi*(x^2+y^2)^2/2, whose time-1 map is the twist rho(r) = r^2.

    The default step is finer than usual because the second-order phase lag
    of the midpoint rule at a full turn per unit time needs ~2.5e-4 to land
    the differential within 1e-6 of the closed form.
    """
    spec = diskmaps.HamiltonianSpec.from_expression("(pi/2) * r2^2", step=step)
    return diskmaps.HamiltonianTimeOne(spec)


def radial_hamiltonian_gentle() -> diskmaps.HamiltonianTimeOne:
    """H = 0.1*pi*r2^2 at the stock step: the twist rho(r) = 0.2 r^2."""
    spec = diskmaps.HamiltonianSpec.from_expression("0.1 * pi * r2^2", step=1e-3)
    return diskmaps.HamiltonianTimeOne(spec)
