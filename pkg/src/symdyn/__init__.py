"""Suspension-flow toolkit for area-preserving disk maps.

Disk maps are given as isotopies from the identity; suspending an isotopy
over a circle of length n turns fixed points of the n-th iterate into
loops, and every invariant computed here (linking numbers, indices,
rotation numbers, twist intervals, actions) is a winding or integral along
that suspension.  On top of the invariants sit the verification harnesses:
the twist-forcing fixed point count, orbit-growth censuses against the
coprime lattice bound, and structural validation of transversal leaf
systems.
"""

from .diskmaps import (Composition, DiskIsotopy, HamiltonianSpec,
                       HamiltonianTimeOne, Iterate, RadialProfile, RadialTwist,
                       RigidRotation, evaluate, evaluate_extended, flow_track,
                       jacobian, polar_grid, time_one_map)
from .errors import (ActionUndefinedError, ConvergenceError,
                     DegenerateOrbitError, EscapeError, EstimatorMismatchError,
                     MapSpecError, OrbitCollisionError, ResolutionError,
                     SketchError, SymdynError)
from .foliation import (FoliationSketch, Leaf, LimitFoliation, SpanningOrbitNode,
                        StaticOrbitData, asymptotic_circles,
                        build_integrable_sketch, is_simple, random_sketch,
                        validate)
from .orbits import (FixedCircle, OrbitDatabase, PeriodicOrbitRecord,
                     conley_zehnder, find_periodic_points, linking_number,
                     stability_from_monodromy, winding_interval)
from .pb import CensusReport, PBReport, census, coprime_count, growth_bound, verify_pb
from .rotation import (RotationData, TwistInterval, approximant_rotations,
                       boundary_rotation, infinitesimal_rotation, integers_in,
                       rotation_data, twist_interval)
from .suspension import (MappingTorus, SuspensionLoop, action, boundary_lift,
                         suspension_loop, winding_number)

__version__ = "0.1.0"

__all__ = [
    "ActionUndefinedError", "CensusReport", "Composition", "ConvergenceError",
    "DegenerateOrbitError", "DiskIsotopy", "EscapeError",
    "EstimatorMismatchError", "FixedCircle", "FoliationSketch",
    "HamiltonianSpec", "HamiltonianTimeOne", "Iterate", "Leaf",
    "LimitFoliation", "MapSpecError", "MappingTorus", "OrbitCollisionError",
    "OrbitDatabase", "PBReport", "PeriodicOrbitRecord", "RadialProfile",
    "RadialTwist", "ResolutionError", "RigidRotation", "RotationData",
    "SketchError", "SpanningOrbitNode", "StaticOrbitData", "SuspensionLoop",
    "SymdynError", "TwistInterval", "action", "approximant_rotations",
    "asymptotic_circles", "boundary_lift", "boundary_rotation",
    "build_integrable_sketch", "census", "conley_zehnder", "coprime_count",
    "evaluate", "evaluate_extended", "find_periodic_points", "flow_track",
    "growth_bound", "infinitesimal_rotation", "integers_in", "is_simple",
    "jacobian", "linking_number", "polar_grid", "random_sketch",
    "rotation_data", "stability_from_monodromy", "suspension_loop",
    "time_one_map", "twist_interval", "validate", "verify_pb",
    "winding_interval", "winding_number",
]
