import math

import numpy as np
import pytest

import symdyn as sd
from symdyn import library, orbits, rotation


class TestBoundaryRotation:
    def test_rigid(self):
        torus = sd.MappingTorus(sd.RigidRotation(0.3), 1, 10.0)
        assert sd.boundary_rotation(torus, 1) == pytest.approx(0.3, abs=1e-15)

    def test_scaling(self):
        torus = sd.MappingTorus(sd.RigidRotation(0.3), 1, 10.0)
        assert abs(sd.boundary_rotation(torus, 5) - 1.5) < 1e-9

    def test_interior_perturbation_leaves_boundary_alone(self):
        iso = library.interior_perturbed_twist(boundary_turns=0.7)
        torus = sd.MappingTorus(iso, 1, 10.0)
        assert abs(sd.boundary_rotation(torus, 2) - 1.4) < 1e-9

    def test_tracked_lift_agrees_with_closed_form(self):
        # boundary-nontrivial generating function: rigid speed h'(1)/pi
        spec = sd.HamiltonianSpec.from_expression("0.1 * pi * r2^2", step=1e-2)
        torus = sd.MappingTorus(sd.HamiltonianTimeOne(spec), 1, 10.0)
        assert abs(sd.boundary_rotation(torus, 1) - 0.2) < 1e-9

    def test_non_rigid_boundary_with_rest_points(self):
        # H = 0.05*(1-r2)*x is constant on the boundary but drives a
        # non-rigid boundary flow with rest points: rotation number 0
        spec = sd.HamiltonianSpec.from_expression("0.05 * (1 - r2) * x", step=1e-2)
        torus = sd.MappingTorus(sd.HamiltonianTimeOne(spec), 1, 10.0)
        assert torus.iso.boundary_turns() is None
        assert abs(sd.boundary_rotation(torus, 1)) < 1e-9


class TestInfinitesimalRotation:
    def test_rigid_origin(self):
        torus = sd.MappingTorus(sd.RigidRotation(0.3), 1, 10.0)
        db = sd.find_periodic_points(torus, n=1, grid=(8, 16))
        assert abs(sd.infinitesimal_rotation(torus, db.records[0]) - 0.3) < 1e-6

    def test_radial_twist_center_speed(self):
        tw = sd.RadialTwist.from_coeffs([0.3, 0.9])
        torus = sd.MappingTorus(tw, 1, 10.0)
        db = sd.find_periodic_points(torus, n=1, grid=(8, 16))
        center = [r for r in db.records if r.radius < 1e-8][0]
        assert abs(sd.infinitesimal_rotation(torus, center) - 0.3) < 1e-6

    def test_scaling_factor_three(self, bench_torus, bench_db):
        rec = [r for r in bench_db.records if r.stability == "elliptic"][0]
        rot1 = sd.infinitesimal_rotation(bench_torus, rec)
        rec3 = orbits.PeriodicOrbitRecord(
            base=rec.base, minimal_period=rec.minimal_period, ambient_period=3,
            monodromy=np.linalg.matrix_power(rec.monodromy, 3),
            stability=orbits.stability_of_power(rec.monodromy, 3),
            cz_index=None, action=math.nan, residual=rec.residual)
        rot3 = sd.infinitesimal_rotation(bench_torus, rec3)
        assert abs(rot3 - 3 * rot1) < 2.0 / 3.0 + 1e-9

    def test_hyperbolic_integer_value(self, bench_torus, bench_db):
        rec = [r for r in bench_db.records if r.stability == "hyperbolic_positive"][0]
        value = sd.infinitesimal_rotation(bench_torus, rec)
        assert value == float(round(value))

    def test_boundary_record_rejected(self, bench_torus):
        rec = orbits.PeriodicOrbitRecord(
            base=np.array([1.0, 0.0]), minimal_period=1, ambient_period=1,
            monodromy=np.eye(2), stability="degenerate", cz_index=None,
            action=1.0, residual=0.0, boundary=True)
        with pytest.raises(ValueError):
            sd.infinitesimal_rotation(bench_torus, rec)


class TestTwistInterval:
    def test_arithmetic(self):
        tw = rotation.TwistInterval(-0.3, 0.4)
        assert sd.integers_in(tw) == [0]
        assert not tw.empty

    def test_empty_interval(self):
        tw = rotation.TwistInterval(0.5, 0.5)
        assert tw.empty
        assert sd.integers_in(tw) == []

    def test_open_endpoints_excluded(self):
        tw = rotation.TwistInterval(0.0, 2.5)
        assert sd.integers_in(tw) == [1, 2]
        tw2 = rotation.TwistInterval(-2.0, 3.0)
        assert sd.integers_in(tw2) == [-1, 0, 1, 2]

    def test_radial_twist_center_interval(self, bench_torus, bench_db):
        tw = sd.twist_interval(bench_torus, bench_db.records[0])
        assert abs(tw.lo - 0.0) < 1e-9
        assert abs(tw.hi - 2.5) < 1e-9
        assert sd.integers_in(tw) == [1, 2]

    def test_rigid_rotation_fixed_point_has_empty_twist(self, golden_torus):
        db = sd.find_periodic_points(golden_torus, n=1, grid=(8, 16))
        tw = sd.twist_interval(golden_torus, db.records[0])
        assert tw.hi - tw.lo < 1e-6
        assert sd.integers_in(tw) == []


class TestRotationData:
    def test_benchmark_report(self, bench_torus, bench_db):
        data = sd.rotation_data(bench_torus, bench_db)
        assert data.boundary_rot == pytest.approx(2.5)
        blob = data.to_json()
        assert blob["n"] == 1
        ids = {entry["id"] for entry in blob["orbits"]}
        assert {r.id for r in bench_db.records} <= ids
        for entry in blob["orbits"]:
            lo, hi = entry["twist"]
            assert lo <= hi
            assert entry["integers"] == [m for m in range(-10, 11) if lo + 1e-9 < m < hi - 1e-9]

    def test_scaling_laws_multi_level(self):
        torus = sd.MappingTorus(sd.RigidRotation(0.31), 1, 10.0)
        base = sd.boundary_rotation(torus, 1)
        for n in (1, 2, 3, 5, 8):
            assert abs(sd.boundary_rotation(torus, n) - n * base) < 1e-9


class TestApproximants:
    def test_floor_quotients_converge(self):
        alpha = library.GOLDEN_MEAN
        for n, value in sd.approximant_rotations(alpha, 1000):
            assert abs(value - alpha) < 1.0 / n
