import math

import numpy as np
import pytest

import symdyn as sd
from symdyn import library
from symdyn.diskmaps import polar_grid
from symdyn.errors import EscapeError, MapSpecError


def rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def built_in_families():
    return {
        "rigid": sd.RigidRotation(0.3),
        "twist25": library.radial_twist_25(),
        "gentle_ham": library.radial_hamiltonian_gentle(),
        "perturbed": library.perturbed_twist(),
        "iterate": sd.Iterate(sd.RigidRotation(0.15), 3),
    }


class TestEvaluate:
    def test_quarter_turn(self):
        out = sd.evaluate(sd.RigidRotation(0.25), 1.0, (1.0, 0.0))
        assert np.allclose(out, [0.0, 1.0], atol=1e-15)

    def test_time_zero_is_identity_exactly(self):
        p = np.array([0.3, 0.4])
        for iso in built_in_families().values():
            out = sd.evaluate(iso, 0.0, p)
            assert np.array_equal(out, p)

    def test_radial_twist_closed_form(self):
        # rho(0.5) = 0.25 turns: (0.5, 0) lands on (0, 0.5)
        tw = sd.RadialTwist.from_coeffs([0.0, 1.0])
        out = sd.evaluate(tw, 1.0, (0.5, 0.0))
        assert np.allclose(out, [0.0, 0.5], atol=1e-15)

    def test_escape_error_for_outside_point(self):
        with pytest.raises(EscapeError):
            sd.evaluate(sd.RigidRotation(0.1), 1.0, (1.1, 0.0))


class TestJacobian:
    def test_rigid_rotation_matrix(self):
        jac = sd.jacobian(sd.RigidRotation(0.3), 1.0, (0.2, 0.1))
        assert np.allclose(jac, rotation(2 * math.pi * 0.3), atol=1e-14)

    def test_radial_twist_center(self):
        tw = sd.RadialTwist.from_coeffs([0.2, 1.3])
        jac = sd.jacobian(tw, 1.0, (0.0, 0.0))
        assert np.allclose(jac, rotation(2 * math.pi * 0.2), atol=1e-14)

    def test_radial_twist_against_finite_differences(self):
        tw = library.radial_twist_25()
        p = np.array([0.4, 0.25])
        jac = sd.jacobian(tw, 1.0, p)
        eps = 1e-7
        fd = np.empty((2, 2))
        for j in range(2):
            dp = np.zeros(2)
            dp[j] = eps
            fd[:, j] = (sd.evaluate(tw, 1.0, p + dp) - sd.evaluate(tw, 1.0, p - dp)) / (2 * eps)
        assert np.allclose(jac, fd, atol=1e-6)

    def test_hamiltonian_matches_twist_jacobian(self):
        # H = pi*r2^2/2 generates the twist rho(r) = r^2
        ham = library.radial_hamiltonian_r2()
        tw = sd.RadialTwist.from_coeffs([0.0, 1.0])
        p = (0.5, 0.0)
        assert np.allclose(sd.jacobian(ham, 1.0, p), sd.jacobian(tw, 1.0, p), atol=1e-6)
        assert np.allclose(sd.evaluate(ham, 1.0, p), sd.evaluate(tw, 1.0, p), atol=1e-6)


class TestTimeOneMap:
    def test_half_turn_squared(self):
        psi = sd.time_one_map(sd.RigidRotation(0.5))
        assert np.allclose(psi(psi((1.0, 0.0))), [1.0, 0.0], atol=1e-14)

    def test_iterate_is_composition_of_time_one(self):
        base = library.radial_twist_25()
        it3 = sd.Iterate(base, 3)
        psi = sd.time_one_map(base)
        pts = polar_grid(8, 8)
        expect = pts
        for _ in range(3):
            expect = np.array([psi(p) for p in expect])
        got = np.array([sd.evaluate(it3, 1.0, p) for p in pts])
        assert np.max(np.linalg.norm(got - expect, axis=-1)) < 1e-9

    def test_composition_order_convention(self):
        comp = sd.Composition.of(sd.RigidRotation(0.1), sd.RigidRotation(0.2))
        out = sd.evaluate(comp, 1.0, (1.0, 0.0))
        assert np.allclose(out, sd.evaluate(sd.RigidRotation(0.3), 1.0, (1.0, 0.0)),
                           atol=1e-14)


class TestStructuralInvariants:
    @pytest.mark.parametrize("name,iso", sorted(built_in_families().items()))
    def test_area_preservation(self, name, iso):
        pts = polar_grid(32, 32)
        jacs = iso.jacobian(1.0, pts)
        dets = jacs[:, 0, 0] * jacs[:, 1, 1] - jacs[:, 0, 1] * jacs[:, 1, 0]
        assert np.max(np.abs(dets - 1.0)) < 1e-8

    @pytest.mark.parametrize("name,iso", sorted(built_in_families().items()))
    def test_boundary_invariance(self, name, iso):
        ang = 2 * np.pi * np.arange(64) / 64
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        for t in np.linspace(1.0 / 16, 1.0, 16):
            out = iso.states(np.array([t]), pts)[0]
            assert np.max(np.abs(np.hypot(out[:, 0], out[:, 1]) - 1.0)) < 1e-10

    @pytest.mark.parametrize("name,iso", sorted(built_in_families().items()))
    def test_isotopy_endpoint(self, name, iso):
        pts = polar_grid(8, 16)
        out = iso.evaluate(0.0, pts)
        assert np.array_equal(out, pts)

    def test_integrator_consistency_on_grid(self):
        # radially symmetric generating function vs its closed-form twist
        ham = library.radial_hamiltonian_gentle()
        tw = sd.RadialTwist.from_coeffs([0.0, 0.2])
        pts = polar_grid(32, 32)
        got = ham.evaluate(1.0, pts)
        expect = tw.evaluate(1.0, pts)
        assert np.max(np.linalg.norm(got - expect, axis=-1)) < 1e-6


class TestRadialProfile:
    def test_solve_value_monotone(self):
        profile = sd.RadialProfile.from_coeffs([0.0, 2.5])
        roots = profile.solve_value(1.0)
        assert len(roots) == 1
        assert abs(roots[0] - 0.4) < 1e-12

    def test_solve_value_three_roots(self):
        profile = library.wiggly_profile()
        target = library.GOLDEN_MEAN
        roots = profile.solve_value(target)
        assert len(roots) == 3
        for u in roots:
            assert abs(float(profile.value_u(u)) - target) < 1e-12

    def test_solve_value_out_of_range(self):
        profile = library.wiggly_profile()
        assert profile.solve_value(5.0) == []


class TestHamiltonianSpec:
    def test_boundary_constancy_enforced(self):
        with pytest.raises(MapSpecError):
            sd.HamiltonianSpec.from_expression("x", step=1e-2)

    def test_boundary_constant_nonzero_value_ok(self):
        spec = sd.HamiltonianSpec.from_expression("(1 - r2)^2 + 3", step=1e-2)
        assert spec.boundary_constant

    def test_extended_evaluation_convention(self):
        iso = sd.RigidRotation(0.3)
        out = sd.evaluate_extended(iso, 2.5, (1.0, 0.0))
        angle = 2 * math.pi * 0.3 * 2.5
        assert np.allclose(out, [math.cos(angle), math.sin(angle)], atol=1e-12)


class TestIntegratorFailure:
    def test_stiff_step_raises_convergence_error(self):
        import symdyn.errors
        # wild oscillation at half-unit steps: the inner iteration stalls
        spec = sd.HamiltonianSpec.from_expression(
            "50 * sin(6*x) * (1 - r2)^2", step=0.5)
        iso = sd.HamiltonianTimeOne(spec)
        with pytest.raises(symdyn.errors.ConvergenceError):
            iso.evaluate(1.0, (0.5, 0.0))


class TestActionModelGuard:
    def test_unsupported_family_raises(self):
        from symdyn.diskmaps import DiskIsotopy
        from symdyn.errors import ActionUndefinedError

        class Opaque(DiskIsotopy):
            def states(self, taus, pts):
                return np.broadcast_to(pts, (len(taus),) + pts.shape).copy()

        with pytest.raises(ActionUndefinedError):
            Opaque().action_density(0.0, np.zeros((1, 2)))
