import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdyn import expressions, mapspec
from symdyn.errors import MapSpecError

import symdyn as sd


def numeric_grad(field, x, y, eps=1e-6):
    gx = (field.value(x + eps, y) - field.value(x - eps, y)) / (2 * eps)
    gy = (field.value(x, y + eps) - field.value(x, y - eps)) / (2 * eps)
    return gx, gy


class TestGrammar:
    def test_value_against_python(self):
        field = expressions.ScalarField("0.5 * sin(x) + cos(y) * exp(r2) - x^3 / 2")
        x, y = 0.3, -0.4
        expect = 0.5 * math.sin(x) + math.cos(y) * math.exp(x * x + y * y) - x ** 3 / 2
        assert abs(float(field.value(x, y)) - expect) < 1e-14

    def test_pi_constant(self):
        field = expressions.ScalarField("pi * r2")
        assert abs(float(field.value(1.0, 0.0)) - math.pi) < 1e-15

    def test_unary_minus_and_power(self):
        field = expressions.ScalarField("-x^2")
        assert float(field.value(2.0, 0.0)) == -4.0

    @pytest.mark.parametrize("text,fragment", [
        ("x +", "position"),
        ("sin x", "position"),
        ("(x + y", "position"),
        ("2 ** x", "position"),
        ("foo(x)", "position"),
        ("x $ y", "position"),
    ])
    def test_errors_carry_position(self, text, fragment):
        with pytest.raises(MapSpecError) as err:
            expressions.ScalarField(text)
        assert fragment in str(err.value)

    def test_nonconstant_exponent_rejected_on_diff(self):
        with pytest.raises(MapSpecError):
            expressions.ScalarField("x ^ y")

    @given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
    @settings(max_examples=40, deadline=None)
    def test_gradient_matches_finite_differences(self, x, y):
        field = expressions.ScalarField("(1 - r2)^2 * (x^3 - 3*x*y^2) + sin(x*y)")
        gx, gy = field.grad(x, y)
        nx, ny = numeric_grad(field, x, y)
        assert abs(float(gx) - float(nx)) < 1e-7 * (1 + abs(float(nx)))
        assert abs(float(gy) - float(ny)) < 1e-7 * (1 + abs(float(ny)))

    def test_hessian_consistency(self):
        field = expressions.ScalarField("exp(r2) * cos(x)")
        x, y = 0.2, 0.5
        eps = 1e-5
        hxx, hxy, hyy = field.hess(x, y)
        gxp, _ = field.grad(x + eps, y)
        gxm, _ = field.grad(x - eps, y)
        assert abs(float(hxx) - (float(gxp) - float(gxm)) / (2 * eps)) < 1e-6
        _, gyp = field.grad(x + eps, y)
        _, gym = field.grad(x - eps, y)
        assert abs(float(hxy) - (float(gyp) - float(gym)) / (2 * eps)) < 1e-6

    def test_vectorized_broadcast(self):
        field = expressions.ScalarField("x * y + 1")
        xs = np.linspace(-0.5, 0.5, 7)
        vals = field.value(xs, np.zeros_like(xs))
        assert vals.shape == xs.shape
        assert np.allclose(vals, 1.0)


class TestMapSpecLoading:
    def test_all_families_round_trip(self, tmp_path):
        spec = {
            "family": "composition",
            "factors": [
                {"family": "radial_twist", "rho_coeffs_r2": [0.0, 2.5]},
                {"family": "iterate",
                 "base": {"family": "rigid_rotation", "alpha": 0.25}, "n": 2},
                {"family": "hamiltonian", "H": "0.001 * (1 - r2)^2 * x", "step": 0.05},
            ],
        }
        path = tmp_path / "map.json"
        path.write_text(__import__("json").dumps(spec))
        iso = mapspec.load(path)
        assert isinstance(iso, sd.Composition)
        again = mapspec.to_dict(iso)
        assert again == spec

    @pytest.mark.parametrize("bad", [
        {"family": "nope"},
        {"family": "rigid_rotation"},
        {"family": "radial_twist", "rho_coeffs_r2": []},
        {"family": "hamiltonian"},
        {"family": "hamiltonian", "H": "x + ", "step": 0.1},
        {"family": "composition", "factors": []},
        {"family": "iterate", "base": {"family": "rigid_rotation", "alpha": 0.1}},
        [1, 2, 3],
    ])
    def test_malformed_specs_rejected(self, bad):
        with pytest.raises(MapSpecError):
            mapspec.from_dict(bad)

    def test_bad_json_reports_location(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"family": "rigid_rotation", ')
        with pytest.raises(MapSpecError) as err:
            mapspec.load(path)
        assert "line" in str(err.value)
