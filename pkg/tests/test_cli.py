import json
import math

import pytest

import symdyn as sd
from symdyn import cli, foliation, jsonio, library


def run(args):
    return cli.main([str(a) for a in args])


@pytest.fixture()
def radial25_json(tmp_path):
    path = tmp_path / "radial25.json"
    path.write_text(json.dumps({"family": "radial_twist", "rho_coeffs_r2": [0.0, 2.5]}))
    return path


@pytest.fixture()
def golden_json(tmp_path):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps({"family": "rigid_rotation",
                                "alpha": library.GOLDEN_MEAN}))
    return path


class TestBasicCommands:
    def test_coprime(self, capsys):
        assert run(["coprime", "--a", 0, "--b", 1, "--N", 4]) == 0
        assert capsys.readouterr().out.strip() == "5"

    def test_growth_bound(self, capsys):
        assert run(["growth-bound", "--a", 0, "--b", 1]) == 0
        out = capsys.readouterr().out.strip()
        assert abs(float(out) - 0.3039635509) < 1e-9

    def test_missing_map_is_input_error(self, tmp_path, capsys):
        assert run(["orbits", "--map", tmp_path / "nope.json",
                    "--out", tmp_path]) == 1

    def test_malformed_map_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"family": "hamiltonian", "H": "x +"}')
        assert run(["orbits", "--map", bad, "--out", tmp_path]) == 1
        assert "position" in capsys.readouterr().err


class TestOrbitsCommand:
    def test_writes_database_and_is_deterministic(self, radial25_json, tmp_path, capsys):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert run(["orbits", "--map", radial25_json, "--n", 1,
                    "--grid", "16x32", "--linking", "--out", out1]) == 0
        assert run(["orbits", "--map", radial25_json, "--n", 1,
                    "--grid", "16x32", "--linking", "--out", out2]) == 0
        b1 = (out1 / "orbits.json").read_bytes()
        b2 = (out2 / "orbits.json").read_bytes()
        assert b1 == b2
        blob = json.loads(b1)
        assert {c["id"] for c in blob["circles"]} == {"c0", "c1"}
        assert blob["records"][0]["stability"] == "degenerate"
        assert blob["records"][0]["cz"] == "degenerate"
        assert ["p0", "c0", 1] in blob["linking"] or ["c0", "p0", 1] in blob["linking"]

    def test_round_trip_matches(self, radial25_json, tmp_path):
        out = tmp_path / "db"
        run(["orbits", "--map", radial25_json, "--n", 1, "--grid", "16x32",
             "--out", out])
        db = sd.OrbitDatabase.from_json(jsonio.load(out / "orbits.json"))
        assert db.n == 1
        assert len(db.circles) == 2


class TestPBCommand:
    def test_radial25_k1(self, radial25_json, tmp_path, capsys):
        out = tmp_path / "pb"
        assert run(["pb", "--map", radial25_json, "--n", 1, "--k", 1,
                    "--grid", "16x32", "--out", out]) == 0
        blob = json.loads((out / "pb_report.json").read_text())
        assert blob["satisfied"] is True
        assert blob["circle_witnesses"] == ["c0"]
        assert "satisfied" in capsys.readouterr().out


class TestCensusCommand:
    def test_csv_columns(self, golden_json, tmp_path):
        out = tmp_path / "census"
        assert run(["census", "--map", golden_json, "--N", 2,
                    "--twist", "0,1", "--grid", "8x16", "--out", out]) == 0
        lines = (out / "census.csv").read_text().strip().splitlines()
        assert lines[0] == "N,mu,coprime_count,bound_constant_times_N2"
        assert lines[1].startswith("1,1,0,")
        assert lines[2].startswith("2,1,1,")


class TestFoliationCommands:
    def test_sketch_then_validate(self, radial25_json, tmp_path, capsys):
        out = tmp_path / "sk"
        assert run(["foliation", "sketch", "--map", radial25_json, "--n", 1,
                    "--k", 1, "--out", out]) == 0
        assert run(["foliation", "validate", "--sketch", out / "sketch.json",
                    "--out", out]) == 0
        text = capsys.readouterr().out
        assert "non-simple" in text
        assert "all checks pass" in text
        report = json.loads((out / "validation.json").read_text())
        assert report["valid"] is True

    def test_validate_with_orbit_database(self, tmp_path, capsys):
        # figure-nine style sketch against a stored orbit database
        sketch = {
            "n": 1, "k": 0,
            "nodes": [
                {"ref": "g0", "parity": "odd", "twist": [-0.3, 0.4], "action": 9.2},
                {"ref": "e", "parity": "odd", "twist": [0.25, 0.4], "action": 9.7},
                {"ref": "h", "parity": "even", "twist": [0.0, 0.4], "action": 9.5},
            ],
            "leaves": [
                {"kind": "cylinder", "ends": [2, 1], "signs": ["-", "+"], "area": 0.2},
                {"kind": "cylinder", "ends": [2, 1], "signs": ["-", "+"], "area": 0.2},
                {"kind": "cylinder", "ends": [2, 0], "signs": ["+", "-"], "area": 0.3},
                {"kind": "half_cylinder", "ends": [2, "boundary"],
                 "signs": ["-", "+"], "area": 0.5},
            ],
            "boundary": {"L": 10.0, "m": math.pi},
        }
        db = {
            "n": 1,
            "records": [
                {"id": "g0", "base": [0.0, 0.0], "minimal_period": 1,
                 "stability": "elliptic", "cz": -1, "action": 9.2, "residual": 0.0},
                {"id": "e", "base": [0.3, 0.0], "minimal_period": 1,
                 "stability": "elliptic", "cz": 1, "action": 9.7, "residual": 0.0},
                {"id": "h", "base": [-0.3, 0.0], "minimal_period": 1,
                 "stability": "hyperbolic_positive", "cz": 0, "action": 9.5,
                 "residual": 0.0},
            ],
            "circles": [],
            "linking": [["g0", "e", 0], ["g0", "h", 0], ["e", "h", 0]],
        }
        spath, dpath = tmp_path / "fig9.json", tmp_path / "db.json"
        spath.write_text(json.dumps(sketch))
        dpath.write_text(json.dumps(db))
        assert run(["foliation", "validate", "--sketch", spath,
                    "--orbits", dpath]) == 0
        assert "non-simple" in capsys.readouterr().out

    def test_validate_failure_exits_two(self, tmp_path):
        sketch = {
            "n": 1, "k": 0,
            "nodes": [{"ref": "z", "parity": "odd", "twist": [-0.3, 0.4],
                       "action": 9.0}],
            "leaves": [{"kind": "half_cylinder", "ends": [0, "boundary"],
                        "signs": ["-", "+"], "area": 1.0}],
            "boundary": {"L": 10.0, "m": math.pi},
        }
        path = tmp_path / "bad_sketch.json"
        path.write_text(json.dumps(sketch))
        assert run(["foliation", "validate", "--sketch", path]) == 2


class TestCirclesCommand:
    def test_three_root_profile(self, tmp_path):
        path = tmp_path / "wiggly.json"
        path.write_text(json.dumps(
            {"family": "radial_twist", "rho_coeffs_r2": [0.3, 4.4, -12.0, 8.0]}))
        out = tmp_path / "circ"
        assert run(["circles", "--map", path, "--omega", library.GOLDEN_MEAN,
                    "--out", out]) == 0
        blob = json.loads((out / "circles.json").read_text())
        assert len(blob["circles"]) == 3
        csv = (out / "circles.csv").read_text().splitlines()
        assert csv[0] == "radius,rotation"
        assert len(csv) == 4


class TestPlotData:
    def test_portrait_and_traces(self, radial25_json, tmp_path):
        out = tmp_path / "plot"
        sketch = foliation.build_integrable_sketch(
            library.radial_twist_25().profile, n=1, k=1)
        spath = tmp_path / "sketch.json"
        spath.write_text(jsonio.dumps(sketch.to_json()))
        assert run(["plotdata", "--map", radial25_json, "--sketch", spath,
                    "--out", out]) == 0
        portrait = (out / "portrait.csv").read_text().splitlines()
        assert portrait[0] == "x,y,orbit_id"
        assert len(portrait) >= 10_001
        summary = json.loads((out / "trace_summary.json").read_text())
        # one degenerate circle node: exactly one closed trace loop
        assert summary["closed_loops"] == 1

    def test_simple_sketch_has_no_loops(self, golden_json, tmp_path):
        profile = sd.RadialProfile.from_coeffs([0.2, 0.2])
        sketch = foliation.build_integrable_sketch(profile, n=1, k=5)
        spath = tmp_path / "sk.json"
        spath.write_text(jsonio.dumps(sketch.to_json()))
        out = tmp_path / "plot"
        assert run(["plotdata", "--map", golden_json, "--sketch", spath,
                    "--out", out]) == 0
        summary = json.loads((out / "trace_summary.json").read_text())
        assert summary["closed_loops"] == 0

    def test_figure_nine_traces_have_one_loop(self, golden_json, tmp_path):
        from test_foliation import figure_nine_sketch
        sketch, _ = figure_nine_sketch()
        spath = tmp_path / "fig9.json"
        spath.write_text(jsonio.dumps(sketch.to_json()))
        out = tmp_path / "plot"
        assert run(["plotdata", "--map", golden_json, "--sketch", spath,
                    "--out", out]) == 0
        summary = json.loads((out / "trace_summary.json").read_text())
        assert summary["closed_loops"] == 1


class TestConfigFile:
    def test_config_supplies_defaults(self, radial25_json, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "map_spec": str(radial25_json), "n": 1, "grid": [16, 32],
            "output_dir": str(tmp_path / "cfg_out"), "seed": 7,
        }))
        assert run(["orbits", "--config", cfg]) == 0
        assert (tmp_path / "cfg_out" / "orbits.json").exists()

    def test_bad_tolerance_rejected(self, radial25_json, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "map_spec": str(radial25_json),
            "tolerances": {"dedup": -1.0},
        }))
        assert run(["orbits", "--config", cfg, "--out", tmp_path]) == 1


class TestRotationCommand:
    def test_writes_rotation_data(self, radial25_json, tmp_path):
        out = tmp_path / "rot"
        assert run(["rotation", "--map", radial25_json, "--n", 1,
                    "--grid", "16x32", "--out", out]) == 0
        blob = json.loads((out / "rotation.json").read_text())
        assert blob["n"] == 1
        assert abs(blob["boundary_rot"] - 2.5) < 1e-12
        center = [o for o in blob["orbits"] if o["id"] == "p0"][0]
        assert center["integers"] == [1, 2]


class TestPlotDataWithSearch:
    def test_fixed_points_csv(self, radial25_json, tmp_path):
        out = tmp_path / "plot2"
        assert run(["plotdata", "--map", radial25_json, "--n", 1,
                    "--grid", "16x32", "--search", "--out", out]) == 0
        fixed = (out / "fixed_points.csv").read_text().splitlines()
        assert fixed[0] == "x,y,stability,cz,parity"
        circles = (out / "invariant_circles.csv").read_text().splitlines()
        assert circles[0] == "radius,k"
        assert len(circles) == 3
