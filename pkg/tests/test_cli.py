import json

import numpy as np
import pytest

from suffdata.cli import main

SIMPLEX2_PROBLEM = {
    "n_vars": 2,
    "eq": {"lhs": [[1.0, 1.0]], "rhs": [1.0]},
    "uncertainty": {"type": "hpoly",
                    "lhs": [[1, 0], [-1, 0], [0, 1], [0, -1]],
                    "rhs": [1, 1, 1, 1]},
}


@pytest.fixture
def problem_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(SIMPLEX2_PROBLEM))
    return path


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


class TestDirBasis:
    def test_simplex2_output(self, problem_file, tmp_path, capsys):
        out = tmp_path / "basis.json"
        code = main(["dir-basis", "--input", str(problem_file),
                     "--seed", "4", "--output", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["iterations"] == 1
        assert payload["seed"] == 4
        vec = np.array(payload["basis"][0])
        assert np.allclose(np.abs(vec), [0.7071067811865475] * 2)
        assert payload["anchor"] in ([1.0, 0.0], [0.0, 1.0])

    def test_byte_stable_reruns(self, problem_file, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        main(["dir-basis", "--input", str(problem_file), "--seed", "4",
              "--output", str(out1)])
        main(["dir-basis", "--input", str(problem_file), "--seed", "4",
              "--output", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_point_polytope_empty_basis(self, tmp_path):
        problem = {
            "n_vars": 2,
            "eq": {"lhs": [[1.0, 0.0], [0.0, 1.0]], "rhs": [0.25, 0.75]},
            "uncertainty": SIMPLEX2_PROBLEM["uncertainty"],
        }
        path = write_json(tmp_path, "point.json", problem)
        out = tmp_path / "basis.json"
        assert main(["dir-basis", "--input", str(path), "--seed", "1",
                     "--output", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["basis"] == [] and payload["iterations"] == 0

    def test_malformed_json_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"n_vars": 2,')
        assert main(["dir-basis", "--input", str(path), "--seed", "1"]) == 2
        assert "input error" in capsys.readouterr().err


class TestCheck:
    def test_sufficient_dataset_exit_0(self, problem_file, tmp_path):
        ds = write_json(tmp_path, "ds.json", {"queries": [[1, 0], [0, 1]]})
        assert main(["check", "--input", str(problem_file),
                     "--dataset", str(ds)]) == 0

    def test_insufficient_dataset_exit_1_with_residual(self, problem_file,
                                                       tmp_path, capsys):
        ds = write_json(tmp_path, "ds.json", {"queries": [[1, 0]]})
        code = main(["check", "--input", str(problem_file), "--dataset", str(ds)])
        assert code == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["sufficient"] is False
        assert np.allclose(np.abs(payload["residual_direction"]), [0.0, 1.0],
                           atol=1e-9)

    def test_empty_dataset_point_c_exit_0(self, tmp_path):
        problem = {
            "n_vars": 2,
            "eq": {"lhs": [[1.0, 1.0]], "rhs": [1.0]},
            "uncertainty": {"type": "affine", "phi": [[1.0, 2.0]],
                            "alpha_lower": [1.0], "alpha_upper": [1.0],
                            "eta": 0.0},
        }
        path = write_json(tmp_path, "p.json", problem)
        ds = write_json(tmp_path, "ds.json", {"queries": []})
        assert main(["check", "--input", str(path), "--dataset", str(ds)]) == 0

    def test_full_space_uses_kernel_route(self, tmp_path):
        problem = dict(SIMPLEX2_PROBLEM, uncertainty={"type": "full"})
        path = write_json(tmp_path, "p.json", problem)
        good = write_json(tmp_path, "good.json", {"queries": [[1, -1]]})
        bad = write_json(tmp_path, "bad.json", {"queries": [[1, 1]]})
        assert main(["check", "--input", str(path), "--dataset", str(good)]) == 0
        assert main(["check", "--input", str(path), "--dataset", str(bad)]) == 1


class TestSelect:
    def test_selects_both_canonical_queries(self, problem_file, capsys):
        assert main(["select", "--input", str(problem_file), "--seed", "2"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["indices"] == [0, 1]


class TestDecide:
    def test_noiseless_decision(self, problem_file, tmp_path, capsys):
        ds = write_json(tmp_path, "ds.json", {"queries": [[1, 0], [0, 1]]})
        obs = write_json(tmp_path, "obs.json", {"values": [0.3, 0.7]})
        code = main(["decide", "--input", str(problem_file), "--dataset",
                     str(ds), "--observations", str(obs)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["decision"] == [1.0, 0.0]
        assert payload["residual"] == 0.0
        assert payload["objective"] == pytest.approx(0.3)

    def test_length_mismatch_exit_2(self, problem_file, tmp_path):
        ds = write_json(tmp_path, "ds.json", {"queries": [[1, 0], [0, 1]]})
        obs = write_json(tmp_path, "obs.json", {"values": [0.3]})
        assert main(["decide", "--input", str(problem_file), "--dataset",
                     str(ds), "--observations", str(obs)]) == 2


class TestOracleVerify:
    def test_simplex2_passes(self, problem_file, capsys):
        assert main(["oracle-verify", "--input", str(problem_file)]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_cube_passes(self, tmp_path):
        problem = {
            "n_vars": 3,
            "bounds": {"lower": [0, 0, 0], "upper": [1, 1, 1]},
            "uncertainty": {"type": "hpoly",
                            "lhs": np.vstack([np.eye(3), -np.eye(3)]).tolist(),
                            "rhs": [1] * 6},
        }
        path = write_json(tmp_path, "cube.json", problem)
        assert main(["oracle-verify", "--input", str(path)]) == 0

    def test_budget_exit_3(self, tmp_path, capsys):
        problem = {
            "n_vars": 30,
            "bounds": {"lower": [0] * 30, "upper": [1] * 30},
            "uncertainty": {"type": "hpoly",
                            "lhs": np.vstack([np.eye(30), -np.eye(30)]).tolist(),
                            "rhs": [1] * 60},
        }
        path = write_json(tmp_path, "big.json", problem)
        assert main(["oracle-verify", "--input", str(path)]) == 3


class TestHiringCommand:
    def test_small_run_writes_outputs(self, tmp_path, capsys):
        cfg = write_json(tmp_path, "hiring.json",
                         {"variant": "vanilla", "etas": [0.05, 0.4], "d": 8,
                          "trichotomy": False})
        code = main(["hiring", "--input", str(cfg), "--seed", "3",
                     "--output", str(tmp_path / "out")])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["counts_nondecreasing"] is True
        assert all(payload["recovery_optimal"])
        assert (tmp_path / "out" / "hiring_vanilla_seed3.csv").exists()
        assert (tmp_path / "out" / "hiring_vanilla_seed3.svg").exists()

    def test_bad_config_exit_2(self, tmp_path):
        cfg = write_json(tmp_path, "hiring.json", {"variant": "nope", "etas": [0.1]})
        assert main(["hiring", "--input", str(cfg), "--seed", "1"]) == 2


def test_missing_file_exit_2():
    assert main(["check", "--input", "/nonexistent.json",
                 "--dataset", "/also-missing.json"]) == 2
