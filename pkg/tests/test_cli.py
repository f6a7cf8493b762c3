import csv
import json

import numpy as np
import pytest

from agrnn import cli, runner
from agrnn.errors import InvalidConfigError

SMALL_CFG = {
    "problem": "poisson-1",
    "seed": 3,
    "interior_counts": [200],
    "boundary_counts": 1,
    "eta": 1.0,
    "quadrature_points": 60,
    "plot_grid": [40],
    "pipeline": [
        {"kind": "freq_init", "m1": 40, "r_max": 400.0, "num_magnitudes": 50, "activation": "gaussian"},
        {"kind": "neuron_growth", "m_add": [20, 20], "eps_stop": 1e-12},
    ],
}


def run_cli(tmp_path, cfg, name, extra=()):
    cfg_path = tmp_path / f"{name}.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = cli.main(["solve", "--config", str(cfg_path), "--out-dir", str(out), *extra])
    return code, out


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestSolve:
    def test_record_count_contract(self, tmp_path):
        code, out = run_cli(tmp_path, SMALL_CFG, "a")
        assert code == 0
        rows = read_rows(out / "results.csv")
        assert rows[0] == list(runner.RESULT_COLUMNS)
        assert len(rows) - 1 == 3  # init + two growth stages

    def test_artifacts_exist(self, tmp_path):
        _, out = run_cli(tmp_path, SMALL_CFG, "b")
        assert (out / "results.csv").exists()
        assert (out / "solution_grid.csv").exists()
        assert (out / "config_echo.json").exists()
        grid_rows = read_rows(out / "solution_grid.csv")
        assert grid_rows[0] == ["x0", "value", "exact", "abs_error"]
        assert len(grid_rows) - 1 == 40

    def test_determinism_modulo_wall_time(self, tmp_path):
        _, out1 = run_cli(tmp_path, SMALL_CFG, "c1")
        _, out2 = run_cli(tmp_path, SMALL_CFG, "c2")
        rows1 = read_rows(out1 / "results.csv")
        rows2 = read_rows(out2 / "results.csv")
        wall = runner.RESULT_COLUMNS.index("wall_time_s")
        for r1, r2 in zip(rows1, rows2):
            assert r1[:wall] == r2[:wall]
        assert (out1 / "solution_grid.csv").read_bytes() == (out2 / "solution_grid.csv").read_bytes()

    def test_seed_override_changes_results(self, tmp_path):
        _, out1 = run_cli(tmp_path, SMALL_CFG, "d1")
        cfg_path = tmp_path / "d.json"
        cfg_path.write_text(json.dumps(SMALL_CFG))
        out2 = tmp_path / "d2"
        cli.main(["solve", "--config", str(cfg_path), "--seed", "99", "--out-dir", str(out2)])
        echo = json.loads((out2 / "config_echo.json").read_text())
        assert echo["seed"] == 99

    def test_config_echo_reproduces_run(self, tmp_path):
        _, out1 = run_cli(tmp_path, SMALL_CFG, "e1")
        echo = json.loads((out1 / "config_echo.json").read_text())
        cfg_path = tmp_path / "echo.json"
        cfg_path.write_text(json.dumps(echo))
        out2 = tmp_path / "e2"
        code = cli.main(["solve", "--config", str(cfg_path), "--out-dir", str(out2)])
        assert code == 0
        rows1 = read_rows(out1 / "results.csv")
        rows2 = read_rows(out2 / "results.csv")
        wall = runner.RESULT_COLUMNS.index("wall_time_s")
        for r1, r2 in zip(rows1, rows2):
            assert r1[:wall] == r2[:wall]


class TestValidation:
    def test_missing_interior_counts(self):
        cfg = {k: v for k, v in SMALL_CFG.items() if k != "interior_counts"}
        with pytest.raises(InvalidConfigError, match="interior_counts"):
            runner.resolve_config(cfg)

    def test_error_names_field_path(self):
        cfg = json.loads(json.dumps(SMALL_CFG))
        cfg["pipeline"][0].pop("r_max")
        with pytest.raises(InvalidConfigError, match=r"pipeline\[0\].r_max"):
            runner.resolve_config(cfg)

    def test_init_stage_must_come_first(self):
        cfg = json.loads(json.dumps(SMALL_CFG))
        cfg["pipeline"] = [cfg["pipeline"][1]]
        with pytest.raises(InvalidConfigError, match=r"pipeline\[0\]"):
            runner.resolve_config(cfg)

    def test_split_must_be_terminal(self):
        cfg = json.loads(json.dumps(SMALL_CFG))
        cfg["pipeline"] = [
            cfg["pipeline"][0],
            {"kind": "split", "segments": 2, "mode": "pilot_range", "m1": 5, "r1": [1.0], "activation": "tanh"},
            cfg["pipeline"][1],
        ]
        with pytest.raises(InvalidConfigError, match="terminal"):
            runner.resolve_config(cfg)

    def test_unknown_boundary_segment(self):
        cfg = json.loads(json.dumps(SMALL_CFG))
        cfg["boundary_counts"] = {"north": 4}
        with pytest.raises(InvalidConfigError, match="boundary_counts.north"):
            runner.resolve_config(cfg)

    def test_cli_reports_validation_failure(self, tmp_path):
        cfg = {k: v for k, v in SMALL_CFG.items() if k != "interior_counts"}
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps(cfg))
        code = cli.main(["solve", "--config", str(cfg_path), "--out-dir", str(tmp_path / "x")])
        assert code == 1

    def test_resolved_config_is_fully_explicit(self):
        resolved = runner.resolve_config(json.loads(json.dumps(SMALL_CFG)))
        assert resolved["prune_tol"] == 1e-14
        assert resolved["epsilon_c"] == 1e-10
        assert resolved["boundary_counts"] == {"left": 1, "right": 1}
        assert resolved["pipeline"][0]["anchor_mode"] == "box_uniform"


class TestReproduce:
    def test_unknown_case(self, capsys):
        assert cli.main(["reproduce", "no-such-case"]) == 2

    def test_known_cases_resolve(self):
        from agrnn.cases import CASES

        for name, spec in CASES.items():
            resolved = runner.resolve_config(json.loads(json.dumps(spec.config)))
            assert resolved["pipeline"], name

    def test_reproduce_attaches_reference(self, tmp_path):
        from agrnn.cases import CASES

        # shrink the case-1 config so the test stays fast
        spec = CASES["poisson-case1"]
        cfg = json.loads(json.dumps(spec.config))
        cfg["interior_counts"] = [400]
        cfg["pipeline"][0]["m1"] = 40
        cfg["pipeline"][1]["m_add"] = [20]
        result = runner.execute(cfg, paper_refs=spec.paper_refs)
        assert result.records[0].e0_paper == 2.68e-4
        assert result.records[1].e0_paper == 6.41e-8


class TestSpectrum:
    def test_spectrum_dump_has_rhs_peak(self, tmp_path):
        cfg = json.loads(json.dumps(SMALL_CFG))
        cfg["sampling_rate"] = 256.0
        cfg_path = tmp_path / "spec.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "sp"
        assert cli.main(["spectrum", "--config", str(cfg_path), "--out-dir", str(out)]) == 0
        rows = read_rows(out / "spectrum.csv")
        assert rows[0] == ["freq0", "magnitude"]
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        nonzero = data[data[:, 0] > 0]
        assert nonzero[np.argmax(nonzero[:, 1]), 0] == 32.0
