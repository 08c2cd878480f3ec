import json
from pathlib import Path

import numpy as np
import pytest

from siptest.cli import main

FIXTURE = str(Path(__file__).parent / "data" / "nanopore_like_trace.txt")


@pytest.fixture
def gaussian_file(tmp_path):
    rng = np.random.default_rng(17)
    path = tmp_path / "iid.txt"
    path.write_text("\n".join(repr(float(v)) for v in rng.standard_normal(2000)) + "\n")
    return str(path)


@pytest.fixture
def constant_file(tmp_path):
    path = tmp_path / "flat.txt"
    path.write_text("5\n" * 200)
    return str(path)


class TestCmdTest:
    def test_nanopore_like_trace_rejects(self, capsys):
        code = main(["test", FIXTURE, "--lag", "4", "--format", "json"])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert out["schema"] == "sip-result/1"
        assert out["payload"]["p_value"] < 0.05
        assert out["payload"]["method"] == "sip2"

    def test_text_and_json_agree(self, gaussian_file, capsys):
        assert main(["test", gaussian_file]) == 0
        text = capsys.readouterr().out
        assert main(["test", gaussian_file, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)["payload"]
        lines = dict(line.split(": ", 1) for line in text.strip().splitlines())
        assert float(lines["statistic"]) == payload["statistic"]
        assert float(lines["p_value"]) == payload["p_value"]
        assert float(lines["gamma0"]) == payload["gamma0"]

    def test_all_methods_run(self, gaussian_file, capsys):
        for method in ("sip1", "sip2", "box"):
            assert main(["test", gaussian_file, "--method", method]) == 0
            assert "p_value" in capsys.readouterr().out

    def test_conservative_flag(self, gaussian_file, capsys):
        assert main(["test", gaussian_file, "--conservative"]) == 0
        assert "conservative: true" in capsys.readouterr().out

    def test_constant_file_exit_4(self, constant_file, capsys):
        assert main(["test", constant_file]) == 4
        captured = capsys.readouterr()
        assert "error" in captured.err
        assert captured.out == ""  # text-mode failures keep stdout clean

    def test_json_error_object(self, constant_file, capsys):
        assert main(["test", constant_file, "--format", "json"]) == 4
        envelope = json.loads(capsys.readouterr().out)
        assert envelope["error"]["code"] == "degenerate-variance"
        assert envelope["schema"] == "sip-result/1"

    def test_both_variants_reject_on_fixture(self, capsys):
        for method in ("sip1", "sip2"):
            code = main(["test", FIXTURE, "--method", method, "--format", "json"])
            assert code == 0
            assert json.loads(capsys.readouterr().out)["payload"]["p_value"] < 0.05

    def test_csv_column_selection(self, tmp_path, capsys):
        path = tmp_path / "trace.csv"
        rng = np.random.default_rng(29)
        rows = ["t,current"] + [f"{i},{v!r}" for i, v in enumerate(map(float, rng.standard_normal(800)))]
        path.write_text("\n".join(rows) + "\n")
        assert main(["test", str(path), "--column", "current"]) == 0
        assert "p_value" in capsys.readouterr().out
        assert main(["test", str(path)]) == 2  # two columns, none chosen

    def test_single_value_exit_3(self, tmp_path):
        path = tmp_path / "one.txt"
        path.write_text("42\n")
        assert main(["test", str(path)]) == 3

    def test_unparseable_exit_2(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\nnope\n")
        assert main(["test", str(path)]) == 2

    def test_missing_file_exit_2(self):
        assert main(["test", "/no/such/file.txt"]) == 2


class TestCmdAcf:
    def test_both_kinds_written(self, gaussian_file, tmp_path, capsys):
        prefix = str(tmp_path / "out")
        code = main(["acf", gaussian_file, "--max-lag", "6", "--output", prefix])
        assert code == 0
        assert (tmp_path / "out_sip.csv").exists()
        assert (tmp_path / "out_classical.csv").exists()
        header = (tmp_path / "out_sip.csv").read_text().splitlines()[0]
        assert header == "lag,value,bound_lo,bound_hi"

    def test_stdout_single_kind_json(self, gaussian_file, capsys):
        code = main(
            ["acf", gaussian_file, "--kind", "sip", "--out", "json", "--output", "-"]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema"] == "sip-acf/1"
        assert len(payload["values"]) == 20

    def test_svg_output(self, gaussian_file, tmp_path):
        prefix = str(tmp_path / "plot")
        code = main(
            ["acf", gaussian_file, "--kind", "classical", "--out", "svg",
             "--output", prefix, "--max-lag", "5"]
        )
        assert code == 0
        blob = (tmp_path / "plot_classical.svg").read_text()
        assert blob.startswith("<svg")

    def test_zero_lag_exit_2(self, gaussian_file):
        assert main(["acf", gaussian_file, "--max-lag", "0"]) == 2

    def test_stdout_with_both_kinds_exit_2(self, gaussian_file):
        assert main(["acf", gaussian_file, "--output", "-"]) == 2

    def test_infeasible_lag_exit_3(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("\n".join(str(v) for v in range(30)) + "\n")
        assert main(["acf", str(path), "--max-lag", "14", "--kind", "sip"]) == 3


class TestCmdSimulate:
    def test_smoke_config_runs(self, tmp_path, capsys):
        out = str(tmp_path / "res")
        code = main(["simulate", "smoke", "--out", out])
        assert code == 0
        report = json.loads((tmp_path / "res" / "report.json").read_text())
        assert report["schema"] == "sip-sim/1"
        assert report["config"]["reps"] == 1
        assert len(report["results"]) == 5
        csv_text = (tmp_path / "res" / "report.csv").read_text()
        assert csv_text.splitlines()[0].startswith("method,m,reps")

    def test_config_file_and_threads(self, tmp_path):
        cfg = {
            "n": 1500, "reps": 30, "seed": 5, "n_changepoints": 10,
            "min_segment_length": 25, "mean_range": [-3, 3],
            "noise": {"family": "iid_gaussian"}, "m_list": [2],
            "alpha": 0.05, "methods": ["sip2", "box"],
        }
        cfg_path = tmp_path / "study.json"
        cfg_path.write_text(json.dumps(cfg))
        out1, out8 = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["simulate", str(cfg_path), "--out", out1, "--threads", "1"]) == 0
        assert main(["simulate", str(cfg_path), "--out", out8, "--threads", "8"]) == 0
        assert (
            (tmp_path / "a" / "report.json").read_bytes()
            == (tmp_path / "b" / "report.json").read_bytes()
        )

    def test_flag_overrides(self, tmp_path, capsys):
        out = str(tmp_path / "res")
        code = main(["simulate", "smoke", "--out", out, "--reps", "3", "--seed", "123"])
        assert code == 0
        report = json.loads((tmp_path / "res" / "report.json").read_text())
        assert report["config"]["reps"] == 3
        assert report["config"]["seed"] == 123
        assert capsys.readouterr().err == ""  # success paths keep stderr clean

    def test_malformed_config_exit_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 100}')
        assert main(["simulate", str(path)]) == 2

    def test_unknown_bundled_name_exit_2(self):
        assert main(["simulate", "no_such_config"]) == 2

    def test_infeasible_design_exit_5(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps({"n": 100, "reps": 1, "seed": 1,
                        "n_changepoints": 50, "min_segment_length": 20,
                        "methods": ["box"], "m_list": [2]})
        )
        assert main(["simulate", str(path), "--out", str(tmp_path / "o")]) == 5


class TestUsage:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
