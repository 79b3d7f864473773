import csv
import io
import json
import subprocess
import sys

import pytest

from gsextract import statevector as sv
from gsextract.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_OK, EXIT_VERIFY, main


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(text):
    lines = text.splitlines()
    assert lines[0] == "# gsextract results v1"
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


class TestFamilies:
    def test_crazy(self, capsys):
        assert main(["families", "--kind", "crazy", "--n", "3"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["n"] == 8
        assert len(doc["edges"]) == 12

    def test_path_to_file(self, tmp_path):
        out = tmp_path / "g.json"
        assert main(["families", "--kind", "path", "--n", "2", "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["n"] == 4
        assert doc["edges"] == [[0, 1], [1, 2], [2, 3]]

    @pytest.mark.parametrize("argv", [["--kind", "twisted", "--n", "0"], ["--kind", "twisted", "--n", "2"],
                                      ["--kind", "hexagon", "--n", "2"], ["--kind", "path"]])
    def test_invalid(self, argv, capsys):
        assert main(["families", *argv]) == EXIT_CONFIG


class TestRun:
    def test_zero_noise(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"family": {"kind": "crazy", "n": 2}, "noise": {"model": "edge_loss", "p": 0.0},
                                      "n_samples": 200, "method": "montecarlo"})
        assert main(["run", "--config", cfg, "--seed", "1"]) == EXIT_OK
        (row,) = read_csv(capsys.readouterr().out)
        assert float(row["mean_fidelity"]) == 1.0
        assert float(row["stderr"]) == 0.0
        assert row["samples"] == row["accepted"] == "200"

    def test_rerun_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, {"family": {"kind": "ghz_crazy", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1},
                                      "n_samples": 3000, "method": "montecarlo"})
        outs = []
        for k, threads in enumerate(("1", "1", "2")):
            out = tmp_path / f"r{k}.csv"
            assert main(["run", "--config", cfg, "--seed", "9", "--threads", threads, "--out", str(out)]) == EXIT_OK
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_json_format(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"family": {"kind": "path", "n": 2}, "noise": {"model": "z_flip", "p": 0.1}})
        assert main(["run", "--config", cfg, "--seed", "0", "--format", "json"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        (row,) = doc["rows"]
        assert row["model"] == "z_flip" and row["method"] == "exact"
        assert 0 < row["mean_fidelity"] < 1

    def test_four_curve_grid(self, tmp_path, capsys):
        grid = [0.0, 0.1, 0.2, 0.3]
        cfg = write_config(tmp_path, {
            "experiments": [
                {"family": {"kind": "path", "n": 1}},
                {"family": {"kind": "crazy", "n": 1}},
                {"family": {"kind": "ghz_path", "n": 1}},
                {"family": {"kind": "ghz_crazy", "n": 1}},
            ],
            "noise": {"model": "edge_loss", "p": 0.1},
            "grid": {"p": grid},
            "n_samples": 1000,
        })
        assert main(["run", "--config", cfg, "--seed", "3"]) == EXIT_OK
        rows = read_csv(capsys.readouterr().out)
        assert [r["family"] for r in rows] == [k for k in ("path", "crazy", "ghz_path", "ghz_crazy") for _ in grid]
        assert [float(r["p"]) for r in rows] == grid * 4
        assert all(float(r["mean_fidelity"]) == 1.0 for r in rows if float(r["p"]) == 0)

    def test_sigma_grid(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"family": {"kind": "twisted", "n": 1}, "postselect": "all_minus",
                                      "noise": {"model": "correlated_phase", "sigma": 0.1},
                                      "grid": {"sigma": [0.05, 0.1]}, "method": "quadrature"})
        assert main(["run", "--config", cfg, "--seed", "0"]) == EXIT_OK
        rows = read_csv(capsys.readouterr().out)
        deficits = [1 - float(r["mean_fidelity"]) for r in rows]
        assert [r["method"] for r in rows] == ["quadrature"] * 2
        assert 12 < deficits[1] / deficits[0] < 20

    def test_empty_estimate(self, tmp_path, capsys):
        # every edge lost: all X outcomes read +1, so AllMinus never accepts
        cfg = write_config(tmp_path, {"family": {"kind": "twisted", "n": 1}, "postselect": "all_minus",
                                      "noise": {"model": "edge_loss", "p": 1.0}, "n_samples": 100,
                                      "method": "montecarlo"})
        assert main(["run", "--config", cfg, "--seed", "0"]) == EXIT_EMPTY
        captured = capsys.readouterr()
        assert "no accepted runs" in captured.err
        (row,) = read_csv(captured.out)
        assert row["accepted"] == "0" and row["mean_fidelity"] == "nan"

    @pytest.mark.parametrize(
        "cfg",
        [
            {"family": {"kind": "path", "n": 2}},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1, "sigma": 0.1}},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 1.5}},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1}, "colour": "red"},
            {"family": {"kind": "twisted", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1}},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1}, "method": "quadrature"},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1}, "grid": {"sigma": [0.1]}},
            {"family": {"kind": "path", "n": 2}, "noise": {"model": "z_flip", "sigma": 0.1}},
            {"noise": {"model": "edge_loss", "p": 0.1}},
        ],
    )
    def test_bad_config(self, tmp_path, cfg, capsys):
        path = write_config(tmp_path, cfg)
        assert main(["run", "--config", path, "--seed", "0"]) == EXIT_CONFIG
        assert capsys.readouterr().err.startswith("error:")

    def test_unreadable_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", "--config", str(bad), "--seed", "0"]) == EXIT_CONFIG
        assert main(["run", "--config", str(tmp_path / "missing.json"), "--seed", "0"]) == EXIT_CONFIG

    def test_seed_required(self, tmp_path):
        cfg = write_config(tmp_path, {"family": {"kind": "path", "n": 2}, "noise": {"model": "edge_loss", "p": 0.1}})
        assert main(["run", "--config", cfg]) == EXIT_CONFIG
        assert main(["run", "--config", cfg, "--seed", "-1"]) == EXIT_CONFIG
        assert main(["run", "--config", cfg, "--seed", "0", "--threads", "0"]) == EXIT_CONFIG


class TestSuscept:
    def _run(self, tmp_path, capsys, cfg):
        assert main(["suscept", "--config", write_config(tmp_path, cfg), "--seed", "0"]) == EXIT_OK
        return read_csv(capsys.readouterr().out)

    def test_crazy_constant(self, tmp_path, capsys):
        rows = self._run(tmp_path, capsys, {"family": {"kind": "crazy"}, "n_values": [2, 3, 4, 5],
                                            "noise": {"model": "edge_loss", "p": 0.01}})
        assert [float(r["alpha"]) for r in rows] == [1.0] * 4
        assert {r["method"] for r in rows} == {"first_order_exact"}

    def test_path_increasing(self, tmp_path, capsys):
        rows = self._run(tmp_path, capsys, {"family": {"kind": "path"}, "n_values": [2, 3, 4, 5],
                                            "noise": {"model": "edge_loss", "p": 0.01}})
        assert [float(r["alpha"]) for r in rows] == [2.25, 3.0, 3.75, 4.5]

    def test_twisted_correlated_all_minus(self, tmp_path, capsys):
        rows = self._run(tmp_path, capsys, {"family": {"kind": "twisted"}, "n_values": [1, 3],
                                            "postselect": "all_minus", "p_star": 0.001,
                                            "noise": {"model": "correlated_phase", "sigma": 0.1}})
        assert all(abs(float(r["alpha"])) < 0.05 for r in rows)
        assert {r["method"] for r in rows} == {"quadrature"}

    def test_monte_carlo(self, tmp_path, capsys):
        rows = self._run(tmp_path, capsys, {"family": {"kind": "crazy", "n": 2}, "method": "montecarlo",
                                            "p_star": 0.01, "n_samples": 20000,
                                            "noise": {"model": "edge_loss", "p": 0.01}})
        (row,) = rows
        assert abs(float(row["alpha"]) - 1.0) < 4 * float(row["stderr"]) + 0.05

    def test_needs_lengths(self, tmp_path):
        cfg = write_config(tmp_path, {"family": {"kind": "crazy"}, "noise": {"model": "edge_loss", "p": 0.01}})
        assert main(["suscept", "--config", cfg, "--seed", "0"]) == EXIT_CONFIG

    def test_first_order_rejects_correlated(self, tmp_path):
        cfg = write_config(tmp_path, {"family": {"kind": "twisted", "n": 1}, "method": "first_order",
                                      "noise": {"model": "correlated_phase", "sigma": 0.1}})
        assert main(["suscept", "--config", cfg, "--seed", "0"]) == EXIT_CONFIG


class TestVerify:
    def test_passes(self, capsys):
        assert main(["verify", "-v"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("PASS") == 4
        assert "eps^2 coeff" in out

    def test_negative_control(self, monkeypatch, capsys):
        real = sv.project

        def flipped(state, q, basis, sign):
            return real(state, q, basis, -sign)

        monkeypatch.setattr(sv, "project", flipped)
        assert main(["verify"]) == EXIT_VERIFY
        assert "FAIL  square" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gsextract", "families", "--kind", "path", "--n", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 3


@pytest.mark.parametrize("name", ["edge_loss_curves.json", "suscept_edge_loss.json", "twisted_shared_phase.json"])
def test_shipped_configs_validate(name):
    from pathlib import Path

    from gsextract.cli import load_config

    cfg = load_config(str(Path(__file__).resolve().parents[1] / "configs" / name))
    assert "noise" in cfg
