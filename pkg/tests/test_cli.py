"""Command-line interface: outputs, exit codes, sweep determinism."""

import json
import os

import numpy as np
import pytest

from graphex import cli, sampler, stats
from graphex.cli import (EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_RESOURCE,
                         EXIT_VERIFY, main)


def _write_config(tmp_path, config, name="model.json"):
    path = str(tmp_path / name)
    with open(path, "w") as fh:
        json.dump(config, fh)
    return path


SEP_POW = {"kind": "SeparablePower", "sigma": 0.5}
LG = {"kind": "LocalGlobal", "partition": [0.0, 0.5, 0.8, 1.0],
      "B": [[0.7, 0.1, 0.1], [0.1, 0.5, 0.05], [0.1, 0.05, 0.9]],
      "eta": {"kind": "SeparablePower", "sigma": 0.8}}


class TestSample:
    def test_outputs(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / "run")
        assert main(["sample", "--model", model, "--alpha", "30",
                     "--seed", "3", "--out", out]) == EXIT_OK
        g = sampler.read_graph_json(os.path.join(out, "graph.json"))
        st = stats.read_stats_json(os.path.join(out, "stats.json"))
        assert st == stats.summarize(g)
        with open(os.path.join(out, "edges.csv")) as fh:
            assert len(fh.readlines()) == g.n_edges + 1
        with open(os.path.join(out, "nodes.csv")) as fh:
            assert len(fh.readlines()) == g.n_nodes + 1

    def test_lg_node_columns(self, tmp_path):
        model = _write_config(tmp_path, LG)
        out = str(tmp_path / "runlg")
        assert main(["sample", "--model", model, "--alpha", "40",
                     "--out", out]) == EXIT_OK
        with open(os.path.join(out, "nodes.csv")) as fh:
            header = fh.readline().strip()
            rows = fh.readlines()
        assert header == "id,theta,vartheta,v,block"
        for row in rows:
            v, block = row.strip().split(",")[3:]
            assert 0.0 <= float(v) <= 1.0
            assert int(block) in (0, 1, 2)

    def test_tiny_alpha_empty_outputs(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / "empty")
        assert main(["sample", "--model", model, "--alpha", "1e-4",
                     "--out", out]) == EXIT_OK
        st = stats.read_stats_json(os.path.join(out, "stats.json"))
        assert st.n_nodes == 0 and st.n_edges == 0
        assert st.sigma_hat is None


class TestExitCodes:
    def test_malformed_json(self, tmp_path, capsys):
        path = str(tmp_path / "bad.json")
        with open(path, "w") as fh:
            fh.write("{not json")
        out = str(tmp_path / "o")
        assert main(["sample", "--model", path, "--alpha", "10",
                     "--out", out]) == EXIT_CONFIG
        assert "malformed" in capsys.readouterr().err

    def test_unknown_kind_named_in_error(self, tmp_path, capsys):
        model = _write_config(tmp_path, {"kind": "Telepathic"})
        out = str(tmp_path / "o")
        assert main(["sample", "--model", model, "--alpha", "10",
                     "--out", out]) == EXIT_CONFIG
        assert "Telepathic" in capsys.readouterr().err

    def test_resource_cap(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GRAPHEX_MAX_POINTS", "100")
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / "o")
        assert main(["sample", "--model", model, "--alpha", "500",
                     "--out", out]) == EXIT_RESOURCE

    def test_missing_model_file(self, tmp_path):
        out = str(tmp_path / "o")
        assert main(["sample", "--model", str(tmp_path / "nope.json"),
                     "--alpha", "10", "--out", out]) == EXIT_IO

    def test_unwritable_sweep_output(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        bad_out = str(tmp_path / "no" / "such" / "dir" / "sweep.csv")
        assert main(["sweep", "--model", model, "--alphas", "5,10",
                     "--reps", "2", "--out", bad_out]) == EXIT_IO

    def test_verify_failure(self, tmp_path, monkeypatch):
        # force a broken oracle so the edge-law check cannot pass
        monkeypatch.setattr(cli.asymptotics, "expected_edges_exact",
                            lambda model, alpha: 1e9)
        model = _write_config(tmp_path, SEP_POW)
        report = str(tmp_path / "report.json")
        assert main(["verify", "--model", model, "--alpha", "20",
                     "--reps", "10", "--out", report]) == EXIT_VERIFY
        with open(report) as fh:
            data = json.load(fh)
        assert not data["all_pass"]
        failed = [c for c in data["checks"] if not c["pass"]]
        assert any(c["name"] == "edge_law" for c in failed)

    def test_verify_passes(self, tmp_path):
        model = _write_config(tmp_path, {"kind": "Exponential"})
        report = str(tmp_path / "report.json")
        assert main(["verify", "--model", model, "--alpha", "30",
                     "--reps", "40", "--out", report]) == EXIT_OK
        with open(report) as fh:
            assert json.load(fh)["all_pass"]


class TestSweep:
    def _run(self, tmp_path, name, jobs):
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / name)
        code = main(["sweep", "--model", model, "--alphas", "5,10,20",
                     "--reps", "4", "--seed", "7", "--jobs", str(jobs),
                     "--out", out])
        assert code == EXIT_OK
        with open(out) as fh:
            return [ln for ln in fh
                    if not ln.startswith("# timestamp")]

    def test_row_count(self, tmp_path):
        lines = self._run(tmp_path, "a.csv", jobs=1)
        data = [ln for ln in lines if not ln.startswith("#")]
        assert len(data) == 1 + 3 * 4   # header + |alphas| * reps

    def test_jobs_do_not_change_results(self, tmp_path):
        assert self._run(tmp_path, "a.csv", jobs=1) == \
            self._run(tmp_path, "b.csv", jobs=3)

    def test_empty_sigma_hat_column(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / "tiny.csv")
        assert main(["sweep", "--model", model, "--alphas", "0.001",
                     "--reps", "3", "--out", out]) == EXIT_OK
        rows = [ln.strip() for ln in open(out)
                if not ln.startswith("#")][1:]
        assert all(row.endswith(",") for row in rows)

    def test_rejects_empty_grid_and_reps(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        out = str(tmp_path / "x.csv")
        assert main(["sweep", "--model", model, "--alphas", ",",
                     "--reps", "2", "--out", out]) == EXIT_CONFIG
        assert main(["sweep", "--model", model, "--alphas", "5",
                     "--reps", "0", "--out", out]) == EXIT_CONFIG

    def test_seed_changes_results(self, tmp_path):
        model = _write_config(tmp_path, SEP_POW)
        outs = []
        for seed in ("1", "2"):
            out = str(tmp_path / f"s{seed}.csv")
            assert main(["sweep", "--model", model, "--alphas", "20",
                         "--reps", "3", "--seed", seed,
                         "--out", out]) == EXIT_OK
            outs.append([ln for ln in open(out) if not ln.startswith("#")])
        assert outs[0][0] == outs[1][0]       # same header
        assert outs[0][1:] != outs[1][1:]
