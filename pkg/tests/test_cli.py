import csv
import io
import json

import pytest

from perclocal.cli import main
from perclocal.graph import read_edge_list

from cli_cases import COMMANDS, invocations, prepare_inputs, run, run_surface


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    return prepare_inputs(tmp_path_factory.mktemp("cli_inputs"))


@pytest.fixture(scope="module")
def surface(inputs, tmp_path_factory):
    first = run_surface(inputs, tmp_path_factory.mktemp("run_a"))
    second = run_surface(inputs, tmp_path_factory.mktemp("run_b"))
    return first, second


def _last_record(stderr: bytes) -> dict:
    return json.loads(stderr.decode().strip().splitlines()[-1])


def test_every_command_covered(inputs, tmp_path):
    assert sorted(invocations(inputs, tmp_path)) == sorted(COMMANDS)


def test_all_succeed(surface):
    (_, fail_a), (_, fail_b) = surface
    assert fail_a == [] and fail_b == []


def test_byte_identical(surface):
    (out_a, _), (out_b, _) = surface
    assert sorted(out_a) == sorted(out_b)
    diff = [k for k in out_a if out_a[k] != out_b[k]]
    assert diff == []


def test_seed_changes_output(inputs, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for seed, path in ((1, a), (2, b)):
        assert run(["sweep", "--graph", inputs["cubic"], "--trials", "5", "--seed", str(seed),
                    "--p-grid", "0:1:0.1", "--out", str(path)]).returncode == 0
    assert a.read_bytes() != b.read_bytes()


class TestOutputs:
    def test_generate_and_meta(self, tmp_path):
        out = tmp_path / "g.txt"
        assert main(["generate", "random_regular", "n=50", "d=4", "seed=9", "--out", str(out)]) == 0
        g = read_edge_list(out)
        assert g.n == 50 and g.m == 100
        meta = json.loads((tmp_path / "g.txt.meta.json").read_text())
        assert meta["family"] == "random_regular" and meta["seed"] == 9 and meta["m"] == 100

    def test_generate_stdout(self, capsys):
        assert main(["generate", "cycle", "n=4"]) == 0
        assert capsys.readouterr().out.splitlines() == ["4 4", "0 1", "1 2", "2 3", "3 0"]

    def test_sweep_csv(self, inputs, capsys):
        assert main(["sweep", "--graph", inputs["cubic"], "--trials", "10",
                     "--p-grid", "0:1:0.25"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [float(r["p"]) for r in rows] == [0, 0.25, 0.5, 0.75, 1.0]
        assert float(rows[-1]["mean_fraction"]) == 1.0
        assert all(r["trials"] == "10" for r in rows)

    def test_percolate_single_p(self, inputs, capsys):
        assert main(["percolate", "--graph", inputs["cubic"], "--p", "1.0", "--trials", "3"]) == 0
        row = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))[0]
        assert float(row["mean_fraction"]) == 1.0 and float(row["prob_exceeds_alpha"]) == 1.0

    def test_expansion_exact(self, inputs, capsys):
        assert main(["expansion", "--graph", inputs["small"], "--delta", "0.5", "--exact"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["exact"] > 0 and len(rep["witness"]) == 6

    def test_mincut_menger(self, inputs, capsys):
        assert main(["mincut", "--graph", inputs["small"], "--A", "0", "--B", "5"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["cut"] == rep["paths"] == 3

    def test_prune_routes_report(self, inputs, capsys):
        assert main(["prune", "--graph", inputs["er"], "--eps", "0.2",
                     "--limit-tail", inputs["tail"]]) == 0
        captured = capsys.readouterr()
        assert captured.out.split()[0] == "150"
        rep = json.loads(captured.err)
        assert rep["heuristic_limit"] is False and rep["avg_degree_after"] <= rep["bound"]

    def test_lwc_header(self, inputs, capsys):
        assert main(["lwc-compare", "--graph-a", inputs["cubic"], "--graph-b", inputs["cubic"],
                     "--radius", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "# tv_distance=0.0 radius=1"
        assert lines[1] == "signature,freq_a,freq_b,abs_diff"

    def test_limit_and_survival(self, capsys):
        assert main(["limit-pc", "--model", "regular:4"]) == 0
        assert json.loads(capsys.readouterr().out)["pc"] == pytest.approx(1 / 3)
        assert main(["survival", "--model", "regular:3", "--p", "0.5"]) == 0
        assert json.loads(capsys.readouterr().out)["survival"] == 0.0

    def test_nb_eigen(self, inputs, capsys):
        assert main(["nb-eigen", "--graph", inputs["cubic"]]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["lambda"] == pytest.approx(2.0, abs=1e-8)
        assert rep["threshold_estimate"] == pytest.approx(0.5, abs=1e-8)


class TestErrors:
    @pytest.mark.parametrize("argv,kind", [
        (["sweep", "--graph", "/no/such/file"], "FileNotFoundError"),
        (["generate", "random_regular", "n=5", "d=3", "seed=0"], "InfeasibleError"),
        (["generate", "random_regular", "n=x"], "GraphError"),
        (["limit-pc", "--model", "gw"], "ValueError"),
        (["survival", "--model", "regular:3", "--p", "2"], "ValueError"),
        (["bogus"], "UsageError"),
        (["sweep"], "UsageError"),
    ])
    def test_error_record(self, argv, kind):
        proc = run(argv)
        assert proc.returncode == 2
        rec = _last_record(proc.stderr)
        assert set(rec) == {"command", "error", "message"}
        assert rec["error"] == kind and rec["message"]
        assert proc.stdout == b""

    def test_bad_grid(self, inputs):
        proc = run(["sweep", "--graph", inputs["cubic"], "--p-grid", "0:2:0.1"])
        assert proc.returncode == 2
        assert _last_record(proc.stderr) == {"command": "sweep", "error": "ConfigError",
                                               "message": "grid [0.0, 2.0] must lie inside [0, 1]"}

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"family": "random_regular", "params": {"d": 3},
                                   "size_param": "n", "sizes": [20, 10]}))
        proc = run(["threshold", "--config", str(cfg)])
        assert proc.returncode == 2 and _last_record(proc.stderr)["error"] == "ConfigError"

    def test_malformed_graph(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("3 1\n0 a\n")
        proc = run(["nb-eigen", "--graph", str(bad)])
        assert proc.returncode == 2 and _last_record(proc.stderr)["error"] == "GraphError"
