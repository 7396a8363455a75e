"""Command-line behavior: formats, exit codes, determinism."""

import json
import random

from generators import random_graph
from ptodel.cli import main
from ptodel.fixtures import cycle_graph, fixture_graph, path_graph
from ptodel.graphs import format_graph, parse_graph
from ptodel.fvsp import FvspInstance, format_instance


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


ST_TEXT = format_instance(FvspInstance(4, [(0, 2), (1, 2), (1, 3), (0, 3)], [1.0] * 4))


class TestSolve:
    def test_p4_empty(self, tmp_path, capsys):
        path = write(tmp_path, "p4.gr", format_graph(path_graph(4)))
        code, out, _ = run(capsys, "solve", path)
        assert code == 0
        res = json.loads(out)
        assert res["deleted"] == [] and res["weight"] == 0.0
        assert res["verification"] == {
            "lattice_forest": True,
            "obstruction_free": True,
        }

    def test_c5_weight_one(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, out, _ = run(capsys, "solve", path)
        assert code == 0
        res = json.loads(out)
        assert res["weight"] == 1.0 and len(res["deleted"]) == 1

    def test_malformed_exits_2(self, tmp_path, capsys):
        path = write(tmp_path, "bad.gr", "p x\n")
        code, _, err = run(capsys, "solve", path)
        assert code == 2 and "error" in err

    def test_missing_file_exits_2(self, capsys):
        code, _, _ = run(capsys, "solve", "/nonexistent/graph.gr")
        assert code == 2

    def test_text_format(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, out, _ = run(capsys, "solve", path, "--format", "text")
        assert code == 0 and out.startswith("deleted 1 vertices")

    def test_determinism(self, tmp_path, capsys):
        g = random_graph(random.Random(5), 8, 0.4, weights=(0.0, 10.0))
        path = write(tmp_path, "g.gr", format_graph(g))
        _, out1, _ = run(capsys, "solve", path)
        _, out2, _ = run(capsys, "solve", path)
        assert out1 == out2

    def test_invalid_params_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "p4.gr", format_graph(path_graph(4)))
        code, _, err = run(capsys, "solve", path, "--params", "0.05,0.55,0.9")
        assert code == 2 and "3*(1-beta)" in err

    def test_custom_params(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, out, _ = run(capsys, "solve", path, "--params", "0.02,0.52,0.6")
        assert code == 0 and json.loads(out)["weight"] == 1.0


class TestIcd:
    def test_diamond_dump(self, tmp_path, capsys):
        path = write(tmp_path, "d.gr", format_graph(fixture_graph("diamond")))
        code, out, _ = run(capsys, "icd", path, "--format", "text")
        lines = out.splitlines()
        assert code == 0
        assert sum(1 for ln in lines if ln.startswith("node ")) == 3
        assert sum(1 for ln in lines if ln.startswith("arc ")) == 2

    def test_c5_dump(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, out, _ = run(capsys, "icd", path, "--format", "text")
        lines = out.splitlines()
        assert code == 0
        assert sum(1 for ln in lines if ln.startswith("node ")) == 10
        assert sum(1 for ln in lines if ln.startswith("arc ")) == 10

    def test_c4_needs_oracle_flag(self, tmp_path, capsys):
        path = write(tmp_path, "c4.gr", format_graph(cycle_graph(4)))
        code, _, err = run(capsys, "icd", path)
        assert code == 3 and "obstruction" in err
        code, out, _ = run(capsys, "icd", path, "--oracle", "--format", "text")
        assert code == 0
        assert sum(1 for ln in out.splitlines() if ln.startswith("node ")) == 8

    def test_dot(self, tmp_path, capsys):
        path = write(tmp_path, "d.gr", format_graph(fixture_graph("diamond")))
        code, out, _ = run(capsys, "icd", path, "--format", "dot")
        assert code == 0 and out.startswith("digraph")


class TestFvsp:
    def test_forest(self, tmp_path, capsys):
        inst = FvspInstance(3, [(0, 1), (0, 2)], [1.0] * 3)
        path = write(tmp_path, "f.fv", format_instance(inst))
        code, out, _ = run(capsys, "fvsp", path)
        assert code == 0 and json.loads(out)["weight"] == 0.0

    def test_st_weight_one(self, tmp_path, capsys):
        path = write(tmp_path, "st.fv", ST_TEXT)
        code, out, _ = run(capsys, "fvsp", path)
        res = json.loads(out)
        assert code == 0 and res["weight"] == 1.0
        assert set(res["stages"]) == {"step1", "step3", "cleanup"}

    def test_invalid_dag_exit_3(self, tmp_path, capsys):
        inst = FvspInstance(4, [(0, 1), (0, 2), (1, 3), (2, 3)], [1.0] * 4)
        path = write(tmp_path, "bad.fv", format_instance(inst))
        code, _, err = run(capsys, "fvsp", path)
        assert code == 3 and "node 3" in err


class TestOracleCommands:
    def test_pd_on_c5(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, out, _ = run(capsys, "oracle", "pd", path)
        assert code == 0 and json.loads(out)["weight"] == 1.0

    def test_hit_on_c4(self, tmp_path, capsys):
        path = write(tmp_path, "c4.gr", format_graph(cycle_graph(4)))
        code, out, _ = run(capsys, "oracle", "hit", path)
        assert code == 0 and json.loads(out)["weight"] == 1.0

    def test_fvsp_oracle(self, tmp_path, capsys):
        path = write(tmp_path, "st.fv", ST_TEXT)
        code, out, _ = run(capsys, "oracle", "fvsp", path)
        assert code == 0 and json.loads(out)["weight"] == 1.0

    def test_budget_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        code, _, _ = run(capsys, "oracle", "pd", path, "--budget", "3")
        assert code == 2


class TestCheck:
    def test_empty_solution_on_c5(self, tmp_path, capsys):
        gpath = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        spath = write(tmp_path, "sol.json", json.dumps({"deleted": []}))
        code, out, _ = run(capsys, "check", gpath, "--solution", spath)
        res = json.loads(out)
        assert code == 0
        assert res["feasible"] is False and res["reason"] == "not ptolemaic"
        assert len(res["witness"]) >= 4

    def test_single_vertex_fixes_c5(self, tmp_path, capsys):
        gpath = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        spath = write(tmp_path, "sol.json", json.dumps({"deleted": [0]}))
        code, out, _ = run(capsys, "check", gpath, "--solution", spath)
        res = json.loads(out)
        assert code == 0 and res["feasible"] is True and res["weight"] == 1.0

    def test_fvsp_check(self, tmp_path, capsys):
        ipath = write(tmp_path, "st.fv", ST_TEXT)
        spath = write(tmp_path, "sol.json", json.dumps({"deleted": [2]}))
        code, out, _ = run(capsys, "check", ipath, "--solution", spath)
        assert code == 0 and json.loads(out)["feasible"] is True
        spath = write(tmp_path, "sol2.json", json.dumps({"deleted": [0]}))
        code, out, _ = run(capsys, "check", ipath, "--solution", spath)
        assert code == 0 and json.loads(out)["feasible"] is False


class TestGen:
    def test_fixture_gem(self, capsys):
        code, out, _ = run(capsys, "gen", "--fixture", "gem")
        assert code == 0
        assert parse_graph(out) == fixture_graph("gem")

    def test_all_fixture_names(self, capsys):
        for name in ["diamond", "gem", "house", "domino", "bull", "dart", "cycle5"]:
            code, out, _ = run(capsys, "gen", "--fixture", name)
            assert code == 0 and parse_graph(out).n >= 3

    def test_unknown_fixture_exit_2(self, capsys):
        code, _, err = run(capsys, "gen", "--fixture", "nonsense")
        assert code == 2 and "unknown fixture" in err

    def test_random_seeded_deterministic(self, capsys):
        code, out1, _ = run(capsys, "gen", "--random", "9", "--p", "0.4", "--seed", "7")
        _, out2, _ = run(capsys, "gen", "--random", "9", "--p", "0.4", "--seed", "7")
        assert code == 0 and out1 == out2
        g = parse_graph(out1)
        assert g.n == 9

    def test_random_with_weights(self, capsys):
        code, out, _ = run(
            capsys, "gen", "--random", "6", "--p", "0.5", "--seed", "3",
            "--weights", "0,10",
        )
        g = parse_graph(out)
        assert code == 0 and any(w != 1.0 for w in g.weights)


class TestSubprocess:
    def test_module_entry_point(self, tmp_path):
        import subprocess
        import sys

        path = write(tmp_path, "c5.gr", format_graph(cycle_graph(5)))
        proc = subprocess.run(
            [sys.executable, "-m", "ptodel.cli", "solve", path],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["weight"] == 1.0

    def test_cross_process_determinism(self, tmp_path):
        import subprocess
        import sys

        g = random_graph(random.Random(9), 9, 0.5, weights=(0.0, 10.0))
        path = write(tmp_path, "g.gr", format_graph(g))
        outs = [
            subprocess.run(
                [sys.executable, "-m", "ptodel.cli", "solve", path],
                capture_output=True,
                text=True,
            ).stdout
            for _ in range(2)
        ]
        assert outs[0] == outs[1] and outs[0]


class TestRoundTrips:
    def test_fixtures_and_random(self):
        graphs = [fixture_graph(n) for n in ["diamond", "gem", "house", "domino", "bull", "dart"]]
        rng = random.Random(71)
        graphs += [
            random_graph(rng, rng.randint(0, 10), 0.4, weights=(0.0, 9.0))
            for _ in range(100)
        ]
        for g in graphs:
            assert parse_graph(format_graph(g)) == g
