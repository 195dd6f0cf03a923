"""Tests for the bvx command line."""

import csv
import io
import json

import pytest

from bvx.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main

K4_TEXT = "p 4 6\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\nc 0 5\nc 2 2\nc 3 3\ns 0\n"
PATH_TEXT = "p 5 4\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ns 0 4\n"


@pytest.fixture
def k4_file(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text(K4_TEXT)
    return str(path)


@pytest.fixture
def path_file(tmp_path):
    path = tmp_path / "path.txt"
    path.write_text(PATH_TEXT)
    return str(path)


class TestSolveCommand:
    """Test `bvx solve`."""

    def test_text_output(self, k4_file, capsys):
        """The summary names the best vertex and load."""
        assert main(["solve", "--graph", k4_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert "best vertex: 3" in out
        assert "best load:   8" in out
        assert "certified:   yes" in out

    def test_json_output(self, k4_file, capsys):
        """--json prints a SolveResponse document."""
        assert main(["solve", "--graph", k4_file, "--json", "--algorithm", "brute"]) == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert body["best_vertex"] == 3
        assert body["algorithm"] == "brute"

    def test_csv_file(self, k4_file, tmp_path, capsys):
        """--csv writes the per-site load table."""
        target = tmp_path / "loads.csv"
        assert main(["solve", "--graph", k4_file, "--csv", str(target)]) == EXIT_OK
        rows = list(csv.reader(io.StringIO(target.read_text())))
        assert rows[0][:3] == ["priority", "site", "load"]
        assert [row[1] for row in rows[1:]] == ["0", "3"]

    def test_sites_override(self, path_file, capsys):
        """--sites replaces the file's site line."""
        assert main(["solve", "--graph", path_file, "--sites", "2", "--json"]) == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert body["site_loads"][0]["site"] == 2

    def test_missing_file(self, tmp_path, capsys):
        """Unreadable input exits with 1."""
        assert main(["solve", "--graph", str(tmp_path / "nope.txt")]) == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path, capsys):
        """Parse errors exit with 1 and name the line."""
        bad = tmp_path / "bad.txt"
        bad.write_text("p 2 1\ne 0 x\n")
        assert main(["solve", "--graph", str(bad)]) == EXIT_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_non_utf8_file(self, tmp_path, capsys):
        """Undecodable bytes exit with 1."""
        bad = tmp_path / "latin.txt"
        bad.write_bytes(b"p 2 1\ne 0 1\n# caf\xe9\ns 0\n")
        assert main(["solve", "--graph", str(bad)]) == EXIT_INPUT
        assert "utf-8" in capsys.readouterr().err

    def test_wrong_class(self, path_file, capsys):
        """A class solver refusing the graph exits with 2."""
        assert main(["solve", "--graph", path_file, "--algorithm", "clique"]) == EXIT_FAILED
        assert "not complete" in capsys.readouterr().err


class TestVoronoiCommand:
    """Test `bvx voronoi`."""

    def test_text_output(self, path_file, capsys):
        """Each site's load is listed with the maximum."""
        assert main(["voronoi", "--graph", path_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert "site 0: load 3" in out
        assert "site 4: load 2" in out
        assert "max load 3 of total 5" in out

    def test_json_output(self, path_file, capsys):
        """--json prints owners per vertex."""
        assert main(["voronoi", "--graph", path_file, "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["owner"] == [0, 0, 0, 4, 4]


class TestValidateCommand:
    """Test `bvx validate`."""

    def test_passes(self, k4_file, capsys):
        """A well-formed instance passes every check."""
        assert main(["validate", "--graph", k4_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "ok   partition" in out

    def test_json_report(self, k4_file, capsys):
        """--json prints the check list."""
        assert main(["validate", "--graph", k4_file, "--json"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["n"] == 4
        assert all(check["passed"] for check in report["checks"])


class TestGenCommands:
    """Test `bvx gen` and `bvx gen-hs`."""

    def test_gen_then_solve(self, tmp_path, capsys):
        """Generated files are readable by solve."""
        target = tmp_path / "tree.txt"
        assert main(["gen", "tree", "--n", "30", "--seed", "3", "--out", str(target)]) == EXIT_OK
        assert target.read_text().startswith("# tree n=30 seed=3")
        assert main(["solve", "--graph", str(target), "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["certified"] is True

    def test_gen_partial_ktree_with_td(self, tmp_path, capsys):
        """partial-ktree writes its decomposition, which validate accepts."""
        graph = tmp_path / "g.txt"
        td = tmp_path / "g.td"
        args = ["gen", "partial-ktree", "--n", "25", "--k", "2", "--out", str(graph), "--td-out", str(td)]
        assert main(args) == EXIT_OK
        assert td.read_text().startswith("s td ")
        assert main(["validate", "--graph", str(graph), "--td", str(td)]) == EXIT_OK
        assert main(["solve", "--graph", str(graph), "--td", str(td), "--algorithm", "treewidth"]) == EXIT_OK

    def test_td_out_needs_partial_ktree(self, tmp_path, capsys):
        """Other classes have no decomposition to write."""
        args = ["gen", "tree", "--n", "10", "--out", str(tmp_path / "t.txt"), "--td-out", str(tmp_path / "t.td")]
        assert main(args) == EXIT_INPUT

    def test_gen_hs_verify(self, tmp_path, capsys):
        """The hardness graph agrees with the hitting-set answer."""
        hs = tmp_path / "hs.json"
        hs.write_text(json.dumps({"universe": [1, 2, 3], "A": [[1], [2, 3]], "B": [[2], [3, 1]]}))
        out = tmp_path / "hard.txt"
        reduced = tmp_path / "reduced.json"
        args = ["gen-hs", "--hs", str(hs), "--out", str(out), "--hs-out", str(reduced), "--verify"]
        assert main(args) == EXIT_OK
        err = capsys.readouterr().err
        summary, _ = json.JSONDecoder().raw_decode(err[err.index("{"):])
        assert summary["hitting_set"] is True
        assert summary["agrees"] is True
        assert out.read_text().startswith("# hardness graph:")
        assert set(json.loads(reduced.read_text())) == {"universe", "A", "B"}

    def test_gen_hs_bad_json(self, tmp_path, capsys):
        """Malformed HS documents exit with 1."""
        hs = tmp_path / "hs.json"
        hs.write_text('{"universe": [1]}')
        assert main(["gen-hs", "--hs", str(hs), "--out", str(tmp_path / "x.txt")]) == EXIT_INPUT


class TestBenchCommand:
    """Test `bvx bench`."""

    def test_no_suites(self, capsys):
        """Without suites only the header is printed."""
        assert main(["bench"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "suite,solver,n,m,sites,seconds,ratio,best_load"

    def test_small_ladder(self, tmp_path, capsys):
        """A short ladder writes one row per solver and size."""
        target = tmp_path / "bench.csv"
        args = ["bench", "--suite", "cycle", "--sizes", "8,16", "--csv", str(target)]
        assert main(args) == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(target.read_text())))
        assert [(r["solver"], r["n"]) for r in rows] == [
            ("cycle", "8"),
            ("cycle", "16"),
            ("brute", "8"),
            ("brute", "16"),
        ]
