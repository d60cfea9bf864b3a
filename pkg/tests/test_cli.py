import json
import re

import pytest

from ecst.cli import main

from corpus import PAIRS


@pytest.fixture
def demo(tmp_path):
    """One corpus pair written to disk, different unit names per file."""
    k_path = tmp_path / "Range.mod"
    k_path.write_text(PAIRS[1].k_source, encoding="utf-8")
    c_path = tmp_path / "Pipeline.cls"
    c_path.write_text(PAIRS[4].c_source, encoding="utf-8")
    return k_path, c_path


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestMetricsCommand:
    def test_json_report(self, demo, capsys):
        k_path, c_path = demo
        code, out, err = run(capsys, ["metrics", str(k_path), str(c_path),
                                      "--format", "json"])
        assert code == 0
        report = json.loads(out)
        cc = {f["function"]: f["cc"] for f in report["functions"]}
        assert cc == {"clamp": 3, "sign": 3, "load": 1, "step": 1, "run": 2}
        assert len(report["files"]) == 2

    def test_table_is_default(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["metrics", str(k_path)])
        assert code == 0
        assert "FUNCTIONS" in out and "FILES" in out
        assert re.search(r"clamp\s+3", out)

    def test_csv_sections(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["metrics", str(k_path), "--format", "csv"])
        assert code == 0
        assert out.startswith("# functions\n")
        assert "unit,function,cc,statements" in out
        assert "Range,clamp,3" in out
        assert "# files" in out

    def test_missing_file(self, capsys):
        code, out, err = run(capsys, ["metrics", "missing.mod"])
        assert code == 1
        assert "missing.mod" in err

    def test_parse_error_diagnostic_format(self, tmp_path, capsys):
        bad = tmp_path / "bad.mod"
        bad.write_text("MODULE M\nEND M.", encoding="utf-8")
        code, out, err = run(capsys, ["metrics", str(bad)])
        assert code == 1
        assert re.match(rf"{re.escape(str(bad))}:\d+:\d+: ", err)

    def test_output_is_byte_stable(self, demo, capsys):
        k_path, c_path = demo
        argv = ["metrics", str(k_path), str(c_path), "--format", "json"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second

    def test_out_file(self, demo, tmp_path, capsys):
        k_path, _ = demo
        target = tmp_path / "report.csv"
        code, out, _ = run(capsys, ["metrics", str(k_path), "--format", "csv",
                                    "--out", str(target)])
        assert code == 0
        assert out == ""
        assert "Range,clamp" in target.read_text()

    def test_figures_written_alongside(self, demo, tmp_path, capsys):
        k_path, _ = demo
        figdir = tmp_path / "figs"
        code, out, err = run(capsys, ["metrics", str(k_path), "--format", "csv",
                                      "--figures", str(figdir)])
        assert code == 0
        assert (figdir / "complexity.png").exists()
        assert (figdir / "loc.png").exists()
        assert "complexity.png" in err

    def test_lang_override(self, tmp_path, capsys):
        odd = tmp_path / "program.txt"
        odd.write_text(PAIRS[0].k_source, encoding="utf-8")
        code, _, err = run(capsys, ["metrics", str(odd)])
        assert code == 1
        assert "--lang" in err
        code, out, _ = run(capsys, ["metrics", str(odd), "--lang", "k",
                                    "--format", "json"])
        assert code == 0
        assert {f["function"] for f in json.loads(out)["functions"]} == \
            {"spin", "hold"}


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        assert main(["bogus"]) == 2

    def test_dot_not_valid_for_metrics(self, demo, capsys):
        k_path, _ = demo
        code, _, err = run(capsys, ["metrics", str(k_path), "--format", "dot"])
        assert code == 2
        assert "not supported" in err

    def test_cfg_requires_function(self, demo, capsys):
        k_path, _ = demo
        assert main(["cfg", str(k_path)]) == 2

    def test_no_arguments(self, capsys):
        assert main([]) == 2


class TestCallgraphCommand:
    def test_dot_output(self, tmp_path, capsys):
        src = ("MODULE M;\nPROCEDURE A();\n  B();\nEND A;\n"
               "PROCEDURE B();\n  x := 1;\nEND B;\nEND M.\n")
        path = tmp_path / "m.mod"
        path.write_text(src, encoding="utf-8")
        code, out, _ = run(capsys, ["callgraph", str(path), "--format", "dot"])
        assert code == 0
        assert '"M.B" -> "M.A";' in out

    def test_conventional_inverts(self, tmp_path, capsys):
        src = ("MODULE M;\nPROCEDURE A();\n  B();\nEND A;\n"
               "PROCEDURE B();\n  x := 1;\nEND B;\nEND M.\n")
        path = tmp_path / "m.mod"
        path.write_text(src, encoding="utf-8")
        code, out, _ = run(capsys, ["callgraph", str(path), "--format", "dot",
                                    "--conventional"])
        assert code == 0
        assert '"M.A" -> "M.B";' in out

    def test_json_nodes_and_edges(self, tmp_path, capsys):
        src = ("MODULE M;\nPROCEDURE A();\n  log(1);\nEND A;\nEND M.\n")
        path = tmp_path / "m.mod"
        path.write_text(src, encoding="utf-8")
        code, out, _ = run(capsys, ["callgraph", str(path), "--format", "json"])
        data = json.loads(out)
        assert {n["id"] for n in data["nodes"]} == {"M.A", "extern:log"}
        assert data["edges"][0]["from"] == "extern:log"
        assert data["edges"][0]["to"] == "M.A"


class TestCfgCommand:
    def test_dot_with_basis_paths(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["cfg", str(k_path), "--function", "clamp",
                                    "--format", "dot", "--basis-paths"])
        assert code == 0
        assert out.startswith("digraph cfg {")
        paths = [l for l in out.splitlines() if l.startswith("// basis path")]
        assert len(paths) == 3  # equals the function's complexity

    def test_table_shows_cc(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["cfg", str(k_path), "--function", "sign"])
        assert code == 0
        assert "CFG Range.sign  (cc = 3)" in out

    def test_qualified_name(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["cfg", str(k_path),
                                    "--function", "Range.clamp",
                                    "--format", "json"])
        assert code == 0
        assert json.loads(out)["cc"] == 3

    def test_unknown_function(self, demo, capsys):
        k_path, _ = demo
        code, _, err = run(capsys, ["cfg", str(k_path), "--function", "nope"])
        assert code == 1
        assert "nope" in err


class TestSnapshotCommands:
    REV_1 = ("MODULE App;\nPROCEDURE f(x);\n  WHILE x > 0 DO\n"
             "    x := x - 1;\n  END;\nEND f;\n"
             "PROCEDURE g(x);\n  RETURN x;\nEND g;\nEND App.\n")
    REV_2 = ("MODULE App;\nPROCEDURE f(x);\n  IF x > 100 THEN\n"
             "    x := 100;\n  END;\n  WHILE x > 0 DO\n"
             "    x := x - 1;\n  END;\nEND f;\nEND App.\n")

    def _write(self, tmp_path, text):
        path = tmp_path / "App.mod"
        path.write_text(text, encoding="utf-8")
        return path

    def test_save_and_diff_flow(self, tmp_path, capsys):
        store = tmp_path / "store"
        path = self._write(tmp_path, self.REV_1)
        code, out, _ = run(capsys, ["snapshot-save", str(path),
                                    "--store", str(store), "--label", "v1"])
        assert code == 0
        assert "saved snapshot 'v1'" in out
        self._write(tmp_path, self.REV_2)
        code, _, _ = run(capsys, ["snapshot-save", str(path),
                                  "--store", str(store), "--label", "v2"])
        assert code == 0
        code, out, _ = run(capsys, ["snapshot-diff", "v1", "v2",
                                    "--store", str(store), "--format", "json"])
        assert code == 0
        diff = json.loads(out)
        assert diff["changed"] == [{"function": "App.f",
                                    "cc_before": 2, "cc_after": 3}]
        assert diff["removed"] == ["App.g"]
        assert diff["added"] == []

    def test_duplicate_label_exits_one(self, tmp_path, capsys):
        store = tmp_path / "store"
        path = self._write(tmp_path, self.REV_1)
        assert main(["snapshot-save", str(path), "--store", str(store),
                     "--label", "v1"]) == 0
        capsys.readouterr()
        code, _, err = run(capsys, ["snapshot-save", str(path),
                                    "--store", str(store), "--label", "v1"])
        assert code == 1
        assert "already exists" in err

    def test_store_from_environment(self, tmp_path, capsys, monkeypatch):
        store = tmp_path / "envstore"
        monkeypatch.setenv("ECST_STORE", str(store))
        path = self._write(tmp_path, self.REV_1)
        code, _, _ = run(capsys, ["snapshot-save", str(path), "--label", "v1"])
        assert code == 0
        assert (store / "index.json").exists()

    def test_missing_store_is_usage_error(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("ECST_STORE", raising=False)
        path = self._write(tmp_path, self.REV_1)
        code, _, err = run(capsys, ["snapshot-save", str(path),
                                    "--label", "v1"])
        assert code == 2
        assert "ECST_STORE" in err

    def test_diff_table_and_figures(self, tmp_path, capsys):
        store = tmp_path / "store"
        path = self._write(tmp_path, self.REV_1)
        main(["snapshot-save", str(path), "--store", str(store),
              "--label", "v1"])
        self._write(tmp_path, self.REV_2)
        main(["snapshot-save", str(path), "--store", str(store),
              "--label", "v2"])
        capsys.readouterr()
        figdir = tmp_path / "figs"
        code, out, err = run(capsys, ["snapshot-diff", "v1", "v2",
                                      "--store", str(store),
                                      "--figures", str(figdir)])
        assert code == 0
        assert "App.f: cc 2 -> 3" in out
        assert (figdir / "diff.png").exists()


class TestParseCommand:
    def test_table_dump(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["parse", str(k_path)])
        assert code == 0
        assert out.startswith(f"== {k_path} (LANG_K)")
        assert "COMPILATION_UNIT" in out
        assert "'MODULE' @1:1" in out

    def test_json_tree(self, demo, capsys):
        k_path, _ = demo
        code, out, _ = run(capsys, ["parse", str(k_path), "--format", "json"])
        assert code == 0
        tree = json.loads(out)["files"][0]["tree"]
        assert tree["kind"] == "COMPILATION_UNIT"

    def test_csv_rejected(self, demo, capsys):
        k_path, _ = demo
        code, _, err = run(capsys, ["parse", str(k_path), "--format", "csv"])
        assert code == 2
