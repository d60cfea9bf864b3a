import json
import threading

import pytest

from ecst import LanguageId, parse
from ecst.errors import StoreError, XmlLoadError
from ecst.frontends import ParsedFile
from ecst.persistence import (diff_snapshots, ecst_to_xml, load_snapshot,
                              save_snapshot, xml_language, xml_to_ecst)

from conftest import parse_pair
from corpus import PAIRS

LANG_K = LanguageId.LANG_K
LANG_C = LanguageId.LANG_C


def pf(path, source, lang=LANG_K):
    return ParsedFile(path=path, lang=lang, source=source,
                      tree=parse(source, lang, path))


REV_1 = """\
MODULE App;
PROCEDURE f(x);
  WHILE x > 0 DO
    x := x - 1;
  END;
END f;
PROCEDURE g(x);
  RETURN x;
END g;
END App.
"""

# one IF added to f, g deleted
REV_2 = """\
MODULE App;
PROCEDURE f(x);
  IF x > 100 THEN
    x := 100;
  END;
  WHILE x > 0 DO
    x := x - 1;
  END;
END f;
END App.
"""


class TestXmlFormat:
    def test_root_and_first_element(self):
        tree = parse("MODULE M; END M.", LANG_K, "m.mod")
        text = ecst_to_xml(tree, LANG_K).decode("utf-8")
        lines = text.splitlines()
        assert lines[0] == '<?xml version="1.0" encoding="UTF-8"?>'
        assert lines[1] == '<ecst version="1" lang="LANG_K" file="m.mod">'
        assert lines[2] == '  <node kind="COMPILATION_UNIT">'

    def test_do_while_polarity_attribute(self):
        _, c_tree = parse_pair(PAIRS[0])
        text = ecst_to_xml(c_tree, LANG_C).decode("utf-8")
        assert '<node kind="LOOP_STATEMENT">' in text
        assert '<node kind="CONDITION" polarity="CONTINUE_WHEN_TRUE">' in text

    def test_operator_token_is_escaped(self):
        k_tree, _ = parse_pair(PAIRS[0])
        text = ecst_to_xml(k_tree, LANG_K).decode("utf-8")
        assert 'text="&gt;"' in text
        assert 'text=">"' not in text

    def test_serialization_is_deterministic(self, parsed_pairs):
        for pair, k_tree, c_tree in parsed_pairs:
            assert ecst_to_xml(k_tree, LANG_K) == ecst_to_xml(k_tree, LANG_K)
            assert ecst_to_xml(c_tree, LANG_C) == ecst_to_xml(c_tree, LANG_C)

    def test_tokenless_nodes_carry_their_span(self):
        source = "MODULE M;\nPROCEDURE f();\nEND f;\nEND M.\n"
        tree = parse(source, LANG_K, "m.mod")
        text = ecst_to_xml(tree, LANG_K).decode("utf-8")
        # the empty body block cannot derive a span from a token
        assert '<node kind="STATEMENT_BLOCK" line="3" col="1"/>' in text


class TestRoundTrip:
    def test_corpus_round_trips_structurally(self, parsed_pairs):
        for pair, k_tree, c_tree in parsed_pairs:
            for tree, lang in ((k_tree, LANG_K), (c_tree, LANG_C)):
                doc = ecst_to_xml(tree, lang)
                assert xml_to_ecst(doc) == tree
                assert xml_language(doc) is lang

    def test_empty_procedure_round_trips(self):
        tree = parse("MODULE M;\nPROCEDURE f();\nEND f;\nEND M.\n",
                     LANG_K, "m.mod")
        assert xml_to_ecst(ecst_to_xml(tree, LANG_K)) == tree

    def test_wrong_version_rejected(self):
        doc = ecst_to_xml(parse("MODULE M; END M.", LANG_K, "m.mod"), LANG_K)
        tampered = doc.replace(b'version="1"', b'version="2"')
        with pytest.raises(XmlLoadError, match="version"):
            xml_to_ecst(tampered)

    def test_unknown_kind_rejected(self):
        doc = ecst_to_xml(parse("MODULE M; END M.", LANG_K, "m.mod"), LANG_K)
        tampered = doc.replace(b'kind="COMPILATION_UNIT"', b'kind="WHILE_LOOP"')
        with pytest.raises(XmlLoadError, match="WHILE_LOOP"):
            xml_to_ecst(tampered)

    def test_malformed_xml_rejected(self):
        with pytest.raises(XmlLoadError, match="malformed"):
            xml_to_ecst(b"<ecst version=\"1\"")

    def test_token_with_children_rejected(self):
        doc = (b'<?xml version="1.0" encoding="UTF-8"?>\n'
               b'<ecst version="1" lang="LANG_K" file="m.mod">\n'
               b'  <node kind="COMPILATION_UNIT">\n'
               b'    <token text="MODULE" line="1" col="1">\n'
               b'      <token text="M" line="1" col="8"/>\n'
               b'    </token>\n'
               b'  </node>\n'
               b'</ecst>\n')
        with pytest.raises(XmlLoadError, match="children"):
            xml_to_ecst(doc)

    def test_bad_span_rejected(self):
        doc = ecst_to_xml(parse("MODULE M; END M.", LANG_K, "m.mod"), LANG_K)
        tampered = doc.replace(b'line="1" col="1"', b'line="0" col="1"', 1)
        with pytest.raises(XmlLoadError, match="invalid token"):
            xml_to_ecst(tampered)

    def test_error_carries_location(self):
        doc = ecst_to_xml(parse("MODULE M; END M.", LANG_K, "m.mod"), LANG_K)
        tampered = doc.replace(b'kind="UNIT_NAME"', b'kind="UNIT_NAMES"')
        with pytest.raises(XmlLoadError, match="line"):
            xml_to_ecst(tampered)


class TestStore:
    def test_save_creates_layout(self, tmp_path):
        store = tmp_path / "store"
        snap = save_snapshot(store, "v1", [pf("app.mod", REV_1)])
        index = json.loads((store / "index.json").read_text())
        assert list(index["labels"]) == ["v1"]
        assert (store / "snapshots" / "v1" / "metrics.json").exists()
        assert (store / "snapshots" / "v1" / "app.mod.ecst.xml").exists()
        assert snap.label == "v1"
        assert snap.tree_files[0][0] == "app.mod"

    def test_unwritable_store(self, tmp_path):
        blocker = tmp_path / "store"
        blocker.write_text("not a directory", encoding="utf-8")
        with pytest.raises(StoreError, match="not writable"):
            save_snapshot(blocker, "v1", [pf("app.mod", REV_1)])

    def test_duplicate_label_rejected(self, tmp_path):
        store = tmp_path / "store"
        save_snapshot(store, "v1", [pf("app.mod", REV_1)])
        with pytest.raises(StoreError, match="already exists"):
            save_snapshot(store, "v1", [pf("app.mod", REV_1)])

    def test_reload_round_trips_report(self, tmp_path):
        store = tmp_path / "store"
        saved = save_snapshot(store, "v1", [pf("app.mod", REV_1)])
        loaded = load_snapshot(store, "v1")
        assert loaded.report == saved.report
        assert loaded.timestamp == saved.timestamp
        assert [src for src, _ in loaded.tree_files] == ["app.mod"]

    def test_unknown_label(self, tmp_path):
        store = tmp_path / "store"
        save_snapshot(store, "v1", [pf("app.mod", REV_1)])
        with pytest.raises(StoreError, match="unknown"):
            load_snapshot(store, "nope")

    def test_same_basename_twice_disambiguated(self, tmp_path):
        store = tmp_path / "store"
        other = "MODULE Other;\nPROCEDURE h(); x := 1; END h;\nEND Other.\n"
        files = [pf("a/App.mod", REV_1), pf("b/App.mod", other)]
        snap = save_snapshot(store, "v1", files)
        names = sorted(p.split("/")[-1] for _, p in snap.tree_files)
        assert names == ["App.mod.2.ecst.xml", "App.mod.ecst.xml"]

    def test_concurrent_saves_serialize(self, tmp_path):
        store = tmp_path / "store"
        errors = []

        def worker(label):
            try:
                save_snapshot(store, label, [pf("app.mod", REV_1)])
            except Exception as exc:  # pragma: no cover - failure reporting
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(f"v{i}",))
                   for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        index = json.loads((store / "index.json").read_text())
        assert sorted(index["labels"]) == ["v0", "v1", "v2", "v3"]


class TestDiff:
    def _store(self, tmp_path):
        store = tmp_path / "store"
        save_snapshot(store, "v1", [pf("app.mod", REV_1)])
        save_snapshot(store, "v2", [pf("app.mod", REV_2)])
        return store

    def test_identity_diff_is_empty(self, tmp_path):
        store = self._store(tmp_path)
        diff = diff_snapshots(store, "v1", "v1")
        assert diff.empty

    def test_added_if_and_removed_function(self, tmp_path):
        store = self._store(tmp_path)
        diff = diff_snapshots(store, "v1", "v2")
        assert diff.changed == ((("App", "f"), 2, 3),)
        assert diff.removed == (("App", "g"),)
        assert diff.added == ()

    def test_antisymmetry(self, tmp_path):
        store = self._store(tmp_path)
        forward = diff_snapshots(store, "v1", "v2")
        backward = diff_snapshots(store, "v2", "v1")
        assert set(forward.added) == set(backward.removed)
        assert set(forward.removed) == set(backward.added)
        assert {(k, b, a) for k, a, b in forward.changed} == set(backward.changed)

    def test_unknown_label_rejected(self, tmp_path):
        store = self._store(tmp_path)
        with pytest.raises(StoreError, match="unknown"):
            diff_snapshots(store, "v1", "v9")
