"""Tree persistence and metric history.

Trees are stored as XML whose element structure mirrors the tree: one
element per node, universal nodes as <node kind="...">, tokens as
<token text="..." line="N" col="N"/>.  Serialization is byte-deterministic
and round-trips structurally, spans included: the source path lives once on
the root element, and a universal node carries explicit line/col attributes
only when its subtree holds no token to derive them from.

A snapshot store keeps labelled revisions of metrics plus the serialized
trees, so later revisions can be diffed without re-parsing old sources.
"""

from __future__ import annotations

import json
import os
import time
import xml.parsers.expat
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from filelock import FileLock

from .errors import StoreError, TreeError, XmlLoadError
from .frontends import LanguageId, ParsedFile
from .metrics import MetricsReport, unit_report
from .tree import (ConditionPolarity, EcstNode, SourceSpan, UniversalKind,
                   make_universal, token)

XML_VERSION = "1"


def _escape(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _has_token(node: EcstNode) -> bool:
    return any(True for _ in node.tokens())


def _write_node(node: EcstNode, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if node.is_token:
        lines.append(f'{pad}<token text="{_escape(node.text)}" '
                     f'line="{node.span.line}" col="{node.span.column}"/>')
        return
    attrs = f'kind="{node.kind.value}"'
    if node.polarity is not None:
        attrs += f' polarity="{node.polarity.value}"'
    if not _has_token(node):
        attrs += f' line="{node.span.line}" col="{node.span.column}"'
    if not node.children:
        lines.append(f"{pad}<node {attrs}/>")
        return
    lines.append(f"{pad}<node {attrs}>")
    for child in node.children:
        _write_node(child, depth + 1, lines)
    lines.append(f"{pad}</node>")


def ecst_to_xml(tree: EcstNode, lang: LanguageId) -> bytes:
    """Serialize a COMPILATION_UNIT tree to deterministic UTF-8 XML."""
    if tree.kind is not UniversalKind.COMPILATION_UNIT:
        raise TreeError(f"XML root must be a COMPILATION_UNIT, got {tree!r}")
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<ecst version="{XML_VERSION}" lang="{lang.value}" '
             f'file="{_escape(tree.span.file)}">']
    _write_node(tree, 1, lines)
    lines.append("</ecst>")
    return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass
class _XmlElement:
    tag: str
    attrs: dict[str, str]
    line: int
    column: int
    children: list["_XmlElement"]

    def where(self) -> str:
        return f"line {self.line}, column {self.column}"


def _parse_document(doc: bytes) -> _XmlElement:
    parser = xml.parsers.expat.ParserCreate("UTF-8")
    root: list[_XmlElement] = []
    stack: list[_XmlElement] = []

    def start(tag: str, attrs: dict[str, str]) -> None:
        elem = _XmlElement(tag, attrs, parser.CurrentLineNumber,
                           parser.CurrentColumnNumber + 1, [])
        if stack:
            stack[-1].children.append(elem)
        else:
            root.append(elem)
        stack.append(elem)

    parser.StartElementHandler = start
    parser.EndElementHandler = lambda tag: stack.pop()
    try:
        parser.Parse(doc, True)
    except xml.parsers.expat.ExpatError as exc:
        raise XmlLoadError(f"malformed XML: {exc}") from exc
    if not root:
        raise XmlLoadError("malformed XML: empty document")
    return root[0]


def _attr(elem: _XmlElement, name: str) -> str:
    if name not in elem.attrs:
        raise XmlLoadError(
            f"<{elem.tag}> missing attribute {name!r} at {elem.where()}")
    return elem.attrs[name]


def _int_attr(elem: _XmlElement, name: str) -> int:
    raw = _attr(elem, name)
    try:
        return int(raw)
    except ValueError:
        raise XmlLoadError(f"<{elem.tag}> attribute {name}={raw!r} is not an "
                           f"integer at {elem.where()}") from None


def _element_to_node(elem: _XmlElement, file: str) -> EcstNode:
    if elem.tag == "token":
        if elem.children:
            raise XmlLoadError(f"<token> cannot have children at {elem.where()}")
        try:
            span = SourceSpan(file, _int_attr(elem, "line"),
                              _int_attr(elem, "col"))
            return token(_attr(elem, "text"), span)
        except TreeError as exc:
            raise XmlLoadError(f"invalid token at {elem.where()}: {exc}") from exc
    if elem.tag != "node":
        raise XmlLoadError(f"unexpected element <{elem.tag}> at {elem.where()}")
    raw_kind = _attr(elem, "kind")
    try:
        kind = UniversalKind(raw_kind)
    except ValueError:
        raise XmlLoadError(
            f"unknown kind {raw_kind!r} at {elem.where()}") from None
    polarity = None
    if "polarity" in elem.attrs:
        try:
            polarity = ConditionPolarity(elem.attrs["polarity"])
        except ValueError:
            raise XmlLoadError(f"unknown polarity "
                               f"{elem.attrs['polarity']!r} at {elem.where()}") from None
    span = None
    if "line" in elem.attrs or "col" in elem.attrs:
        span = SourceSpan(file, _int_attr(elem, "line"), _int_attr(elem, "col"))
    children = [_element_to_node(c, file) for c in elem.children]
    try:
        return make_universal(kind, children, polarity=polarity, span=span)
    except TreeError as exc:
        raise XmlLoadError(f"invalid tree at {elem.where()}: {exc}") from exc


def xml_to_ecst(doc: bytes) -> EcstNode:
    """Load a tree serialized by ecst_to_xml; the structural inverse."""
    root = _parse_document(doc)
    if root.tag != "ecst":
        raise XmlLoadError(f"expected <ecst> root, got <{root.tag}> "
                           f"at {root.where()}")
    version = _attr(root, "version")
    if version != XML_VERSION:
        raise XmlLoadError(f"unsupported version {version!r} at {root.where()}"
                           f" (this reader handles version {XML_VERSION})")
    try:
        LanguageId(_attr(root, "lang"))
    except ValueError:
        raise XmlLoadError(f"unknown lang {root.attrs['lang']!r} "
                           f"at {root.where()}") from None
    file = _attr(root, "file")
    if len(root.children) != 1:
        raise XmlLoadError("expected exactly one tree under <ecst> "
                           f"at {root.where()}")
    tree = _element_to_node(root.children[0], file)
    if tree.kind is not UniversalKind.COMPILATION_UNIT:
        raise XmlLoadError("document root node is not a COMPILATION_UNIT")
    return tree


def xml_language(doc: bytes) -> LanguageId:
    """Language recorded in a serialized tree document."""
    root = _parse_document(doc)
    return LanguageId(_attr(root, "lang"))


# -- snapshot store ---------------------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    """One saved revision: metrics plus serialized trees under a label."""

    label: str
    timestamp: int
    report: MetricsReport
    tree_files: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class SnapshotDiff:
    """Function-level changes between two snapshots, keyed (unit, name)."""

    added: tuple[tuple[str, str], ...]
    removed: tuple[tuple[str, str], ...]
    changed: tuple[tuple[tuple[str, str], int, int], ...]

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.changed)

    def to_dict(self) -> dict:
        return {
            "added": [f"{u}.{n}" for u, n in self.added],
            "removed": [f"{u}.{n}" for u, n in self.removed],
            "changed": [{"function": f"{u}.{n}", "cc_before": b, "cc_after": a}
                        for (u, n), b, a in self.changed],
        }


def _index_path(store: Path) -> Path:
    return store / "index.json"


def _read_index(store: Path) -> dict[str, int]:
    path = _index_path(store)
    if not path.exists():
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StoreError(f"corrupt store index {path}: {exc}") from exc
    return dict(data.get("labels", {}))


def _write_index(store: Path, labels: dict[str, int]) -> None:
    payload = json.dumps({"labels": dict(sorted(labels.items()))}, indent=2)
    _index_path(store).write_text(payload + "\n", encoding="utf-8")


def save_snapshot(store: str | Path, label: str,
                  files: Sequence[ParsedFile]) -> Snapshot:
    """Persist metrics and trees for ``files`` under a fresh label.

    Saves are serialized through a store-level lock file; a label can be
    written once and never overwritten.
    """
    store = Path(store)
    try:
        store.mkdir(parents=True, exist_ok=True)
        with FileLock(str(store / ".lock")):
            labels = _read_index(store)
            if label in labels:
                raise StoreError(f"label {label!r} already exists in {store}")
            report = unit_report(files)
            snapdir = store / "snapshots" / label
            snapdir.mkdir(parents=True, exist_ok=True)
            (snapdir / "metrics.json").write_text(
                json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
            tree_files = []
            used: set[str] = set()
            for pf in files:
                base = os.path.basename(pf.path)
                name = f"{base}.ecst.xml"
                serial = 2
                while name in used:
                    name = f"{base}.{serial}.ecst.xml"
                    serial += 1
                used.add(name)
                (snapdir / name).write_bytes(ecst_to_xml(pf.tree, pf.lang))
                tree_files.append((pf.path, str(snapdir / name)))
            timestamp = int(time.time())
            labels[label] = timestamp
            _write_index(store, labels)
    except OSError as exc:
        raise StoreError(f"store {store} is not writable: {exc}") from exc
    return Snapshot(label=label, timestamp=timestamp, report=report,
                    tree_files=tuple(tree_files))


def load_snapshot(store: str | Path, label: str) -> Snapshot:
    """Read one snapshot back, source paths recovered from the XML roots."""
    store = Path(store)
    labels = _read_index(store)
    if label not in labels:
        raise StoreError(f"unknown snapshot label {label!r} in {store}")
    snapdir = store / "snapshots" / label
    metrics_path = snapdir / "metrics.json"
    try:
        report = MetricsReport.from_dict(
            json.loads(metrics_path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise StoreError(f"cannot load {metrics_path}: {exc}") from exc
    tree_files = []
    for xml_path in sorted(snapdir.glob("*.ecst.xml")):
        source = _parse_document(xml_path.read_bytes()).attrs.get("file", "")
        tree_files.append((source, str(xml_path)))
    return Snapshot(label=label, timestamp=labels[label], report=report,
                    tree_files=tuple(tree_files))


def diff_snapshots(store: str | Path, label_a: str, label_b: str) -> SnapshotDiff:
    """Function-level metric changes from snapshot a to snapshot b."""
    before = {(f.unit, f.function): f.cc
              for f in load_snapshot(store, label_a).report.functions}
    after = {(f.unit, f.function): f.cc
             for f in load_snapshot(store, label_b).report.functions}
    added = tuple(sorted(k for k in after if k not in before))
    removed = tuple(sorted(k for k in before if k not in after))
    changed = tuple((k, before[k], after[k])
                    for k in sorted(before)
                    if k in after and before[k] != after[k])
    return SnapshotDiff(added=added, removed=removed, changed=changed)
