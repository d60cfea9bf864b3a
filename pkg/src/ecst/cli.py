"""Command-line entry point tying the frontends and analyses together.

Exit codes: 0 on success, 1 for parse/analysis errors (diagnostics on
stderr with file:line:col), 2 for usage errors.  All output formats are
byte-stable for identical inputs; input files are parsed concurrently and
merged in sorted path order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import callgraph as cg
from . import cfg as cfgmod
from . import persistence
from .errors import AnalysisError, EcstError
from .frontends import LanguageId, ParsedFile, parse_file
from .metrics import MetricsReport, unit_report
from .tree import EcstNode

_LANG_FLAGS = {"k": LanguageId.LANG_K, "c": LanguageId.LANG_C}


class UsageError(Exception):
    """Command-line misuse detected after argument parsing."""

_FORMATS = {
    "parse": ("table", "json"),
    "metrics": ("table", "json", "csv"),
    "callgraph": ("table", "json", "csv", "dot"),
    "cfg": ("table", "json", "csv", "dot"),
    "snapshot-save": ("table", "json"),
    "snapshot-diff": ("table", "json", "csv"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecst",
        description="Static analysis over enriched concrete syntax trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, inputs=True):
        if inputs:
            p.add_argument("inputs", nargs="+", metavar="FILE",
                           help="source files (.mod or .cls)")
            p.add_argument("--lang", choices=sorted(_LANG_FLAGS),
                           help="force input language (k=keyword, c=curly), "
                                "bypassing extension detection")
        p.add_argument("--format", default="table",
                       choices=("table", "json", "csv", "dot"),
                       help="output format (default: table)")
        p.add_argument("--out", metavar="FILE",
                       help="write output to FILE instead of stdout")

    p = sub.add_parser("parse", help="parse files and show their trees")
    add_common(p)
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("metrics", help="complexity and line-count report")
    add_common(p)
    p.add_argument("--figures", metavar="DIR",
                   help="also render report charts as PNG files into DIR")
    p.set_defaults(handler=cmd_metrics)

    p = sub.add_parser("callgraph", help="link units into a call graph")
    add_common(p)
    p.add_argument("--conventional", action="store_true",
                   help="emit edges caller->callee instead of callee->caller")
    p.set_defaults(handler=cmd_callgraph)

    p = sub.add_parser("cfg", help="control flow graph of one function")
    add_common(p)
    p.add_argument("--function", required=True, metavar="NAME",
                   help="function to analyse (name or unit.name)")
    p.add_argument("--basis-paths", action="store_true", dest="basis_paths",
                   help="also list a basis set of execution paths")
    p.set_defaults(handler=cmd_cfg)

    p = sub.add_parser("snapshot-save", help="save a labelled metrics snapshot")
    add_common(p)
    p.add_argument("--label", required=True, help="snapshot label (unique)")
    p.add_argument("--store", default=os.environ.get("ECST_STORE"),
                   help="snapshot store directory (default: $ECST_STORE)")
    p.set_defaults(handler=cmd_snapshot_save)

    p = sub.add_parser("snapshot-diff", help="compare two snapshots")
    add_common(p, inputs=False)
    p.add_argument("label_a", help="older snapshot label")
    p.add_argument("label_b", help="newer snapshot label")
    p.add_argument("--store", default=os.environ.get("ECST_STORE"),
                   help="snapshot store directory (default: $ECST_STORE)")
    p.add_argument("--figures", metavar="DIR",
                   help="also render a change chart as PNG into DIR")
    p.set_defaults(handler=cmd_snapshot_diff)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.format not in _FORMATS[args.command]:
        print(f"ecst {args.command}: format '{args.format}' is not supported "
              f"(choose from {', '.join(_FORMATS[args.command])})",
              file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"ecst: {exc}", file=sys.stderr)
        return 2
    except EcstError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        detail = f"{name}: {exc.strerror}" if name else str(exc)
        print(f"error: {detail}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


# -- shared helpers ----------------------------------------------------------


def _load_files(args) -> list[ParsedFile]:
    paths = sorted(dict.fromkeys(args.inputs))
    lang = _LANG_FLAGS[args.lang] if getattr(args, "lang", None) else None
    if len(paths) == 1:
        return [parse_file(paths[0], lang)]
    with ThreadPoolExecutor(max_workers=min(8, len(paths))) as pool:
        return list(pool.map(lambda p: parse_file(p, lang), paths))


def _emit(text: str, args) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _columns(header: tuple[str, ...], rows: list[tuple]) -> str:
    table = [header] + [tuple(str(v) for v in row) for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = []
    for row in table:
        cells = [cell.ljust(widths[i]) for i, cell in enumerate(row)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _csv(header: tuple[str, ...], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- parse -------------------------------------------------------------------


def _dump_tree(node: EcstNode, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if node.is_token:
        lines.append(f"{pad}{node.text!r} @{node.span.line}:{node.span.column}")
        return
    pol = f" [{node.polarity.value}]" if node.polarity else ""
    lines.append(f"{pad}{node.kind.value}{pol}")
    for child in node.children:
        _dump_tree(child, depth + 1, lines)


def _node_to_dict(node: EcstNode) -> dict:
    if node.is_token:
        return {"token": node.text, "line": node.span.line,
                "col": node.span.column}
    data: dict = {"kind": node.kind.value}
    if node.polarity:
        data["polarity"] = node.polarity.value
    data["children"] = [_node_to_dict(c) for c in node.children]
    return data


def cmd_parse(args) -> int:
    files = _load_files(args)
    if args.format == "json":
        payload = {"files": [{"path": pf.path, "lang": pf.lang.value,
                              "tree": _node_to_dict(pf.tree)}
                             for pf in files]}
        _emit(json.dumps(payload, indent=2) + "\n", args)
        return 0
    lines: list[str] = []
    for pf in files:
        lines.append(f"== {pf.path} ({pf.lang.value})")
        _dump_tree(pf.tree, 0, lines)
    _emit("\n".join(lines) + "\n", args)
    return 0


# -- metrics -----------------------------------------------------------------


def _render_metrics(report: MetricsReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    fn_header = ("unit", "function", "cc", "statements")
    fn_rows = [(f.unit, f.function, f.cc, f.statements)
               for f in report.functions]
    file_header = ("path", "lang", "total", "blank", "comment", "code")
    file_rows = [(path, lang.value, loc.total, loc.blank, loc.comment, loc.code)
                 for path, lang, loc in report.files]
    if fmt == "csv":
        return ("# functions\n" + _csv(fn_header, fn_rows)
                + "\n# files\n" + _csv(file_header, file_rows))
    return ("FUNCTIONS\n" + _columns(fn_header, fn_rows)
            + "\n\nFILES\n" + _columns(file_header, file_rows) + "\n")


def cmd_metrics(args) -> int:
    report = unit_report(_load_files(args))
    _emit(_render_metrics(report, args.format), args)
    if args.figures:
        from .figures import save_metrics_figures
        written = save_metrics_figures(report, args.figures)
        for path in written:
            print(f"wrote figure {path}", file=sys.stderr)
    return 0


# -- callgraph -----------------------------------------------------------------


def cmd_callgraph(args) -> int:
    graph = cg.build_call_graph([pf.tree for pf in _load_files(args)])
    if args.format == "dot":
        _emit(cg.callgraph_to_dot(graph, conventional=args.conventional), args)
        return 0
    if args.format == "json":
        _emit(json.dumps(graph.to_dict(conventional=args.conventional),
                         indent=2) + "\n", args)
        return 0
    direction = (("caller", "callee") if args.conventional
                 else ("callee", "caller"))
    edge_rows = []
    for e in graph.edges:
        src, dst = ((e.caller, e.callee) if args.conventional
                    else (e.callee, e.caller))
        edge_rows.append((src, dst, e.call_site.file, e.call_site.line,
                          e.call_site.column))
    node_rows = [(n.id, n.unit or "", n.name, "yes" if n.is_external else "no")
                 for n in graph.nodes]
    if args.format == "csv":
        _emit("# nodes\n"
              + _csv(("id", "unit", "name", "external"), node_rows)
              + "\n# edges\n"
              + _csv(("from_" + direction[0], "to_" + direction[1],
                      "file", "line", "col"), edge_rows), args)
        return 0
    text = ("NODES\n"
            + _columns(("id", "unit", "name", "external"), node_rows)
            + f"\n\nEDGES ({direction[0]} -> {direction[1]})\n"
            + _columns(("from", "to", "file", "line", "col"), edge_rows)
            + "\n")
    _emit(text, args)
    return 0


# -- cfg ---------------------------------------------------------------------


def _pick_function(files: list[ParsedFile], wanted: str):
    records = cg.collect_functions([pf.tree for pf in files])
    matches = [r for r in records
               if r.name == wanted or r.node_id == wanted]
    if not matches:
        raise AnalysisError(f"function {wanted!r} not found in the inputs")
    if len(matches) > 1:
        names = ", ".join(r.node_id for r in matches)
        raise AnalysisError(
            f"function name {wanted!r} is ambiguous ({names}); "
            "qualify it as unit.name")
    return matches[0]


def cmd_cfg(args) -> int:
    record = _pick_function(_load_files(args), args.function)
    graph = cfgmod.build_ecfg(record.def_node, unit=record.unit)
    paths = cfgmod.basis_paths(graph) if args.basis_paths else None
    if args.format == "dot":
        _emit(cfgmod.cfg_to_dot(graph, paths), args)
        return 0
    if args.format == "json":
        payload = graph.to_dict()
        payload["cc"] = cfgmod.cc_from_cfg(graph)
        if paths is not None:
            payload["basis_paths"] = paths
        _emit(json.dumps(payload, indent=2) + "\n", args)
        return 0
    edge_rows = [(e.src, e.dst, e.label.value) for e in graph.edges]
    node_rows = [(n.id, n.role.value, n.describe()) for n in graph.nodes]
    if args.format == "csv":
        text = ("# nodes\n" + _csv(("id", "role", "label"), node_rows)
                + "\n# edges\n" + _csv(("from", "to", "label"), edge_rows))
        if paths is not None:
            path_rows = [(i, " ".join(map(str, p)))
                         for i, p in enumerate(paths, start=1)]
            text += "\n# basis paths\n" + _csv(("path", "nodes"), path_rows)
        _emit(text, args)
        return 0
    name = ".".join(p for p in graph.function if p)
    lines = [f"CFG {name}  (cc = {cfgmod.cc_from_cfg(graph)})", "", "NODES",
             _columns(("id", "role", "label"), node_rows), "", "EDGES",
             _columns(("from", "to", "label"), edge_rows)]
    if graph.warnings:
        lines += ["", "WARNINGS"] + [f"  {w}" for w in graph.warnings]
    if paths is not None:
        lines += ["", "BASIS PATHS"]
        lines += [f"  {i}: " + " -> ".join(map(str, p))
                  for i, p in enumerate(paths, start=1)]
    _emit("\n".join(lines) + "\n", args)
    return 0


# -- snapshots -----------------------------------------------------------------


def _require_store(args) -> str:
    if not args.store:
        raise UsageError("no snapshot store given; pass --store or set ECST_STORE")
    return args.store


def cmd_snapshot_save(args) -> int:
    store = _require_store(args)
    snap = persistence.save_snapshot(store, args.label, _load_files(args))
    if args.format == "json":
        payload = {"label": snap.label, "timestamp": snap.timestamp,
                   "store": store,
                   "files": [src for src, _ in snap.tree_files],
                   "functions": len(snap.report.functions)}
        _emit(json.dumps(payload, indent=2) + "\n", args)
        return 0
    _emit(f"saved snapshot '{snap.label}' ({len(snap.tree_files)} files, "
          f"{len(snap.report.functions)} functions) to {store}\n", args)
    return 0


def cmd_snapshot_diff(args) -> int:
    store = _require_store(args)
    diff = persistence.diff_snapshots(store, args.label_a, args.label_b)
    if args.format == "json":
        _emit(json.dumps(diff.to_dict(), indent=2) + "\n", args)
    elif args.format == "csv":
        rows = [("added", f"{u}.{n}", "", "") for u, n in diff.added]
        rows += [("removed", f"{u}.{n}", "", "") for u, n in diff.removed]
        rows += [("changed", f"{u}.{n}", b, a) for (u, n), b, a in diff.changed]
        _emit(_csv(("status", "function", "cc_before", "cc_after"), rows), args)
    else:
        lines = [f"DIFF {args.label_a} -> {args.label_b}"]
        lines.append("added:" + ("" if diff.added else " (none)"))
        lines += [f"  {u}.{n}" for u, n in diff.added]
        lines.append("removed:" + ("" if diff.removed else " (none)"))
        lines += [f"  {u}.{n}" for u, n in diff.removed]
        lines.append("changed:" + ("" if diff.changed else " (none)"))
        lines += [f"  {u}.{n}: cc {b} -> {a}" for (u, n), b, a in diff.changed]
        _emit("\n".join(lines) + "\n", args)
    if args.figures:
        from .figures import save_diff_figure
        for path in save_diff_figure(diff, args.figures):
            print(f"wrote figure {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    entrypoint()
