"""Connects compilation units into a directed call graph.

Edges run from callee to caller: when A's body contains a call of B, the
edge is B -> A.  That direction is the point of the model (it answers "who
does B feed?"); the CLI offers a conventional caller->callee inversion at
emit time only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import AmbiguousCallError, DuplicateFunctionError
from .metrics import function_name, unit_name
from .tree import EcstNode, SourceSpan, UniversalKind, find_all


@dataclass(frozen=True)
class FunctionRecord:
    """A defined function: (unit, name) plus its FUNCTION_DEF subtree."""

    unit: str
    name: str
    def_node: EcstNode
    span: SourceSpan

    @property
    def node_id(self) -> str:
        return f"{self.unit}.{self.name}"


@dataclass(frozen=True)
class GraphNode:
    """Call-graph node: a defined function or an external name."""

    id: str
    name: str
    unit: Optional[str] = None

    @property
    def is_external(self) -> bool:
        return self.unit is None


@dataclass(frozen=True)
class CallEdge:
    callee: str      # edge source: the function being called
    caller: str      # edge target: the function containing the call
    call_site: SourceSpan


@dataclass(frozen=True)
class CallGraph:
    """Canonically ordered nodes and callee->caller edges."""

    nodes: tuple[GraphNode, ...]
    edges: tuple[CallEdge, ...]

    def to_dict(self, conventional: bool = False) -> dict:
        return {
            "nodes": [
                {"id": n.id, "name": n.name, "unit": n.unit,
                 "external": n.is_external}
                for n in self.nodes
            ],
            "edges": [
                {"from": e.caller if conventional else e.callee,
                 "to": e.callee if conventional else e.caller,
                 "file": e.call_site.file,
                 "line": e.call_site.line,
                 "col": e.call_site.column}
                for e in self.edges
            ],
        }


def collect_functions(forest: Sequence[EcstNode]) -> list[FunctionRecord]:
    """One record per FUNCTION_DEF, in forest order; duplicates are errors."""
    records: list[FunctionRecord] = []
    seen: dict[tuple[str, str], FunctionRecord] = {}
    for tree in forest:
        unit = unit_name(tree)
        for fn in find_all(tree, UniversalKind.FUNCTION_DEF):
            name = function_name(fn)
            key = (unit, name)
            if key in seen:
                raise DuplicateFunctionError(unit, name, seen[key].span, fn.span)
            record = FunctionRecord(unit=unit, name=name, def_node=fn, span=fn.span)
            seen[key] = record
            records.append(record)
    return records


def resolve_call(callee_name: str, caller: FunctionRecord,
                 registry: Sequence[FunctionRecord]) -> str:
    """Resolve a called name to a node id.

    Resolution order: a function of that name in the caller's own unit; a
    unique foreign function of that name; two or more foreign matches is an
    ambiguity error; no match resolves to an external node.
    """
    foreign = []
    for record in registry:
        if record.name != callee_name:
            continue
        if record.unit == caller.unit:
            return record.node_id
        foreign.append(record)
    if len(foreign) == 1:
        return foreign[0].node_id
    if len(foreign) > 1:
        raise AmbiguousCallError(callee_name, caller.node_id,
                                 sorted(r.node_id for r in foreign))
    return f"extern:{callee_name}"


def _callee_name(call: EcstNode) -> str:
    names = find_all(call, UniversalKind.NAME)
    return names[0].children[0].text


def build_call_graph(forest: Sequence[EcstNode]) -> CallGraph:
    """Resolve every call site and assemble the canonical graph.

    Isolated functions appear as nodes; distinct call sites of the same
    callee yield parallel edges.  The result is independent of the forest's
    file order.
    """
    registry = collect_functions(forest)
    nodes = {r.node_id: GraphNode(id=r.node_id, name=r.name, unit=r.unit)
             for r in registry}
    edges: list[CallEdge] = []
    seen_triples = set()
    for caller in registry:
        for call in find_all(caller.def_node, UniversalKind.FUNCTION_CALL):
            callee_id = resolve_call(_callee_name(call), caller, registry)
            if callee_id.startswith("extern:") and callee_id not in nodes:
                nodes[callee_id] = GraphNode(
                    id=callee_id, name=callee_id.split(":", 1)[1])
            triple = (callee_id, caller.node_id, call.span)
            if triple in seen_triples:
                continue
            seen_triples.add(triple)
            edges.append(CallEdge(callee=callee_id, caller=caller.node_id,
                                  call_site=call.span))
    ordered_nodes = tuple(sorted(nodes.values(), key=lambda n: (n.is_external, n.id)))
    ordered_edges = tuple(sorted(
        edges, key=lambda e: (e.callee, e.caller, e.call_site)))
    return CallGraph(nodes=ordered_nodes, edges=ordered_edges)


def callgraph_to_dot(graph: CallGraph, conventional: bool = False) -> str:
    """Deterministic DOT rendering; externals are dashed."""
    lines = ["digraph callgraph {", "  rankdir=LR;", "  node [shape=box];"]
    for node in graph.nodes:
        attrs = " [style=dashed]" if node.is_external else ""
        lines.append(f'  "{node.id}"{attrs};')
    for edge in graph.edges:
        src, dst = ((edge.caller, edge.callee) if conventional
                    else (edge.callee, edge.caller))
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
