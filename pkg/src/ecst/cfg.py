"""Per-function control flow graphs derived from the enriched tree.

Statements map to nodes and CONDITION nodes to binary predicates, so the
graph's edges are the possible execution paths through the function.  The
cyclomatic number E - N + 2 computed here is the independent cross-check
for predicate counting, and the basis-path generator returns exactly that
many linearly independent ENTRY->EXIT walks for test design.

Loop predicates keep their stated, unnegated condition; polarity decides
which outgoing edge re-enters the body and which one leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import AnalysisError
from .metrics import function_name
from .tree import ConditionPolarity, EcstNode, UniversalKind

K = UniversalKind


class CfgRole(Enum):
    ENTRY = "ENTRY"
    EXIT = "EXIT"
    STATEMENT = "STATEMENT"
    PREDICATE = "PREDICATE"


class EdgeLabel(Enum):
    SEQ = "SEQ"
    TRUE = "TRUE"
    FALSE = "FALSE"


@dataclass(frozen=True)
class CfgNode:
    id: int
    role: CfgRole
    origin: Optional[EcstNode] = None

    def describe(self) -> str:
        if self.origin is None:
            return self.role.value
        span = self.origin.span
        return f"{self.origin.kind.value} {span.line}:{span.column}"


@dataclass(frozen=True)
class CfgEdge:
    src: int
    dst: int
    label: EdgeLabel


@dataclass(frozen=True)
class Cfg:
    function: tuple[str, str]
    nodes: tuple[CfgNode, ...]
    edges: tuple[CfgEdge, ...]
    warnings: tuple[str, ...] = ()

    @property
    def entry(self) -> int:
        return next(n.id for n in self.nodes if n.role is CfgRole.ENTRY)

    @property
    def exit(self) -> int:
        return next(n.id for n in self.nodes if n.role is CfgRole.EXIT)

    def to_dict(self) -> dict:
        return {
            "function": ".".join(p for p in self.function if p) or self.function[1],
            "nodes": [{"id": n.id, "role": n.role.value, "label": n.describe()}
                      for n in self.nodes],
            "edges": [{"from": e.src, "to": e.dst, "label": e.label.value}
                      for e in self.edges],
            "warnings": list(self.warnings),
        }


_SIMPLE_STMTS = (K.ASSIGN_STATEMENT, K.FUNCTION_CALL)


class _Builder:
    def __init__(self):
        self.nodes: list[CfgNode] = []
        self.edges: list[CfgEdge] = []
        self.warnings: list[str] = []
        self.return_ids: list[int] = []

    def new_node(self, role: CfgRole, origin: Optional[EcstNode] = None) -> int:
        node = CfgNode(id=len(self.nodes), role=role, origin=origin)
        self.nodes.append(node)
        return node.id

    def connect(self, frontier: list[tuple[int, EdgeLabel]], target: int) -> None:
        for src, label in frontier:
            self.edges.append(CfgEdge(src=src, dst=target, label=label))

    def sequence(self, stmts: Sequence[EcstNode],
                 frontier: list[tuple[int, EdgeLabel]],
                 ) -> tuple[list[tuple[int, EdgeLabel]], Optional[int]]:
        """Chain statements; returns the open frontier and the first node id."""
        first: Optional[int] = None
        for index, stmt in enumerate(stmts):
            if not frontier:
                span = stmt.span
                self.warnings.append(
                    f"unreachable code after return at "
                    f"{span.file}:{span.line}:{span.column}")
                break
            frontier, head = self.statement(stmt, frontier)
            if first is None:
                first = head
        return frontier, first

    def statement(self, stmt: EcstNode, frontier: list[tuple[int, EdgeLabel]],
                  ) -> tuple[list[tuple[int, EdgeLabel]], Optional[int]]:
        if stmt.kind in _SIMPLE_STMTS:
            node = self.new_node(CfgRole.STATEMENT, stmt)
            self.connect(frontier, node)
            return [(node, EdgeLabel.SEQ)], node
        if stmt.kind is K.RETURN_STATEMENT:
            node = self.new_node(CfgRole.STATEMENT, stmt)
            self.connect(frontier, node)
            self.return_ids.append(node)
            return [], node
        if stmt.kind is K.BRANCH_STATEMENT:
            return self.branch(stmt, frontier)
        if stmt.kind is K.LOOP_STATEMENT:
            return self.loop(stmt, frontier)
        if stmt.kind is K.STATEMENT_BLOCK:
            return self.sequence(stmt.universal_children(), frontier)
        raise AnalysisError(f"statement kind not supported in CFG: {stmt!r}")

    def branch(self, stmt: EcstNode, frontier: list[tuple[int, EdgeLabel]],
               ) -> tuple[list[tuple[int, EdgeLabel]], int]:
        parts = stmt.universal_children()
        cond, then_arm = parts[0], parts[1]
        else_part = parts[2] if len(parts) > 2 else None
        pred = self.new_node(CfgRole.PREDICATE, cond)
        self.connect(frontier, pred)
        out, _ = self.sequence(then_arm.universal_children(),
                               [(pred, EdgeLabel.TRUE)])
        if else_part is None:
            out.append((pred, EdgeLabel.FALSE))
        elif else_part.kind is K.BRANCH_STATEMENT:
            nested_out, _ = self.branch(else_part, [(pred, EdgeLabel.FALSE)])
            out.extend(nested_out)
        else:
            else_out, _ = self.sequence(else_part.universal_children(),
                                        [(pred, EdgeLabel.FALSE)])
            out.extend(else_out)
        return out, pred

    def loop(self, stmt: EcstNode, frontier: list[tuple[int, EdgeLabel]],
             ) -> tuple[list[tuple[int, EdgeLabel]], int]:
        parts = stmt.universal_children()
        if parts[0].kind is K.CONDITION:
            # pre-tested: predicate at the head
            cond, body = parts[0], parts[1]
            pred = self.new_node(CfgRole.PREDICATE, cond)
            self.connect(frontier, pred)
            body_out, _ = self.sequence(body.universal_children(),
                                        [(pred, EdgeLabel.TRUE)])
            self.connect(body_out, pred)
            return [(pred, EdgeLabel.FALSE)], pred
        # post-tested: body first, predicate after it; polarity picks the
        # edge that leaves the loop
        body, cond = parts[0], parts[1]
        body_out, body_first = self.sequence(body.universal_children(), frontier)
        if not body_out and body_first is not None:
            # every path through the body returns; the condition is dead
            span = cond.span
            self.warnings.append(
                f"unreachable loop condition at "
                f"{span.file}:{span.line}:{span.column}")
            return [], body_first
        pred = self.new_node(CfgRole.PREDICATE, cond)
        self.connect(body_out, pred)
        head = body_first if body_first is not None else pred
        if cond.polarity is ConditionPolarity.EXIT_WHEN_TRUE:
            back, leave = EdgeLabel.FALSE, EdgeLabel.TRUE
        else:
            back, leave = EdgeLabel.TRUE, EdgeLabel.FALSE
        self.edges.append(CfgEdge(src=pred, dst=head, label=back))
        return [(pred, leave)], head


def _function_body(fn: EcstNode) -> EcstNode:
    for child in fn.universal_children():
        if child.kind is K.STATEMENT_BLOCK:
            return child
    raise AnalysisError(f"FUNCTION_DEF without a statement block at {fn.span}")


def build_ecfg(fn: EcstNode, unit: str = "") -> Cfg:
    """Transform one FUNCTION_DEF subtree into its control flow graph."""
    if fn.kind is not K.FUNCTION_DEF:
        raise AnalysisError(f"build_ecfg expects a FUNCTION_DEF node, got {fn!r}")
    builder = _Builder()
    entry = builder.new_node(CfgRole.ENTRY)
    body = _function_body(fn)
    frontier, _ = builder.sequence(body.universal_children(),
                                   [(entry, EdgeLabel.SEQ)])
    exit_id = builder.new_node(CfgRole.EXIT)
    builder.connect(frontier, exit_id)
    for rid in builder.return_ids:
        builder.edges.append(CfgEdge(src=rid, dst=exit_id, label=EdgeLabel.SEQ))
    return Cfg(function=(unit, function_name(fn)),
               nodes=tuple(builder.nodes),
               edges=tuple(builder.edges),
               warnings=tuple(builder.warnings))


def validate(cfg: Cfg) -> None:
    """Check the structural contract; raises AnalysisError when broken."""
    ids = [n.id for n in cfg.nodes]
    if len(set(ids)) != len(ids):
        raise AnalysisError("malformed CFG: duplicate node ids")
    by_id = {n.id: n for n in cfg.nodes}
    entries = [n for n in cfg.nodes if n.role is CfgRole.ENTRY]
    exits = [n for n in cfg.nodes if n.role is CfgRole.EXIT]
    if len(entries) != 1 or len(exits) != 1:
        raise AnalysisError("malformed CFG: need exactly one ENTRY and one EXIT")
    out: dict[int, list[CfgEdge]] = {n.id: [] for n in cfg.nodes}
    for e in cfg.edges:
        if e.src not in by_id or e.dst not in by_id:
            raise AnalysisError(f"malformed CFG: edge {e} references unknown node")
        out[e.src].append(e)
    for node in cfg.nodes:
        labels = sorted(e.label.value for e in out[node.id])
        if node.role is CfgRole.EXIT:
            expected = []
        elif node.role is CfgRole.PREDICATE:
            expected = ["FALSE", "TRUE"]
        else:
            expected = ["SEQ"]
        if labels != expected:
            raise AnalysisError(
                f"malformed CFG: node {node.id} ({node.role.value}) has "
                f"outgoing labels {labels}, expected {expected}")
    reached = _reachable(cfg.entry, {n: [e.dst for e in out[n]] for n in out})
    if reached != set(ids):
        raise AnalysisError("malformed CFG: nodes unreachable from ENTRY")
    back: dict[int, list[int]] = {n.id: [] for n in cfg.nodes}
    for e in cfg.edges:
        back[e.dst].append(e.src)
    co_reached = _reachable(cfg.exit, back)
    if co_reached != set(ids):
        raise AnalysisError("malformed CFG: EXIT not reachable from every node")


def _reachable(start: int, succ: dict[int, list[int]]) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        for nxt in succ[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def cc_from_cfg(cfg: Cfg) -> int:
    """Cyclomatic number E - N + 2 of a well-formed single-component CFG."""
    validate(cfg)
    return len(cfg.edges) - len(cfg.nodes) + 2


def basis_paths(cfg: Cfg) -> list[list[int]]:
    """A basis set of ENTRY->EXIT paths, one per unit of cyclomatic number.

    The baseline path takes TRUE at every new predicate, bounding each loop
    to a single traversal (a revisited predicate takes its other edge).
    Each further path flips exactly one not-yet-flipped predicate, scanning
    generated paths left to right, and continues with baseline decisions.
    """
    validate(cfg)
    succ: dict[int, dict[EdgeLabel, int]] = {n.id: {} for n in cfg.nodes}
    for e in cfg.edges:
        succ[e.src][e.label] = e.dst
    exit_id = cfg.exit
    step_budget = 4 * (len(cfg.nodes) + len(cfg.edges)) + 8

    def other(label: EdgeLabel) -> EdgeLabel:
        return EdgeLabel.FALSE if label is EdgeLabel.TRUE else EdgeLabel.TRUE

    def extend(path: list[int], taken: dict[int, list[EdgeLabel]]) -> list[int]:
        """Walk from path's end to EXIT using baseline decisions."""
        node = path[-1]
        steps = 0
        while node != exit_id:
            steps += 1
            if steps > step_budget:
                raise AnalysisError("basis paths: loop bound exceeded; "
                                    "CFG is not structured")
            options = succ[node]
            if EdgeLabel.SEQ in options:
                label = EdgeLabel.SEQ
            else:
                prior = taken.setdefault(node, [])
                label = EdgeLabel.TRUE if not prior else other(prior[-1])
                prior.append(label)
            node = options[label]
            path.append(node)
        return path

    def edge_label(src: int, dst: int) -> EdgeLabel:
        for label, target in succ[src].items():
            if target == dst and label is not EdgeLabel.SEQ:
                return label
        return EdgeLabel.SEQ

    baseline = extend([cfg.entry], {})
    paths = [baseline]
    flipped: set[int] = set()
    index = 0
    while index < len(paths):
        path = paths[index]
        seen_here: set[int] = set()
        for pos, node in enumerate(path[:-1]):
            if len(succ[node]) < 2 or node in seen_here:
                continue
            seen_here.add(node)
            if node in flipped:
                continue
            flipped.add(node)
            prefix = path[:pos + 1]
            taken: dict[int, list[EdgeLabel]] = {}
            for j in range(pos):
                if len(succ[path[j]]) > 1:
                    taken.setdefault(path[j], []).append(
                        edge_label(path[j], path[j + 1]))
            flip = other(edge_label(node, path[pos + 1]))
            taken.setdefault(node, []).append(flip)
            new_path = prefix + [succ[node][flip]]
            paths.append(extend(new_path, taken))
        index += 1
    return paths


def cfg_to_dot(cfg: Cfg, paths: Optional[list[list[int]]] = None) -> str:
    """Deterministic DOT rendering; predicates are diamonds, edges T/F."""
    name = ".".join(p for p in cfg.function if p) or cfg.function[1]
    lines = ["digraph cfg {", f'  label="{name}";']
    shapes = {CfgRole.ENTRY: "circle", CfgRole.EXIT: "doublecircle",
              CfgRole.STATEMENT: "box", CfgRole.PREDICATE: "diamond"}
    for node in cfg.nodes:
        lines.append(f'  {node.id} [shape={shapes[node.role]}, '
                     f'label="{node.describe()}"];')
    short = {EdgeLabel.TRUE: "T", EdgeLabel.FALSE: "F"}
    for e in cfg.edges:
        if e.label in short:
            lines.append(f'  {e.src} -> {e.dst} [label="{short[e.label]}"];')
        else:
            lines.append(f"  {e.src} -> {e.dst};")
    lines.append("}")
    if paths is not None:
        for i, path in enumerate(paths, start=1):
            lines.append(f"// basis path {i}: " + " -> ".join(map(str, path)))
    return "\n".join(lines) + "\n"
