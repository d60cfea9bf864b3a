"""Enriched concrete syntax tree: the shared IR of every analysis.

A tree mixes two node flavours: *universal* nodes drawn from a fixed,
language-independent vocabulary, and *token* leaves that keep every concrete
lexeme of the source.  Universal nodes sit above the subtree they classify,
so an analysis recognises a loop or a branch with one kind test no matter
which frontend produced the tree.

Trees are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

from .errors import TreeError


class UniversalKind(Enum):
    """Closed vocabulary of universal node kinds.

    Frontends may not invent kinds outside this set; that closure is what
    keeps the analyses language-independent.
    """

    COMPILATION_UNIT = "COMPILATION_UNIT"
    UNIT_NAME = "UNIT_NAME"
    FUNCTION_DEF = "FUNCTION_DEF"
    FUNCTION_DECL = "FUNCTION_DECL"
    FUNCTION_CALL = "FUNCTION_CALL"
    PARAMETER_LIST = "PARAMETER_LIST"
    ARGUMENT_LIST = "ARGUMENT_LIST"
    NAME = "NAME"
    BRANCH_STATEMENT = "BRANCH_STATEMENT"
    BRANCH = "BRANCH"
    LOOP_STATEMENT = "LOOP_STATEMENT"
    CONDITION = "CONDITION"
    STATEMENT_BLOCK = "STATEMENT_BLOCK"
    ASSIGN_STATEMENT = "ASSIGN_STATEMENT"
    RETURN_STATEMENT = "RETURN_STATEMENT"
    EXPRESSION = "EXPRESSION"


class ConditionPolarity(Enum):
    """Logical value of a loop condition that keeps the loop running.

    CONTINUE_WHEN_TRUE: a true condition repeats the body (while, do-while).
    EXIT_WHEN_TRUE: a true condition leaves the loop (post-tested
    keyword-language loops, where the exit condition is stated oppositely).
    """

    CONTINUE_WHEN_TRUE = "CONTINUE_WHEN_TRUE"
    EXIT_WHEN_TRUE = "EXIT_WHEN_TRUE"


@dataclass(frozen=True, order=True)
class SourceSpan:
    """1-based position of a token (or of a construct's first token)."""

    file: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise TreeError(f"span line/column must be 1-based: {self}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class EcstNode:
    """One node of an enriched concrete syntax tree.

    ``kind`` is None exactly for token leaves, which carry the lexeme in
    ``text`` and never have children.  Universal nodes carry the span of
    their first descendant token, or an explicit span supplied at
    construction time when the subtree holds no tokens.
    """

    kind: Optional[UniversalKind]
    text: Optional[str]
    span: SourceSpan
    polarity: Optional[ConditionPolarity] = None
    children: tuple["EcstNode", ...] = field(default=())

    @property
    def is_token(self) -> bool:
        return self.kind is None

    @property
    def is_universal(self) -> bool:
        return self.kind is not None

    def universal_children(self) -> tuple["EcstNode", ...]:
        """Child universal nodes, skipping token leaves."""
        return tuple(c for c in self.children if c.is_universal)

    def walk(self) -> Iterator["EcstNode"]:
        """Pre-order traversal of the subtree, self included."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def tokens(self) -> Iterator["EcstNode"]:
        """Token leaves of the subtree in source order."""
        for node in self.walk():
            if node.is_token:
                yield node

    def __repr__(self) -> str:
        if self.is_token:
            return f"Token({self.text!r}@{self.span.line}:{self.span.column})"
        pol = f", {self.polarity.value}" if self.polarity else ""
        return f"{self.kind.value}({len(self.children)} children{pol})"


def token(text: str, span: SourceSpan) -> EcstNode:
    """Build a token leaf."""
    if not text:
        raise TreeError("token text must be non-empty")
    return EcstNode(kind=None, text=text, span=span)


def make_universal(kind: UniversalKind,
                   children: Sequence[EcstNode] = (),
                   polarity: Optional[ConditionPolarity] = None,
                   span: Optional[SourceSpan] = None) -> EcstNode:
    """Build a universal node over ``children``.

    The node's span is copied from the first descendant token; for subtrees
    without tokens (e.g. an empty statement block) the caller must pass the
    parse position of the construct explicitly.  Polarity is only legal on
    CONDITION nodes.
    """
    if not isinstance(kind, UniversalKind):
        raise TreeError(f"not a universal kind: {kind!r}")
    if polarity is not None and kind is not UniversalKind.CONDITION:
        raise TreeError(f"polarity is only valid on CONDITION, not {kind.value}")
    kids = tuple(children)
    for c in kids:
        if not isinstance(c, EcstNode):
            raise TreeError(f"child is not an EcstNode: {c!r}")
    derived = _first_token_span(kids)
    if derived is None:
        if span is None:
            raise TreeError(
                f"{kind.value} subtree holds no tokens; an explicit span is required")
        derived = span
    return EcstNode(kind=kind, text=None, span=derived,
                    polarity=polarity, children=kids)


def _first_token_span(children: Sequence[EcstNode]) -> Optional[SourceSpan]:
    for child in children:
        if child.is_token:
            return child.span
        nested = _first_token_span(child.children)
        if nested is not None:
            return nested
    return None


def count_kind(tree: EcstNode, kind: UniversalKind) -> int:
    """Number of nodes of ``kind`` in the subtree, self included."""
    return sum(1 for n in tree.walk() if n.kind is kind)


def find_all(tree: EcstNode, kind: UniversalKind) -> list[EcstNode]:
    """All nodes of ``kind`` in pre-order (equals source order)."""
    return [n for n in tree.walk() if n.kind is kind]


# A skeleton is the projection of a tree onto its universal nodes: nested
# (kind, children) tuples with every token leaf dropped.  Two programs in
# different languages are structurally equivalent iff their skeletons match.
Skeleton = tuple[UniversalKind, tuple]


def skeleton(tree: EcstNode) -> Optional[Skeleton]:
    """Kind-only projection of the tree; None for a bare token."""
    if tree.is_token:
        return None
    kids = tuple(s for s in (skeleton(c) for c in tree.children) if s is not None)
    return (tree.kind, kids)


def format_skeleton(skel: Optional[Skeleton]) -> str:
    """Render a skeleton as e.g. LOOP_STATEMENT(CONDITION(EXPRESSION), ...)."""
    if skel is None:
        return ""
    kind, kids = skel
    if not kids:
        return kind.value
    return f"{kind.value}({', '.join(format_skeleton(k) for k in kids)})"
