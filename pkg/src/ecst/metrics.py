"""Language-independent metrics over enriched trees.

Cyclomatic complexity uses predicate counting: one query over CONDITION
universal nodes, with no per-language logic.  Because both frontends emit
the same universal kinds, the same number comes out of a keyword-language
module and its curly-brace twin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import AnalysisError, DuplicateFunctionError
from .frontends import LanguageId, ParsedFile
from .tree import EcstNode, UniversalKind, count_kind, find_all

_STATEMENT_KINDS = frozenset({
    UniversalKind.ASSIGN_STATEMENT,
    UniversalKind.FUNCTION_CALL,
    UniversalKind.RETURN_STATEMENT,
    UniversalKind.BRANCH_STATEMENT,
    UniversalKind.LOOP_STATEMENT,
})


@dataclass(frozen=True)
class FunctionMetrics:
    """Per-function metric values; cc is always >= 1."""

    unit: str
    function: str
    cc: int
    statements: int


@dataclass(frozen=True)
class LocCounts:
    total: int
    blank: int
    comment: int
    code: int


@dataclass(frozen=True)
class MetricsReport:
    """Per-file line counts plus one row per function across all inputs."""

    files: tuple[tuple[str, LanguageId, LocCounts], ...]
    functions: tuple[FunctionMetrics, ...]

    def to_dict(self) -> dict:
        return {
            "files": [
                {"path": path, "lang": lang.value,
                 "loc": {"total": loc.total, "blank": loc.blank,
                         "comment": loc.comment, "code": loc.code}}
                for path, lang, loc in self.files
            ],
            "functions": [
                {"unit": f.unit, "function": f.function,
                 "cc": f.cc, "statements": f.statements}
                for f in self.functions
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        files = tuple(
            (entry["path"], LanguageId(entry["lang"]),
             LocCounts(**entry["loc"]))
            for entry in data["files"])
        functions = tuple(FunctionMetrics(**entry) for entry in data["functions"])
        return cls(files=files, functions=functions)


def cyclomatic_complexity(fn: EcstNode) -> int:
    """1 plus the number of decision predicates in the function.

    Counts CONDITION universal nodes, so an IF, an ELSIF arm, and every
    loop each contribute exactly one.  Compound boolean operators inside a
    predicate add nothing (classic, non-extended complexity).
    """
    if fn.kind is not UniversalKind.FUNCTION_DEF:
        raise AnalysisError(
            f"cyclomatic_complexity expects a FUNCTION_DEF node, got {fn!r}")
    return 1 + count_kind(fn, UniversalKind.CONDITION)


def loc(source: str, lang: LanguageId) -> LocCounts:
    """Classify every line as blank, comment, or code.

    A line counts as code when any non-whitespace character lies outside a
    comment; whitespace-only lines are blank even inside block comments.
    """
    flags = _line_flags(source, lang)
    blank = comment = code = 0
    for has_code, has_comment in flags:
        if has_code:
            code += 1
        elif has_comment:
            comment += 1
        else:
            blank += 1
    return LocCounts(total=len(flags), blank=blank, comment=comment, code=code)


def _line_flags(source: str, lang: LanguageId) -> list[tuple[bool, bool]]:
    """Per line: (contains code, contains comment content)."""
    flags: list[tuple[bool, bool]] = []
    has_code = has_comment = False
    depth = 0           # LANG_K block comments nest
    in_block = False    # LANG_C /* */ does not
    in_line = False     # LANG_C //
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            flags.append((has_code, has_comment))
            has_code = has_comment = False
            in_line = False
            i += 1
            continue
        if lang is LanguageId.LANG_K:
            if source.startswith("(*", i):
                depth += 1
                has_comment = True
                i += 2
                continue
            if depth > 0 and source.startswith("*)", i):
                depth -= 1
                has_comment = True
                i += 2
                continue
            inside = depth > 0
        else:
            if not in_block and not in_line:
                if source.startswith("//", i):
                    in_line = True
                    has_comment = True
                    i += 2
                    continue
                if source.startswith("/*", i):
                    in_block = True
                    has_comment = True
                    i += 2
                    continue
            elif in_block and source.startswith("*/", i):
                in_block = False
                has_comment = True
                i += 2
                continue
            inside = in_block or in_line
        if not ch.isspace():
            if inside:
                has_comment = True
            else:
                has_code = True
        i += 1
    if has_code or has_comment or (n > 0 and not source.endswith("\n")):
        flags.append((has_code, has_comment))
    return flags


def function_name(fn: EcstNode) -> str:
    """Name of a FUNCTION_DEF, read from its FUNCTION_DECL/NAME subtree."""
    for decl in find_all(fn, UniversalKind.FUNCTION_DECL):
        names = find_all(decl, UniversalKind.NAME)
        if names and names[0].children:
            return names[0].children[0].text
    raise AnalysisError(f"FUNCTION_DEF without a declared name at {fn.span}")


def unit_name(tree: EcstNode) -> str:
    """Unit name of a COMPILATION_UNIT, read from its UNIT_NAME subtree."""
    for un in find_all(tree, UniversalKind.UNIT_NAME):
        names = find_all(un, UniversalKind.NAME)
        if names and names[0].children:
            return names[0].children[0].text
    raise AnalysisError(f"COMPILATION_UNIT without a unit name at {tree.span}")


def statement_count(fn: EcstNode) -> int:
    """Number of statement nodes in the function, nested ones included."""
    return sum(1 for node in fn.walk() if node.kind in _STATEMENT_KINDS)


def unit_report(files: Sequence[ParsedFile]) -> MetricsReport:
    """Aggregate complexity per function and line counts per file.

    Functions are keyed unit.function and listed in (file, source position)
    order; a duplicate function name within one unit is an error naming
    both definitions.
    """
    file_rows = []
    function_rows = []
    seen: dict[tuple[str, str], EcstNode] = {}
    for pf in files:
        file_rows.append((pf.path, pf.lang, loc(pf.source, pf.lang)))
        unit = unit_name(pf.tree)
        for fn in find_all(pf.tree, UniversalKind.FUNCTION_DEF):
            name = function_name(fn)
            key = (unit, name)
            if key in seen:
                raise DuplicateFunctionError(unit, name, seen[key].span, fn.span)
            seen[key] = fn
            function_rows.append(FunctionMetrics(
                unit=unit, function=name,
                cc=cyclomatic_complexity(fn),
                statements=statement_count(fn)))
    return MetricsReport(files=tuple(file_rows), functions=tuple(function_rows))
