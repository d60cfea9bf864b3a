"""Exception types shared across the toolkit.

Every user-facing failure derives from EcstError so the CLI can map it to
exit code 1 with a file:line:col diagnostic where one is available.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .tree import SourceSpan


class EcstError(Exception):
    """Base class for all toolkit errors."""


class TreeError(EcstError):
    """Violation of a tree construction or operation contract."""


class ParseError(EcstError):
    """Lexical or syntactic error in an input file.

    Carries the offending location, what the parser expected, and what it
    found instead.  ``message`` overrides the default rendering for errors
    that read better as a single phrase (e.g. unterminated comments).
    """

    def __init__(self, span: "SourceSpan", expected: str, found: str,
                 message: str | None = None):
        self.span = span
        self.expected = expected
        self.found = found
        self.message = message
        super().__init__(str(self))

    def __str__(self) -> str:
        loc = f"{self.span.file}:{self.span.line}:{self.span.column}"
        if self.message:
            return f"{loc}: {self.message}"
        return f"{loc}: expected {self.expected}, found {self.found}"


class LanguageDetectionError(EcstError):
    """Input file extension maps to no known language."""


class AnalysisError(EcstError):
    """An analysis precondition does not hold for the given trees."""


class DuplicateFunctionError(AnalysisError):
    """Two definitions of the same (unit, function) name."""

    def __init__(self, unit: str, name: str, first: "SourceSpan",
                 second: "SourceSpan"):
        self.unit = unit
        self.name = name
        self.first = first
        self.second = second
        super().__init__(
            f"duplicate function {unit}.{name}: defined at "
            f"{first.file}:{first.line}:{first.column} and "
            f"{second.file}:{second.line}:{second.column}")


class AmbiguousCallError(AnalysisError):
    """A cross-unit call matches definitions in several foreign units."""

    def __init__(self, callee: str, caller: str, candidates: list[str]):
        self.callee = callee
        self.caller = caller
        self.candidates = candidates
        super().__init__(
            f"ambiguous call to '{callee}' from {caller}: candidates "
            + ", ".join(candidates))


class XmlLoadError(EcstError):
    """A persisted tree document cannot be loaded."""


class StoreError(EcstError):
    """Snapshot store misuse (duplicate or unknown label, bad layout)."""
