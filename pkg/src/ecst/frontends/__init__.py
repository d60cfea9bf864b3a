"""Language frontends: lexing and parsing source files into enriched trees.

Two input languages are supported:

* LANG_K — the keyword-structured language (``.mod`` files): modules,
  procedures, IF/ELSIF, WHILE and post-tested REPEAT-UNTIL loops.
* LANG_C — the curly-brace language (``.cls`` files): classes, methods,
  if/else, while and do-while loops.

Parsing is deterministic and stops at the first syntax error; analysis
passes need trustworthy trees more than partial ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..errors import LanguageDetectionError, ParseError
from ..tree import EcstNode
from .lexer import Token, tokenize as _tokenize


class LanguageId(Enum):
    LANG_K = "LANG_K"
    LANG_C = "LANG_C"


EXTENSIONS = {".mod": LanguageId.LANG_K, ".cls": LanguageId.LANG_C}


@dataclass(frozen=True)
class ParsedFile:
    """One successfully parsed compilation unit with its raw source."""

    path: str
    lang: LanguageId
    source: str
    tree: EcstNode


def detect_language(path: str | Path) -> LanguageId:
    """Map a file extension to its language; error if unknown."""
    ext = Path(path).suffix.lower()
    lang = EXTENSIONS.get(ext)
    if lang is None:
        raise LanguageDetectionError(
            f"{path}: cannot detect language from extension {ext!r}; "
            "use an explicit --lang flag")
    return lang


def tokenize(source: str, lang: LanguageId, file: str = "<string>") -> list[Token]:
    """Lex ``source``; comments and whitespace are dropped."""
    return _tokenize(source, lang, file)


def parse(source: str, lang: LanguageId, file: str = "<string>") -> EcstNode:
    """Parse ``source`` into a COMPILATION_UNIT tree.

    Raises ParseError at the first lexical or syntactic problem.
    """
    from .lang_c import LangCParser
    from .lang_k import LangKParser

    tokens = _tokenize(source, lang, file)
    if lang is LanguageId.LANG_K:
        return LangKParser(tokens, file).parse_unit()
    return LangCParser(tokens, file).parse_unit()


def parse_file(path: str | Path, lang: LanguageId | None = None) -> ParsedFile:
    """Read and parse one source file, detecting the language if needed."""
    if lang is None:
        lang = detect_language(path)
    source = Path(path).read_text(encoding="utf-8")
    tree = parse(source, lang, file=str(path))
    return ParsedFile(path=str(path), lang=lang, source=source, tree=tree)
