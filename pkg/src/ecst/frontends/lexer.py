"""Hand-written lexers for the two input languages.

Both languages share one scanning loop; they differ only in keyword set,
operator inventory, and comment syntax.  Comments and whitespace are
dropped; every remaining character of the input belongs to exactly one
token, so the emitted spans tile the non-comment, non-whitespace source.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import ParseError
from ..tree import SourceSpan


class TokenCategory(Enum):
    KEYWORD = "KEYWORD"
    IDENT = "IDENT"
    INT_LITERAL = "INT_LITERAL"
    OPERATOR = "OPERATOR"
    PUNCT = "PUNCT"


@dataclass(frozen=True)
class Token:
    text: str
    category: TokenCategory
    span: SourceSpan


KEYWORDS_K = frozenset({
    "MODULE", "PROCEDURE", "END", "IF", "THEN", "ELSIF", "ELSE",
    "WHILE", "DO", "REPEAT", "UNTIL", "RETURN", "AND", "OR", "NOT",
})
KEYWORDS_C = frozenset({"class", "if", "else", "while", "do", "return"})

# Longest-match first.
OPERATORS_K = (":=", "<=", ">=", "<", ">", "=", "#", "+", "-", "*", "/")
OPERATORS_C = ("==", "!=", "<=", ">=", "&&", "||",
               "=", "<", ">", "!", "+", "-", "*", "/")

PUNCT_K = frozenset("();,.")
PUNCT_C = frozenset("(){};,")


class _Scanner:
    """Cursor over source text with 1-based line/column tracking."""

    def __init__(self, source: str, file: str):
        self.source = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.column = 1

    def eof(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.source[i] if i < len(self.source) else ""

    def startswith(self, text: str) -> bool:
        return self.source.startswith(text, self.pos)

    def span(self) -> SourceSpan:
        return SourceSpan(self.file, self.line, self.column)

    def advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.eof():
                return
            if self.source[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1


def _skip_comment_k(s: _Scanner) -> bool:
    """Skip one (* ... *) comment, honouring nesting."""
    if not s.startswith("(*"):
        return False
    start = s.span()
    s.advance(2)
    depth = 1
    while depth > 0:
        if s.eof():
            raise ParseError(start, "'*)' closing the comment", "end of input",
                             message="unterminated comment")
        if s.startswith("(*"):
            depth += 1
            s.advance(2)
        elif s.startswith("*)"):
            depth -= 1
            s.advance(2)
        else:
            s.advance()
    return True


def _skip_comment_c(s: _Scanner) -> bool:
    """Skip one // line comment or /* ... */ block comment."""
    if s.startswith("//"):
        while not s.eof() and s.peek() != "\n":
            s.advance()
        return True
    if s.startswith("/*"):
        start = s.span()
        s.advance(2)
        while not s.startswith("*/"):
            if s.eof():
                raise ParseError(start, "'*/' closing the comment",
                                 "end of input", message="unterminated comment")
            s.advance()
        s.advance(2)
        return True
    return False


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(source: str, lang: "LanguageId", file: str = "<string>") -> list[Token]:
    """Lex ``source`` into a token list, raising ParseError on bad input."""
    from . import LanguageId  # local import breaks the module cycle

    if lang is LanguageId.LANG_K:
        keywords, operators, punct, skip_comment = (
            KEYWORDS_K, OPERATORS_K, PUNCT_K, _skip_comment_k)
    elif lang is LanguageId.LANG_C:
        keywords, operators, punct, skip_comment = (
            KEYWORDS_C, OPERATORS_C, PUNCT_C, _skip_comment_c)
    else:
        raise ValueError(f"unknown language: {lang!r}")

    s = _Scanner(source, file)
    tokens: list[Token] = []
    while not s.eof():
        ch = s.peek()
        if ch in " \t\r\n":
            s.advance()
            continue
        if skip_comment(s):
            continue
        span = s.span()
        if _is_ident_start(ch):
            start = s.pos
            while not s.eof() and _is_ident_char(s.peek()):
                s.advance()
            text = s.source[start:s.pos]
            category = (TokenCategory.KEYWORD if text in keywords
                        else TokenCategory.IDENT)
            tokens.append(Token(text, category, span))
            continue
        if ch.isdigit():
            start = s.pos
            while not s.eof() and s.peek().isdigit():
                s.advance()
            tokens.append(Token(s.source[start:s.pos],
                                TokenCategory.INT_LITERAL, span))
            continue
        for op in operators:
            if s.startswith(op):
                s.advance(len(op))
                tokens.append(Token(op, TokenCategory.OPERATOR, span))
                break
        else:
            if ch in punct:
                s.advance()
                tokens.append(Token(ch, TokenCategory.PUNCT, span))
            else:
                raise ParseError(span, "a token", repr(ch),
                                 message=f"illegal character {ch!r}")
    return tokens
