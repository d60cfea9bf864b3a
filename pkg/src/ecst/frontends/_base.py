"""Recursive-descent machinery shared by the two language parsers.

Universal nodes are inserted while parsing: each grammar production that has
a language-independent role wraps the concrete tokens it consumed in the
corresponding universal node, so the emitted tree keeps every lexeme in
source order.

Expressions have conventional precedence (NOT > mul > add > rel > AND > OR)
and carry no universal structure of their own: an EXPRESSION node wraps the
flat token run of the whole expression.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..errors import ParseError
from ..tree import (ConditionPolarity, EcstNode, SourceSpan, UniversalKind,
                    make_universal, token)
from .lexer import Token, TokenCategory


class BaseParser:
    # operator spellings, overridden per language
    OR_OPS: tuple[str, ...] = ()
    AND_OPS: tuple[str, ...] = ()
    NOT_OPS: tuple[str, ...] = ()
    REL_OPS: tuple[str, ...] = ()
    ADD_OPS = ("+", "-")
    MUL_OPS = ("*", "/")

    def __init__(self, tokens: Sequence[Token], file: str):
        self.tokens = list(tokens)
        self.file = file
        self.i = 0

    # -- cursor helpers ----------------------------------------------------

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def at_category(self, category: TokenCategory) -> bool:
        tok = self.peek()
        return tok is not None and tok.category is category

    def here(self) -> SourceSpan:
        tok = self.peek()
        if tok is not None:
            return tok.span
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(last.file, last.line,
                              last.column + len(self.tokens[-1].text))
        return SourceSpan(self.file, 1, 1)

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        found = f"'{tok.text}'" if tok is not None else "end of input"
        return ParseError(self.here(), expected, found)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.fail("a token")
        self.i += 1
        return tok

    def expect(self, text: str, what: Optional[str] = None) -> Token:
        if not self.at(text):
            raise self.fail(what or f"'{text}'")
        return self.advance()

    def expect_ident(self, what: str = "an identifier") -> Token:
        if not self.at_category(TokenCategory.IDENT):
            raise self.fail(what)
        return self.advance()

    def expect_end_of_input(self) -> None:
        if self.peek() is not None:
            raise self.fail("end of input")

    # -- leaf and node builders --------------------------------------------

    def leaf(self, tok: Token) -> EcstNode:
        return token(tok.text, tok.span)

    def take(self, text: str, what: Optional[str] = None) -> EcstNode:
        return self.leaf(self.expect(text, what))

    def name_node(self, what: str = "an identifier") -> EcstNode:
        """NAME universal node around one identifier token."""
        return make_universal(UniversalKind.NAME, [self.leaf(self.expect_ident(what))])

    def condition(self, polarity: Optional[ConditionPolarity] = None) -> EcstNode:
        return make_universal(UniversalKind.CONDITION, [self.expression()],
                              polarity=polarity)

    # -- expressions ---------------------------------------------------------

    def expression(self) -> EcstNode:
        """Recognise one expression and wrap its token run in EXPRESSION."""
        start = self.i
        self._or_level()
        leaves = [self.leaf(t) for t in self.tokens[start:self.i]]
        return make_universal(UniversalKind.EXPRESSION, leaves)

    def _or_level(self) -> None:
        self._and_level()
        while self.peek() is not None and self.peek().text in self.OR_OPS:
            self.advance()
            self._and_level()

    def _and_level(self) -> None:
        self._rel_level()
        while self.peek() is not None and self.peek().text in self.AND_OPS:
            self.advance()
            self._rel_level()

    def _rel_level(self) -> None:
        self._add_level()
        if self.peek() is not None and self.peek().text in self.REL_OPS:
            self.advance()
            self._add_level()

    def _add_level(self) -> None:
        self._mul_level()
        while self.peek() is not None and self.peek().text in self.ADD_OPS:
            self.advance()
            self._mul_level()

    def _mul_level(self) -> None:
        self._unary()
        while self.peek() is not None and self.peek().text in self.MUL_OPS:
            self.advance()
            self._unary()

    def _unary(self) -> None:
        if self.peek() is not None and self.peek().text in self.NOT_OPS:
            self.advance()
            self._unary()
            return
        self._primary()

    def _primary(self) -> None:
        tok = self.peek()
        if tok is None:
            raise self.fail("an expression")
        if tok.category in (TokenCategory.IDENT, TokenCategory.INT_LITERAL):
            self.advance()
            return
        if tok.text == "(":
            self.advance()
            self._or_level()
            self.expect(")")
            return
        raise self.fail("an expression")
