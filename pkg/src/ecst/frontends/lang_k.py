"""Parser for the keyword-structured language (modules, REPEAT-UNTIL).

Grammar sketch:

    module    := "MODULE" ident ";" {procedure} "END" ident "."
    procedure := "PROCEDURE" ident "(" [ident {"," ident}] ")" ";"
                 {stmt} "END" ident ";"
    stmt      := assign | if | while | repeat | call | return
    if        := "IF" expr "THEN" {stmt} {"ELSIF" expr "THEN" {stmt}}
                 ["ELSE" {stmt}] "END" ";"
    while     := "WHILE" expr "DO" {stmt} "END" ";"
    repeat    := "REPEAT" {stmt} "UNTIL" expr ";"

REPEAT-UNTIL states the condition for *leaving* the loop, so its CONDITION
node carries EXIT_WHEN_TRUE; WHILE conditions carry CONTINUE_WHEN_TRUE.
ELSIF chains nest: each ELSIF becomes a BRANCH_STATEMENT in the else
position of the one before it, so every predicate stays countable.
"""

from __future__ import annotations

from ..tree import ConditionPolarity, EcstNode, UniversalKind, make_universal
from ._base import BaseParser
from .lexer import TokenCategory

K = UniversalKind

_STMT_STOP = frozenset({"END", "ELSIF", "ELSE", "UNTIL"})


class LangKParser(BaseParser):
    OR_OPS = ("OR",)
    AND_OPS = ("AND",)
    NOT_OPS = ("NOT",)
    REL_OPS = ("<", "<=", ">", ">=", "=", "#")

    def parse_unit(self) -> EcstNode:
        children = [self.take("MODULE")]
        children.append(make_universal(K.UNIT_NAME, [self.name_node("a module name")]))
        children.append(self.take(";"))
        while self.at("PROCEDURE"):
            children.append(self._procedure())
        children.append(self.take("END", "'PROCEDURE' or 'END'"))
        children.append(self.leaf(self.expect_ident()))
        children.append(self.take("."))
        self.expect_end_of_input()
        return make_universal(K.COMPILATION_UNIT, children)

    def _procedure(self) -> EcstNode:
        children = [self.take("PROCEDURE")]
        decl = [self.name_node("a procedure name")]
        params = [self.take("(")]
        if self.at_category(TokenCategory.IDENT):
            params.append(self.name_node())
            while self.at(","):
                params.append(self.take(","))
                params.append(self.name_node())
        params.append(self.take(")"))
        decl.append(make_universal(K.PARAMETER_LIST, params))
        children.append(make_universal(K.FUNCTION_DECL, decl))
        children.append(self.take(";"))
        children.append(self._statement_block())
        children.append(self.take("END", "a statement or 'END'"))
        children.append(self.leaf(self.expect_ident()))
        children.append(self.take(";"))
        return make_universal(K.FUNCTION_DEF, children)

    def _statement_block(self) -> EcstNode:
        """Statements up to the enclosing construct's terminator keyword."""
        span = self.here()
        stmts = []
        while self.peek() is not None and self.peek().text not in _STMT_STOP:
            stmts.append(self._statement())
        return make_universal(K.STATEMENT_BLOCK, stmts, span=span)

    def _statement(self) -> EcstNode:
        tok = self.peek()
        if tok is None:
            raise self.fail("a statement")
        if tok.text == "IF":
            return self._if_statement()
        if tok.text == "WHILE":
            return self._while_statement()
        if tok.text == "REPEAT":
            return self._repeat_statement()
        if tok.text == "RETURN":
            return self._return_statement()
        if tok.category is TokenCategory.IDENT:
            follower = self.peek(1)
            if follower is not None and follower.text == ":=":
                return self._assign_statement()
            if follower is not None and follower.text == "(":
                return self._call_statement()
        raise self.fail("a statement")

    def _branch_arm(self) -> EcstNode:
        span = self.here()
        return make_universal(K.BRANCH, [self._statement_block()], span=span)

    def _if_statement(self) -> EcstNode:
        children = [self.take("IF"), self.condition(), self.take("THEN"),
                    self._branch_arm()]
        children.extend(self._if_tail())
        children.append(self.take("END", "a statement, 'ELSIF', 'ELSE' or 'END'"))
        children.append(self.take(";"))
        return make_universal(K.BRANCH_STATEMENT, children)

    def _if_tail(self) -> list[EcstNode]:
        if self.at("ELSIF"):
            kids = [self.take("ELSIF"), self.condition(), self.take("THEN"),
                    self._branch_arm()]
            kids.extend(self._if_tail())
            return [make_universal(K.BRANCH_STATEMENT, kids)]
        if self.at("ELSE"):
            return [self.take("ELSE"), self._branch_arm()]
        return []

    def _while_statement(self) -> EcstNode:
        children = [self.take("WHILE"),
                    self.condition(ConditionPolarity.CONTINUE_WHEN_TRUE),
                    self.take("DO"), self._statement_block(),
                    self.take("END", "a statement or 'END'"), self.take(";")]
        return make_universal(K.LOOP_STATEMENT, children)

    def _repeat_statement(self) -> EcstNode:
        children = [self.take("REPEAT"), self._statement_block(),
                    self.take("UNTIL", "a statement or 'UNTIL'"),
                    self.condition(ConditionPolarity.EXIT_WHEN_TRUE),
                    self.take(";")]
        return make_universal(K.LOOP_STATEMENT, children)

    def _assign_statement(self) -> EcstNode:
        children = [self.leaf(self.expect_ident()), self.take(":="),
                    self.expression(), self.take(";")]
        return make_universal(K.ASSIGN_STATEMENT, children)

    def _call_statement(self) -> EcstNode:
        children = [make_universal(K.NAME, [self.leaf(self.expect_ident())])]
        args = [self.take("(")]
        if not self.at(")"):
            args.append(self.expression())
            while self.at(","):
                args.append(self.take(","))
                args.append(self.expression())
        args.append(self.take(")"))
        children.append(make_universal(K.ARGUMENT_LIST, args))
        children.append(self.take(";"))
        return make_universal(K.FUNCTION_CALL, children)

    def _return_statement(self) -> EcstNode:
        children = [self.take("RETURN")]
        if not self.at(";"):
            children.append(self.expression())
        children.append(self.take(";"))
        return make_universal(K.RETURN_STATEMENT, children)
