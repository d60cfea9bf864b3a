"""Parser for the curly-brace language (classes, do-while).

Grammar sketch:

    unit    := "class" ident "{" {method} "}"
    method  := ident ident "(" [ident ident {"," ident ident}] ")" block
    block   := "{" {stmt} "}"
    stmt    := vardecl | assign | if | while | dowhile | call | return | block
    if      := "if" "(" expr ")" stmt ["else" stmt]
    while   := "while" "(" expr ")" stmt
    dowhile := "do" stmt "while" "(" expr ")" ";"

Both while and do-while state the condition to *continue* looping, so their
CONDITION nodes carry CONTINUE_WHEN_TRUE.  Loop bodies and branch arms are
normalised to a STATEMENT_BLOCK even when written without braces, which
keeps skeletons comparable with the keyword language.  A variable
declaration is emitted as ASSIGN_STATEMENT (the vocabulary is closed and
has no declaration kind; a declaration binds a name exactly like an
assignment does).
"""

from __future__ import annotations

from ..tree import ConditionPolarity, EcstNode, UniversalKind, make_universal
from ._base import BaseParser
from .lexer import TokenCategory

K = UniversalKind


class LangCParser(BaseParser):
    OR_OPS = ("||",)
    AND_OPS = ("&&",)
    NOT_OPS = ("!",)
    REL_OPS = ("<", "<=", ">", ">=", "==", "!=")

    def parse_unit(self) -> EcstNode:
        children = [self.take("class")]
        children.append(make_universal(K.UNIT_NAME, [self.name_node("a class name")]))
        children.append(self.take("{"))
        while not self.at("}") and self.peek() is not None:
            children.append(self._method())
        children.append(self.take("}", "a method or '}'"))
        self.expect_end_of_input()
        return make_universal(K.COMPILATION_UNIT, children)

    def _method(self) -> EcstNode:
        children = [self.leaf(self.expect_ident("a return type"))]
        decl = [self.name_node("a method name")]
        params = [self.take("(")]
        if self.at_category(TokenCategory.IDENT):
            params.append(self.leaf(self.expect_ident("a parameter type")))
            params.append(self.name_node("a parameter name"))
            while self.at(","):
                params.append(self.take(","))
                params.append(self.leaf(self.expect_ident("a parameter type")))
                params.append(self.name_node("a parameter name"))
        params.append(self.take(")"))
        decl.append(make_universal(K.PARAMETER_LIST, params))
        children.append(make_universal(K.FUNCTION_DECL, decl))
        children.append(self._block())
        return make_universal(K.FUNCTION_DEF, children)

    def _block(self) -> EcstNode:
        children = [self.take("{")]
        while not self.at("}") and self.peek() is not None:
            children.append(self._statement())
        children.append(self.take("}", "a statement or '}'"))
        return make_universal(K.STATEMENT_BLOCK, children)

    def _controlled_block(self) -> EcstNode:
        """Loop body or branch arm, normalised to a STATEMENT_BLOCK."""
        if self.at("{"):
            return self._block()
        return make_universal(K.STATEMENT_BLOCK, [self._statement()])

    def _statement(self) -> EcstNode:
        tok = self.peek()
        if tok is None:
            raise self.fail("a statement")
        if tok.text == "{":
            return self._block()
        if tok.text == "if":
            return self._if_statement()
        if tok.text == "while":
            return self._while_statement()
        if tok.text == "do":
            return self._do_while_statement()
        if tok.text == "return":
            return self._return_statement()
        if tok.category is TokenCategory.IDENT:
            follower = self.peek(1)
            if follower is not None and follower.category is TokenCategory.IDENT:
                return self._vardecl_statement()
            if follower is not None and follower.text == "=":
                return self._assign_statement()
            if follower is not None and follower.text == "(":
                return self._call_statement()
        raise self.fail("a statement")

    def _if_statement(self) -> EcstNode:
        children = [self.take("if"), self.take("("), self.condition(),
                    self.take(")"),
                    make_universal(K.BRANCH, [self._controlled_block()])]
        if self.at("else"):
            children.append(self.take("else"))
            if self.at("if"):
                # else-if chains nest just like ELSIF chains
                children.append(self._if_statement())
            else:
                children.append(
                    make_universal(K.BRANCH, [self._controlled_block()]))
        return make_universal(K.BRANCH_STATEMENT, children)

    def _while_statement(self) -> EcstNode:
        children = [self.take("while"), self.take("("),
                    self.condition(ConditionPolarity.CONTINUE_WHEN_TRUE),
                    self.take(")"), self._controlled_block()]
        return make_universal(K.LOOP_STATEMENT, children)

    def _do_while_statement(self) -> EcstNode:
        children = [self.take("do"), self._controlled_block(),
                    self.take("while"), self.take("("),
                    self.condition(ConditionPolarity.CONTINUE_WHEN_TRUE),
                    self.take(")"), self.take(";")]
        return make_universal(K.LOOP_STATEMENT, children)

    def _vardecl_statement(self) -> EcstNode:
        children = [self.leaf(self.expect_ident("a type name")),
                    self.leaf(self.expect_ident("a variable name"))]
        if self.at("="):
            children.append(self.take("="))
            children.append(self.expression())
        children.append(self.take(";"))
        return make_universal(K.ASSIGN_STATEMENT, children)

    def _assign_statement(self) -> EcstNode:
        children = [self.leaf(self.expect_ident()), self.take("="),
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
        children = [self.take("return")]
        if not self.at(";"):
            children.append(self.expression())
        children.append(self.take(";"))
        return make_universal(K.RETURN_STATEMENT, children)
