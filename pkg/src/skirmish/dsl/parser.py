"""Recursive-descent parser and name resolution for the policy language.

Grammar::

    policy      := "policy" STRING "{" const_decl* unit_block* "}"
    const_decl  := "const" IDENT "=" signed_number
    unit_block  := "unit" IDENT "{" var_decl* statement* "}"
    var_decl    := "var" IDENT "=" signed_number
    statement   := if_stmt | set_stmt | action_call
    if_stmt     := "if" expr block ("elif" expr block)* ("else" block)?
    block       := "{" statement* "}"
    set_stmt    := "set" IDENT "=" expr
    action_call := IDENT "(" (expr ("," expr)*)? ")"
    expr        := or_expr
    or_expr     := and_expr ("or" and_expr)*
    and_expr    := not_expr ("and" not_expr)*
    not_expr    := "not" not_expr | comparison
    comparison  := additive (cmp_op additive)?
    additive    := term (("+"|"-") term)*
    term        := unary (("*"|"/") unary)*
    unary       := "-" unary | atom
    atom        := NUMBER | IDENT | "(" expr ")"

Every identifier must resolve to a const, a var of the enclosing unit block,
or a built-in observable; action names must be built-in actions.
"""

from __future__ import annotations

from .ast import (
    ACTIONS,
    OBSERVABLES,
    ActionCall,
    BinaryOp,
    ConstDecl,
    Expr,
    IfStmt,
    Name,
    Number,
    PolicyAst,
    PolicySource,
    SetStmt,
    Stmt,
    UnaryOp,
    UnitBlock,
    VarDecl,
)
from .lexer import LexError, Span, Token, tokenize


class ParseError(Exception):
    """Syntax error with location and the set of tokens that were expected."""

    def __init__(self, message: str, span: Span, expected: frozenset[str] = frozenset()):
        hint = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at {span}{hint}")
        self.message = message
        self.span = span
        self.expected = expected
        self.line = span.line
        self.col = span.col


class PolicyNameError(NameError):
    """An identifier does not resolve to a const, var, observable, or action."""

    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at {span}")
        self.message = message
        self.span = span


_CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.cur
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        expected = frozenset({text if text is not None else f"<{kind}>"})
        got = self.cur.text or "end of input"
        raise ParseError(f"unexpected {got!r}", self.cur.span, expected)

    def fail(self, expected: frozenset[str]) -> ParseError:
        got = self.cur.text or "end of input"
        return ParseError(f"unexpected {got!r}", self.cur.span, expected)

    # --- toplevel -----------------------------------------------------

    def policy(self) -> PolicyAst:
        span = self.cur.span
        self.expect("keyword", "policy")
        name_tok = self.expect("string")
        self.expect("punct", "{")
        consts: list[ConstDecl] = []
        while self.at("keyword", "const"):
            consts.append(self.const_decl())
        units: list[UnitBlock] = []
        while self.at("keyword", "unit"):
            units.append(self.unit_block())
        self.expect("punct", "}")
        self.expect("eof")
        return PolicyAst(name=name_tok.text[1:-1], consts=tuple(consts),
                         units=tuple(units), span=span)

    def signed_number(self) -> float:
        neg = False
        if self.at("op", "-"):
            self.advance()
            neg = True
        tok = self.expect("number")
        value = float(tok.text)
        return -value if neg else value

    def const_decl(self) -> ConstDecl:
        span = self.expect("keyword", "const").span
        name = self.expect("ident").text
        self.expect("punct", "=")
        return ConstDecl(name=name, value=self.signed_number(), span=span)

    def unit_block(self) -> UnitBlock:
        span = self.expect("keyword", "unit").span
        name = self.expect("ident").text
        self.expect("punct", "{")
        var_decls: list[VarDecl] = []
        while self.at("keyword", "var"):
            vspan = self.advance().span
            vname = self.expect("ident").text
            self.expect("punct", "=")
            var_decls.append(VarDecl(name=vname, value=self.signed_number(), span=vspan))
        body: list[Stmt] = []
        while not self.at("punct", "}"):
            body.append(self.statement())
        self.expect("punct", "}")
        return UnitBlock(unit=name, var_decls=tuple(var_decls),
                         body=tuple(body), span=span)

    # --- statements ---------------------------------------------------

    def statement(self) -> Stmt:
        if self.at("keyword", "if"):
            return self.if_stmt()
        if self.at("keyword", "set"):
            span = self.advance().span
            name = self.expect("ident").text
            self.expect("punct", "=")
            return SetStmt(name=name, value=self.expr(), span=span)
        if self.at("ident"):
            tok = self.advance()
            self.expect("punct", "(")
            args: list[Expr] = []
            if not self.at("punct", ")"):
                args.append(self.expr())
                while self.at("punct", ","):
                    self.advance()
                    args.append(self.expr())
            self.expect("punct", ")")
            return ActionCall(name=tok.text, args=tuple(args), span=tok.span)
        raise self.fail(frozenset({"if", "set", "<action>", "}"}))

    def block(self) -> tuple[Stmt, ...]:
        self.expect("punct", "{")
        body: list[Stmt] = []
        while not self.at("punct", "}"):
            body.append(self.statement())
        self.expect("punct", "}")
        return tuple(body)

    def if_stmt(self) -> IfStmt:
        span = self.expect("keyword", "if").span
        branches = [(self.expr(), self.block())]
        orelse = None
        while self.at("keyword", "elif"):
            self.advance()
            branches.append((self.expr(), self.block()))
        if self.at("keyword", "else"):
            self.advance()
            orelse = self.block()
        return IfStmt(branches=tuple(branches), orelse=orelse, span=span)

    # --- expressions --------------------------------------------------

    def expr(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        node = self.and_expr()
        while self.at("keyword", "or"):
            span = self.advance().span
            node = BinaryOp("or", node, self.and_expr(), span=span)
        return node

    def and_expr(self) -> Expr:
        node = self.not_expr()
        while self.at("keyword", "and"):
            span = self.advance().span
            node = BinaryOp("and", node, self.not_expr(), span=span)
        return node

    def not_expr(self) -> Expr:
        if self.at("keyword", "not"):
            span = self.advance().span
            return UnaryOp("not", self.not_expr(), span=span)
        return self.comparison()

    def comparison(self) -> Expr:
        node = self.additive()
        if self.cur.kind == "op" and self.cur.text in _CMP_OPS:
            tok = self.advance()
            node = BinaryOp(tok.text, node, self.additive(), span=tok.span)
        return node

    def additive(self) -> Expr:
        node = self.term()
        while self.cur.kind == "op" and self.cur.text in ("+", "-"):
            tok = self.advance()
            node = BinaryOp(tok.text, node, self.term(), span=tok.span)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.cur.kind == "op" and self.cur.text in ("*", "/"):
            tok = self.advance()
            node = BinaryOp(tok.text, node, self.unary(), span=tok.span)
        return node

    def unary(self) -> Expr:
        if self.at("op", "-"):
            span = self.advance().span
            return UnaryOp("-", self.unary(), span=span)
        return self.atom()

    def atom(self) -> Expr:
        if self.at("number"):
            tok = self.advance()
            return Number(float(tok.text), span=tok.span)
        if self.at("ident"):
            tok = self.advance()
            return Name(tok.text, span=tok.span)
        if self.at("punct", "("):
            self.advance()
            node = self.expr()
            self.expect("punct", ")")
            return node
        raise self.fail(frozenset({"<number>", "<name>", "("}))


# --- name resolution ------------------------------------------------------

_OBSERVABLE_SET = frozenset(OBSERVABLES)


def _resolve_expr(expr: Expr, scope: frozenset[str]) -> None:
    if isinstance(expr, Name):
        if expr.ident not in scope:
            raise PolicyNameError(f"unknown name '{expr.ident}'", expr.span)
    elif isinstance(expr, UnaryOp):
        _resolve_expr(expr.operand, scope)
    elif isinstance(expr, BinaryOp):
        _resolve_expr(expr.left, scope)
        _resolve_expr(expr.right, scope)


def _resolve_stmts(stmts, scope: frozenset[str], var_names: frozenset[str]) -> None:
    for stmt in stmts:
        if isinstance(stmt, ActionCall):
            if stmt.name not in ACTIONS:
                raise PolicyNameError(f"unknown action '{stmt.name}'", stmt.span)
            for arg in stmt.args:
                _resolve_expr(arg, scope)
        elif isinstance(stmt, SetStmt):
            if stmt.name not in var_names:
                raise PolicyNameError(
                    f"set target '{stmt.name}' is not a declared var", stmt.span)
            _resolve_expr(stmt.value, scope)
        elif isinstance(stmt, IfStmt):
            for cond, body in stmt.branches:
                _resolve_expr(cond, scope)
                _resolve_stmts(body, scope, var_names)
            if stmt.orelse is not None:
                _resolve_stmts(stmt.orelse, scope, var_names)


def resolve_names(ast: PolicyAst) -> None:
    """Check that every identifier binds; raise PolicyNameError otherwise."""
    const_names = set()
    for c in ast.consts:
        if c.name in const_names:
            raise ParseError(f"duplicate const '{c.name}'", c.span)
        if c.name in _OBSERVABLE_SET:
            raise ParseError(f"const '{c.name}' shadows an observable", c.span)
        const_names.add(c.name)
    seen_units = set()
    for block in ast.units:
        if block.unit in seen_units:
            raise ParseError(f"duplicate unit block '{block.unit}'", block.span)
        seen_units.add(block.unit)
        var_names = set()
        for v in block.var_decls:
            if v.name in var_names:
                raise ParseError(f"duplicate var '{v.name}'", v.span)
            if v.name in const_names or v.name in _OBSERVABLE_SET:
                raise ParseError(f"var '{v.name}' shadows another name", v.span)
            var_names.add(v.name)
        scope = frozenset(const_names) | frozenset(var_names) | _OBSERVABLE_SET
        _resolve_stmts(block.body, scope, frozenset(var_names))


def parse(source: PolicySource | str) -> PolicyAst:
    """Parse policy text into an AST with resolved names.

    Raises ParseError (with line/column and expected-token set) on syntax
    errors and PolicyNameError on unresolved identifiers.
    """
    text = source.text if isinstance(source, PolicySource) else source
    try:
        tokens = tokenize(text)
    except LexError as e:
        raise ParseError(e.message, e.span) from e
    ast = _Parser(tokens).policy()
    resolve_names(ast)
    return ast
