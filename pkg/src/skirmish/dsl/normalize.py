"""Canonical normalization: rename identifiers, strip formatting.

The policy name becomes ``P``, consts become ``C0, C1, ...`` and vars become
``V0, V1, ...`` in declaration order (var numbering runs across unit blocks).
Two policies that differ only in identifier names, comments, or layout
normalize to identical canonical token streams.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    ActionCall,
    BinaryOp,
    ConstDecl,
    IfStmt,
    Name,
    Number,
    PolicyAst,
    SetStmt,
    UnaryOp,
    UnitBlock,
    VarDecl,
    pretty_print,
)
from .lexer import tokenize


@dataclass(frozen=True)
class NormalizedAst:
    """A renamed AST plus its serialized canonical token stream."""

    ast: PolicyAst
    token_stream: tuple[str, ...]

    @property
    def text(self) -> str:
        return pretty_print(self.ast)


def _rename_expr(expr, mapping: dict[str, str]):
    if isinstance(expr, Name):
        new = mapping.get(expr.ident, expr.ident)
        return Name(new, span=expr.span) if new != expr.ident else expr
    if isinstance(expr, UnaryOp):
        return UnaryOp(expr.op, _rename_expr(expr.operand, mapping), span=expr.span)
    if isinstance(expr, BinaryOp):
        return BinaryOp(expr.op, _rename_expr(expr.left, mapping),
                        _rename_expr(expr.right, mapping), span=expr.span)
    return expr  # Number


def _rename_stmt(stmt, mapping: dict[str, str]):
    if isinstance(stmt, ActionCall):
        return ActionCall(stmt.name, tuple(_rename_expr(a, mapping) for a in stmt.args),
                          span=stmt.span)
    if isinstance(stmt, SetStmt):
        return SetStmt(mapping.get(stmt.name, stmt.name),
                       _rename_expr(stmt.value, mapping), span=stmt.span)
    if isinstance(stmt, IfStmt):
        branches = tuple((_rename_expr(c, mapping),
                          tuple(_rename_stmt(s, mapping) for s in body))
                         for c, body in stmt.branches)
        orelse = (tuple(_rename_stmt(s, mapping) for s in stmt.orelse)
                  if stmt.orelse is not None else None)
        return IfStmt(branches, orelse, span=stmt.span)
    raise TypeError(f"not a statement: {stmt!r}")


def normalize(ast: PolicyAst) -> NormalizedAst:
    """Produce the canonical form; idempotent and semantics-preserving."""
    const_map = {c.name: f"C{i}" for i, c in enumerate(ast.consts)}
    consts = tuple(ConstDecl(const_map[c.name], c.value, span=c.span)
                   for c in ast.consts)
    units = []
    var_counter = 0
    for block in ast.units:
        var_map = {}
        var_decls = []
        for v in block.var_decls:
            var_map[v.name] = f"V{var_counter}"
            var_decls.append(VarDecl(var_map[v.name], v.value, span=v.span))
            var_counter += 1
        mapping = const_map | var_map
        body = tuple(_rename_stmt(s, mapping) for s in block.body)
        units.append(UnitBlock(block.unit, tuple(var_decls), body, span=block.span))
    renamed = PolicyAst(name="P", consts=consts, units=tuple(units), span=ast.span)
    stream = tuple(t.text for t in tokenize(pretty_print(renamed)) if t.kind != "eof")
    return NormalizedAst(ast=renamed, token_stream=stream)
