"""AST node types for the policy language, plus the canonical pretty-printer.

Node equality ignores source spans, so `parse(pretty_print(ast)) == ast`
holds structurally for every valid tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import NO_SPAN, Span

OBSERVABLES = (
    "health_frac", "shield_frac", "weapon_cooldown",
    "dist_to_closest_enemy", "dist_to_closest_ally",
    "num_allies", "num_enemies", "my_x", "my_y",
    "enemy_centroid_x", "enemy_centroid_y", "time",
)

# action name -> argument count
ACTIONS = {
    "attack_weakest_enemy": 0,
    "attack_closest_enemy": 0,
    "attack_focus": 0,
    "move_to": 2,
    "retreat_from_closest_enemy": 1,
    "hold": 0,
}


@dataclass(frozen=True)
class PolicySource:
    """Raw policy text plus provenance."""

    id: str
    text: str
    origin: str = "handwritten"  # "llm" | "augmented" | "handwritten"


# --- expressions ---------------------------------------------------------

@dataclass(frozen=True)
class Number:
    value: float
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class Name:
    ident: str
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-" | "not"
    operand: "Expr"
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class BinaryOp:
    op: str  # arithmetic, comparison, "and", "or"
    left: "Expr"
    right: "Expr"
    span: Span = field(compare=False, default=NO_SPAN)


Expr = Number | Name | UnaryOp | BinaryOp


# --- statements ----------------------------------------------------------

@dataclass(frozen=True)
class ActionCall:
    name: str
    args: tuple[Expr, ...] = ()
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class SetStmt:
    name: str
    value: Expr
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class IfStmt:
    # (condition, body) per if/elif branch, in order
    branches: tuple[tuple[Expr, tuple["Stmt", ...]], ...]
    orelse: tuple["Stmt", ...] | None = None
    span: Span = field(compare=False, default=NO_SPAN)


Stmt = ActionCall | SetStmt | IfStmt


# --- declarations --------------------------------------------------------

@dataclass(frozen=True)
class ConstDecl:
    name: str
    value: float
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class VarDecl:
    name: str
    value: float
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class UnitBlock:
    unit: str
    var_decls: tuple[VarDecl, ...]
    body: tuple[Stmt, ...]
    span: Span = field(compare=False, default=NO_SPAN)


@dataclass(frozen=True)
class PolicyAst:
    name: str
    consts: tuple[ConstDecl, ...]
    units: tuple[UnitBlock, ...]
    span: Span = field(compare=False, default=NO_SPAN)


# --- canonical pretty-printing ------------------------------------------

_PREC = {
    "or": 1, "and": 2,
    "<": 4, "<=": 4, ">": 4, ">=": 4, "==": 4, "!=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6,
}
_NONASSOC = {"<", "<=", ">", ">=", "==", "!="}


def format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _expr_str(node: Expr, parent_prec: int = 0, right_side: bool = False) -> str:
    if isinstance(node, Number):
        return format_number(node.value)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, UnaryOp):
        inner = _expr_str(node.operand, 7)
        text = f"-{inner}" if node.op == "-" else f"not {inner}"
        return f"({text})" if parent_prec >= 7 else text
    if isinstance(node, BinaryOp):
        prec = _PREC[node.op]
        left = _expr_str(node.left, prec - 1 if node.op not in _NONASSOC else prec)
        right = _expr_str(node.right, prec)
        text = f"{left} {node.op} {right}"
        return f"({text})" if parent_prec >= prec else text
    raise TypeError(f"not an expression node: {node!r}")


def expr_to_str(node: Expr) -> str:
    return _expr_str(node, 0)


def _stmt_lines(stmt: Stmt, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(stmt, ActionCall):
        args = ", ".join(expr_to_str(a) for a in stmt.args)
        out.append(f"{pad}{stmt.name}({args})")
    elif isinstance(stmt, SetStmt):
        out.append(f"{pad}set {stmt.name} = {expr_to_str(stmt.value)}")
    elif isinstance(stmt, IfStmt):
        for i, (cond, body) in enumerate(stmt.branches):
            head = f"{pad}if" if i == 0 else f"{pad}}} elif"
            out.append(f"{head} {expr_to_str(cond)} {{")
            for s in body:
                _stmt_lines(s, indent + 1, out)
        if stmt.orelse is not None:
            out.append(f"{pad}}} else {{")
            for s in stmt.orelse:
                _stmt_lines(s, indent + 1, out)
        out.append(f"{pad}}}")
    else:
        raise TypeError(f"not a statement node: {stmt!r}")


def pretty_print(ast: PolicyAst) -> str:
    """Canonical formatting: 2-space indent, one statement per line."""
    out: list[str] = [f'policy "{ast.name}" {{']
    for c in ast.consts:
        out.append(f"  const {c.name} = {format_number(c.value)}")
    for block in ast.units:
        if len(out) > 1:
            out.append("")
        out.append(f"  unit {block.unit} {{")
        for v in block.var_decls:
            out.append(f"    var {v.name} = {format_number(v.value)}")
        for s in block.body:
            _stmt_lines(s, 2, out)
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
