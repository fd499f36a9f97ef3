"""Compilation of policy ASTs into executable per-tick deciders.

A compiled policy maps (unit type, observation, status vars) to exactly one
action request per tick. Evaluation walks the unit block top-down: `set`
statements update status variables, the first action reached wins, and a
block that falls through without reaching an action holds.

Compilation type-checks expressions (numbers vs booleans), validates action
arities, and rejects statements that can never execute because every path
through an earlier statement already acts.
"""

from __future__ import annotations

from ..errors import PolicyRuntimeError
from .ast import (
    ACTIONS,
    ActionCall,
    BinaryOp,
    IfStmt,
    Name,
    Number,
    PolicyAst,
    SetStmt,
    UnaryOp,
)
from .lexer import Span

_ARITH = ("+", "-", "*", "/")
_CMP = ("<", "<=", ">", ">=", "==", "!=")


class CompileError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at {span}")
        self.message = message
        self.span = span


# --- type checking --------------------------------------------------------

def _check_expr(expr, var_names: frozenset[str], const_values: dict[str, float]) -> str:
    """Return the expression's type, "num" or "bool"."""
    if isinstance(expr, Number):
        return "num"
    if isinstance(expr, Name):
        return "num"  # consts, vars, and observables are all numeric
    if isinstance(expr, UnaryOp):
        t = _check_expr(expr.operand, var_names, const_values)
        if expr.op == "-":
            if t != "num":
                raise CompileError("unary '-' needs a number", expr.span)
            return "num"
        if t != "bool":
            raise CompileError("'not' needs a boolean", expr.span)
        return "bool"
    if isinstance(expr, BinaryOp):
        lt = _check_expr(expr.left, var_names, const_values)
        rt = _check_expr(expr.right, var_names, const_values)
        if expr.op in _ARITH:
            if lt != "num" or rt != "num":
                raise CompileError(f"'{expr.op}' needs numbers", expr.span)
            return "num"
        if expr.op in _CMP:
            if lt != "num" or rt != "num":
                raise CompileError(f"'{expr.op}' compares numbers", expr.span)
            return "bool"
        # and / or
        if lt != "bool" or rt != "bool":
            raise CompileError(f"'{expr.op}' needs booleans", expr.span)
        return "bool"
    raise TypeError(f"not an expression: {expr!r}")


def _always_acts(stmt) -> bool:
    if isinstance(stmt, ActionCall):
        return True
    if isinstance(stmt, IfStmt):
        if stmt.orelse is None:
            return False
        return (all(_seq_always_acts(body) for _c, body in stmt.branches)
                and _seq_always_acts(stmt.orelse))
    return False


def _seq_always_acts(stmts) -> bool:
    return any(_always_acts(s) for s in stmts)


def _check_stmts(stmts, var_names, const_values) -> None:
    for i, stmt in enumerate(stmts):
        if isinstance(stmt, ActionCall):
            arity = ACTIONS[stmt.name]
            if len(stmt.args) != arity:
                raise CompileError(
                    f"{stmt.name} takes {arity} argument(s), got {len(stmt.args)}",
                    stmt.span)
            for arg in stmt.args:
                if _check_expr(arg, var_names, const_values) != "num":
                    raise CompileError("action arguments must be numbers", arg.span)
        elif isinstance(stmt, SetStmt):
            if _check_expr(stmt.value, var_names, const_values) != "num":
                raise CompileError("set needs a numeric value", stmt.span)
        elif isinstance(stmt, IfStmt):
            for cond, body in stmt.branches:
                if _check_expr(cond, var_names, const_values) != "bool":
                    raise CompileError("condition must be boolean", cond.span)
                _check_stmts(body, var_names, const_values)
            if stmt.orelse is not None:
                _check_stmts(stmt.orelse, var_names, const_values)
        if _always_acts(stmt) and i + 1 < len(stmts):
            raise CompileError("unreachable statement: every path above "
                               "already issues an action", stmts[i + 1].span)


# --- closure compilation --------------------------------------------------

def _compile_expr(expr, const_values: dict[str, float]):
    if isinstance(expr, Number):
        v = expr.value
        return lambda obs, sv: v
    if isinstance(expr, Name):
        ident = expr.ident
        if ident in const_values:
            v = const_values[ident]
            return lambda obs, sv: v
        if ident in ("health_frac", "shield_frac", "weapon_cooldown",
                     "dist_to_closest_enemy", "dist_to_closest_ally",
                     "num_allies", "num_enemies", "my_x", "my_y",
                     "enemy_centroid_x", "enemy_centroid_y", "time"):
            return lambda obs, sv, _a=ident: getattr(obs, _a)
        return lambda obs, sv, _n=ident: sv[_n]
    if isinstance(expr, UnaryOp):
        inner = _compile_expr(expr.operand, const_values)
        if expr.op == "-":
            return lambda obs, sv: -inner(obs, sv)
        return lambda obs, sv: not inner(obs, sv)
    if isinstance(expr, BinaryOp):
        left = _compile_expr(expr.left, const_values)
        right = _compile_expr(expr.right, const_values)
        op = expr.op
        if op == "+":
            return lambda obs, sv: left(obs, sv) + right(obs, sv)
        if op == "-":
            return lambda obs, sv: left(obs, sv) - right(obs, sv)
        if op == "*":
            return lambda obs, sv: left(obs, sv) * right(obs, sv)
        if op == "/":
            span = expr.span

            def divide(obs, sv):
                denom = right(obs, sv)
                if denom == 0:
                    raise PolicyRuntimeError("division by zero", span)
                return left(obs, sv) / denom

            return divide
        if op == "<":
            return lambda obs, sv: left(obs, sv) < right(obs, sv)
        if op == "<=":
            return lambda obs, sv: left(obs, sv) <= right(obs, sv)
        if op == ">":
            return lambda obs, sv: left(obs, sv) > right(obs, sv)
        if op == ">=":
            return lambda obs, sv: left(obs, sv) >= right(obs, sv)
        if op == "==":
            return lambda obs, sv: left(obs, sv) == right(obs, sv)
        if op == "!=":
            return lambda obs, sv: left(obs, sv) != right(obs, sv)
        if op == "and":
            return lambda obs, sv: left(obs, sv) and right(obs, sv)
        if op == "or":
            return lambda obs, sv: left(obs, sv) or right(obs, sv)
    raise TypeError(f"not an expression: {expr!r}")


def _compile_stmts(stmts, const_values):
    steps = []
    for stmt in stmts:
        if isinstance(stmt, ActionCall):
            name = stmt.name
            if stmt.args:
                arg_fns = [_compile_expr(a, const_values) for a in stmt.args]

                def act(obs, sv, _n=name, _fns=arg_fns):
                    return (_n, *[f(obs, sv) for f in _fns])
            else:
                request = (name,)

                def act(obs, sv, _r=request):
                    return _r
            steps.append(act)
        elif isinstance(stmt, SetStmt):
            value = _compile_expr(stmt.value, const_values)

            def assign(obs, sv, _n=stmt.name, _v=value):
                sv[_n] = _v(obs, sv)
                return None

            steps.append(assign)
        elif isinstance(stmt, IfStmt):
            branches = [(_compile_expr(c, const_values), _compile_stmts(b, const_values))
                        for c, b in stmt.branches]
            orelse = (_compile_stmts(stmt.orelse, const_values)
                      if stmt.orelse is not None else None)

            def branch(obs, sv, _b=branches, _e=orelse):
                for cond, body in _b:
                    if cond(obs, sv):
                        return body(obs, sv)
                if _e is not None:
                    return _e(obs, sv)
                return None

            steps.append(branch)

    def run(obs, sv):
        for fn in steps:
            result = fn(obs, sv)
            if result is not None:
                return result
        return None

    return run


_HOLD = ("hold",)


class CompiledPolicy:
    """Immutable executable form of a policy."""

    def __init__(self, name: str, blocks: dict, initials: dict):
        self.name = name
        self._blocks = blocks
        self._initials = initials

    @property
    def unit_names(self) -> frozenset[str]:
        return frozenset(self._blocks)

    def initial_vars(self, unit: str) -> dict[str, float]:
        return dict(self._initials.get(unit, ()))

    def act(self, unit: str, obs, status_vars: dict) -> tuple:
        """Decide one action for a unit this tick; holds when no block matches."""
        block = self._blocks.get(unit)
        if block is None:
            return _HOLD
        result = block(obs, status_vars)
        return result if result is not None else _HOLD


def compile_policy(ast: PolicyAst) -> CompiledPolicy:
    """Type-check and compile an AST. Raises CompileError with a span."""
    const_values = {c.name: c.value for c in ast.consts}
    blocks = {}
    initials = {}
    for block in ast.units:
        var_names = frozenset(v.name for v in block.var_decls)
        _check_stmts(block.body, var_names, const_values)
        blocks[block.unit] = _compile_stmts(block.body, const_values)
        initials[block.unit] = {v.name: v.value for v in block.var_decls}
    return CompiledPolicy(ast.name, blocks, initials)
