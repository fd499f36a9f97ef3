"""The decision-tree policy language: parse, normalize, compare, compile."""

from .ast import (
    ACTIONS,
    OBSERVABLES,
    ActionCall,
    BinaryOp,
    ConstDecl,
    IfStmt,
    Name,
    Number,
    PolicyAst,
    PolicySource,
    SetStmt,
    UnaryOp,
    UnitBlock,
    VarDecl,
    pretty_print,
)
from .compiler import CompiledPolicy, CompileError, compile_policy
from .dedup import DEFAULT_THRESHOLD, DropRecord, dedup, dedup_report_json
from .extract import ExtractError, ExtractResult, extract_code_block
from .lexer import Span, tokenize
from .normalize import NormalizedAst, normalize
from .parser import ParseError, PolicyNameError, parse
from .similarity import lcs_length, similarity

__all__ = [
    "ACTIONS", "OBSERVABLES",
    "ActionCall", "BinaryOp", "CompileError", "CompiledPolicy", "ConstDecl",
    "DEFAULT_THRESHOLD", "DropRecord", "ExtractError", "ExtractResult",
    "IfStmt", "Name", "NormalizedAst", "Number", "ParseError", "PolicyAst",
    "PolicyNameError", "PolicySource", "SetStmt", "Span", "UnaryOp",
    "UnitBlock", "VarDecl",
    "compile_policy", "dedup", "dedup_report_json", "extract_code_block",
    "lcs_length", "normalize", "parse", "pretty_print", "similarity",
    "tokenize",
]
