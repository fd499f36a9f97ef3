"""Tokenizer for the battle policy language.

Policies are UTF-8 text with `#` line comments. Tokens carry their source
line and column (1-based) so every later stage can report exact locations.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NO_SPAN = Span(0, 0)

KEYWORDS = frozenset({
    "policy", "unit", "const", "var", "set",
    "if", "elif", "else", "and", "or", "not",
})

# longest first so `<=` wins over `<`
_OPERATORS = ("<=", ">=", "==", "!=", "<", ">", "+", "-", "*", "/")
_PUNCT = ("{", "}", "(", ")", ",", "=")


@dataclass(frozen=True)
class Token:
    kind: str        # "ident" | "keyword" | "number" | "string" | "op" | "punct" | "eof"
    text: str
    span: Span = field(compare=False, default=NO_SPAN)


class LexError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at {span}")
        self.message = message
        self.span = span


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        span = Span(line, col)
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident(source[j]):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            tokens.append(Token("number", source[i:j], span))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] not in '"\n':
                j += 1
            if j >= n or source[j] != '"':
                raise LexError("unterminated string", span)
            tokens.append(Token("string", source[i:j + 1], span))
            col += j + 1 - i
            i = j + 1
            continue
        two = source[i:i + 2]
        if two in _OPERATORS:
            tokens.append(Token("op", two, span))
            i += 2
            col += 2
            continue
        if ch in _OPERATORS:
            tokens.append(Token("op", ch, span))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, span))
            i += 1
            col += 1
            continue
        raise LexError(f"unexpected character {ch!r}", span)
    tokens.append(Token("eof", "", Span(line, col)))
    return tokens
