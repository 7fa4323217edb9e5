"""Pratt parser for operator-polynomial text.

Grammar: integer/decimal literals, the symbols ``q``, ``p``, ``hbar`` and the
imaginary unit ``i``; binary ``+ - * ^``, unary ``-``/``+`` and parentheses.
``^`` binds tightest and takes a nonnegative integer literal exponent.
Multiplication is explicit and keeps the written operator order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .polynomial import I_UNIT, OperatorPolynomial

MAX_EXPONENT = 32

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*^()]))")

OPERAND_START = frozenset({"number", "q", "p", "hbar", "i", "(", "-", "+"})
AFTER_OPERAND = frozenset({"+", "-", "*", "^", ")", "end of input"})

# binding powers
_INFIX = {"+": 10, "-": 10, "*": 20, "^": 30}
_PREFIX_BP = 25


class ParseError(ValueError):
    def __init__(self, message: str, position: int, expected=()):
        self.message = message
        self.position = position
        self.expected = sorted(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, OPERAND_START | AFTER_OPERAND)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.idx = 0

    def peek(self) -> Token:
        return self.tokens[self.idx]

    def advance(self) -> Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def parse(self) -> OperatorPolynomial:
        result = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.text!r}", tok.pos, AFTER_OPERAND)
        return result

    def expression(self, rbp: int) -> OperatorPolynomial:
        left = self.nud(self.advance())
        while True:
            tok = self.peek()
            if tok.kind == "end" or (tok.kind == "op" and tok.text == ")"):
                return left
            if tok.kind != "op":
                raise ParseError(f"unexpected token {tok.text!r}", tok.pos, AFTER_OPERAND)
            bp = _INFIX[tok.text]
            if bp <= rbp:
                return left
            self.advance()
            left = self.led(tok, left)

    def nud(self, tok: Token) -> OperatorPolynomial:
        if tok.kind == "num":
            return OperatorPolynomial.scalar(Fraction(tok.text))
        if tok.kind == "name":
            if tok.text in ("q", "p"):
                return OperatorPolynomial.symbol(tok.text)
            if tok.text == "hbar":
                return OperatorPolynomial.scalar(1, hbar_power=1)
            if tok.text == "i":
                return OperatorPolynomial.scalar(I_UNIT)
            raise ParseError(
                f"unknown symbol {tok.text!r} (parameters must be substituted numerically)",
                tok.pos,
                OPERAND_START,
            )
        if tok.kind == "op":
            if tok.text == "(":
                inner = self.expression(0)
                close = self.advance()
                if close.kind != "op" or close.text != ")":
                    raise ParseError("unbalanced parenthesis", close.pos, {")"} | (AFTER_OPERAND - {"end of input"}))
                return inner
            if tok.text == "-":
                return -self.expression(_PREFIX_BP)
            if tok.text == "+":
                return self.expression(_PREFIX_BP)
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.pos, OPERAND_START)

    def led(self, tok: Token, left: OperatorPolynomial) -> OperatorPolynomial:
        op = tok.text
        if op == "^":
            exp_tok = self.advance()
            if exp_tok.kind != "num" or not exp_tok.text.isdigit():
                raise ParseError("exponent must be a nonnegative integer literal", exp_tok.pos, {"integer"})
            n = int(exp_tok.text)
            if n > MAX_EXPONENT:
                raise ParseError(f"exponent {n} exceeds limit {MAX_EXPONENT}", exp_tok.pos, {"integer"})
            if self.peek().kind == "op" and self.peek().text == "^":
                nxt = self.peek()
                raise ParseError("chained exponents are not supported", nxt.pos, AFTER_OPERAND - {"^"})
            return left**n
        right = self.expression(_INFIX[op])
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        return left * right


def parse(expr: str) -> OperatorPolynomial:
    """Parse text into an operator polynomial, preserving written operator order."""
    return _Parser(expr).parse()
