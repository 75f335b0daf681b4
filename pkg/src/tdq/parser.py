"""Recursive-descent parser for exact scalar literals.

Grammar (standard precedence, '-' and '/' left associative):

    expr     :=  term  (('+' | '-') term)*
    term     :=  unary (('*' | '/') unary)*
    unary    :=  ('-' | '+')* power
    power    :=  atom ('^' exponent)?
    exponent :=  ('-' | '+')? INT  |  '(' ('-' | '+')? INT ')'
    atom     :=  INT  |  IDENT  |  '(' expr ')'

Identifiers are the field's indeterminates (ratfunc backend only); '^' binds
tighter than unary minus, so ``-q^2`` means ``-(q^2)``.  Exponents are
integer literals and may be negative.
"""

from __future__ import annotations

from .scalars import Scalar

__all__ = ["ParseError", "parse_scalar"]


class ParseError(ValueError):
    """Syntax or identifier error, with the 0-based offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_OPERATORS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        elif ch in _OPERATORS:
            tokens.append(("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, field):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.field = field

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol: str):
        kind, value, at = self.peek()
        if kind != "op" or value != symbol:
            raise ParseError(f"expected {symbol!r}", at)
        return self.advance()

    def at_op(self, *symbols: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value in symbols

    # -- grammar rules ----------------------------------------------------

    def parse(self) -> Scalar:
        value = self.expr()
        kind, text, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", at)
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while self.at_op("+", "-"):
            _, op, _ = self.advance()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Scalar:
        value = self.unary()
        while self.at_op("*", "/"):
            _, op, at = self.advance()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDivisionError(f"division by zero at position {at}")
                value = value / rhs
        return value

    def unary(self) -> Scalar:
        negate = False
        while self.at_op("-", "+"):
            _, op, _ = self.advance()
            if op == "-":
                negate = not negate
        value = self.power()
        return -value if negate else value

    def power(self) -> Scalar:
        value = self.atom()
        if self.at_op("^"):
            _, _, at = self.advance()
            exponent = self.exponent()
            if exponent < 0 and value.is_zero():
                raise ZeroDivisionError(f"division by zero at position {at}")
            value = value ** exponent
        return value

    def exponent(self) -> int:
        parenthesized = False
        if self.at_op("("):
            self.advance()
            parenthesized = True
        sign = 1
        if self.at_op("-", "+"):
            _, op, _ = self.advance()
            sign = -1 if op == "-" else 1
        kind, text, at = self.peek()
        if kind != "int":
            raise ParseError("expected an integer exponent", at)
        self.advance()
        if parenthesized:
            self.expect_op(")")
        return sign * int(text)

    def atom(self) -> Scalar:
        kind, text, at = self.advance()
        if kind == "int":
            return self.field.from_int(int(text))
        if kind == "ident":
            try:
                return self.field.generator(text)
            except ValueError as exc:
                raise ParseError(str(exc), at) from None
        if kind == "op" and text == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise ParseError(f"expected a value, found {text!r}" if text else "unexpected end of input", at)


def parse_scalar(text: str, field) -> Scalar:
    """Parse a scalar literal in the given field.

    Raises :class:`ParseError` for syntax and identifier problems, and
    :class:`ZeroDivisionError` (with position info) when evaluation divides
    by zero.
    """
    return _Parser(text, field).parse()
