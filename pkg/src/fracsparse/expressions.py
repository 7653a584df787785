"""Tiny arithmetic expression grammar for user-supplied data functions.

Supported: numbers, the variable x, + - * / ^, parentheses, exp, cos, sin,
pi.  Parsed once into a closure that evaluates on numpy arrays.
"""

from __future__ import annotations

import re

import numpy as np

__all__ = ["parse_expression", "ExpressionError"]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_FUNCTIONS = {"exp": np.exp, "cos": np.cos, "sin": np.sin}
_CONSTANTS = {"pi": np.pi}


class ExpressionError(ValueError):
    pass


def _tokenize(text):
    pos = 0
    text = text.rstrip()
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"bad character at position {pos}: {text[pos]!r}")
        if m.group("num") is not None:
            tokens.append(("num", float(m.group("num"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ExpressionError(f"expected {kind}, got {tok}")
        if value is not None and tok[1] != value:
            raise ExpressionError(f"expected {value!r}, got {tok}")
        self.pos += 1
        return tok

    # sum -> product (('+'|'-') product)*
    def sum(self):
        node = self.product()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.product()
            lhs = node
            if op == "+":
                node = (lambda a, b: lambda x: a(x) + b(x))(lhs, rhs)
            else:
                node = (lambda a, b: lambda x: a(x) - b(x))(lhs, rhs)
        return node

    # product -> unary (('*'|'/') unary)*
    def product(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take()[1]
            rhs = self.unary()
            lhs = node
            if op == "*":
                node = (lambda a, b: lambda x: a(x) * b(x))(lhs, rhs)
            else:
                node = (lambda a, b: lambda x: a(x) / b(x))(lhs, rhs)
        return node

    # unary -> '-' unary | power
    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.unary()
            return lambda x: -inner(x)
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    # power -> atom ('^' unary)?   (right associative)
    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            expo = self.unary()
            return lambda x: base(x) ** expo(x)
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return lambda x, v=value: np.full_like(np.asarray(x, dtype=float), v)
        if kind == "name":
            self.take()
            if value == "x":
                return lambda x: np.asarray(x, dtype=float)
            if value in _CONSTANTS:
                return lambda x, v=_CONSTANTS[value]: np.full_like(
                    np.asarray(x, dtype=float), v
                )
            if value in _FUNCTIONS:
                self.take("op", "(")
                arg = self.sum()
                self.take("op", ")")
                return lambda x, fn=_FUNCTIONS[value]: fn(arg(x))
            raise ExpressionError(f"unknown name {value!r}")
        if (kind, value) == ("op", "("):
            self.take()
            node = self.sum()
            self.take("op", ")")
            return node
        raise ExpressionError(f"unexpected token {(kind, value)}")


def parse_expression(text):
    """Compile an expression in x into a vectorized callable."""
    parser = _Parser(_tokenize(text))
    node = parser.sum()
    parser.take("end")
    return node
