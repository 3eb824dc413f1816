"""Minimal arithmetic grammar over x, y, r2 with sin/cos/exp.

Used to describe scalar generating functions in map description files.
Grammar (| denotes alternatives, * repetition):

    expr   : term (('+'|'-') term)*
    term   : unary (('*'|'/') unary)*
    unary  : ('+'|'-') unary | power
    power  : atom ('^' unary)?
    atom   : NUMBER | 'pi' | 'x' | 'y' | 'r2'
           | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'

Expressions are parsed to a small AST that supports symbolic partial
derivatives (r2 differentiates through as x*x + y*y) and compilation to a
vectorized numpy callable.  Parse errors report the character position.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import MapSpecError

_FUNCS = ("sin", "cos", "exp")
_VARS = ("x", "y", "r2")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^()":
            tokens.append((c, c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] in ".eE" or
                             (text[j] in "+-" and j > i and text[j - 1] in "eE")):
                j += 1
            try:
                value = float(text[i:j])
            except ValueError:
                raise MapSpecError(f"bad number {text[i:j]!r} at position {i}") from None
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise MapSpecError(f"unexpected character {c!r} at position {i}")
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise MapSpecError(f"expected {kind!r} at position {tok[2]}, got {tok[1]!r}")
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise MapSpecError(f"trailing input at position {tok[2]}: {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            node = (op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] in ("+", "-"):
            self.next()
            inner = self.unary()
            return inner if tok[0] == "+" else ("neg", inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.next()
            return ("^", base, self.unary())
        return base

    def atom(self):
        tok = self.next()
        kind, val, pos = tok
        if kind == "num":
            return ("num", val)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val == "pi":
                return ("num", math.pi)
            if val in _VARS:
                return ("var", val)
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg)
            raise MapSpecError(f"unknown name {val!r} at position {pos}")
        raise MapSpecError(f"unexpected token {val!r} at position {pos}")


def parse(text: str):
    return _Parser(text).parse()


def _num(node):
    return node[0] == "num"


def simplify(node):
    kind = node[0]
    if kind in ("num", "var"):
        return node
    if kind == "neg":
        a = simplify(node[1])
        if _num(a):
            return ("num", -a[1])
        return ("neg", a)
    if kind == "call":
        a = simplify(node[2])
        if _num(a):
            return ("num", getattr(math, node[1])(a[1]))
        return ("call", node[1], a)
    op, a, b = kind, simplify(node[1]), simplify(node[2])
    if _num(a) and _num(b):
        if op == "+":
            return ("num", a[1] + b[1])
        if op == "-":
            return ("num", a[1] - b[1])
        if op == "*":
            return ("num", a[1] * b[1])
        if op == "/":
            return ("num", a[1] / b[1])
        if op == "^":
            return ("num", a[1] ** b[1])
    zero_a = _num(a) and a[1] == 0.0
    zero_b = _num(b) and b[1] == 0.0
    one_a = _num(a) and a[1] == 1.0
    one_b = _num(b) and b[1] == 1.0
    if op == "+":
        if zero_a:
            return b
        if zero_b:
            return a
    elif op == "-":
        if zero_b:
            return a
        if zero_a:
            return simplify(("neg", b))
    elif op == "*":
        if zero_a or zero_b:
            return ("num", 0.0)
        if one_a:
            return b
        if one_b:
            return a
    elif op == "/":
        if zero_a:
            return ("num", 0.0)
        if one_b:
            return a
    elif op == "^":
        if zero_b:
            return ("num", 1.0)
        if one_b:
            return a
    return (op, a, b)


def diff(node, var: str):
    """Partial derivative; r2 contributes the chain-rule factor 2x or 2y."""
    kind = node[0]
    if kind == "num":
        return ("num", 0.0)
    if kind == "var":
        name = node[1]
        if name == var:
            return ("num", 1.0)
        if name == "r2":
            return ("*", ("num", 2.0), ("var", var))
        return ("num", 0.0)
    if kind == "neg":
        return ("neg", diff(node[1], var))
    if kind == "call":
        fn, arg = node[1], node[2]
        da = diff(arg, var)
        if fn == "sin":
            outer = ("call", "cos", arg)
        elif fn == "cos":
            outer = ("neg", ("call", "sin", arg))
        else:  # exp
            outer = ("call", "exp", arg)
        return ("*", outer, da)
    op, a, b = kind, node[1], node[2]
    da, db = diff(a, var), diff(b, var)
    if op == "+":
        return ("+", da, db)
    if op == "-":
        return ("-", da, db)
    if op == "*":
        return ("+", ("*", da, b), ("*", a, db))
    if op == "/":
        return ("/", ("-", ("*", da, b), ("*", a, db)), ("^", b, ("num", 2.0)))
    if op == "^":
        bs = simplify(b)
        if not _num(bs):
            raise MapSpecError("exponents must be constant expressions")
        # d(a^c) = c * a^(c-1) * da
        return ("*", ("*", bs, ("^", a, ("num", bs[1] - 1.0))), da)
    raise MapSpecError(f"cannot differentiate node {kind!r}")


def _emit(node) -> str:
    kind = node[0]
    if kind == "num":
        return repr(node[1])
    if kind == "var":
        return node[1]
    if kind == "neg":
        return f"(-{_emit(node[1])})"
    if kind == "call":
        return f"_np.{node[1]}({_emit(node[2])})"
    op, a, b = kind, node[1], node[2]
    py_op = "**" if op == "^" else op
    return f"({_emit(a)} {py_op} {_emit(b)})"


def compile_ast(node):
    """Compile an AST to f(x, y) -> ndarray, broadcasting over inputs."""
    src = _emit(simplify(node))
    namespace = {"_np": np}
    exec(f"def _f(x, y, _np=_np):\n    r2 = x * x + y * y\n    return {src}\n", namespace)
    raw = namespace["_f"]

    def fn(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = raw(x, y)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(x, y).shape).copy()

    return fn


class ScalarField:
    """A scalar function of the disk compiled from an expression string.

    Exposes the value, gradient, and Hessian entries as vectorized callables.
    """

    def __init__(self, text: str):
        self.text = text
        ast = simplify(parse(text))
        gx = simplify(diff(ast, "x"))
        gy = simplify(diff(ast, "y"))
        self._value = compile_ast(ast)
        self._gx = compile_ast(gx)
        self._gy = compile_ast(gy)
        self._gxx = compile_ast(simplify(diff(gx, "x")))
        self._gxy = compile_ast(simplify(diff(gx, "y")))
        self._gyy = compile_ast(simplify(diff(gy, "y")))

    def value(self, x, y):
        return self._value(x, y)

    def grad(self, x, y):
        return self._gx(x, y), self._gy(x, y)

    def hess(self, x, y):
        return self._gxx(x, y), self._gxy(x, y), self._gyy(x, y)

    def __repr__(self):
        return f"ScalarField({self.text!r})"
