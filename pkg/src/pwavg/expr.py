"""Small expression grammar for system definition files.

Grammar (infix, case-sensitive):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-'|'+') factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'pi' | VARIABLE | FUNC '(' expr ')' | '(' expr ')'

with FUNC one of sin, cos, ln and the variable set fixed by context:
planar components use x, y; standard-form sectors use r, theta.
Exponents after '^' must evaluate to numbers; only integer exponents are
defined for expressions whose value at the evaluation point is a jet with
non-positive constant term.

Polynomial (more precisely, rational) expressions are lowered to the flat
descriptor form so they run on the compiled kernel; anything else is
evaluated through the jet-generic series operations.
"""

import math
import re

from . import series
from .errors import ConfigError

__all__ = ["parse", "evaluate", "NotLowerable", "lower_xy",
           "lower_standard"]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?"
                    r"|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<op>[-+*/^()]))")

_FUNCS = {"sin": series.sin, "cos": series.cos, "ln": series.ln}


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ConfigError(f"bad character in expression at: "
                              f"{text[pos:pos + 10]!r}")
        pos = m.end()
        if m.lastgroup == "num":
            out.append(("num", float(m.group("num"))))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, tokens, text):
        self.toks = tokens
        self.pos = 0
        self.text = text

    def peek(self):
        return self.toks[self.pos]

    def take(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ConfigError(f"expected {op!r} in {self.text!r}")

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.factor())
        if self.peek() == ("op", "+"):
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("bin", "^", base, self.factor())
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if val == "pi":
                return ("num", math.pi)
            if self.peek() == ("op", "("):
                if val not in _FUNCS:
                    raise ConfigError(f"unknown function {val!r} in "
                                      f"{self.text!r}")
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return ("call", val, arg)
            return ("var", val)
        if (kind, val) == ("op", "("):
            node = self.expr()
            self.expect_op(")")
            return node
        raise ConfigError(f"unexpected token in {self.text!r}")


def parse(text, variables):
    """Parse one expression; only the given variable names are allowed."""
    p = _Parser(_tokenize(text), text)
    node = p.expr()
    if p.peek() != ("end", None):
        raise ConfigError(f"trailing input in expression {text!r}")
    for name in _free_vars(node):
        if name not in variables:
            raise ConfigError(f"unknown variable {name!r} in {text!r} "
                              f"(allowed: {', '.join(sorted(variables))})")
    return node


def _free_vars(node):
    tag = node[0]
    if tag == "var":
        return {node[1]}
    if tag == "num":
        return set()
    if tag == "neg":
        return _free_vars(node[1])
    if tag == "call":
        return _free_vars(node[2])
    return _free_vars(node[2]) | _free_vars(node[3])


def evaluate(node, env):
    """Evaluate on floats or jets (the series functions dispatch)."""
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return env[node[1]]
    if tag == "neg":
        return -evaluate(node[1], env)
    if tag == "call":
        return _FUNCS[node[1]](evaluate(node[2], env))
    _, op, a, b = node
    va = evaluate(a, env)
    if op == "^":
        vb = evaluate(b, env)
        if isinstance(vb, series.Jet):
            raise ConfigError("exponent must evaluate to a number")
        if float(vb) == int(vb):
            vb = int(vb)
        return va ** vb
    vb = evaluate(b, env)
    if op == "+":
        return va + vb
    if op == "-":
        return va - vb
    if op == "*":
        return va * vb
    return va / vb


# -- lowering to polynomial/rational form -----------------------------------

class NotLowerable(Exception):
    """The expression is not rational over the descriptor atoms."""


def _pmul(p, q):
    out = {}
    for k1, w1 in p.items():
        for k2, w2 in q.items():
            key = tuple(a + b for a, b in zip(k1, k2))
            out[key] = out.get(key, 0.0) + w1 * w2
    return {k: w for k, w in out.items() if w != 0.0}


def _padd(p, q, sign=1.0):
    out = dict(p)
    for k, w in q.items():
        out[k] = out.get(k, 0.0) + sign * w
    return {k: w for k, w in out.items() if w != 0.0}


def _ppow(p, n, dims):
    out = {(0,) * dims: 1.0}
    for _ in range(n):
        out = _pmul(out, p)
    return out


def _lower(node, atom_of, dims):
    """Rational form (num, den) over monomial dicts; den may be trivial."""
    one = {(0,) * dims: 1.0}
    tag = node[0]
    if tag == "num":
        return ({(0,) * dims: node[1]} if node[1] != 0.0 else {}), one
    idx = atom_of(node)
    if idx is not None:
        key = tuple(1 if i == idx else 0 for i in range(dims))
        return {key: 1.0}, one
    if tag == "var":
        raise NotLowerable(node)
    if tag == "neg":
        n, d = _lower(node[1], atom_of, dims)
        return {k: -w for k, w in n.items()}, d
    if tag == "call":
        raise NotLowerable(node)
    _, op, a, b = node
    na, da = _lower(a, atom_of, dims)
    if op == "^":
        if b[0] != "num" or float(b[1]) != int(b[1]):
            raise NotLowerable(node)
        n = int(b[1])
        if n >= 0:
            return _ppow(na, n, dims), _ppow(da, n, dims)
        if not na:
            raise ConfigError("negative power of the zero polynomial")
        return _ppow(da, -n, dims), _ppow(na, -n, dims)
    nb, db = _lower(b, atom_of, dims)
    if op == "+":
        return _padd(_pmul(na, db), _pmul(nb, da)), _pmul(da, db)
    if op == "-":
        return _padd(_pmul(na, db), _pmul(nb, da), sign=-1.0), _pmul(da, db)
    if op == "*":
        return _pmul(na, nb), _pmul(da, db)
    if not nb:
        raise ConfigError("division by the zero polynomial")
    return _pmul(na, db), _pmul(da, nb)


def _normalize(num, den, dims):
    """Divide out a constant denominator."""
    zero = (0,) * dims
    if list(den.keys()) == [zero]:
        c = den[zero]
        return {k: w / c for k, w in num.items()}, None
    return num, den


def lower_xy(node):
    """Rational form over (x, y); raises NotLowerable otherwise.

    Returns (num, den) as {(deg_x, deg_y): w} dicts, den None if trivial.
    """
    def atom_of(n):
        if n[0] == "var" and n[1] == "x":
            return 0
        if n[0] == "var" and n[1] == "y":
            return 1
        return None

    num, den = _lower(node, atom_of, 2)
    return _normalize(num, den, 2)


def lower_standard(node):
    """Rational form over (r, cos(theta), sin(theta)).

    Returns (num, den) as {(r_pow, pow_cos, pow_sin): w} dicts, den None
    if trivial; raises NotLowerable for anything beyond rational in these
    atoms (e.g. ln of an r-dependent argument).
    """
    def atom_of(n):
        if n[0] == "var" and n[1] == "r":
            return 0
        if n[0] == "call" and n[2] == ("var", "theta"):
            if n[1] == "cos":
                return 1
            if n[1] == "sin":
                return 2
        return None

    num, den = _lower(node, atom_of, 3)
    return _normalize(num, den, 3)
