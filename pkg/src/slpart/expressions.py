"""Closed-form coefficient expressions and piecewise-constant tables.

Expressions are parsed by a small recursive-descent parser over the grammar

    expr   := term  { (+|-) term }
    term   := unary { (*|/) unary }
    unary  := '-' unary | power
    power  := atom [ '^' unary ]            (right associative)
    atom   := NUMBER | 'x' | 'pi' | FUNC '(' expr [ ',' expr ] ')' | '(' expr ')'

with FUNC one of sin, cos, exp, sqrt, abs (unary) and min, max (binary).
Nothing else parses.  Evaluation is deterministic and vectorizes over
numpy arrays; non-finite results raise EvalError with the offending x.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

UNARY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
BINARY_FUNCS = {"min": np.minimum, "max": np.maximum}


class ParseError(ValueError):
    """Syntax or semantic error in an expression, with byte offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at offset {pos})")
        self.pos = pos


class EvalError(ArithmeticError):
    """Expression evaluated to a non-finite value."""


# AST nodes are plain tuples:
#   ("num", value) | ("x",) | ("pi",) | ("neg", a)
#   ("bin", op, a, b) | ("call", name, (args...))

_TOKEN_CHARS = set("+-*/^(),")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, pos) tokens; kinds: num, ident, op."""
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_CHARS:
            toks.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                float(text)
            except ValueError:
                raise ParseError(f"bad numeric literal {text!r}", i) from None
            toks.append(("num", text, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(("ident", src[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        kind, t, pos = self.next()
        if t != text:
            raise ParseError(f"expected {text!r}, found {t!r}", pos)

    def parse(self):
        node = self.expr()
        kind, t, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {t!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.next()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[1] == "^":
            self.next()
            node = ("bin", "^", node, self.unary())
        return node

    def atom(self):
        kind, text, pos = self.next()
        if kind == "num":
            return ("num", float(text))
        if kind == "ident":
            if text == "x":
                return ("x",)
            if text == "pi":
                return ("pi",)
            if text in UNARY_FUNCS or text in BINARY_FUNCS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.expr())
                self.expect(")")
                want = 2 if text in BINARY_FUNCS else 1
                if len(args) != want:
                    raise ParseError(
                        f"{text} takes {want} argument(s), got {len(args)}", pos
                    )
                return ("call", text, tuple(args))
            raise ParseError(f"unknown identifier {text!r}", pos)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {text!r}", pos)


def _eval_node(node, x):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "x":
        return x
    if tag == "pi":
        return math.pi
    if tag == "neg":
        return -_eval_node(node[1], x)
    if tag == "bin":
        _, op, a, b = node
        va, vb = _eval_node(a, x), _eval_node(b, x)
        if op == "+":
            return va + vb
        if op == "-":
            return va - vb
        if op == "*":
            return va * vb
        if op == "/":
            return va / vb
        return np.power(va, vb)
    _, name, args = node
    if name in UNARY_FUNCS:
        return UNARY_FUNCS[name](_eval_node(args[0], x))
    return BINARY_FUNCS[name](_eval_node(args[0], x), _eval_node(args[1], x))


def _print_node(node) -> str:
    tag = node[0]
    if tag == "num":
        return repr(node[1])
    if tag == "x":
        return "x"
    if tag == "pi":
        return "pi"
    if tag == "neg":
        return f"(-{_print_node(node[1])})"
    if tag == "bin":
        _, op, a, b = node
        return f"({_print_node(a)} {op} {_print_node(b)})"
    _, name, args = node
    return f"{name}({', '.join(_print_node(a) for a in args)})"


def _uses_x(node) -> bool:
    tag = node[0]
    if tag == "x":
        return True
    if tag == "neg":
        return _uses_x(node[1])
    if tag == "bin":
        return _uses_x(node[2]) or _uses_x(node[3])
    if tag == "call":
        return any(_uses_x(a) for a in node[2])
    return False


@dataclass(frozen=True)
class CoeffExpr:
    """A parsed coefficient expression over the variable x."""

    source: str
    ast: tuple = field(compare=False)

    def __call__(self, x: float) -> float:
        with np.errstate(all="ignore"):
            v = float(_eval_node(self.ast, x))
        if not math.isfinite(v):
            raise EvalError(f"{self.source!r} is not finite at x={x}")
        return v

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            v = np.asarray(_eval_node(self.ast, np.asarray(x, dtype=float)), dtype=float)
        if v.shape != np.shape(x):
            v = np.full(np.shape(x), float(v))
        if not np.all(np.isfinite(v)):
            bad = np.asarray(x, dtype=float)[~np.isfinite(v)][0]
            raise EvalError(f"{self.source!r} is not finite at x={bad}")
        return v

    def pretty(self) -> str:
        """Fully parenthesized form; reparses to an identical AST."""
        return _print_node(self.ast)

    @property
    def is_constant(self) -> bool:
        return not _uses_x(self.ast)

    def knots(self) -> tuple[float, ...]:
        return ()


def parse_expr(src: str) -> CoeffExpr:
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return CoeffExpr(source=src, ast=_Parser(src).parse())


@dataclass(frozen=True)
class PiecewiseTable:
    """Piecewise-constant coefficient on half-open cells [lo, hi).

    Cells must tile [0, 1] exactly; the last cell is closed at 1.
    """

    edges: tuple[float, ...]   # e_0 = 0 < e_1 < ... < e_k = 1
    values: tuple[float, ...]  # value on [e_i, e_{i+1})

    def __post_init__(self):
        e, v = self.edges, self.values
        if len(e) != len(v) + 1 or len(v) == 0:
            raise ValueError("table needs k+1 edges for k cells")
        if e[0] != 0.0 or e[-1] != 1.0:
            raise ValueError("table cells must cover [0, 1]")
        if any(a >= b for a, b in zip(e, e[1:])):
            raise ValueError("table edges must be strictly increasing")
        if not all(math.isfinite(val) for val in v):
            raise ValueError("table values must be finite")

    @classmethod
    def from_cells(cls, cells) -> "PiecewiseTable":
        cells = sorted((float(lo), float(hi), float(val)) for lo, hi, val in cells)
        edges = [cells[0][0]]
        values = []
        for lo, hi, val in cells:
            if lo != edges[-1]:
                raise ValueError(f"table cells must be contiguous, gap at {lo}")
            edges.append(hi)
            values.append(val)
        return cls(edges=tuple(edges), values=tuple(values))

    def __call__(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise EvalError(f"table lookup outside [0,1]: x={x}")
        i = bisect_right(self.edges, x, 1, len(self.values)) - 1
        return self.values[i]

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.edges[1:-1], x, side="right")
        return np.asarray(self.values, dtype=float)[idx]

    @property
    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    def knots(self) -> tuple[float, ...]:
        """Interior discontinuity points."""
        return self.edges[1:-1]

    def cumulative(self, x) -> np.ndarray:
        """Exact integral from 0 to x (vectorized, piecewise linear)."""
        edges = np.asarray(self.edges)
        prefix = np.concatenate(
            ([0.0], np.cumsum(np.diff(edges) * np.asarray(self.values)))
        )
        return np.interp(x, edges, prefix)

    def segment_means(self, edges: np.ndarray) -> np.ndarray:
        """Exact mean value over each consecutive pair of edges."""
        c = self.cumulative(edges)
        return np.diff(c) / np.diff(edges)

    def reciprocal(self) -> "PiecewiseTable":
        return PiecewiseTable(self.edges, tuple(1.0 / v for v in self.values))


Coefficient = CoeffExpr | PiecewiseTable


def coefficient_from_config(obj) -> Coefficient:
    """Build a coefficient from its JSON config form.

    Strings are parsed as expressions; {"cells": [[lo, hi, value], ...]}
    gives a piecewise-constant table; bare numbers are constants.
    """
    if isinstance(obj, str):
        return parse_expr(obj)
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return parse_expr(repr(float(obj)))
    if isinstance(obj, dict) and "cells" in obj:
        return PiecewiseTable.from_cells(obj["cells"])
    raise ValueError(f"cannot interpret coefficient config {obj!r}")
