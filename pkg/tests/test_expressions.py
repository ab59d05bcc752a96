import math

import numpy as np
import pytest

from slpart.expressions import (
    EvalError,
    ParseError,
    PiecewiseTable,
    coefficient_from_config,
    parse_expr,
)


def test_constant_literal():
    f = parse_expr("1")
    assert f(0.0) == 1.0
    assert f(0.73) == 1.0
    assert f.is_constant


def test_pi_power():
    f = parse_expr("pi^2")
    assert f(0.3) == pytest.approx(9.8696044, abs=1e-7)


def test_direct_arithmetic():
    assert parse_expr("1 + x*x")(0.5) == 1.25


def test_sin_pi_x():
    assert parse_expr("sin(pi*x)")(0.5) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "src,x,expected",
    [
        ("2^3^2", 0.0, 512.0),          # right-associative power
        ("-x^2", 2.0, -4.0),            # unary minus binds outside the power
        ("2*-3", 0.0, -6.0),
        ("min(x, 0.5)", 0.8, 0.5),
        ("max(2, exp(x))", 0.0, 2.0),
        ("abs(x - 1)", 0.25, 0.75),
        ("sqrt(x + 1)", 3.0, 2.0),
        ("(1 + 2) * x", 2.0, 6.0),
        ("1e-2 + 1E2", 0.0, 100.01),
    ],
)
def test_grammar_cases(src, x, expected):
    assert parse_expr(src)(x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "src",
    ["", "  ", "1 +", "foo(1)", "y + 1", "sin(1, 2)", "min(1)", "(1 + 2", "1 2", "1..2"],
)
def test_parse_errors(src):
    with pytest.raises(ParseError):
        parse_expr(src)


def test_parse_error_offset():
    with pytest.raises(ParseError) as exc:
        parse_expr("1 + bogus")
    assert exc.value.pos == 4


def test_eval_error_reports_x():
    f = parse_expr("sqrt(x - 0.5)")
    with pytest.raises(EvalError, match="0.25"):
        f(0.25)
    with pytest.raises(EvalError):
        f.eval_array(np.array([0.8, 0.25]))


def test_roundtrip_pretty_print():
    rng = np.random.default_rng(42)
    sources = [
        "1 + x*x",
        "sin(pi*x) - cos(x)/2",
        "max(1, min(2, x + 1))",
        "-(x - 0.5)^2 + 2",
        "exp(-x) * sqrt(x + 1)",
        "2^-x",
    ]
    for src in sources:
        f = parse_expr(src)
        g = parse_expr(f.pretty())
        assert g.ast == f.ast
        for x in rng.uniform(0.0, 1.0, size=100):
            assert g(x) == f(x)


def test_table_lookup_half_open():
    t = PiecewiseTable.from_cells([(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)])
    assert t(0.25) == 4.0
    assert t(0.5) == 1.0
    assert t(0.0) == 4.0
    assert t(1.0) == 1.0
    assert list(t.eval_array(np.array([0.25, 0.5, 1.0]))) == [4.0, 1.0, 1.0]
    assert t.knots() == (0.5,)


def test_table_exact_means():
    t = PiecewiseTable.from_cells([(0.0, 0.5, 4.0), (0.5, 1.0, 1.0)])
    edges = np.array([0.25, 0.75, 1.0])
    means = t.segment_means(edges)
    assert means[0] == pytest.approx((0.25 * 4 + 0.25 * 1) / 0.5)
    assert means[1] == pytest.approx(1.0)
    rec = t.reciprocal()
    assert rec(0.25) == 0.25


@pytest.mark.parametrize(
    "cells",
    [
        [(0.0, 0.4, 1.0), (0.5, 1.0, 2.0)],   # gap
        [(0.1, 1.0, 1.0)],                    # does not start at 0
        [(0.0, 0.5, 1.0)],                    # does not reach 1
    ],
)
def test_bad_tables(cells):
    with pytest.raises(ValueError):
        PiecewiseTable.from_cells(cells)


def test_coefficient_from_config():
    assert coefficient_from_config("1 + x")(1.0) == 2.0
    assert coefficient_from_config(2)(0.3) == 2.0
    t = coefficient_from_config({"cells": [[0, 0.5, 4], [0.5, 1, 1]]})
    assert t(0.1) == 4.0
    with pytest.raises(ValueError):
        coefficient_from_config([1, 2])
