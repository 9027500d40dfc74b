"""Closed-form expressions over a small grammar, compiled to numpy.

Grammar: numbers, ``pi``, the coordinates ``x`` and ``y``, the operators
``+ - * / **`` (``^`` is accepted for powers), and the functions ``sin``,
``cos``, ``exp`` and ``bump``. ``bump(t)`` is the smooth unit-mass bump
``K exp(-1/(1-t^2))`` on (-1, 1), zero outside.
"""

from __future__ import annotations

import re

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    auto_number,
    auto_symbol,
    convert_xor,
    factorial_notation,
    parse_expr,
)

from .errors import ExpressionError

X, Y = sp.symbols("x y", real=True)
COORDS = (X, Y)

# integral of exp(-1/(1-t^2)) over (-1, 1)
BUMP_INTEGRAL = 0.44399381616807943782
_bump = sp.Function("bump")

_ALLOWED_FUNCS = (sp.sin, sp.cos, sp.exp)
_GLOBALS = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational, "Symbol": sp.Symbol}
_TRANSFORMS = (auto_symbol, auto_number, factorial_notation, convert_xor)
_NAMES = {"x", "y", "sin", "cos", "exp", "bump", "pi"}
_NUMBER = re.compile(r"(?<![A-Za-z_])\d*\.?\d+(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_]\w*")


def _bump_piecewise(t):
    return sp.Piecewise((sp.exp(-1 / (1 - t**2)) / sp.Float(BUMP_INTEGRAL, 20), t**2 < 1), (0, True))


def _check_tree(e: sp.Basic, allowed_vars) -> None:
    if e.is_Symbol:
        if e not in allowed_vars:
            raise ExpressionError(f"unknown symbol {e}; allowed: {', '.join(map(str, allowed_vars))}")
        return
    if e.is_Number or e in (sp.pi, sp.E):
        return
    if isinstance(e, (sp.Add, sp.Mul, sp.Pow)) or isinstance(e, _ALLOWED_FUNCS):
        pass
    elif isinstance(e, sp.core.function.AppliedUndef) and e.func == _bump and len(e.args) == 1:
        pass
    else:
        raise ExpressionError(f"{type(e).__name__} is outside the expression grammar")
    for a in e.args:
        _check_tree(a, allowed_vars)


def parse(text, n: int = 2) -> sp.Expr:
    """Parse and validate an expression in the coordinates of R^n."""
    if isinstance(text, sp.Basic):
        # already built from validated pieces
        extra = text.free_symbols - set(COORDS[:n])
        if extra:
            raise ExpressionError(f"unknown symbols {sorted(map(str, extra))}")
        return text
    else:
        if not isinstance(text, (str, int, float)):
            raise ExpressionError(f"expected an expression string, got {type(text).__name__}")
        names = set(_IDENT.findall(_NUMBER.sub(" ", str(text))))
        if not names <= _NAMES:
            raise ExpressionError(f"unknown names {sorted(names - _NAMES)} in {text!r}")
        local = {"x": X, "y": Y, "sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "pi": sp.pi, "bump": _bump}
        try:
            expr = parse_expr(str(text), local_dict=local, global_dict=dict(_GLOBALS),
                              transformations=_TRANSFORMS)
        except ExpressionError:
            raise
        except Exception as exc:  # sympy raises a zoo of types on bad input
            raise ExpressionError(f"cannot parse {text!r}: {exc}") from None
    if not isinstance(expr, sp.Expr):
        raise ExpressionError(f"{text!r} is not an arithmetic expression")
    _check_tree(expr, COORDS[:n])
    return expr.replace(_bump, _bump_piecewise)


def compile_exprs(exprs, n: int):
    """numpy callable f(*coords) -> list of arrays, broadcasting constants."""
    fn = sp.lambdify(COORDS[:n], list(exprs), modules="numpy")

    def call(*coords):
        with np.errstate(all="ignore"):
            out = fn(*coords)
        shape = np.broadcast(*coords).shape
        return [np.broadcast_to(np.asarray(o, dtype=float), shape) for o in out]

    return call


def to_text(expr: sp.Expr) -> str:
    return str(expr)
