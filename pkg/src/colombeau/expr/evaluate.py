"""Evaluation of expression nets at points and on point batches.

The key contract is the exact-zero product short circuit: a product with a
factor that evaluates to exactly 0 is 0, and the remaining factors are not
consulted (scalar factors) or are masked out pointwise (array factors).
Derivatives of bump/cutoff pair a vanishing primitive with a blowing-up
rational prefactor, and the short circuit is what makes them evaluate to an
exact 0 on and outside the support boundary.  Any non-finite value that
survives to the final result is reported, never silently returned.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import special
from .nodes import (
    Add,
    Bump,
    Const,
    Cos,
    Cutoff,
    Div,
    Eps,
    EpsPow,
    Expr,
    ExpressionError,
    IntPow,
    Mul,
    Sin,
    Sub,
    Exp,
    Var,
    max_var_index,
)


class EvaluationError(ExpressionError):
    """Non-finite result (overflow, 0/0, division by zero at the point)."""


def _as_batch(vals) -> np.ndarray:
    return np.atleast_1d(np.asarray(vals, dtype=float))


def _eval(e: Expr, coords: np.ndarray, eps: float):
    """Evaluate on a batch; returns a float scalar or an array of shape (N,).

    Non-finite entries are allowed here (caller decides how to report them);
    numpy error state must already be suppressed.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return coords[e.index]
    if isinstance(e, Eps):
        return float(eps)
    if isinstance(e, EpsPow):
        return float(np.float64(eps) ** float(e.exponent))
    if isinstance(e, Add):
        acc = _eval(e.children[0], coords, eps)
        for c in e.children[1:]:
            acc = acc + _eval(c, coords, eps)
        return acc
    if isinstance(e, Sub):
        return _eval(e.left, coords, eps) - _eval(e.right, coords, eps)
    if isinstance(e, Mul):
        factors = []
        zero_mask = None
        for c in e.children:
            v = _eval(c, coords, eps)
            if np.isscalar(v) or np.ndim(v) == 0:
                if v == 0.0:
                    # exact scalar zero annihilates the product; later factors
                    # are never evaluated
                    return 0.0
                factors.append(v)
            else:
                m = v == 0.0
                if m.any():
                    zero_mask = m if zero_mask is None else (zero_mask | m)
                factors.append(v)
        acc = factors[0]
        for v in factors[1:]:
            acc = acc * v
        if zero_mask is not None:
            acc = np.where(zero_mask, 0.0, acc)
        return acc
    if isinstance(e, Div):
        return _eval(e.num, coords, eps) / _eval(e.den, coords, eps)
    if isinstance(e, IntPow):
        base = _eval(e.base, coords, eps)
        if np.isscalar(base) or np.ndim(base) == 0:
            try:
                return float(base) ** e.exponent
            except (OverflowError, ZeroDivisionError):
                return math.inf if base != 0.0 else math.nan
        return base ** float(e.exponent)
    if isinstance(e, Sin):
        return np.sin(_eval(e.arg, coords, eps))
    if isinstance(e, Cos):
        return np.cos(_eval(e.arg, coords, eps))
    if isinstance(e, Exp):
        v = _eval(e.arg, coords, eps)
        if np.isscalar(v) or np.ndim(v) == 0:
            try:
                return math.exp(float(v))
            except OverflowError:
                return math.inf
        return np.exp(v)
    if isinstance(e, Bump):
        v = _as_batch(_eval(e.arg, coords, eps))
        return special.bump_deriv_values(e.order, v)
    if isinstance(e, Cutoff):
        v = _as_batch(_eval(e.arg, coords, eps))
        return special.cutoff_deriv_values(e.order, v)
    raise ExpressionError(f"cannot evaluate {e!r}")


def eval_batch(e: Expr, coords: np.ndarray, eps: float) -> np.ndarray:
    """Evaluate at a batch of points, coords of shape (d, N) -> values (N,).

    Non-finite entries are returned as inf/nan for the caller to flag.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2:
        raise ExpressionError("coords must have shape (d, N)")
    need = max_var_index(e) + 1
    if coords.shape[0] < need:
        raise ExpressionError(
            f"expression uses {need} variables, coords provide {coords.shape[0]}"
        )
    _check_eps(eps)
    with np.errstate(all="ignore"):
        v = _eval(e, coords, eps)
    if np.isscalar(v) or np.ndim(v) == 0:
        return np.full(coords.shape[1], float(v))
    return np.asarray(v, dtype=float)


def _check_eps(eps: float) -> None:
    if not (0.0 < eps < 1.0):
        raise ExpressionError(f"eps must lie in (0,1), got {eps}")


def evaluate(e: Expr, x: Sequence[float], eps: float) -> float:
    """Evaluate at a single point; raises EvaluationError on a non-finite result."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ExpressionError("point must be a flat sequence of coordinates")
    if not np.all(np.isfinite(x)):
        raise ExpressionError("point coordinates must be finite")
    need = max_var_index(e) + 1
    if x.size < need:
        raise ExpressionError(f"expression uses {need} variables, point has {x.size}")
    _check_eps(eps)
    coords = x.reshape(-1, 1)
    with np.errstate(all="ignore"):
        v = _eval(e, coords, eps)
    out = float(v if (np.isscalar(v) or np.ndim(v) == 0) else np.asarray(v).ravel()[0])
    if not math.isfinite(out):
        raise EvaluationError(
            f"non-finite value ({out}) at x={tuple(float(c) for c in x)}, eps={eps}"
        )
    return out
