"""Double-exponential quadrature rules (tanh-sinh, exp-sinh) and tensor products.

Endpoint singularities x^g with g > -1 are integrated by the rules as they
stand; only when g is close to -1 does the caller need to pass `reach`, the
distance to the endpoint the nodes must get to.  The rules also return the
distances to the endpoints so integrands can avoid cancellation near them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "double-exponential"
    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    scale: float = 1.0  # characteristic length of half-infinite variables
    max_nodes: int = 40_000_000
    start_level: int = 2  # h = 2^-level
    max_level: int = 8


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    err_estimate: float
    nodes_used: int
    converged: bool

    def to_json(self) -> dict:
        v = complex(self.value)
        return {"value": {"re": repr(v.real), "im": repr(v.imag)},
                "err_estimate": repr(float(self.err_estimate)),
                "nodes_used": int(self.nodes_used)}


class QuadratureError(RuntimeError):
    pass


def endpoint_reach(g: float, tol: float = 1e-17) -> float:
    """How close to a singular endpoint x^g the nodes must come.

    The mass of x^g on (0, eps) is eps^(1+g)/(1+g); it is pushed below tol.
    """
    g = float(np.real(g))
    if g >= 0:
        return 1e-31
    return min(1e-31, max(1e-300, tol ** (1 / (1 + g))))


def tanh_sinh(h: float, tmax: float = 4.0, reach: float = None):
    """Nodes on (-1, 1): (x, 1 + x, 1 - x, weight)."""
    if reach is not None:
        tmax = max(tmax, float(np.arcsinh(np.log(2 / reach) / np.pi)))
    t = np.arange(-np.floor(tmax / h), np.floor(tmax / h) + 1) * h
    u = HALF_PI * np.sinh(t)
    x = np.tanh(u)
    e = np.exp(-2 * np.abs(u))
    # 1 - |x| = 2 e / (1 + e) without cancellation
    small = 2 * e / (1 + e)
    one_plus = np.where(t < 0, small, 1 + x)
    one_minus = np.where(t > 0, small, 1 - x)
    # 1 / cosh(u)^2 = 4 e / (1 + e)^2, safe for large u
    w = h * HALF_PI * np.cosh(t) * 4 * e / (1 + e) ** 2
    keep = (one_plus > 0) & (one_minus > 0) & (w > 0)
    return x[keep], one_plus[keep], one_minus[keep], w[keep]


def unit_interval(h: float, tmax: float = 4.0, reach: float = None):
    """Nodes on (0, 1): (w, 1 - w, weight)."""
    x, xp, xm, wt = tanh_sinh(h, tmax, reach)
    return xp / 2, xm / 2, wt / 2


def exp_sinh(h: float, tlo: float = -4.5, thi: float = 3.6, reach: float = None):
    """Nodes on (0, inf): (x, weight)."""
    if reach is not None:
        tlo = min(tlo, -float(np.arcsinh(2 * np.log(1 / reach) / np.pi)))
    t = np.arange(np.ceil(tlo / h), np.floor(thi / h) + 1) * h
    x = np.exp(HALF_PI * np.sinh(t))
    w = h * HALF_PI * np.cosh(t) * x
    keep = (x > 0) & np.isfinite(w)
    return x[keep], w[keep]


def refine(evaluate: Callable[[float], tuple], spec: QuadratureSpec) -> QuadratureResult:
    """Halve the step until successive estimates agree to tolerance.

    evaluate(h) -> (value, nodes).  The error estimate is the difference of
    the last two levels, which overestimates the error of the finer one.
    """
    prev = None
    err = float("inf")
    used = 0
    for level in range(spec.start_level, spec.max_level + 1):
        h = 2.0 ** -level
        val, nodes = evaluate(h)
        used += nodes
        if prev is not None:
            err = abs(val - prev)
            if err <= max(spec.abs_tol, spec.rel_tol * abs(val)):
                return QuadratureResult(val, err, used, True)
        if used > spec.max_nodes:
            break
        prev = val
    return QuadratureResult(val, err, used, False)
