"""Limited-memory BFGS with Armijo backtracking."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)


class OptimizationError(ArithmeticError):
    pass


@dataclass
class LbfgsResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    n_iter: int
    converged: bool
    message: str
    history: list[float] = field(default_factory=list)  # objective after every accepted step


def _two_loop(g: np.ndarray, pairs: deque) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def lbfgs(
    fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    memory: int = 10,
    gtol: float = 1e-4,
    max_iter: int = 200,
    c1: float = 1e-4,
    max_backtracks: int = 50,
) -> LbfgsResult:
    """Minimize ``fun_grad`` from ``x0``.

    Stops when ``max|grad| < gtol`` or after ``max_iter`` iterations. Every
    accepted step satisfies the Armijo condition, so the objective never
    increases. A non-finite objective at the start point raises
    :class:`OptimizationError`.
    """
    x = np.array(x0, dtype=np.float64)
    f, g = fun_grad(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise OptimizationError("objective is not finite at the starting point (iteration 0)")
    pairs: deque = deque(maxlen=memory)
    history = [float(f)]
    message = "max iterations reached"
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(g)) < gtol:
            converged, message, it = True, "gradient tolerance reached", it - 1
            break
        d = _two_loop(g, pairs)
        slope = g @ d
        if not slope < 0:
            pairs.clear()
            d, slope = -g, -(g @ g)
        step = 1.0 if pairs else min(1.0, 1.0 / np.linalg.norm(g))
        accepted = False
        for _ in range(max_backtracks):
            x_new = x + step * d
            f_new, g_new = fun_grad(x_new)
            if np.isfinite(f_new) and f_new <= f + c1 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if pairs:
                # stale curvature pairs: retry from steepest descent
                pairs.clear()
                continue
            message = f"line search failed at iteration {it}"
            break
        if not np.all(np.isfinite(g_new)):
            raise OptimizationError(f"non-finite gradient at iteration {it}")
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-10 * np.sqrt((s @ s) * (y @ y)):
            pairs.append((s, y, 1.0 / sy))
        x, f, g = x_new, f_new, g_new
        history.append(float(f))
        log.debug("iter %d  f=%.6f  |g|max=%.3e", it, f, np.max(np.abs(g)))
    else:
        if np.max(np.abs(g)) < gtol:
            converged, message = True, "gradient tolerance reached"
    return LbfgsResult(x, float(f), g, it, converged, message, history)
