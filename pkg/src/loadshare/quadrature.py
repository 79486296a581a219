"""Adaptive Simpson quadrature."""

from __future__ import annotations

import math
from typing import Callable

from .errors import QuadratureFailure

MAX_DEPTH = 30


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     rtol: float = 1e-10, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``f`` over ``[a, b]`` to relative tolerance ``rtol``.

    Raises:
        QuadratureFailure: a panel needs more than ``max_depth`` bisections.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    # absolute target derived from a coarse estimate of the whole integral
    scale = abs(whole)
    if scale == 0.0:
        scale = abs(b - a) * max(abs(fa), abs(fm), abs(fb))
    tol = rtol * scale if scale > 0.0 else 1e-300
    return _recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureFailure(
            f"adaptive Simpson exceeded depth {MAX_DEPTH} on [{a!r}, {b!r}]"
        )
    return (_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def graded_first_panel(f: Callable[[float], float], b: float, power: float,
                       rtol: float = 1e-10) -> float:
    """Integrate ``f`` over ``[0, b]`` when ``f(x) ~ x**power`` near 0.

    Substitutes ``x = b u**m`` so the transformed integrand vanishes at
    least quadratically at the origin, which restores Simpson's rate for
    fractional ``power``.
    """
    m = max(1, math.ceil(3.0 / (power + 1.0)))
    if m == 1:
        return adaptive_simpson(f, 0.0, b, rtol)

    def g(u):
        return f(b * u ** m) * b * m * u ** (m - 1)

    return adaptive_simpson(g, 0.0, 1.0, rtol)
