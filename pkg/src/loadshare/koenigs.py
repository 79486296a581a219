"""Koenigs linearization of a contracting map and its fractional iterates.

The Koenigs function ``sigma`` conjugates ``h`` to multiplication by
``a = h'(0)``: ``sigma(h(x)) = a * sigma(x)`` with ``sigma(0) = 0`` and
``sigma'(0) = 1``.  It is the limit of ``h_n(x) / a**n``.

Plain quotients converge like ``a**n``.  We evaluate the quotient through
the cubic Taylor polynomial ``P`` of ``sigma`` at the origin instead,
``q_n(x) = P(h_n(x)) / a**n``, which has the same limit but converges like
``a**(3n)``.  ``order=1`` gives back the plain quotient.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NoConvergence, RangeError, ValidationError
from .funcmodel import MonotoneMap
from .hermite import HermiteTable, QuinticHermiteTable, fritsch_carlson_limit

log = logging.getLogger(__name__)

N_FLOOR = 10
DEFAULT_TOL = 1e-10
DEFAULT_N_MAX = 64
DEFAULT_GRID = 257
GRADING = 5.0


def iterate(h: MonotoneMap, n: int, x: float) -> float:
    """Apply ``h`` to ``x`` ``n`` times."""
    if n < 0:
        raise ValidationError(f"iteration count must be >= 0, got {n}")
    y = float(h._check_domain(x))
    for _ in range(n):
        y = h(y)
    return y


def chart_coefficients(h: MonotoneMap, order: int = 3) -> tuple[float, float]:
    """Second and third Taylor coefficients of sigma at 0.

    Matching powers in ``sigma(h(y)) = a sigma(y)`` gives
    ``c2 = h2 / (a - a^2)`` and ``c3 = (h3 + 2 a h2 c2) / (a - a^3)``.
    """
    if order == 1:
        return 0.0, 0.0
    if order != 3:
        raise ValidationError(f"chart order must be 1 or 3, got {order}")
    a, h2, h3 = h.taylor_at_zero()
    c2 = h2 / (a - a * a)
    c3 = (h3 + 2.0 * a * h2 * c2) / (a - a ** 3)
    return c2, c3


def graded_grid(domain_max: float, size: int, grading: float = GRADING) -> np.ndarray:
    """Grid on ``[0, domain_max]`` with spacing growing geometrically away from 0."""
    s = np.linspace(0.0, 1.0, size)
    x = domain_max * np.expm1(grading * s) / math.expm1(grading)
    x[0] = 0.0
    x[-1] = domain_max
    return x


def _snap(grid: np.ndarray, points) -> np.ndarray:
    # move the nearest interior node onto each point so no cell straddles it
    g = grid.copy()
    used = set()
    for p in sorted(points):
        i = int(np.argmin(np.abs(g - p)))
        if 0 < i < g.size - 1 and i not in used and g[i - 1] < p < g[i + 1]:
            g[i] = p
            used.add(i)
    return g


def _kink_points(h: MonotoneMap, grid_top: float) -> list[float]:
    """Breakpoints of ``h`` and all their preimages inside the domain.

    sigma(x) = sigma(h_n(x)) / a**n inherits a jump in the second derivative
    wherever some iterate of x lands on a breakpoint of h.
    """
    pts = []
    frontier = list(h.breakpoints())
    top = h(grid_top)
    while frontier:
        nxt = []
        for p in frontier:
            pts.append(p)
            if p < top:
                nxt.append(brentq(lambda u: h(u) - p, p, grid_top, xtol=1e-15, rtol=1e-15))
        frontier = nxt
    return sorted(set(pts))


@dataclass(frozen=True, eq=False)
class KoenigsFunction:
    source: MonotoneMap
    multiplier: float
    x: np.ndarray
    sigma: np.ndarray
    dsigma: np.ndarray
    d2sigma: np.ndarray | None
    n_used: int
    sup_residual: float
    converged: bool
    order: int = 3
    conjugation_residual: float = float("nan")
    _table: HermiteTable | QuinticHermiteTable = field(init=False, repr=False)

    def __post_init__(self):
        # quintic where h is smooth; the monotone cubic where sigma'' may jump
        if self.d2sigma is not None:
            table = QuinticHermiteTable(self.x, self.sigma, self.dsigma, self.d2sigma)
        else:
            m = fritsch_carlson_limit(self.x, self.sigma, self.dsigma)
            table = HermiteTable(self.x, self.sigma, m)
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_sig", self.sigma.tolist())

    @property
    def domain_max(self) -> float:
        return self.source.domain_max

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[-1])

    @property
    def grid(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.sigma.tolist()))

    def sigma_eval(self, x):
        xs = self.source._check_domain(x)
        if xs.ndim == 0:
            xf = float(xs)
            return 0.0 if xf == 0.0 else self._table.value(xf)
        out = self._table.values(xs)
        out[xs == 0.0] = 0.0
        return out

    def sigma_derivative(self, x):
        xs = self.source._check_domain(x)
        if xs.ndim == 0:
            return self._table.slope(float(xs))
        return self._table.slopes(xs)

    def sigma_inverse(self, s: float) -> float:
        """Force ``x`` with ``sigma(x) = s``."""
        s = float(s)
        smax = self._sig[-1]
        if not (s >= 0.0 and s <= smax * (1.0 + 1e-14)):
            raise RangeError(f"{s!r} is outside the image [0, {smax!r}] of sigma")
        if s == 0.0:
            return 0.0
        if s >= smax:
            return self.domain_max
        i = bisect.bisect_right(self._sig, s) - 1
        i = min(max(i, 0), len(self._sig) - 2)
        lo, hi = float(self.x[i]), float(self.x[i + 1])
        if self._sig[i] == s:
            return lo
        f = self._table.value
        x = brentq(lambda u: f(u) - s, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)
        # one Newton step on the same cubic, kept inside the cell
        d = self._table.slope(x)
        if d > 0.0:
            xn = x - (f(x) - s) / d
            if lo <= xn <= hi and abs(f(xn) - s) < abs(f(x) - s):
                x = xn
        return x

    def fractional_iterate(self, t: float, x: float) -> float:
        """``h_t(x) = sigma^-1(a**t sigma(x))``; ``t = 1`` is ``h`` itself."""
        if t == 0.0:
            return float(self.source._check_domain(x))
        s = self.multiplier ** t * self.sigma_eval(float(x))
        if s > self.sigma_max * (1.0 + 1e-14):
            raise RangeError(
                f"h_t with t={t!r} maps {x!r} beyond the calibrated range"
            )
        return self.sigma_inverse(min(s, self.sigma_max))

    def conjugation_error(self, x=None) -> np.ndarray:
        """``|sigma(h(x)) - a sigma(x)| / max(1, sigma(x))`` on ``x`` (default: the grid)."""
        x = self.x if x is None else np.asarray(x, dtype=float)
        sx = self.sigma_eval(x)
        return np.abs(self.sigma_eval(self.source(x)) - self.multiplier * sx) / np.maximum(1.0, sx)


def koenigs_build(
    h: MonotoneMap,
    grid_size: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    n_max: int = DEFAULT_N_MAX,
    *,
    n_fixed: int | None = None,
    order: int = 3,
) -> KoenigsFunction:
    """Tabulate the Koenigs function of ``h`` on a graded grid.

    Iteration stops at the first ``n >= 10`` whose normalized change
    ``sup |q_n - q_{n-1}| / max(1, |q_n|)`` drops below ``tol``, or at
    ``n_max``.  ``n_fixed`` forces exactly that many iterations.

    Raises:
        NoConvergence: residual still above ``tol`` at ``n_max`` and either
            ``n_max`` is below the 10-step floor or the residual stopped
            decreasing.
    """
    if grid_size < 16:
        raise ValidationError(f"grid_size must be >= 16, got {grid_size}")
    if not tol > 0.0:
        raise ValidationError(f"tol must be positive, got {tol!r}")
    if n_fixed is not None:
        if n_fixed < 0:
            raise ValidationError(f"n_fixed must be >= 0, got {n_fixed}")
        n_min = n_top = n_fixed
    else:
        if n_max < 1:
            raise ValidationError(f"n_max must be >= 1, got {n_max}")
        n_min, n_top = min(N_FLOOR, n_max), n_max

    a = h.slope_at_zero
    c2, c3 = chart_coefficients(h, order)

    x = graded_grid(h.domain_max, grid_size)
    kinks = _kink_points(h, h.domain_max)
    if kinks:
        x = _snap(x, kinks)

    # derivatives ride along by the chain rule, pre-divided by a**n
    smooth = h.second_derivative(x) is not None
    y = x.copy()
    dprod = np.ones_like(x)
    eprod = np.zeros_like(x)
    q = y + c2 * y ** 2 + c3 * y ** 3
    residuals: list[float] = []
    n = 0
    converged = False
    while n < n_top:
        n += 1
        if -n * math.log(a) > 700.0:
            raise NoConvergence(f"a**n underflows at n={n} for a={a!r}")
        dh = h.derivative(y)
        if smooth:
            eprod = h.second_derivative(y) * dprod ** 2 * a ** (n - 2) + dh / a * eprod
        dprod = dprod * dh / a
        y = h(y)
        q_new = (y + c2 * y ** 2 + c3 * y ** 3) * a ** -n
        res = float(np.max(np.abs(q_new - q) / np.maximum(1.0, np.abs(q_new))))
        residuals.append(res)
        q = q_new
        if n >= n_min and res < tol:
            converged = True
            break
    dq = dprod * (1.0 + 2.0 * c2 * y + 3.0 * c3 * y ** 2)
    d2q = None
    if smooth:
        d2q = (2.0 * c2 + 6.0 * c3 * y) * dprod ** 2 * a ** n + (1.0 + 2.0 * c2 * y + 3.0 * c3 * y ** 2) * eprod

    if not converged and n_fixed is None:
        decreasing = len(residuals) >= 2 and residuals[-1] < residuals[-2]
        if n_top < N_FLOOR or not decreasing:
            raise NoConvergence(
                f"Koenigs quotient not converged at n={n}: residual {residuals[-1]:.3e} >= tol {tol:.3e}"
            )
        log.warning("Koenigs quotient residual %.3e above tol %.3e at n_max=%d (still decreasing)",
                    residuals[-1], tol, n)

    q[0] = 0.0
    if np.any(np.diff(q) <= 0.0):
        raise NoConvergence(f"sigma is not strictly increasing after n={n} steps")

    K = KoenigsFunction(
        source=h,
        multiplier=a,
        x=x,
        sigma=q,
        dsigma=dq,
        d2sigma=d2q,
        n_used=n,
        sup_residual=residuals[-1] if residuals else float("nan"),
        converged=converged,
        order=order,
    )
    object.__setattr__(K, "conjugation_residual", float(np.max(K.conjugation_error())))
    return K
