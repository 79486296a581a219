"""Piecewise Hermite interpolation: monotone cubic (Fritsch-Carlson) and quintic."""

from __future__ import annotations

import bisect

import numpy as np


def fritsch_carlson_limit(x: np.ndarray, y: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Scale knot slopes so that every interval of increasing data stays monotone.

    Slopes inside the monotonicity disc ``alpha**2 + beta**2 <= 9`` are left
    untouched, so exact derivatives of smooth data pass through unchanged.
    """
    m = np.array(slopes, dtype=float)
    delta = np.diff(y) / np.diff(x)
    for i, d in enumerate(delta):
        if d == 0.0:
            m[i] = m[i + 1] = 0.0
            continue
        alpha = m[i] / d
        beta = m[i + 1] / d
        if alpha < 0.0:
            m[i] = alpha = 0.0
        if beta < 0.0:
            m[i + 1] = beta = 0.0
        r = alpha * alpha + beta * beta
        if r > 9.0:
            tau = 3.0 / np.sqrt(r)
            m[i] = tau * alpha * d
            m[i + 1] = tau * beta * d
    return m


def pchip_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Knot slopes for strictly increasing data.

    Interior slopes are the weighted harmonic mean of the adjacent secants.
    End slopes come from the cubic through the four nearest knots, which is
    what makes the slope at the origin knot usable as an estimate of h'(0).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise ValueError("need at least 4 knots")
    h = np.diff(x)
    delta = np.diff(y) / h
    m = np.empty_like(x)
    w1 = 2.0 * h[1:] + h[:-1]
    w2 = h[1:] + 2.0 * h[:-1]
    m[1:-1] = (w1 + w2) / (w1 / delta[:-1] + w2 / delta[1:])
    m[0] = _lagrange_end_slope(x[:4], y[:4])
    m[-1] = _lagrange_end_slope(x[-4:][::-1], y[-4:][::-1])
    m[0] = min(max(m[0], 0.0), 3.0 * delta[0])
    m[-1] = min(max(m[-1], 0.0), 3.0 * delta[-1])
    return fritsch_carlson_limit(x, y, m)


def _lagrange_end_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    # derivative at xs[0] of the interpolating polynomial through all points
    x0 = xs[0]
    total = 0.0
    n = len(xs)
    # weight for ys[0]: sum of 1/(x0 - xk)
    total += ys[0] * sum(1.0 / (x0 - xs[k]) for k in range(1, n))
    for j in range(1, n):
        w = 1.0 / (xs[j] - x0)
        for k in range(1, n):
            if k != j:
                w *= (x0 - xs[k]) / (xs[j] - xs[k])
        total += ys[j] * w
    return float(total)


class HermiteTable:
    """Cubic Hermite interpolant through ``(x_i, y_i)`` with slopes ``m_i``.

    Scalar evaluation goes through :mod:`bisect` and plain floats, which is
    much cheaper than numpy dispatch inside quadrature and root finding loops.
    """

    def __init__(self, x, y, m):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.m = np.asarray(m, dtype=float)
        if not (self.x.shape == self.y.shape == self.m.shape) or self.x.size < 2:
            raise ValueError("x, y, m must be equal-length 1-d arrays with >= 2 points")
        if np.any(np.diff(self.x) <= 0.0):
            raise ValueError("x must be strictly increasing")
        self._xl = self.x.tolist()
        self._yl = self.y.tolist()
        self._ml = self.m.tolist()

    @property
    def lo(self) -> float:
        return self._xl[0]

    @property
    def hi(self) -> float:
        return self._xl[-1]

    def segment(self, x: float) -> int:
        i = bisect.bisect_right(self._xl, x) - 1
        return min(max(i, 0), len(self._xl) - 2)

    def segment_coefficients(self, i: int) -> tuple[float, float, float, float]:
        """Power-basis coefficients of segment ``i`` in ``u = x - x_i``."""
        x0, x1 = self._xl[i], self._xl[i + 1]
        y0, y1 = self._yl[i], self._yl[i + 1]
        m0, m1 = self._ml[i], self._ml[i + 1]
        h = x1 - x0
        d = (y1 - y0) / h
        c2 = (3.0 * d - 2.0 * m0 - m1) / h
        c3 = (m0 + m1 - 2.0 * d) / (h * h)
        return y0, m0, c2, c3

    def value(self, x: float) -> float:
        i = self.segment(x)
        x0 = self._xl[i]
        h = self._xl[i + 1] - x0
        t = (x - x0) / h
        t2 = t * t
        t3 = t2 * t
        return (
            (2.0 * t3 - 3.0 * t2 + 1.0) * self._yl[i]
            + (t3 - 2.0 * t2 + t) * h * self._ml[i]
            + (-2.0 * t3 + 3.0 * t2) * self._yl[i + 1]
            + (t3 - t2) * h * self._ml[i + 1]
        )

    def slope(self, x: float) -> float:
        i = self.segment(x)
        x0 = self._xl[i]
        h = self._xl[i + 1] - x0
        t = (x - x0) / h
        t2 = t * t
        return (
            (6.0 * t2 - 6.0 * t) * self._yl[i] / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self._ml[i]
            + (-6.0 * t2 + 6.0 * t) * self._yl[i + 1] / h
            + (3.0 * t2 - 2.0 * t) * self._ml[i + 1]
        )

    def values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, self.x.size - 2)
        x0 = self.x[i]
        h = self.x[i + 1] - x0
        t = (x - x0) / h
        t2 = t * t
        t3 = t2 * t
        return (
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.m[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
            + (t3 - t2) * h * self.m[i + 1]
        )

    def slopes(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, self.x.size - 2)
        x0 = self.x[i]
        h = self.x[i + 1] - x0
        t = (x - x0) / h
        t2 = t * t
        return (
            (6.0 * t2 - 6.0 * t) * self.y[i] / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.m[i]
            + (-6.0 * t2 + 6.0 * t) * self.y[i + 1] / h
            + (3.0 * t2 - 2.0 * t) * self.m[i + 1]
        )


class QuinticHermiteTable:
    """Quintic Hermite interpolant from values, first and second derivatives."""

    def __init__(self, x, y, m, k):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.m = np.asarray(m, dtype=float)
        self.k = np.asarray(k, dtype=float)
        if np.any(np.diff(self.x) <= 0.0):
            raise ValueError("x must be strictly increasing")
        self._xl = self.x.tolist()
        h = np.diff(self.x)
        # power-basis coefficients per cell in u = x - x_i
        y0, y1 = self.y[:-1], self.y[1:]
        m0, m1 = self.m[:-1], self.m[1:]
        k0, k1 = self.k[:-1], self.k[1:]
        d = y1 - y0 - m0 * h - 0.5 * k0 * h ** 2
        e = m1 - m0 - k0 * h
        f = k1 - k0
        c3 = (10.0 * d - 4.0 * e * h + 0.5 * f * h ** 2) / h ** 3
        c4 = (-15.0 * d + 7.0 * e * h - f * h ** 2) / h ** 4
        c5 = (6.0 * d - 3.0 * e * h + 0.5 * f * h ** 2) / h ** 5
        self._c = np.stack([y0, m0, 0.5 * k0, c3, c4, c5], axis=1)
        self._cl = self._c.tolist()

    @property
    def lo(self) -> float:
        return self._xl[0]

    @property
    def hi(self) -> float:
        return self._xl[-1]

    def segment(self, x: float) -> int:
        i = bisect.bisect_right(self._xl, x) - 1
        return min(max(i, 0), len(self._xl) - 2)

    def value(self, x: float) -> float:
        i = self.segment(x)
        u = x - self._xl[i]
        c0, c1, c2, c3, c4, c5 = self._cl[i]
        return c0 + u * (c1 + u * (c2 + u * (c3 + u * (c4 + u * c5))))

    def slope(self, x: float) -> float:
        i = self.segment(x)
        u = x - self._xl[i]
        _, c1, c2, c3, c4, c5 = self._cl[i]
        return c1 + u * (2.0 * c2 + u * (3.0 * c3 + u * (4.0 * c4 + u * 5.0 * c5)))

    def values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, self.x.size - 2)
        u = x - self.x[i]
        c = self._c[i]
        return c[..., 0] + u * (c[..., 1] + u * (c[..., 2] + u * (c[..., 3] + u * (c[..., 4] + u * c[..., 5]))))

    def slopes(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.x, x, side="right") - 1, 0, self.x.size - 2)
        u = x - self.x[i]
        c = self._c[i]
        return c[..., 1] + u * (2.0 * c[..., 2] + u * (3.0 * c[..., 3] + u * (4.0 * c[..., 4] + u * 5.0 * c[..., 5])))
