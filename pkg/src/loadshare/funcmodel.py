"""Monotone force-force maps ``F_j = h(F_k)``.

Every map satisfies ``h(0) = 0``, ``0 < h'(0) < 1``, is strictly increasing
on ``[0, domain_max]`` and lies strictly below the identity there, so its
iterates contract to the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ContractionViolated,
    DomainError,
    NonMonotoneData,
    SlopeOutOfRange,
    ValidationError,
)
from .hermite import HermiteTable, pchip_slopes

CHECK_POINTS = 256

# slack for values produced by floating point arithmetic at the domain end
_EDGE = 8.0 * np.finfo(float).eps


class MonotoneMap:
    """Base class; subclasses provide ``_f``, ``_df`` and ``taylor_at_zero``."""

    kind: str
    domain_max: float

    @property
    def slope_at_zero(self) -> float:
        raise NotImplementedError

    def _f(self, x):
        raise NotImplementedError

    def _df(self, x):
        raise NotImplementedError

    def second_derivative(self, x):
        """``h''`` for maps that are smooth on the whole domain, else None."""
        return None

    def taylor_at_zero(self) -> tuple[float, float, float]:
        """Coefficients ``(h1, h2, h3)`` of ``h(x) = h1 x + h2 x^2 + h3 x^3 + ...``."""
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where the map is only once differentiable."""
        return ()

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_domain(self, x):
        arr = np.asarray(x, dtype=float)
        lim = self.domain_max * (1.0 + _EDGE)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > lim):
            raise DomainError(f"force outside [0, {self.domain_max!r}]: {x!r}")
        return np.minimum(arr, self.domain_max)

    def __call__(self, x):
        xs = self._check_domain(x)
        if xs.ndim == 0:
            xf = float(xs)
            return 0.0 if xf == 0.0 else float(self._f(xf))
        return self._f(xs)

    eval = __call__

    def derivative(self, x):
        xs = self._check_domain(x)
        if xs.ndim == 0:
            return float(self._df(float(xs)))
        return self._df(xs)

    def derivative_at_zero(self) -> float:
        return self.slope_at_zero

    def check_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.domain_max, CHECK_POINTS)

    def _validate(self):
        if not (np.isfinite(self.domain_max) and self.domain_max > 0.0):
            raise ValidationError(f"domain_max must be positive, got {self.domain_max!r}")
        a = self.slope_at_zero
        if not 0.0 < a < 1.0:
            raise SlopeOutOfRange(f"h'(0) = {a!r} is not in (0, 1)")
        g = self.check_grid()
        v = self._f(g)
        if np.any(np.diff(v) <= 0.0):
            raise NonMonotoneData("map is not strictly increasing on the check grid")
        if np.any(v[1:] >= g[1:]):
            bad = float(g[1:][v[1:] >= g[1:]][0])
            raise ContractionViolated(f"h(x) >= x at x = {bad!r}")


@dataclass(frozen=True)
class LinearMap(MonotoneMap):
    a: float
    domain_max: float = 1.0
    kind: str = field(default="linear", init=False)

    def __post_init__(self):
        self._validate()

    @property
    def slope_at_zero(self) -> float:
        return self.a

    def _f(self, x):
        return self.a * x

    def _df(self, x):
        return self.a * np.ones_like(x) if isinstance(x, np.ndarray) else self.a

    def second_derivative(self, x):
        return np.zeros_like(x)

    def taylor_at_zero(self):
        return (self.a, 0.0, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "domain_max": self.domain_max,
                "slope_at_zero": self.a}


@dataclass(frozen=True)
class MoebiusMap(MonotoneMap):
    """``h(x) = a x / (1 + b x)`` with ``b >= 0``."""

    a: float
    b: float
    domain_max: float = 1.0
    kind: str = field(default="moebius", init=False)

    def __post_init__(self):
        if not self.b >= 0.0:
            raise ValidationError(f"Moebius curvature b must be >= 0, got {self.b!r}")
        self._validate()

    @property
    def slope_at_zero(self) -> float:
        return self.a

    def _f(self, x):
        return self.a * x / (1.0 + self.b * x)

    def _df(self, x):
        return self.a / (1.0 + self.b * x) ** 2

    def second_derivative(self, x):
        return -2.0 * self.a * self.b / (1.0 + self.b * x) ** 3

    def taylor_at_zero(self):
        a, b = self.a, self.b
        return (a, -a * b, a * b * b)

    def to_dict(self):
        return {"kind": self.kind, "a": self.a, "b": self.b,
                "domain_max": self.domain_max, "slope_at_zero": self.a}


@dataclass(frozen=True, eq=False)
class TabulatedMap(MonotoneMap):
    """Monotone piecewise-cubic interpolant of sampled ``(F_k, F_j)`` pairs."""

    knots_x: np.ndarray
    knots_y: np.ndarray
    slopes: np.ndarray
    domain_max: float
    kind: str = field(default="tabulated", init=False)
    _table: HermiteTable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_table", HermiteTable(self.knots_x, self.knots_y, self.slopes))
        if self.knots_x[0] != 0.0 or self.knots_y[0] != 0.0:
            raise ValidationError("first knot must be the origin")
        if self.domain_max > self.knots_x[-1]:
            raise ValidationError(
                f"domain_max {self.domain_max!r} exceeds last knot {self.knots_x[-1]!r}"
            )
        self._validate()

    @property
    def slope_at_zero(self) -> float:
        return float(self.slopes[0])

    def _f(self, x):
        if isinstance(x, np.ndarray):
            return self._table.values(x)
        return self._table.value(x)

    def _df(self, x):
        if isinstance(x, np.ndarray):
            return self._table.slopes(x)
        return self._table.slope(x)

    def taylor_at_zero(self):
        # the first segment is a cubic, so this expansion is exact on it
        _, m0, c2, c3 = self._table.segment_coefficients(0)
        return (m0, c2, c3)

    def breakpoints(self):
        return tuple(float(v) for v in self.knots_x[1:] if v < self.domain_max)

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.knots_x.tolist(), self.knots_y.tolist()))

    def to_dict(self):
        return {
            "kind": self.kind,
            "knots": [list(p) for p in self.knots],
            "slopes": self.slopes.tolist(),
            "slope_at_zero": self.slope_at_zero,
            "domain_max": self.domain_max,
        }


def make_tabulated(samples: Sequence[tuple[float, float]], domain_max: float | None = None) -> TabulatedMap:
    """Fit a monotone cubic through force-force samples.

    The origin is added if absent. ``domain_max`` defaults to the largest
    sampled force and may not exceed it.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("samples must be (F_k, F_j) pairs")
    if not np.all(np.isfinite(pts)):
        raise ValidationError("samples must be finite")
    x, y = pts[:, 0], pts[:, 1]
    if x.size and x[0] == 0.0:
        if y[0] != 0.0:
            raise ValidationError(f"h(0) must be 0, sample gives {y[0]!r}")
    else:
        x = np.concatenate([[0.0], x])
        y = np.concatenate([[0.0], y])
    if x.size < 4:
        raise ValidationError(f"need at least 4 samples including the origin, got {x.size}")
    if np.any(np.diff(x) <= 0.0):
        raise ValidationError("sample forces F_k must be strictly increasing")
    if np.any(np.diff(y) <= 0.0):
        raise NonMonotoneData("sample forces F_j must be strictly increasing")
    m = pchip_slopes(x, y)
    dmax = float(x[-1]) if domain_max is None else float(domain_max)
    return TabulatedMap(x, y, m, dmax)


def derivative_at_zero(h: MonotoneMap) -> float:
    return h.slope_at_zero


def map_from_dict(d: dict) -> MonotoneMap:
    """Inverse of ``MonotoneMap.to_dict``."""
    try:
        kind = d["kind"]
        if kind == "linear":
            return LinearMap(float(d["a"]), float(d.get("domain_max", 1.0)))
        if kind == "moebius":
            return MoebiusMap(float(d["a"]), float(d["b"]), float(d.get("domain_max", 1.0)))
        if kind == "tabulated":
            knots = np.asarray(d["knots"], dtype=float)
            dmax = d.get("domain_max")
            if "slopes" in d:
                return TabulatedMap(knots[:, 0], knots[:, 1],
                                    np.asarray(d["slopes"], dtype=float),
                                    float(knots[-1, 0] if dmax is None else dmax))
            return make_tabulated(knots, dmax)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from exc
    raise ValidationError(f"unknown map kind {d.get('kind')!r}")
