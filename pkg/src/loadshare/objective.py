"""Objective ``J`` reconstructed from a Koenigs function.

With ``rho = r_j / r_k`` and multiplier ``a``, the derivative
``J'(x) = c * sigma(x)**p`` solves ``J'(h(x)) = rho * J'(x)`` exactly when
``a**p = rho``, i.e. ``p = ln(rho) / ln(a)``.  The two free constants are
fixed by ``J'(ref_force) = 1`` and ``J(0) = 0``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateRatio,
    DomainError,
    NonConvexObjective,
    RangeError,
    SchroderResidualError,
    ValidationError,
)
from .hermite import HermiteTable
from .koenigs import KoenigsFunction
from .quadrature import adaptive_simpson, graded_first_panel

SCHRODER_TOL = 1e-6
QUAD_RTOL = 1e-10


def compute_exponent(r_ratio: float, multiplier: float) -> float:
    """Exponent ``p`` of sigma in ``J'`` for moment-arm ratio ``r_j / r_k``."""
    if not (r_ratio > 0.0 and math.isfinite(r_ratio)):
        raise ValidationError(f"moment-arm ratio must be positive, got {r_ratio!r}")
    if not 0.0 < multiplier < 1.0:
        raise ValidationError(f"multiplier must be in (0, 1), got {multiplier!r}")
    if r_ratio == 1.0:
        raise DegenerateRatio("r_j / r_k = 1 leaves the exponent undetermined")
    p = math.log(r_ratio) / math.log(multiplier)
    if p <= 0.0:
        raise NonConvexObjective(
            f"r_j/r_k = {r_ratio!r} with h'(0) = {multiplier!r} gives p = {p!r} <= 0; "
            "a contracting h requires r_j < r_k"
        )
    return p


@dataclass
class SchroderReport:
    x: np.ndarray
    residual: np.ndarray
    relative: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def sup_relative(self) -> float:
        return float(np.max(self.relative))


@dataclass(frozen=True, eq=False)
class ObjectiveModel:
    koenigs: KoenigsFunction
    p: float
    c: float
    ref_force: float
    r_j: float
    r_k: float
    x: np.ndarray
    j: np.ndarray
    _jtable: HermiteTable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_jtable", HermiteTable(self.x, self.j, self.j_prime(self.x)))

    @property
    def r_ratio(self) -> float:
        return self.r_j / self.r_k

    @property
    def domain_max(self) -> float:
        return self.koenigs.domain_max

    @property
    def j_grid(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.j.tolist()))

    def j_prime(self, x):
        s = self.koenigs.sigma_eval(x)
        return self.c * s ** self.p

    def j_value(self, x):
        xs = self.koenigs.source._check_domain(x)
        if xs.ndim == 0:
            xf = float(xs)
            return 0.0 if xf == 0.0 else self._jtable.value(xf)
        return self._jtable.values(xs)

    @property
    def j_prime_max(self) -> float:
        return self.c * self.koenigs.sigma_max ** self.p

    def j_prime_inverse(self, y: float) -> float:
        """Force at which ``J'`` equals ``y``."""
        y = float(y)
        top = self.j_prime_max
        if not (y >= 0.0 and y <= top * (1.0 + 1e-13)):
            raise RangeError(f"J' value {y!r} outside [0, {top!r}]")
        if y == 0.0:
            return 0.0
        s = min((y / self.c) ** (1.0 / self.p), self.koenigs.sigma_max)
        return self.koenigs.sigma_inverse(s)

    def scaled(self, kappa: float) -> "ObjectiveModel":
        """Same objective with the multiplicative constant scaled by ``kappa``."""
        if not kappa > 0.0:
            raise ValidationError(f"scale must be positive, got {kappa!r}")
        return dataclasses.replace(self, c=self.c * kappa, j=self.j * kappa)

    def schroder_residual(self, grid_size: int = 64) -> SchroderReport:
        """Residual ``J'(h(x)) - rho J'(x)`` on a uniform grid."""
        if grid_size < 8:
            raise ValidationError(f"grid_size must be >= 8, got {grid_size}")
        x = np.linspace(0.0, self.domain_max, grid_size)
        jp = self.j_prime(x)
        res = self.j_prime(self.koenigs.source(x)) - self.r_ratio * jp
        return SchroderReport(x, res, np.abs(res) / np.maximum(1.0, jp))


def build_objective(K: KoenigsFunction, r_j: float, r_k: float,
                    ref_force: float = 1.0, *, check: bool = True) -> ObjectiveModel:
    """Construct ``J'`` and tabulate ``J`` by cumulative quadrature.

    Raises:
        NonConvexObjective, DegenerateRatio: from :func:`compute_exponent`.
        QuadratureFailure: the quadrature does not reach its tolerance.
        SchroderResidualError: ``check`` is set and the residual exceeds 1e-6.
    """
    if not (r_j > 0.0 and r_k > 0.0):
        raise ValidationError(f"moment arms must be positive, got r_j={r_j!r}, r_k={r_k!r}")
    if not 0.0 < ref_force <= K.domain_max:
        raise DomainError(f"ref_force {ref_force!r} outside (0, {K.domain_max!r}]")
    p = compute_exponent(r_j / r_k, K.multiplier)
    c = 1.0 / K.sigma_eval(ref_force) ** p

    sig = K._table.value

    def jp(u):
        return c * sig(u) ** p if u > 0.0 else 0.0

    x = K.x
    pieces = np.empty(x.size - 1)
    pieces[0] = graded_first_panel(jp, float(x[1]), p, QUAD_RTOL)
    for i in range(1, x.size - 1):
        pieces[i] = adaptive_simpson(jp, float(x[i]), float(x[i + 1]), QUAD_RTOL)
    j = np.concatenate([[0.0], np.cumsum(pieces)])

    model = ObjectiveModel(K, p, c, float(ref_force), float(r_j), float(r_k), x.copy(), j)
    if check:
        rep = model.schroder_residual(64)
        if rep.sup_relative > SCHRODER_TOL:
            raise SchroderResidualError(
                f"Schroder residual {rep.sup_relative:.3e} exceeds {SCHRODER_TOL:g}"
            )
    return model
