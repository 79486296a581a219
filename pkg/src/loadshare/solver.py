"""Forward load-sharing problem: minimize ``sum J(F_i)`` s.t. ``sum r_i F_i = M``.

Stationarity gives ``J'(F_i) = lam * r_i``.  Writing ``lam = c * s**p`` turns
this into ``sigma(F_i) = s * r_i**(1/p)``, so the multiplier search runs on
``s``, in which the constraint is close to linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ForceOutOfDomain, LoadShareError, ValidationError
from .koenigs import KoenigsFunction
from .objective import ObjectiveModel


@dataclass
class SharingProblem:
    moment_arms: Sequence[float]
    moment: float
    objective: ObjectiveModel

    def __post_init__(self):
        arms = np.asarray(self.moment_arms, dtype=float)
        if arms.ndim != 1 or arms.size < 2:
            raise ValidationError("need at least two moment arms")
        if np.any(~np.isfinite(arms)) or np.any(arms <= 0.0):
            raise ValidationError(f"moment arms must be positive, got {arms.tolist()}")
        if not (math.isfinite(self.moment) and self.moment >= 0.0):
            raise ValidationError(f"moment must be >= 0, got {self.moment!r}")
        self.moment_arms = arms


@dataclass
class SolveResult:
    forces: np.ndarray
    lam: float
    objective_value: float


def _forces(K: KoenigsFunction, weights: np.ndarray, s: float) -> np.ndarray:
    return np.array([K.sigma_inverse(min(s * w, K.sigma_max)) for w in weights])


def solve(P: SharingProblem) -> SolveResult:
    """Minimizer of the separable objective under the moment constraint.

    Raises:
        ForceOutOfDomain: some force would exceed the calibrated range.
    """
    O = P.objective
    K = O.koenigs
    r = P.moment_arms
    M = float(P.moment)
    if M == 0.0:
        return SolveResult(np.zeros(r.size), 0.0, 0.0)

    w = r ** (1.0 / O.p)
    # the largest arm reaches domain_max first
    s_cap = K.sigma_max / w.max()

    def g(s):
        return float(np.dot(r, _forces(K, w, s))) - M

    g_cap = g(s_cap)
    if g_cap < 0.0:
        raise ForceOutOfDomain(
            f"moment {M!r} needs forces beyond domain_max {K.domain_max!r} "
            f"(largest reachable moment {g_cap + M!r})"
        )
    if g_cap == 0.0:
        s = s_cap
    else:
        s = brentq(g, 0.0, s_cap, xtol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    F = _forces(K, w, s)
    lam = O.c * s ** O.p
    return SolveResult(F, lam, float(np.sum(O.j_value(F))))


@dataclass
class CurvePoint:
    moment: float
    f_k: float | None
    f_j: float | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def sharing_curve(moment_arms, objective: ObjectiveModel, j: int, k: int,
                  moments) -> list[CurvePoint]:
    """Solve at each moment and collect the ``(F_k, F_j)`` locus.

    A failing moment yields a point carrying the error class name instead of
    aborting the sweep.
    """
    n = len(moment_arms)
    if not (0 <= j < n and 0 <= k < n) or j == k:
        raise ValidationError(f"invalid muscle indices j={j}, k={k} for {n} arms")
    out = []
    for M in moments:
        try:
            res = solve(SharingProblem(moment_arms, float(M), objective))
        except LoadShareError as exc:
            out.append(CurvePoint(float(M), None, None, type(exc).__name__))
            continue
        out.append(CurvePoint(float(M), float(res.forces[k]), float(res.forces[j])))
    return out


def iterate_exponent(r_m: float, r_j: float, r_k: float) -> float:
    """Fractional order ``t`` linking the ``(m, k)`` pair to the ``(j, k)`` pair."""
    if min(r_m, r_j, r_k) <= 0.0:
        raise ValidationError("moment arms must be positive")
    if r_j == r_k:
        raise ValidationError("r_j == r_k leaves the fractional order undefined")
    return math.log(r_m / r_k) / math.log(r_j / r_k)


def predict_pair_sharing(K: KoenigsFunction, r_m: float, r_j: float, r_k: float,
                         x_grid) -> list[tuple[float, float | None]]:
    """Predicted ``(F_k, F_m)`` for a third muscle ``m`` as ``h_t(F_k)``.

    Points pushed outside the calibrated range come back as ``(F_k, None)``.
    """
    t = iterate_exponent(r_m, r_j, r_k)
    out = []
    for x in x_grid:
        try:
            out.append((float(x), K.fractional_iterate(t, float(x))))
        except LoadShareError:
            out.append((float(x), None))
    return out
