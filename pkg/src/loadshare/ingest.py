"""Reading force-force sample tables and problem configurations."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .funcmodel import TabulatedMap, make_tabulated
from .koenigs import DEFAULT_GRID, DEFAULT_N_MAX, DEFAULT_TOL

log = logging.getLogger(__name__)

MIN_ROWS = 4
HEADER = ("F_k", "F_j")


@dataclass
class ExperimentTable:
    f_k: np.ndarray
    f_j: np.ndarray
    source: str = ""
    units: str = ""
    origin_injected: bool = False
    duplicates_merged: int = 0

    def __len__(self):
        return self.f_k.size

    @property
    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.f_k.tolist(), self.f_j.tolist()))

    def to_map(self, domain_max: float | None = None) -> TabulatedMap:
        return make_tabulated(self.rows, domain_max)


def _parse_rows(text: str):
    rows = []
    units = ""
    seen_data = False
    for lineno, rec in enumerate(csv.reader(text.splitlines()), start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        first = rec[0].strip()
        if first.startswith("#"):
            body = ",".join(rec).lstrip("#").strip()
            if body.lower().startswith("units:"):
                units = body.split(":", 1)[1].strip()
            continue
        if len(rec) != 2:
            raise ParseError(f"expected 2 columns, got {len(rec)}", lineno)
        try:
            fk, fj = float(rec[0]), float(rec[1])
        except ValueError:
            if not seen_data and tuple(c.strip() for c in rec) == HEADER:
                seen_data = True
                continue
            raise ParseError(f"non-numeric row {rec!r}", lineno) from None
        if not (math.isfinite(fk) and math.isfinite(fj)):
            raise ParseError(f"non-finite value in row {rec!r}", lineno)
        seen_data = True
        rows.append((lineno, fk, fj))
    return rows, units


def table_from_rows(rows, source: str = "", units: str = "") -> ExperimentTable:
    """Sort, merge duplicate ``F_k`` by averaging ``F_j``, pin the origin."""
    for lineno, fk, fj in rows:
        if fk < 0.0 or fj < 0.0:
            raise ValidationError(f"negative force at line {lineno}: ({fk!r}, {fj!r})")
    pts = sorted((fk, fj) for _, fk, fj in rows)
    merged: list[list[float]] = []
    counts: list[int] = []
    for fk, fj in pts:
        if merged and merged[-1][0] == fk:
            merged[-1][1] += fj
            counts[-1] += 1
        else:
            merged.append([fk, fj])
            counts.append(1)
    dups = sum(c - 1 for c in counts)
    for m, c in zip(merged, counts):
        m[1] /= c
    if dups:
        log.warning("merged %d duplicate F_k rows by averaging F_j", dups,
                    extra={"event": "duplicates_merged", "count": dups, "source": source})
    injected = not merged or merged[0][0] != 0.0
    if injected:
        merged.insert(0, [0.0, 0.0])
        log.warning("injected origin row (0, 0)",
                    extra={"event": "origin_injected", "source": source})
    arr = np.asarray(merged, dtype=float).reshape(-1, 2)
    table = ExperimentTable(arr[:, 0].copy(), arr[:, 1].copy(), source, units, injected, dups)
    if len(table) < MIN_ROWS:
        raise ValidationError(
            f"table has {len(table)} rows after deduplication; at least {MIN_ROWS} required"
        )
    return table


def read_samples(path) -> ExperimentTable:
    """Parse a two-column ``F_k,F_j`` CSV file (header optional)."""
    path = Path(path)
    text = path.read_text()
    rows, units = _parse_rows(text)
    return table_from_rows(rows, str(path), units)


@dataclass
class ProblemConfig:
    arms: dict[str, float]
    pair: tuple[str, str]
    m_min: float
    m_max: float
    count: int
    tol: float = DEFAULT_TOL
    n_max: int = DEFAULT_N_MAX
    grid_size: int = DEFAULT_GRID
    ref_force: float = 1.0
    source: str = field(default="", compare=False)

    @property
    def names(self) -> list[str]:
        return list(self.arms)

    @property
    def arm_values(self) -> list[float]:
        return list(self.arms.values())

    @property
    def j_index(self) -> int:
        return self.names.index(self.pair[0])

    @property
    def k_index(self) -> int:
        return self.names.index(self.pair[1])

    def moments(self) -> np.ndarray:
        return np.linspace(self.m_min, self.m_max, self.count)

    def numeric(self) -> dict:
        return {"tol": self.tol, "n_max": self.n_max, "grid_size": self.grid_size,
                "ref_force": self.ref_force}


def _number(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{what} must be a finite number, got {v!r}")
    return float(v)


def config_from_dict(doc, source: str = "") -> ProblemConfig:
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    arms = doc.get("arms", doc.get("moment_arms"))
    if not isinstance(arms, dict) or len(arms) < 2:
        raise ValidationError("'arms' must map at least two names to moment arms")
    arms = {str(k): _number(v, f"moment arm {k!r}") for k, v in arms.items()}
    for name, r in arms.items():
        if r <= 0.0:
            raise ValidationError(f"moment arm {name!r} must be positive, got {r!r}")

    pair = doc.get("pair")
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ValidationError("'pair' must be [j_name, k_name]")
    pair = (str(pair[0]), str(pair[1]))
    for name in pair:
        if name not in arms:
            raise ValidationError(f"pair names unknown arm {name!r}")
    if pair[0] == pair[1]:
        raise ValidationError("pair must name two different arms")

    sweep = doc.get("sweep", doc.get("moment_sweep"))
    if isinstance(sweep, (list, tuple)) and len(sweep) == 3:
        sweep = dict(zip(("M_min", "M_max", "count"), sweep))
    if not isinstance(sweep, dict):
        raise ValidationError("'sweep' must be {M_min, M_max, count}")
    try:
        m_min = _number(sweep["M_min"], "M_min")
        m_max = _number(sweep["M_max"], "M_max")
        count = sweep["count"]
    except KeyError as exc:
        raise ValidationError(f"sweep is missing {exc}") from None
    if isinstance(count, bool) or not isinstance(count, int) or count < 2:
        raise ValidationError(f"sweep count must be an integer >= 2, got {count!r}")
    if m_min < 0.0 or not m_max > m_min:
        raise ValidationError(f"sweep needs 0 <= M_min < M_max, got {m_min!r}, {m_max!r}")

    num = doc.get("numeric", {}) or {}
    if not isinstance(num, dict):
        raise ValidationError("'numeric' must be an object")
    unknown = set(num) - {"tol", "n_max", "grid_size", "ref_force"}
    if unknown:
        raise ValidationError(f"unknown numeric keys {sorted(unknown)}")
    cfg = ProblemConfig(arms, pair, m_min, m_max, count, source=source)
    if "tol" in num:
        cfg.tol = _number(num["tol"], "tol")
        if cfg.tol <= 0.0:
            raise ValidationError("tol must be positive")
    for key, low in (("n_max", 1), ("grid_size", 16)):
        if key in num:
            v = num[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < low:
                raise ValidationError(f"{key} must be an integer >= {low}, got {v!r}")
            setattr(cfg, key, v)
    if "ref_force" in num:
        cfg.ref_force = _number(num["ref_force"], "ref_force")
        if cfg.ref_force <= 0.0:
            raise ValidationError("ref_force must be positive")
    return cfg


def read_config(path) -> ProblemConfig:
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    return config_from_dict(doc, str(path))
