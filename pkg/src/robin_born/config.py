"""Scenario files: one YAML (or JSON) mapping per scenario.

Example::

    gamma: 0.06        # mm^2/ps
    b: 0.001           # 1/ps
    beta: 0.005        # mm/ps
    geometry: {kind: halfspace}          # or {kind: slab, L: 50.0, M: 4}
    source: {y1: 0.0, y2: 0.0, s: 0.0}
    grid: {tStart: 200.0, tEnd: 4000.0, count: 191}
    point: {x1: 0.0, x2: 0.0, x3: 20.0}
    nMax: 5
    tol: 0.01
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import yaml

from robin_born.model import (HALFSPACE, BoundaryImpulse, Geometry, MediumParams,
                              ModelValidationError, RobinCoefficient, SpaceTimePoint, TimeGrid,
                              Violation)

N_MAX_LIMIT = 200
_REQUIRED = object()


@dataclass(frozen=True)
class ScenarioConfig:
    medium: MediumParams
    beta: RobinCoefficient
    geometry: Geometry
    source: BoundaryImpulse
    grid: TimeGrid
    point: tuple[float, float, float]
    n_max: int = 5
    tol: float = 1e-2

    def violations(self) -> list[Violation]:
        out = (self.medium.violations() + self.beta.violations() + self.geometry.violations()
               + self.source.violations() + self.grid.violations())
        probe = SpaceTimePoint(*self.point, t=max(self.grid.t_start, 0.0))
        out += [v for v in probe.violations(self.geometry) if v.field != "point.t"]
        if not (isinstance(self.n_max, int) and 0 <= self.n_max <= N_MAX_LIMIT):
            out.append(Violation("nMax", f"0 <= nMax <= {N_MAX_LIMIT}"))
        if not (isinstance(self.tol, float) and 0 < self.tol < 1):
            out.append(Violation("tol", "0 < tol < 1"))
        return out

    def with_overrides(self, *, beta=None, n_max=None, tol=None, x3=None, grid=None) -> ScenarioConfig:
        cfg = self
        if beta is not None:
            cfg = replace(cfg, beta=RobinCoefficient(beta))
        if n_max is not None:
            cfg = replace(cfg, n_max=n_max)
        if tol is not None:
            cfg = replace(cfg, tol=tol)
        if x3 is not None:
            cfg = replace(cfg, point=(cfg.point[0], cfg.point[1], x3))
        if grid is not None:
            cfg = replace(cfg, grid=grid)
        return cfg

    def to_dict(self) -> dict[str, Any]:
        geom: dict[str, Any] = {"kind": self.geometry.kind}
        if self.geometry.is_slab:
            geom["L"] = self.geometry.L
            if self.geometry.image_truncation is not None:
                geom["M"] = self.geometry.image_truncation
        return {
            "gamma": self.medium.gamma,
            "b": self.medium.b,
            "beta": self.beta.beta,
            "geometry": geom,
            "source": {"y1": self.source.y1, "y2": self.source.y2, "s": self.source.s},
            "grid": {"tStart": self.grid.t_start, "tEnd": self.grid.t_end, "count": self.grid.count},
            "point": dict(zip(("x1", "x2", "x3"), self.point)),
            "nMax": self.n_max,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ScenarioConfig:
        errors: list[Violation] = []

        def num(section, key, default=_REQUIRED, kind=float):
            src = data if section is None else (data.get(section) or {})
            name = key if section is None else f"{section}.{key}"
            if not isinstance(src, dict):
                errors.append(Violation(section, "must be a mapping"))
                return None
            if key not in src:
                if default is _REQUIRED:
                    errors.append(Violation(name, "missing"))
                    return None
                return default
            value = src[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                errors.append(Violation(name, f"expected a number, got {value!r}"))
                return None
            if kind is int:
                if float(value) != int(value):
                    errors.append(Violation(name, "expected an integer"))
                    return None
                return int(value)
            return float(value)

        if not isinstance(data, dict):
            raise ModelValidationError([Violation("config", "top level must be a mapping")])
        geom_data = data.get("geometry") or {"kind": HALFSPACE}
        kind = geom_data.get("kind", HALFSPACE) if isinstance(geom_data, dict) else None
        cfg = cls(
            medium=MediumParams(num(None, "gamma"), num(None, "b", 0.0)),
            beta=RobinCoefficient(num(None, "beta")),
            geometry=Geometry(kind, num("geometry", "L", None), num("geometry", "M", None, int)),
            source=BoundaryImpulse(num("source", "y1", 0.0), num("source", "y2", 0.0),
                                   num("source", "s", 0.0)),
            grid=TimeGrid(num("grid", "tStart"), num("grid", "tEnd"), num("grid", "count", kind=int)),
            point=(num("point", "x1", 0.0), num("point", "x2", 0.0), num("point", "x3")),
            n_max=num(None, "nMax", 5, int),
            tol=num(None, "tol", 1e-2),
        )
        if errors:
            raise ModelValidationError(errors)
        return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return ScenarioConfig.from_dict(data)


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
