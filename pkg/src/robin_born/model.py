"""Value types shared by the numerical modules.

All lengths are in mm, times in ps, ``gamma`` in mm^2/ps, ``b`` in 1/ps and
``beta`` in mm/ps. Types never raise on construction; call ``violations()``
(or :func:`validate`) to get the list of broken invariants, and
:func:`ensure_valid` where an exception is wanted instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

HALFSPACE = "halfspace"
SLAB = "slab"


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


class ModelValidationError(ValueError):
    """Raised by :func:`ensure_valid` with every violation found."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _finite(value: float) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value)


@dataclass(frozen=True)
class MediumParams:
    gamma: float
    b: float = 0.0

    def violations(self) -> list[Violation]:
        out = []
        if not (_finite(self.gamma) and self.gamma > 0):
            out.append(Violation("gamma", "gamma > 0"))
        if not (_finite(self.b) and self.b >= 0):
            out.append(Violation("b", "b >= 0"))
        return out


@dataclass(frozen=True)
class RobinCoefficient:
    beta: float

    def violations(self) -> list[Violation]:
        if not (_finite(self.beta) and self.beta >= 0):
            return [Violation("beta", "beta >= 0")]
        return []


@dataclass(frozen=True)
class Geometry:
    """Half space, or slab ``0 <= x3 <= L``.

    ``image_truncation`` is the number of image pairs ``M`` kept in the slab
    kernel; ``None`` selects adaptive truncation.
    """

    kind: Literal["halfspace", "slab"] = HALFSPACE
    L: float | None = None
    image_truncation: int | None = None

    @classmethod
    def halfspace(cls) -> Geometry:
        return cls(HALFSPACE)

    @classmethod
    def slab(cls, L: float, image_truncation: int | None = None) -> Geometry:
        return cls(SLAB, L, image_truncation)

    @property
    def is_slab(self) -> bool:
        return self.kind == SLAB

    def violations(self) -> list[Violation]:
        if self.kind not in (HALFSPACE, SLAB):
            return [Violation("geometry.kind", "kind is 'halfspace' or 'slab'")]
        if self.kind == HALFSPACE:
            return []
        out = []
        if self.L is None or not (_finite(self.L) and self.L > 0):
            out.append(Violation("geometry.L", "L > 0"))
        M = self.image_truncation
        if M is not None and not (isinstance(M, int) and M >= 1):
            out.append(Violation("geometry.M", "imageTruncation >= 1"))
        return out


@dataclass(frozen=True)
class BoundaryImpulse:
    y1: float = 0.0
    y2: float = 0.0
    s: float = 0.0

    def violations(self) -> list[Violation]:
        out = [Violation(f"source.{k}", "finite")
               for k in ("y1", "y2") if not _finite(getattr(self, k))]
        if not (_finite(self.s) and self.s >= 0):
            out.append(Violation("source.s", "s >= 0"))
        return out


@dataclass(frozen=True)
class SpaceTimePoint:
    x1: float
    x2: float
    x3: float
    t: float

    def violations(self, geom: Geometry | None = None) -> list[Violation]:
        out = [Violation(f"point.{k}", "finite")
               for k in ("x1", "x2") if not _finite(getattr(self, k))]
        if not (_finite(self.x3) and self.x3 >= 0):
            out.append(Violation("point.x3", "x3 >= 0"))
        elif geom is not None and geom.is_slab and geom.L is not None and self.x3 > geom.L:
            out.append(Violation("point.x3", "x3 <= L"))
        if not (_finite(self.t) and self.t >= 0):
            out.append(Violation("point.t", "t >= 0"))
        return out

    def at(self, t: float) -> SpaceTimePoint:
        return SpaceTimePoint(self.x1, self.x2, self.x3, t)


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    count: int

    def violations(self) -> list[Violation]:
        out = []
        if not (_finite(self.t_start) and _finite(self.t_end) and self.t_start < self.t_end):
            out.append(Violation("grid", "tStart < tEnd"))
        if not (isinstance(self.count, int) and self.count >= 2):
            out.append(Violation("grid.count", "count >= 2"))
        return out

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.count)

    @classmethod
    def parse(cls, spec: str) -> TimeGrid:
        """Parse ``START:END:COUNT``."""
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be START:END:COUNT, got {spec!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


@dataclass(frozen=True)
class BornEvaluation:
    """Born-series evaluation at one space-time point.

    ``terms[n]`` is the surface-profile value w_n; ``partial_sums[n]`` is the
    assembled field u_n including the decay and lateral Gaussian prefactor.
    ``ratios[n-1]`` holds ``|w_n / w_{n-1}|`` for ``n >= 1``.
    """

    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]
    ratios: tuple[float, ...]
    n_used: int
    converged: bool
    tolerance: float
    prefactor: float = field(default=1.0, repr=False)

    @property
    def value(self) -> float:
        return self.partial_sums[-1]


def validate(params: MediumParams, beta: RobinCoefficient, geom: Geometry) -> list[Violation]:
    """Collect invariant violations of a medium/boundary/geometry triple."""
    return params.violations() + beta.violations() + geom.violations()


def ensure_valid(*items, geom: Geometry | None = None) -> None:
    found: list[Violation] = []
    for item in items:
        if isinstance(item, SpaceTimePoint):
            found += item.violations(geom)
        else:
            found += item.violations()
    if found:
        raise ModelValidationError(found)
