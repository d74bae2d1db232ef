"""Reference fields: exact half-space Robin solution and the extrapolated-boundary approximation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from robin_born import specfun
from robin_born.kernels import free_space_kernel, halfspace_neumann_kernel
from robin_born.model import (BoundaryImpulse, MediumParams, RobinCoefficient, SpaceTimePoint,
                              TimeGrid)

DEFAULT_FLOOR_FRAC = 0.01


def exact_solution(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                   beta: RobinCoefficient) -> float:
    """Half-space Robin Poisson kernel for a boundary impulse.

    The growing exponential and the complementary error function of the
    correction term are combined through erfcx; their exponents add up to
    ``-x3^2 / (4 gamma dt)``, so the result is

        exp(-b dt - r^2 / (4 gamma dt)) * [2 / (4 pi gamma dt)^(3/2)
                                           - beta / (4 pi gamma^2 dt) * erfcx(xi)]

    with ``xi = (x3 + 2 beta dt) / sqrt(4 gamma dt)`` and ``r`` the distance to
    the source. Never overflows. The first term is taken from the Neumann
    kernel itself so that ``beta = 0`` reproduces it bit for bit.
    """
    neumann = halfspace_neumann_kernel(p, src, m)
    dt = p.t - src.s
    if dt <= 0 or beta.beta == 0:
        return neumann
    gamma, b = m.gamma, beta.beta
    four_gd = 4.0 * gamma * dt
    r2 = (p.x1 - src.y1) ** 2 + (p.x2 - src.y2) ** 2 + p.x3 ** 2
    xi = (p.x3 + 2.0 * b * dt) / math.sqrt(four_gd)
    robin = b / (4.0 * math.pi * gamma * gamma * dt) * specfun.erfcx(xi)
    # the field is nonnegative; the clamp only removes roundoff of the cancellation
    return max(neumann - math.exp(-m.b * dt - r2 / four_gd) * robin, 0.0)


def exact_on_axis(x3: float, t: float, m: MediumParams, beta: RobinCoefficient) -> float:
    """The on-axis exact field for a source at the origin at time 0, written literally.

    Uses exp(...) * erfc(...) directly and overflows for large beta * t; kept
    as a cross-check of :func:`exact_solution`.
    """
    if t <= 0:
        return 0.0
    gamma, b = m.gamma, beta.beta
    four_gt = 4.0 * gamma * t
    return 2.0 * math.exp(-m.b * t) / (math.pi * four_gt) * (
        math.exp(-x3 * x3 / four_gt) / math.sqrt(math.pi * four_gt)
        - b / (2.0 * gamma) * math.exp(b / gamma * (x3 + b * t))
        * specfun.erfc((x3 + 2.0 * b * t) / math.sqrt(four_gt)))


def extrapolation_distance(m: MediumParams, beta: RobinCoefficient) -> float:
    if beta.beta <= 0:
        raise specfun.DomainError("extrapolation distance gamma/beta needs beta > 0")
    return m.gamma / beta.beta


def ebc_solution(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                 beta: RobinCoefficient, depth: float = 0.0) -> float:
    """Extrapolated-boundary field: whole-space source at depth ``depth`` minus its
    image mirrored in the plane ``x3 = -ell``, ``ell = gamma / beta``."""
    ell = extrapolation_distance(m, beta)
    source = free_space_kernel(p, (src.y1, src.y2, depth), src.s, m)
    sink = free_space_kernel(p, (src.y1, src.y2, depth - 2.0 * ell), src.s, m)
    return source - sink


def beta_from_reflection(c: float, rd: float) -> RobinCoefficient:
    """Impedance c / (2A), A = (1 + rd) / (1 - rd), for diffuse internal reflection ``rd``."""
    if c <= 0:
        raise specfun.DomainError("speed of light in the medium must be positive")
    if not 0 <= rd < 1:
        raise specfun.DomainError(f"internal reflection must lie in [0, 1), got {rd}")
    return RobinCoefficient(c * (1.0 - rd) / (2.0 * (1.0 + rd)))


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class FieldCurve:
    grid: TimeGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.count,):
            raise ValueError(f"curve has {values.shape} values for a grid of {self.grid.count}")
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times()

    def to_csv(self, fh=None) -> str | None:
        """Write ``t,u,label`` rows; masked (NaN) values are written as ``nan``."""
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "u", "label"])
        for t, u in zip(self.times, self.values):
            w.writerow([format_number(t), format_number(u), self.label])
        return None if fh is not None else buf.getvalue()


def format_number(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.17g}"


def field_curve(func, x: tuple[float, float, float], grid: TimeGrid, label: str = "") -> FieldCurve:
    """Evaluate ``func(point)`` on the grid times at fixed position."""
    values = [func(SpaceTimePoint(*x, float(t))) for t in grid.times()]
    return FieldCurve(grid, np.array(values), label)


def relative_error_curve(a: FieldCurve, b: FieldCurve,
                         floor_frac: float = DEFAULT_FLOOR_FRAC) -> FieldCurve:
    """|a - b| / |b| where |b| >= floor_frac * max|b|; NaN elsewhere."""
    if a.grid != b.grid:
        raise ValueError("curves are on different grids")
    if not 0 < floor_frac < 1:
        raise ValueError("floor_frac must lie in (0, 1)")
    ref = np.abs(b.values)
    keep = ref >= floor_frac * ref.max() if ref.max() > 0 else np.zeros_like(ref, dtype=bool)
    err = np.full(ref.shape, np.nan)
    err[keep] = np.abs(a.values[keep] - b.values[keep]) / ref[keep]
    label = f"relerr({a.label},{b.label})" if a.label or b.label else "relerr"
    return FieldCurve(a.grid, err, label)


def max_masked(curve: FieldCurve) -> float:
    vals = curve.values[~np.isnan(curve.values)]
    return float(vals.max()) if vals.size else math.nan
