"""Free-space, half-space Neumann and slab Neumann diffusion kernels.

The half-space Poisson kernel for a boundary impulse is twice the free-space
kernel with the source on the boundary; the slab kernel adds the images at
``x3 = 2 m L`` of the even ``2L``-periodic extension.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from robin_born.model import BoundaryImpulse, Geometry, MediumParams, SpaceTimePoint

# adaptive image truncation: stop once the certified tail is below this fraction of the sum
IMAGE_RTOL = 1e-16
MAX_IMAGE_PAIRS = 100_000


def _kernel_array(r2, dt, gamma, b):
    """theta(dt) exp(-b dt) / (4 pi gamma dt)^(3/2) exp(-r2 / (4 gamma dt)), elementwise."""
    r2 = np.asarray(r2, dtype=float)
    dt = np.asarray(dt, dtype=float)
    out = np.zeros(np.broadcast(r2, dt).shape)
    pos = np.broadcast_to(dt > 0, out.shape)
    if np.any(pos):
        d = np.broadcast_to(dt, out.shape)[pos]
        r = np.broadcast_to(r2, out.shape)[pos]
        four_gd = 4.0 * gamma * d
        out[pos] = np.exp(-b * d - r / four_gd) / (math.pi * four_gd) ** 1.5
    return out


def free_space_kernel(p: SpaceTimePoint, y: tuple[float, float, float], s: float,
                      m: MediumParams) -> float:
    """Whole-space kernel K(x, t; y, s); exactly 0 for t <= s."""
    dt = p.t - s
    if dt <= 0:
        return 0.0
    r2 = (p.x1 - y[0]) ** 2 + (p.x2 - y[1]) ** 2 + (p.x3 - y[2]) ** 2
    four_gd = 4.0 * m.gamma * dt
    return math.exp(-m.b * dt - r2 / four_gd) / (math.pi * four_gd) ** 1.5


def halfspace_neumann_kernel(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams) -> float:
    return 2.0 * free_space_kernel(p, (src.y1, src.y2, 0.0), src.s, m)


@dataclass(frozen=True)
class SlabKernelValue:
    value: float
    image_pairs: int
    tail_bound: float


def slab_neumann_kernel_detail(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                               geom: Geometry) -> SlabKernelValue:
    """Slab Poisson kernel 2 sum_{|m|<=M} K(x, t; y1, y2, 2 m L, s) with a tail bound.

    For ``0 <= x3 <= L`` every omitted image satisfies ``|x3 - 2mL| >= (2|m|-1)L``
    and consecutive squared distances grow by at least ``8(M+1)L^2``, so the
    omitted sum is bounded by a geometric series. With
    ``geom.image_truncation = None`` pairs are added until that bound drops
    below ``IMAGE_RTOL`` of the running sum (at least one pair).
    """
    if not geom.is_slab:
        raise ValueError("slab kernel needs a slab geometry")
    L = geom.L
    dt = p.t - src.s
    if dt <= 0:
        return SlabKernelValue(0.0, geom.image_truncation or 1, 0.0)
    four_gd = 4.0 * m.gamma * dt
    lateral = (p.x1 - src.y1) ** 2 + (p.x2 - src.y2) ** 2
    pref = 2.0 * math.exp(-m.b * dt - lateral / four_gd) / (math.pi * four_gd) ** 1.5

    def tail(M):
        d = (2 * M + 1) * L
        q = math.exp(-8.0 * (M + 1) * L * L / four_gd)
        return 2.0 * math.exp(-d * d / four_gd) / (1.0 - q)

    total = math.exp(-p.x3 * p.x3 / four_gd)
    fixed = geom.image_truncation
    M = 0
    while True:
        M += 1
        a = p.x3 - 2 * M * L
        c = p.x3 + 2 * M * L
        total += math.exp(-a * a / four_gd) + math.exp(-c * c / four_gd)
        if fixed is not None:
            if M >= fixed:
                break
        elif tail(M) <= IMAGE_RTOL * total or M >= MAX_IMAGE_PAIRS:
            break
    return SlabKernelValue(pref * total, M, pref * tail(M))


def slab_neumann_kernel(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                        geom: Geometry) -> float:
    return slab_neumann_kernel_detail(p, src, m, geom).value


def neumann_kernel(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                   geom: Geometry | None = None) -> float:
    """Poisson kernel of the Neumann problem for either geometry."""
    if geom is not None and geom.is_slab:
        return slab_neumann_kernel(p, src, m, geom)
    return halfspace_neumann_kernel(p, src, m)


# ---------------------------------------------------------------------------
# boundary-source convolution


@dataclass(frozen=True)
class BoundarySourceSamples:
    """Boundary flux density g sampled on a tensor grid ``g[i, j, k] = g(y1[i], y2[j], s[k])``."""

    y1: np.ndarray
    y2: np.ndarray
    s: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        for name in ("y1", "y2", "s"):
            axis = np.asarray(getattr(self, name), dtype=float)
            if axis.ndim != 1 or axis.size < 2 or np.any(np.diff(axis) <= 0):
                raise ValueError(f"{name} axis must be strictly increasing with >= 2 samples")
            object.__setattr__(self, name, axis)
        g = np.asarray(self.g, dtype=float)
        if g.shape != (self.y1.size, self.y2.size, self.s.size):
            raise ValueError(f"g has shape {g.shape}, expected {(self.y1.size, self.y2.size, self.s.size)}")
        if not np.all(np.isfinite(g)):
            raise ValueError("g must be finite")
        object.__setattr__(self, "g", g)

    @classmethod
    def from_function(cls, y1, y2, s, func) -> BoundarySourceSamples:
        Y1, Y2, S = np.meshgrid(y1, y2, s, indexing="ij")
        return cls(np.asarray(y1), np.asarray(y2), np.asarray(s), func(Y1, Y2, S))


def read_boundary_source_csv(path: str | Path) -> BoundarySourceSamples:
    """Load long-format samples with header ``y1,y2,s,g``; rows must fill a tensor grid."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"y1", "y2", "s", "g"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        rows = [(float(r["y1"]), float(r["y2"]), float(r["s"]), float(r["g"])) for r in reader]
    data = np.array(rows, dtype=float).reshape(-1, 4)
    axes = [np.unique(data[:, k]) for k in range(3)]
    shape = tuple(a.size for a in axes)
    if data.shape[0] != math.prod(shape):
        raise ValueError(f"{path}: {data.shape[0]} rows do not form a {shape} tensor grid")
    g = np.full(shape, np.nan)
    idx = [np.searchsorted(axes[k], data[:, k]) for k in range(3)]
    g[idx[0], idx[1], idx[2]] = data[:, 3]
    if np.isnan(g).any():
        raise ValueError(f"{path}: duplicate or missing grid points")
    return BoundarySourceSamples(axes[0], axes[1], axes[2], g)


def write_boundary_source_csv(samples: BoundarySourceSamples, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y1", "y2", "s", "g"])
        for i, a in enumerate(samples.y1):
            for j, b in enumerate(samples.y2):
                for k, c in enumerate(samples.s):
                    w.writerow([repr(float(a)), repr(float(b)), repr(float(c)),
                                repr(float(samples.g[i, j, k]))])


@dataclass(frozen=True)
class ConvolutionResult:
    value: float
    warnings: tuple[str, ...] = field(default=())

    @property
    def covered(self) -> bool:
        return not self.warnings


def boundary_convolution(g: BoundarySourceSamples, p: SpaceTimePoint, m: MediumParams,
                         geom: Geometry | None = None) -> ConvolutionResult:
    """u0(x, t) = integral of G(x, t; y1, y2, s) g(y1, y2, s) by the tensor trapezoid rule.

    The samples are used as given; accuracy is set by the caller's grid.
    Warnings flag a source that is still nonzero on the grid edge (support
    possibly truncated) or a grid with no samples before ``t``.
    """
    warnings = []
    if g.s[0] >= p.t:
        warnings.append("no source samples with s < t; u0 is identically zero")
    gmax = np.max(np.abs(g.g))
    if gmax > 0:
        edge = max(np.max(np.abs(g.g[[0, -1], :, :])), np.max(np.abs(g.g[:, [0, -1], :])),
                   np.max(np.abs(g.g[:, :, 0])))
        if edge > 1e-8 * gmax:
            warnings.append("source nonzero on the grid boundary; support may be truncated")

    Y1, Y2, S = np.meshgrid(g.y1, g.y2, g.s, indexing="ij")
    lateral = (p.x1 - Y1) ** 2 + (p.x2 - Y2) ** 2
    dt = p.t - S
    if geom is not None and geom.is_slab:
        kern = np.zeros_like(dt)
        for idx in np.ndindex(dt.shape):
            if dt[idx] > 0:
                kern[idx] = slab_neumann_kernel(
                    p, BoundaryImpulse(Y1[idx], Y2[idx], S[idx]), m, geom)
    else:
        kern = 2.0 * _kernel_array(lateral + p.x3 ** 2, dt, m.gamma, m.b)
    integrand = kern * g.g
    value = np.trapezoid(np.trapezoid(np.trapezoid(integrand, g.s, axis=2), g.y2, axis=1), g.y1)
    return ConvolutionResult(float(value), tuple(warnings))
