"""Born series for the half-space Robin problem with a boundary impulse.

For a source at the boundary origin emitting at ``t0`` each Born term
factorises as

    v_n(x, t) = exp(-b (t - t0)) / (t - t0) * exp(-(x1^2 + x2^2) / (4 gamma (t - t0))) * w_n(x3, t)

and the depth profiles w_n have closed forms in terms of Beta functions and
Kummer functions of ``-zeta^2`` with ``zeta = x3 / sqrt(4 gamma (t - t0))``.
Terms alternate in sign, so they are evaluated and summed in extended
precision; the working precision grows with ``zeta^2`` (the bracketed Kummer
combination decays like ``exp(-zeta^2)`` while its two parts do not) and with
the order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from robin_born import specfun
from robin_born.model import (BornEvaluation, BoundaryImpulse, MediumParams, RobinCoefficient,
                              SpaceTimePoint)

LN10 = math.log(10.0)
BASE_DPS = 30
CONVERGENCE_WINDOW = 3


class QuadratureAccuracyError(ArithmeticError):
    def __init__(self, estimate: float, achieved: float, requested: float):
        self.estimate = estimate
        self.achieved = achieved
        self.requested = requested
        super().__init__(f"quadrature reached relative error {achieved:.3g} "
                         f"(requested {requested:.3g}); best estimate {estimate!r}")


@dataclass(frozen=True)
class BornTermContext:
    medium: MediumParams
    beta: RobinCoefficient
    t0: float = 0.0

    @property
    def gamma(self) -> float:
        return self.medium.gamma

    def zeta(self, x3: float, t: float) -> float:
        if t <= self.t0:
            raise ValueError("zeta needs t > t0")
        return x3 / math.sqrt(4.0 * self.gamma * (t - self.t0))


def working_dps(zeta2: float, n_max: int) -> int:
    """Decimal digits needed for terms up to ``n_max`` at ``zeta^2``."""
    loss = zeta2 + 2.0 * n_max * max(0.0, 0.5 * math.log(zeta2)) if zeta2 > 0 else 0.0
    return BASE_DPS + int(math.ceil(loss / LN10)) + n_max // 10


def _terms_mp(n_max: int, x3: float, dt: float, gamma: float, beta: float) -> list:
    """w_0..w_{n_max} as mpf at the current mpmath precision; requires dt > 0."""
    mp = mpmath.mp
    x3, dt, gamma, beta = mp.mpf(x3), mp.mpf(dt), mp.mpf(gamma), mp.mpf(beta)
    zeta2 = x3 * x3 / (4 * gamma * dt)
    zeta = mp.sqrt(zeta2)
    pig = mp.pi * gamma
    terms = [mp.exp(-zeta2) / (4 * pig ** mp.mpf(1.5) * mp.sqrt(dt))]
    if n_max == 0:
        return terms
    if beta == 0:
        return terms + [mp.zero] * n_max
    f_half = specfun.kummer_lattice(0.5, zeta2, n_max, ctx=mp)
    f_three_half = specfun.kummer_lattice(1.5, zeta2, n_max, ctx=mp)
    two_sqrt_pi = 2 * mp.sqrt(mp.pi)
    beta_half = [mp.pi, mp.mpf(2)]  # B(1/2, 1/2), B(1, 1/2); B(k/2 + 1, 1/2) = B(k/2, 1/2) k / (k + 1)
    for n in range(1, n_max + 1):
        if n > 2:
            beta_half.append(beta_half[n - 3] * (n - 2) / (n - 1))
        b_n = beta_half[n - 1]  # B(n/2, 1/2)
        scale = ((-beta) ** n * dt ** (mp.mpf(n - 1) / 2) / (4 * pig ** (mp.mpf(n + 3) / 2))
                 * 2 ** ((n - 1) // 2) * mp.pi ** (n // 2) / specfun.double_factorial(n - 2))
        bracket = b_n * f_half[n - 1] - two_sqrt_pi * zeta * f_three_half[n - 1]
        terms.append(scale * bracket)
    return terms


def born_terms(n_max: int, x3: float, t: float, ctx: BornTermContext) -> list[float]:
    """w_0(x3, t), ..., w_{n_max}(x3, t); all zero for t <= t0."""
    dt = t - ctx.t0
    if dt <= 0:
        return [0.0] * (n_max + 1)
    zeta2 = x3 * x3 / (4.0 * ctx.gamma * dt)
    with mpmath.workdps(working_dps(zeta2, n_max)):
        return [float(w) for w in _terms_mp(n_max, x3, dt, ctx.gamma, ctx.beta.beta)]


def w0(x3: float, t: float, ctx: BornTermContext) -> float:
    dt = t - ctx.t0
    if dt <= 0:
        return 0.0
    return math.exp(-x3 * x3 / (4.0 * ctx.gamma * dt)) / (
        4.0 * (math.pi * ctx.gamma) ** 1.5 * math.sqrt(dt))


def wn_closed(n: int, x3: float, t: float, ctx: BornTermContext) -> float:
    if n < 0:
        raise ValueError("order must be nonnegative")
    return born_terms(n, x3, t, ctx)[n]


def wn_at_surface(n: int, t: float, ctx: BornTermContext) -> float:
    """w_n(0, t) from its own closed form (no Kummer functions involved)."""
    dt = t - ctx.t0
    if dt <= 0:
        return 0.0
    mp = mpmath.mp
    with mpmath.workdps(BASE_DPS):
        value = ((-mp.mpf(ctx.beta.beta)) ** n * mp.mpf(dt) ** (mp.mpf(n - 1) / 2)
                 / (4 * (mp.pi * ctx.gamma) ** (mp.mpf(n + 3) / 2))
                 * 2 ** (n // 2) * mp.pi ** ((n + 1) // 2) / specfun.double_factorial(n - 1))
        return float(value)


def wn_oracle(n: int, x3: float, t: float, ctx: BornTermContext, quad_tol: float = 1e-11) -> float:
    """w_n by direct quadrature of the one-dimensional Born recurrence.

    w_n(x3, t) = -beta / sqrt(pi gamma) * int_{t0}^t w_{n-1}(0, s) / sqrt(t - s)
                 * exp(-x3^2 / (4 gamma (t - s))) ds

    The endpoint singularities (s - t0)^((n-2)/2) and (t - s)^(-1/2) are
    taken into the algebraic weight of QUADPACK's QAWS rule, so the smooth
    remainder is integrated to full accuracy.
    """
    if n < 1:
        raise ValueError("oracle defined for n >= 1")
    if quad_tol <= 0:
        raise ValueError("quad_tol must be positive")
    dt = t - ctx.t0
    if dt <= 0:
        return 0.0
    gamma, beta = ctx.gamma, ctx.beta.beta
    alpha = 0.5 * (n - 2)
    # surface value of order n-1 with its power law divided out; constant in s
    coeff = wn_at_surface(n - 1, ctx.t0 + 1.0, ctx)
    if coeff == 0.0:
        return 0.0
    if x3 == 0.0:
        def f(s):
            return coeff
    else:
        c = x3 * x3 / (4.0 * gamma)

        def f(s):
            r = t - s
            return coeff * math.exp(-c / r) if r > 0 else 0.0
    value, abserr = integrate.quad(f, ctx.t0, t, weight="alg", wvar=(alpha, -0.5),
                                   epsabs=0.0, epsrel=quad_tol, limit=500)
    result = -beta / math.sqrt(math.pi * gamma) * value
    achieved = abserr / abs(value) if value != 0 else abserr
    if achieved > quad_tol:
        raise QuadratureAccuracyError(result, achieved, quad_tol)
    return result


def wn_surface_oracle(n: int, t: float, ctx: BornTermContext, quad_tol: float = 1e-12) -> float:
    """w_n(0, t) by nested quadrature of the surface recurrence, starting from w_0.

    Independent of the surface closed form; cost grows like (nodes)^n, so
    keep n small.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    gamma, beta = ctx.gamma, ctx.beta.beta
    lam = -beta / math.sqrt(math.pi * gamma)
    c0 = 1.0 / (4.0 * (math.pi * gamma) ** 1.5)

    # everything in the lag tau = s - t0
    def integral(k, tau):
        # w_{k-1}(0, r) with its r^((k-2)/2) singularity divided out; the rule
        # samples the endpoint, so take the smooth factor's value just inside it
        alpha = 0.5 * (k - 2)
        floor = 1e-13 * tau

        def smooth(r):
            r = max(r, floor)
            return surface(k - 1, r) / r ** alpha

        return integrate.quad(smooth, 0.0, tau, weight="alg", wvar=(alpha, -0.5),
                              epsabs=0.0, epsrel=quad_tol, limit=200)

    def surface(k, tau):
        if tau <= 0:
            return 0.0
        if k == 0:
            return c0 / math.sqrt(tau)
        return lam * integral(k, tau)[0]

    tau = t - ctx.t0
    if n == 0 or tau <= 0:
        return surface(n, tau)
    value, abserr = integral(n, tau)
    achieved = abserr / abs(value) if value != 0 else abserr
    if achieved > quad_tol:
        raise QuadratureAccuracyError(lam * value, achieved, quad_tol)
    return lam * value


# ---------------------------------------------------------------------------
# partial sums


def _lateral_prefactor(p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams) -> float:
    dt = p.t - src.s
    r2 = (p.x1 - src.y1) ** 2 + (p.x2 - src.y2) ** 2
    return math.exp(-m.b * dt - r2 / (4.0 * m.gamma * dt)) / dt


def born_partial_sum(n_max: int, p: SpaceTimePoint, src: BoundaryImpulse, m: MediumParams,
                     beta: RobinCoefficient, tol: float = 1e-3) -> BornEvaluation:
    """Born approximations u_0..u_{n_max} at one point for a boundary impulse at ``src``.

    The source is moved to the lateral origin by translation invariance.
    ``converged`` is set when the last three relative increments
    ``|u_n - u_{n-1}| / |u_n|`` are below ``tol`` (or when ``beta = 0``).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    dt = p.t - src.s
    if dt <= 0:
        zeros = (0.0,) * (n_max + 1)
        return BornEvaluation(zeros, zeros, (0.0,) * n_max, 0, True, tol, 0.0)

    gamma, b = m.gamma, beta.beta
    zeta2 = p.x3 * p.x3 / (4.0 * gamma * dt)
    pref = _lateral_prefactor(p, src, m)
    with mpmath.workdps(working_dps(zeta2, n_max)):
        terms = _terms_mp(n_max, p.x3, dt, gamma, b)
        sums = []
        acc = mpmath.mpf(0)
        for w in terms:
            acc += w
            sums.append(acc)
        ratios = [float(abs(terms[n] / terms[n - 1])) if terms[n - 1] != 0 else 0.0
                  for n in range(1, n_max + 1)]
        increments = [float(abs(terms[n] / sums[n])) if sums[n] != 0 else math.inf
                      for n in range(1, n_max + 1)]
        # same exponential as the Neumann kernel, so beta = 0 agrees with it to rounding
        envelope = math.exp(-m.b * dt - ((p.x1 - src.y1) ** 2 + (p.x2 - src.y2) ** 2
                                         + p.x3 * p.x3) / (4.0 * gamma * dt)) / dt
        x3 = mpmath.mpf(p.x3)
        undo = mpmath.exp(x3 * x3 / (4 * mpmath.mpf(gamma) * mpmath.mpf(dt)))
        partial = tuple(float(envelope * (s * undo)) for s in sums)
        term_values = tuple(float(w) for w in terms)

    if b == 0:
        converged, n_used = True, 0
    else:
        converged, n_used = False, n_max
        for n in range(CONVERGENCE_WINDOW, n_max + 1):
            if all(inc < tol for inc in increments[n - CONVERGENCE_WINDOW:n]):
                converged, n_used = True, n
                break
    return BornEvaluation(term_values, partial, tuple(ratios), n_used, converged, tol, pref)


def born_curve(n_max: int, x: tuple[float, float, float], times, src: BoundaryImpulse,
               m: MediumParams, beta: RobinCoefficient) -> np.ndarray:
    """u_{n_max} at fixed position over an array of times."""
    out = np.empty(len(times))
    for i, t in enumerate(times):
        out[i] = born_partial_sum(n_max, SpaceTimePoint(*x, float(t)), src, m, beta).value
    return out


# ---------------------------------------------------------------------------
# convergence diagnostics


def sufficient_beta_bound(gamma: float) -> float:
    """Impedance below which the L1(L-infinity) contraction argument already gives convergence."""
    return 2.0 * math.sqrt(gamma / math.pi)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-order diagnostics over a time grid at fixed depth.

    ``max_ratio[n]`` is the grid maximum of ``|w_n / w_{n-1}|`` (0 for n = 0)
    and ``max_increment[n]`` that of ``|w_n / sum_{j<=n} w_j|``.
    ``n_converged`` is the smallest n for which the next increment stays
    below ``tol`` everywhere on the grid, i.e. u_n already agrees with
    u_{n+1}; ``None`` when no n <= n_max qualifies.
    """

    beta: float
    bound: float
    sufficient_condition: bool
    tol: float
    n_max: int
    times: tuple[float, ...]
    max_ratio: tuple[float, ...]
    max_increment: tuple[float, ...]
    n_converged: int | None

    @property
    def converged(self) -> bool:
        return self.n_converged is not None

    def ratio_decay(self) -> tuple[float, ...]:
        """sqrt(n) * max_ratio[n]; bounded when ratios decay like n^(-1/2)."""
        return tuple(math.sqrt(n) * r for n, r in enumerate(self.max_ratio))


def convergence_report(m: MediumParams, beta: RobinCoefficient, t0: float, T: float, x3: float,
                       tol: float = 1e-2, *, n_max: int = 200, times=None,
                       count: int = 64) -> ConvergenceReport:
    if T <= t0:
        raise ValueError("T must exceed t0")
    if times is None:
        times = np.linspace(t0, T, count + 1)[1:]
    times = [float(t) for t in times if t > t0]
    ctx = BornTermContext(m, beta, t0)
    n_terms = n_max + 1
    max_ratio = np.zeros(n_terms + 1)
    max_inc = np.zeros(n_terms + 1)
    for t in times:
        dt = t - t0
        zeta2 = x3 * x3 / (4.0 * m.gamma * dt)
        with mpmath.workdps(working_dps(zeta2, n_terms)):
            terms = _terms_mp(n_terms, x3, dt, m.gamma, beta.beta)
            acc = mpmath.mpf(0)
            for n, w in enumerate(terms):
                acc += w
                inc = float(abs(w / acc)) if acc != 0 else math.inf
                max_inc[n] = max(max_inc[n], inc)
                if n > 0 and terms[n - 1] != 0:
                    max_ratio[n] = max(max_ratio[n], float(abs(w / terms[n - 1])))
    n_conv = next((n for n in range(n_max + 1) if max_inc[n + 1] < tol), None)
    bound = sufficient_beta_bound(m.gamma)
    return ConvergenceReport(beta.beta, bound, beta.beta < bound, tol, n_max, tuple(times),
                             tuple(max_ratio[:n_max + 1]), tuple(max_inc[:n_max + 1]), n_conv)


# ---------------------------------------------------------------------------
# slab (experimental)


def _image_factor(x3: float, tau: np.ndarray, gamma: float, L: float, M: int) -> np.ndarray:
    """sum_{|m|<=M} exp(-(x3 - 2 m L)^2 / (4 gamma tau)); the tau -> 0 limit is 1 at x3 = 0."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    pos = tau > 0
    ms = np.arange(-M, M + 1)[:, None]
    d2 = (x3 - 2.0 * ms * L) ** 2
    out[pos] = np.exp(-d2 / (4.0 * gamma * tau[pos])).sum(axis=0)
    if x3 == 0.0:
        out[~pos] = 1.0
    return out


def _abel_moments(nodes: np.ndarray, tau: float, alpha: float):
    """Panel integrals of s^alpha (tau - s)^(-1/2) and s^(alpha+1) (tau - s)^(-1/2)
    over consecutive ``nodes`` (ending at tau)."""
    from scipy.special import beta as beta_fn, betainc

    x = np.clip(nodes / tau, 0.0, 1.0)
    p0 = tau ** (alpha + 0.5) * beta_fn(alpha + 1.0, 0.5) * betainc(alpha + 1.0, 0.5, x)
    p1 = tau ** (alpha + 1.5) * beta_fn(alpha + 2.0, 0.5) * betainc(alpha + 2.0, 0.5, x)
    return np.diff(p0), np.diff(p1)


def _product_integral(nodes, phi, tau, alpha):
    """int_0^tau s^alpha (tau - s)^(-1/2) phi(s) ds, phi linear between ``nodes`` (last node = tau)."""
    m0, m1 = _abel_moments(nodes, tau, alpha)
    h = np.diff(nodes)
    slope = np.diff(phi) / h
    return float(np.sum(phi[:-1] * m0 + slope * (m1 - nodes[:-1] * m0)))


def slab_born_partial_sums(n_max: int, x: tuple[float, float, float], times, src: BoundaryImpulse,
                           m: MediumParams, beta: RobinCoefficient, geom, *,
                           nodes: int = 400) -> np.ndarray:
    """Experimental slab Born approximations ``u[n, i] = u_n(x, times[i])``.

    The lateral structure factorises exactly as in the half space, leaving
    the one-dimensional recurrence with the image-summed time kernel. Surface
    profiles are written as (t - s)^((n-1)/2) g_n with g_n smooth and the
    recurrence integrals are done by product integration (piecewise-linear
    g_n times the image factor, exact algebraic weights) on a uniform grid of
    ``nodes`` panels merged with the requested times. Accuracy is
    second order in the panel width; no closed forms are involved.
    """
    from robin_born.kernels import slab_neumann_kernel_detail

    if not geom.is_slab:
        raise ValueError("slab Born iteration needs a slab geometry")
    gamma, b, L = m.gamma, beta.beta, geom.L
    times = np.asarray(times, dtype=float)
    tau_out = times - src.s
    out = np.zeros((n_max + 1, times.size))
    valid = tau_out > 0
    if not np.any(valid):
        return out
    tau_max = float(tau_out[valid].max())
    M = geom.image_truncation or slab_neumann_kernel_detail(
        SpaceTimePoint(0.0, 0.0, x[2], src.s + tau_max), src, m, geom).image_pairs
    grid = np.unique(np.concatenate([np.linspace(0.0, tau_max, nodes + 1), tau_out[valid]]))
    c0 = 1.0 / (4.0 * (math.pi * gamma) ** 1.5)
    lam = -b / math.sqrt(math.pi * gamma)

    def w0_profile(x3, tau):
        return c0 * _image_factor(x3, tau, gamma, L, M) / np.sqrt(tau)

    # g[k] = w_n(0, grid[k]) / grid[k]^((n-1)/2)
    g = c0 * _image_factor(0.0, grid, gamma, L, M)
    w_terms = [w0_profile(x[2], tau_out[valid])]
    for n in range(1, n_max + 1):
        alpha = 0.5 * (n - 2)
        surface = np.empty_like(g)
        surface[0] = lam * g[0] * specfun.beta_fn(0.5 * n, 0.5)
        for k in range(1, grid.size):
            tau = grid[k]
            phi = g[:k + 1] * _image_factor(0.0, tau - grid[:k + 1], gamma, L, M)
            surface[k] = lam * _product_integral(grid[:k + 1], phi, tau, alpha) / tau ** (0.5 * (n - 1))
        w_n = np.empty(int(valid.sum()))
        for i, tau in enumerate(tau_out[valid]):
            k = int(np.searchsorted(grid, tau))
            if x[2] == 0.0:
                w_n[i] = surface[k] * tau ** (0.5 * (n - 1))
            else:
                phi = g[:k + 1] * _image_factor(x[2], tau - grid[:k + 1], gamma, L, M)
                w_n[i] = lam * _product_integral(grid[:k + 1], phi, tau, alpha)
        w_terms.append(w_n)
        g = surface
    d = tau_out[valid]
    r2 = (x[0] - src.y1) ** 2 + (x[1] - src.y2) ** 2
    pref = np.exp(-m.b * d - r2 / (4.0 * gamma * d)) / d
    out[:, valid] = pref * np.cumsum(np.array(w_terms), axis=0)
    return out
