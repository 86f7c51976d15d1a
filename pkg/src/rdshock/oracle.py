"""Slow, independent reference computations for the test suite.

Nothing in the production code imports this module. Each routine here is
deliberately naive (quadrature, grid bisection, finite differences) so
that it shares no code path with what it audits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from rdshock.errors import ConvergenceError, NoRootError, StencilError
from rdshock.model import eval_diffusivity, eval_flux_potential, eval_reaction
from rdshock.shock import locate_shock
from rdshock.solution import evaluate_solution


@dataclass(frozen=True)
class OracleConfig:
    quad_tol: float = 1e-12
    h_x: float = 1e-4
    h_t: float = 1e-4
    grid_n: int = 10**6

    def __post_init__(self):
        if not (self.quad_tol > 0 and self.h_x > 0 and self.h_t > 0 and self.grid_n >= 2):
            raise ValueError("oracle tolerances and steps must be strictly positive")


def quadrature(f, lo, hi, tol=1e-12, max_depth=60):
    """Adaptive Simpson integral of f over [lo, hi]."""
    if lo == hi:
        return 0.0
    sign = 1.0
    if hi < lo:
        lo, hi, sign = hi, lo, -1.0

    def simpson(a, fa, b, fb):
        m = 0.5 * (a + b)
        fm = f(m)
        return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = f(lo), f(hi)
    m, fm, whole = simpson(lo, fa, hi, fb)
    stack = [(lo, fa, hi, fb, m, fm, whole, tol, 0)]
    total = 0.0
    while stack:
        a, fa, b, fb, m, fm, whole, eps, depth = stack.pop()
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise ConvergenceError(f"adaptive Simpson exceeded depth {max_depth} on [{a}, {b}]")
        stack.append((a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1))
        stack.append((m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1))
    return sign * total


def bisection_root_grid(f, lo, hi, n=10**6, xtol=1e-15):
    """Every sign change of f on an n-interval grid, refined by bisection."""
    if n < 2:
        raise ValueError("need at least 2 grid intervals")
    xs = np.linspace(lo, hi, n + 1)
    try:
        fx = np.asarray(f(xs), dtype=float)
        if fx.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        fx = np.array([f(float(x)) for x in xs])
    roots = []
    zero_nodes = np.flatnonzero(fx == 0.0)
    roots.extend(float(xs[i]) for i in zero_nodes)
    flips = np.flatnonzero(fx[:-1] * fx[1:] < 0.0)
    for i in flips:
        a, b, fa = float(xs[i]), float(xs[i + 1]), float(fx[i])
        while b - a > xtol:
            m = 0.5 * (a + b)
            if not a < m < b:
                break  # interval is down to adjacent floats
            fm = float(f(m))
            if fm == 0.0:
                a = b = m
                break
            if (fm < 0.0) == (fa < 0.0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return sorted(roots)


def central_difference(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def pde_residual(model, params, pair, points, h_x=1e-4, h_t=1e-4):
    """|u_t - (D(u) u_x)_x - R(u)| by second-order finite differences.

    ``pair`` may be None for a solution without a shock. Each stencil must
    keep 3 h_x clear of the shock and stay inside the support.
    """
    out = []
    for x, t in points:
        if pair is not None:
            for tt in (t - h_t, t, t + h_t):
                for xs in locate_shock(params, pair, tt):
                    if abs(x - xs) < 3.0 * h_x:
                        raise StencilError(f"stencil at x={x}, t={t} is within 3h of the shock at {xs}")

        def u(xx, tt):
            try:
                return evaluate_solution(model, params, xx, tt, pair)
            except NoRootError as exc:
                raise StencilError(f"stencil at x={x}, t={t} leaves the support") from exc

        u0 = u(x, t)
        up, um = u(x + h_x, t), u(x - h_x, t)
        u_t = (u(x, t + h_t) - u(x, t - h_t)) / (2.0 * h_t)
        d_plus = eval_diffusivity(model, 0.5 * (u0 + up))
        d_minus = eval_diffusivity(model, 0.5 * (u0 + um))
        diffusion = (d_plus * (up - u0) - d_minus * (u0 - um)) / (h_x * h_x)
        out.append(abs(u_t - diffusion - eval_reaction(model, params, u0)))
    return np.array(out)


@lru_cache(maxsize=None)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(f, lo, hi, n=16):
    """Fixed n-node Gauss-Legendre rule, exact for polynomials of degree < 2n.

    ``f`` must accept an array of nodes.
    """
    nodes, weights = _leggauss(n)
    half = 0.5 * (hi - lo)
    return float(half * np.dot(weights, f(0.5 * (hi + lo) + half * nodes)))


def flux_potential_by_quadrature(model, u):
    """Phi(u) = -int_u^1 D by Gauss-Legendre (exact for polynomial D up to degree 31)."""
    return -gauss_legendre(lambda s: eval_diffusivity(model, s), u, 1.0)


def _bisect(f, lo, hi, xtol=1e-15):
    flo = f(lo)
    while hi - lo > xtol:
        m = 0.5 * (lo + hi)
        if not lo < m < hi:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = m, fm
        else:
            hi = m
    return 0.5 * (lo + hi)


def brute_force_shock(model, rule, n=100):
    """All shock pairs (u_l, u_r) with u_l in (0, a), u_r in (b, 1).

    u_r is slaved to u_l through Phi(u_r) = Phi(u_l), both sides computed by
    Gauss-Legendre quadrature of D; the remaining condition (D continuous, or equal signed
    areas of Phi about the level) is scanned on an n-point grid in u_l and
    refined by bisection.
    """
    a, b = model.a, model.b
    phi_b = flux_potential_by_quadrature(model, b)

    def partner(u_l):
        level = flux_potential_by_quadrature(model, u_l)
        if level < phi_b:
            return None, level
        return _bisect(lambda u: flux_potential_by_quadrature(model, u) - level, b, 1.0), level

    def F(u_l):
        u_r, level = partner(u_l)
        if u_r is None:
            return float("nan")
        if rule == "continuity":
            return eval_diffusivity(model, u_l) - eval_diffusivity(model, u_r)
        return gauss_legendre(lambda s: eval_flux_potential(model, s) - level, u_l, u_r)

    grid = np.linspace(0.0, a, n + 1)[1:-1]
    vals = [F(float(u)) for u in grid]
    pairs = []
    for i in range(len(grid) - 1):
        f0, f1 = vals[i], vals[i + 1]
        if np.isfinite(f0) and np.isfinite(f1) and f0 * f1 < 0.0:
            u_l = _bisect(F, float(grid[i]), float(grid[i + 1]))
            pairs.append((u_l, partner(u_l)[0]))
    if not pairs:
        raise NoRootError(f"brute-force {rule} shock search found no pair")
    return pairs
