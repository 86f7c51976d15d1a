"""Analytic solution family Phi(u) = exp(A t) Psi(x).

``Psi(x) = c1 exp(kx) + c2 exp(-kx)`` solves the Helmholtz equation with
kappa = -k**2. The density is recovered by inverting the flux potential,
which is multi-valued across the fold band around the diffusivity roots.

Three families are supported, distinguished by the signs of (c1, c2):

* ``travelling``: c1 < 0, c2 = 0
* ``receding``:   c1 < 0 < c2 (u(0, t) = 1 when c2 = -c1)
* ``colliding``:  c1 < 0, c2 < 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from rdshock.errors import NoRootError
from rdshock.model import (
    DiffusivityModel,
    SolutionParams,
    eval_diffusivity,
    eval_flux_potential,
)

FAMILIES = ("receding", "colliding", "travelling")
BRANCHES = ("lower", "middle", "upper")

#: Default clipping level for the asymptotic u -> 1 end of a travelling wave.
U_CLIP = 1.0 - 1e-6

_EPS = np.finfo(float).eps


# {{{ Helmholtz profile

@dataclass(frozen=True)
class HelmholtzProfile:
    c1: float
    c2: float
    k: float

    def __call__(self, x):
        return self.c1 * np.exp(self.k * x) + self.c2 * np.exp(-self.k * x)

    def deriv(self, x):
        return self.k * (self.c1 * np.exp(self.k * x) - self.c2 * np.exp(-self.k * x))

    @classmethod
    def from_params(cls, params: SolutionParams):
        return cls(params.c1, params.c2, params.k)


def kirchhoff_level(params: SolutionParams, x, t):
    """exp(A (t + gauge)) Psi(x), the value Phi(u(x, t)) must take."""
    return float(math.exp(params.A * (t + params.time_gauge)) * HelmholtzProfile.from_params(params)(x))


def solve_psi_level(params: SolutionParams, level, t):
    """All x with exp(A t) Psi(x) = level, sorted.

    With y = exp(kx) this is the quadratic c1 y**2 - w y + c2 = 0.
    """
    w = level * math.exp(-params.A * (t + params.time_gauge))
    c1, c2, k = params.c1, params.c2, params.k
    ys = []
    if c1 == 0.0:
        if w != 0.0:
            ys.append(c2 / w)
    else:
        disc = w * w - 4.0 * c1 * c2
        if 0.0 > disc >= -8.0 * _EPS * w * w:
            disc = 0.0  # tangency at the extremum of Psi, lost to rounding
        if disc >= 0.0:
            sq = math.sqrt(disc)
            # numerically stable pair of quadratic roots
            qq = -0.5 * (-w + math.copysign(sq, -w)) if w != 0.0 else 0.5 * sq
            if qq != 0.0:
                ys.extend([qq / c1, c2 / qq])
            else:
                ys.append(0.0)
    return sorted(math.log(y) / k for y in ys if y > 0.0)

# }}}


# {{{ inverting the flux potential

def real_cubic_roots(c3, c2, c1, c0):
    """Real roots of c3 u^3 + c2 u^2 + c1 u + c0 (trigonometric/hyperbolic form)."""
    shift = c2 / (3.0 * c3)
    p = (3.0 * c3 * c1 - c2 * c2) / (3.0 * c3 * c3)
    q = (2.0 * c2**3 - 9.0 * c3 * c2 * c1 + 27.0 * c3 * c3 * c0) / (27.0 * c3**3)
    if p == 0.0:
        return [np.cbrt(-q) - shift]
    if p < 0.0:
        r = math.sqrt(-p / 3.0)
        arg = 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)
        if abs(arg) <= 1.0:
            theta = math.acos(arg) / 3.0
            ts = [2.0 * r * math.cos(theta - 2.0 * math.pi * j / 3.0) for j in range(3)]
            return sorted(t - shift for t in ts)
        t = -2.0 * math.copysign(r, q) * math.cosh(math.acosh(abs(arg)) / 3.0)
        return [t - shift]
    r = math.sqrt(p / 3.0)
    t = -2.0 * r * math.sinh(math.asinh(3.0 * q / (2.0 * p) * math.sqrt(3.0 / p)) / 3.0)
    return [t - shift]


def _polish(model, u, v, lo, hi):
    for _ in range(3):
        f = eval_flux_potential(model, u) - v
        if f == 0.0:
            break
        Du = eval_diffusivity(model, u)
        if abs(Du) < 1e-8:
            break
        step = f / Du
        cand = u - step
        if not lo <= cand <= hi or abs(eval_flux_potential(model, cand) - v) >= abs(f):
            break
        u = cand
    return u


def _label(model, u):
    if u < model.a:
        return "lower"
    if u > model.b:
        return "upper"
    return "middle"


def invert_flux_potential(model: DiffusivityModel, v, tol=1e-12):
    """All roots u in [0, 1] of Phi(u) = v, labelled by branch.

    Quadratic models use the closed-form cubic; other kinds bracket a root on
    each monotone piece [0, a], [a, b], [b, 1]. A level inside the fold band
    gives three roots, otherwise one.
    """
    v = float(v)
    roots = []
    if model.kind == "quadratic":
        coef = model.flux_potential_poly.coef
        for u in real_cubic_roots(coef[3], coef[2], coef[1], coef[0] - v):
            if -tol <= u <= 1.0 + tol:
                u = min(max(u, 0.0), 1.0)
                lo, hi = (0.0, model.a) if u < model.a else (model.a, model.b) if u < model.b else (model.b, 1.0)
                roots.append(_polish(model, u, v, lo, hi))
    else:
        for lo, hi in ((0.0, model.a), (model.a, model.b), (model.b, 1.0)):
            flo = eval_flux_potential(model, lo) - v
            fhi = eval_flux_potential(model, hi) - v
            if flo == 0.0:
                roots.append(lo)
            elif fhi == 0.0:
                roots.append(hi)
            elif flo * fhi < 0.0:
                roots.append(brentq(lambda u: eval_flux_potential(model, u) - v, lo, hi, xtol=1e-15, rtol=4 * _EPS))
    if not roots:
        raise NoRootError(f"Phi(u) = {v!r} has no root with u in [0, 1]")
    # exact endpoints where the level is hit exactly
    snapped = []
    for u in roots:
        if v == 0.0 and abs(u - 1.0) < 1e-9:
            u = 1.0
        elif v == eval_flux_potential(model, 0.0) and abs(u) < 1e-9:
            u = 0.0
        snapped.append(float(u))
    snapped.sort()
    if len(snapped) == 3:
        return list(zip(snapped, BRANCHES))
    return [(u, _label(model, u)) for u in snapped]

# }}}


# {{{ profiles

@dataclass(frozen=True)
class ProfileSample:
    x: float
    u: float
    branch: str


@dataclass
class MultiValuedProfile:
    """Samples of the implicit solution at fixed time, before shock insertion.

    ``samples`` are ordered along the solution curve so the fold renders as
    one continuous line. ``params`` is kept (not serialized) so a shock can
    be located exactly.
    """

    t: float
    samples: list
    band: tuple
    params: Optional[SolutionParams] = field(default=None, compare=False, repr=False)

    @property
    def x(self):
        return np.array([s.x for s in self.samples])

    @property
    def u(self):
        return np.array([s.u for s in self.samples])

    @property
    def branches(self):
        return [s.branch for s in self.samples]

    def is_multivalued(self):
        xs = [s.x for s in self.samples]
        return len(set(xs)) != len(xs)

    def to_dict(self):
        return {
            "t": self.t,
            "samples": [{"x": s.x, "u": s.u, "branch": s.branch} for s in self.samples],
            "band": [self.band[0], self.band[1]],
        }

    @classmethod
    def from_dict(cls, data):
        samples = [ProfileSample(float(s["x"]), float(s["u"]), s["branch"]) for s in data["samples"]]
        return cls(t=float(data["t"]), samples=samples, band=tuple(data["band"]))


def _curve_order(samples_by_x, levels):
    """Order samples along the curve, splitting at turning points of Psi."""
    xs = sorted(samples_by_x)
    if not xs:
        return []
    segments = []
    current = [xs[0]]
    direction = 0
    for x_prev, x_next in zip(xs, xs[1:]):
        step = np.sign(levels[x_next] - levels[x_prev])
        if direction and step and step != direction:
            segments.append((current, direction))
            current = [x_prev]
        if step:
            direction = step
        current.append(x_next)
    segments.append((current, direction or 1))

    ordered = []
    seen = set()
    for xs_seg, direction in segments:
        pts = [s for x in xs_seg for s in samples_by_x[x] if (s.x, s.u) not in seen]
        pts.sort(key=lambda s: (s.u, s.x) if direction > 0 else (-s.u, s.x))
        for s in pts:
            seen.add((s.x, s.u))
        ordered.extend(pts)
    return ordered


def sample_profile(model: DiffusivityModel, params: SolutionParams, t, x_grid) -> MultiValuedProfile:
    """All branch values of u(x, t) on ``x_grid``; x with no root in [0, 1] are gaps."""
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x_grid) <= 0.0):
        raise ValueError("x_grid must be strictly increasing")
    by_x = {}
    levels = {}
    for x in x_grid:
        x = float(x)
        v = kirchhoff_level(params, x, t)
        try:
            roots = invert_flux_potential(model, v)
        except NoRootError:
            continue
        by_x[x] = [ProfileSample(x, u, br) for u, br in roots]
        levels[x] = v
    return MultiValuedProfile(t=float(t), samples=_curve_order(by_x, levels), band=model.multivalued_band(), params=params)


def travelling_wave_coordinate(model, params, u):
    """z = log(Phi(u)/c1)/k, the explicit inverse of the travelling wave."""
    return math.log(eval_flux_potential(model, u) / params.c1) / params.k


def travelling_wave_profile(model, params, z_grid, z_min=None) -> MultiValuedProfile:
    """Multi-valued travelling wave u(z) with z = x - c t.

    The u -> 1 tail is reached only as z -> -inf; grid points below ``z_min``
    (default: where u exceeds 1 - 1e-6) are dropped.
    """
    if params.c2 != 0.0 or not params.c1 < 0.0:
        raise ValueError("travelling wave needs c1 < 0 and c2 = 0")
    if z_min is None:
        z_min = travelling_wave_coordinate(model, params, U_CLIP)
    z_grid = np.asarray(z_grid, dtype=float)
    z_grid = z_grid[z_grid >= z_min]
    frame = SolutionParams(kappa=params.kappa, A=params.A, c1=params.c1, c2=0.0)
    return sample_profile(model, frame, 0.0, z_grid)


def evaluate_solution(model, params, x, t, pair=None):
    """Single value u(x, t); with ``pair`` the shocked solution is used.

    Raises NoRootError outside the support and ValueError where the
    unshocked solution is multi-valued.
    """
    v = kirchhoff_level(params, x, t)
    roots = invert_flux_potential(model, v)
    if pair is not None:
        return roots[-1][0] if v >= pair.phi_level else roots[0][0]
    if len(roots) > 1:
        raise ValueError(f"solution is multi-valued at x={x}, t={t}; pass a shock pair")
    return roots[0][0]

# }}}


# {{{ moving boundary

def infer_family(params: SolutionParams) -> str:
    c1, c2 = params.c1, params.c2
    if c1 < 0.0 and c2 == 0.0:
        return "travelling"
    if c1 < 0.0 < c2:
        return "receding"
    if c1 < 0.0 and c2 < 0.0:
        return "colliding"
    raise ValueError(f"(c1, c2) = ({c1}, {c2}) matches no supported solution family")


def _check_family(params, family):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    actual = infer_family(params)
    if actual != family:
        raise ValueError(f"(c1, c2) = ({params.c1}, {params.c2}) describe a {actual} solution, not {family}")


def _boundary_state(model, params, family, t):
    """Positions and exact speeds of the sharp fronts u = 0 at time t."""
    _check_family(params, family)
    T = t + params.time_gauge
    A, k, c1, c2 = params.A, params.k, params.c1, params.c2
    s0 = eval_flux_potential(model, 0.0) * math.exp(-A * T)
    if family == "travelling":
        return [(math.log(s0 / c1) / k, -A / k)]
    m = -math.sqrt(abs(c1 * c2))
    x0 = math.log(abs(c2 / c1)) / (2.0 * k)
    s = s0 / (2.0 * m)
    if family == "receding":
        return [(x0 + math.asinh(s) / k, -A * s / (k * math.sqrt(1.0 + s * s)))]
    if s < 1.0:
        return []
    if s == 1.0:
        return [(x0, -math.inf), (x0, math.inf)]
    half = math.acosh(s) / k
    speed = A * s / (k * math.sqrt(s * s - 1.0))
    return [(x0 - half, speed), (x0 + half, -speed)]


def collision_time(model, params):
    """Display time at which the two colliding fronts meet."""
    m = -math.sqrt(abs(params.c1 * params.c2))
    phi0 = eval_flux_potential(model, 0.0)
    return math.log(phi0 / (2.0 * m)) / params.A - params.time_gauge


def boundary_position(model, params, family, t):
    """Sharp-front positions L(t), empty after the colliding fronts have met."""
    return [pos for pos, _ in _boundary_state(model, params, family, t)]


@dataclass(frozen=True)
class BoundaryRecord:
    t: float
    position: float
    flux: float
    speed: float
    u_x: float
    stefan_residual: float


def boundary_records(model, params, family, t):
    """Exact flux, speed and Stefan-like residual at each front."""
    T = t + params.time_gauge
    psi = HelmholtzProfile.from_params(params)
    D0 = eval_diffusivity(model, 0.0)
    phi0 = eval_flux_potential(model, 0.0)
    out = []
    for pos, speed in _boundary_state(model, params, family, t):
        phi_x = float(math.exp(params.A * T) * psi.deriv(pos))
        u_x = phi_x / D0
        residual = u_x - params.kappa * phi0 / speed
        out.append(BoundaryRecord(float(t), pos, -phi_x, speed, u_x, residual))
    return out


def boundary_flux_and_speed(model, params, family, t):
    return [(r.flux, r.speed) for r in boundary_records(model, params, family, t)]


def stefan_residual(model, params, family, t):
    """u_x - kappa Phi(0)/L'(t) at each front present at time t."""
    return [r.stefan_residual for r in boundary_records(model, params, family, t)]


@dataclass
class BoundaryTrack:
    family: str
    times: list
    positions: list
    fluxes: list
    speeds: list
    residuals: list


def track_boundary(model, params, family, times) -> BoundaryTrack:
    track = BoundaryTrack(family, [], [], [], [], [])
    for t in times:
        for r in boundary_records(model, params, family, float(t)):
            track.times.append(r.t)
            track.positions.append(r.position)
            track.fluxes.append(r.flux)
            track.speeds.append(r.speed)
            track.residuals.append(r.stefan_residual)
    return track

# }}}
