"""Travelling-wave phase plane.

With q = D(u) u_z the wave ODE becomes

    D(u) u_z = q,    D(u) q_z = -c q - D(u) R(u),

which is singular on the walls u = a and u = b. The product D(u) R(u) is
evaluated as (A + kappa D(u)) Phi(u), which is finite and nonzero on the
walls, so there is no hole through which a smooth orbit could cross.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from rdshock.model import diffusivity_times_reaction, eval_diffusivity, eval_flux_potential

#: |D(u)| below this flags a point as lying on a wall of singularities.
WALL_EPS = 1e-9


@dataclass(frozen=True)
class FieldSample:
    u: float
    q: float
    du_dz: float
    dq_dz: float
    wall: bool


def wave_speed(model, params):
    """c = -k D(0), negative for the receding wave."""
    return -params.k * eval_diffusivity(model, 0.0)


def vector_field(model, params, u, q, eps_wall=WALL_EPS) -> FieldSample:
    """(du/dz, dq/dz) at (u, q); on a wall both are NaN and ``wall`` is set."""
    Du = eval_diffusivity(model, u)
    if abs(Du) < eps_wall:
        return FieldSample(float(u), float(q), float("nan"), float("nan"), True)
    c = wave_speed(model, params)
    dr = diffusivity_times_reaction(model, params, u)
    return FieldSample(float(u), float(q), float(q / Du), float((-c * q - dr) / Du), False)


def field_grid(model, params, u_values, q_values, eps_wall=WALL_EPS):
    """Direction field on the tensor grid, u varying slowest."""
    return [vector_field(model, params, float(u), float(q), eps_wall) for u in u_values for q in q_values]


@dataclass(frozen=True)
class PhasePoint:
    u: float
    q: float
    branch: str


def analytic_trajectory(model, params, u_grid, pair=None):
    """Orbit of the analytic wave, q = k Phi(u).

    Without ``pair`` every u in the grid is kept and labelled by its zone
    relative to the walls. With a shock pair only [0, u_l] ("lower") and
    [u_r, 1] ("upper") survive; the two branches are never joined.
    """
    k = params.k
    pts = []
    for u in np.asarray(u_grid, dtype=float):
        u = float(u)
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"trajectory u must lie in [0, 1], got {u}")
        if pair is not None:
            if u <= pair.u_l:
                branch = "lower"
            elif u >= pair.u_r:
                branch = "upper"
            else:
                continue
        else:
            branch = "lower" if u < model.a else "upper" if u > model.b else "middle"
        pts.append(PhasePoint(u, float(k * eval_flux_potential(model, u)), branch))
    return pts


@dataclass(frozen=True)
class Nullclines:
    u: np.ndarray
    q_nullcline: np.ndarray  # dq/dz = 0
    u_nullcline: np.ndarray  # du/dz = 0, i.e. q = 0
    walls: tuple


def nullclines_and_walls(model, params, u_values) -> Nullclines:
    u = np.asarray(u_values, dtype=float)
    c = wave_speed(model, params)
    q_null = -diffusivity_times_reaction(model, params, u) / c
    return Nullclines(u, q_null, np.zeros_like(u), (model.a, model.b))


@dataclass(frozen=True)
class LeftMovingReport:
    u_a: float
    variant: str
    integral: float
    bound: float
    margin: float

    @property
    def holds(self):
        return self.margin > 0.0


def left_moving_condition(model, params, u_a, variant="sharp", u_l=None, tol=1e-10) -> LeftMovingReport:
    """Necessary condition for a left-moving wave, evaluated on the analytic wave.

    ``integral`` is the integral of D R over [0, u_a]; g(u) = k Phi(u) is the
    flux D u_z along the wave. The smooth-front bound is -g(u_a)^2/2; the
    sharp-front bound adds g(0)^2/2. ``margin`` = bound - integral.
    """
    if variant not in ("smooth", "sharp"):
        raise ValueError(f"variant must be 'smooth' or 'sharp', got {variant!r}")
    if u_l is None:
        from rdshock.shock import shock_by_continuity

        u_l = shock_by_continuity(model).u_l
    if not 0.0 < u_a < u_l:
        raise ValueError(f"u_a must lie in (0, u_l) = (0, {u_l:.6g}), got {u_a}")
    integral, _ = quad(lambda u: diffusivity_times_reaction(model, params, u), 0.0, u_a, epsabs=tol, epsrel=tol)
    g = lambda u: params.k * eval_flux_potential(model, u)  # noqa: E731
    bound = -0.5 * g(u_a) ** 2
    if variant == "sharp":
        bound += 0.5 * g(0.0) ** 2
    return LeftMovingReport(float(u_a), variant, float(integral), float(bound), float(bound - integral))
