"""Spectral stability of the constant states and of the receding travelling wave.

Constant states: lambda(alpha) = -alpha^2 D(u) + R'(u) for u in {0, 1}.

Travelling wave far field (z -> -inf, u -> 1):
lambda(alpha) = -alpha^2 D(1) - i k D(0) alpha + R'(1).

Pointwise criterion along the wave: 0.5 * d^2/dz^2 D(u(z)) + R'(u) < 0 on
[0, u_l] and [u_r, 1]. Derivatives in z are taken through the wave itself,
using Phi(u(z)) = c1 exp(kz), i.e. u_z = k Phi(u) / D(u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from rdshock.errors import InfeasibleShockError, PoleError
from rdshock.model import (
    POLE_GUARD,
    SQRT3,
    DiffusivityModel,
    eval_diffusivity,
    eval_flux_potential,
    make_params,
    reaction_derivative,
)
from rdshock.shock import ShockPair, shock_quadratic_closed_form

#: Trace sampling stays this far (in u) from the ends of each interval.
TRACE_DELTA = 1e-9


# {{{ constant states

@dataclass(frozen=True)
class ConstantStateReport:
    u_bar: float
    status: str
    r_prime: float
    diffusivity: float
    most_unstable_alpha: float = 0.0

    def to_dict(self):
        return {
            "u_bar": self.u_bar,
            "status": self.status,
            "r_prime": self.r_prime,
            "diffusivity": self.diffusivity,
            "most_unstable_alpha": self.most_unstable_alpha,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            float(data["u_bar"]),
            data["status"],
            float(data["r_prime"]),
            float(data["diffusivity"]),
            float(data.get("most_unstable_alpha", 0.0)),
        )


def classify_constant_state(model, params, u_bar) -> ConstantStateReport:
    """Linear stability of u = 0 or u = 1 to L2 perturbations.

    D(u_bar) > 0 damps every alpha != 0, so the sign of R'(u_bar) decides and
    the least stable mode is alpha = 0.
    """
    if u_bar not in (0, 1):
        raise ValueError(f"u_bar must be 0 or 1, got {u_bar}")
    u_bar = float(u_bar)
    rp = reaction_derivative(model, params, u_bar)
    if rp < 0.0:
        status = "stable"
    elif rp > 0.0:
        status = "unstable"
    else:
        status = "marginal"
    return ConstantStateReport(u_bar, status, float(rp), float(eval_diffusivity(model, u_bar)))


@dataclass
class DispersionCurve:
    alphas: np.ndarray
    lambdas: np.ndarray

    @property
    def max_real(self):
        i = int(np.argmax(self.lambdas.real))
        return float(self.lambdas.real[i]), float(self.alphas[i])


def constant_state_dispersion(model, params, u_bar, alphas) -> DispersionCurve:
    alphas = np.asarray(alphas, dtype=float)
    lam = -(alphas**2) * eval_diffusivity(model, float(u_bar)) + reaction_derivative(model, params, float(u_bar))
    return DispersionCurve(alphas, lam.astype(complex))


def essential_spectrum_curve(model, params, alphas) -> DispersionCurve:
    """Boundary of the essential spectrum from the u -> 1 far field."""
    alphas = np.asarray(alphas, dtype=float)
    D1 = eval_diffusivity(model, 1.0)
    D0 = eval_diffusivity(model, 0.0)
    rp1 = reaction_derivative(model, params, 1.0)
    lam = (-(alphas**2) * D1 + rp1) + 1j * (-params.k * D0 * alphas)
    return DispersionCurve(alphas, lam)

# }}}


# {{{ Sturm criterion along the wave

def wave_slope(model, params, u):
    """u_z = k Phi(u) / D(u) and its u-derivative along the travelling wave."""
    k = params.k
    Du = eval_diffusivity(model, u)
    phi = eval_flux_potential(model, u)
    w = k * phi / Du
    dw = k * (1.0 - phi * eval_diffusivity(model, u, 1) / (Du * Du))
    return w, dw


def diffusivity_zz(model, params, u):
    """Second z-derivative of D(u(z)) on the wave: D'' u_z^2 + D' u_z du_z/du u_z."""
    w, dw = wave_slope(model, params, u)
    return eval_diffusivity(model, u, 2) * w * w + eval_diffusivity(model, u, 1) * w * dw


def sturm_criterion(model, params, u):
    if u == 1.0:
        return float(reaction_derivative(model, params, 1.0))
    return float(0.5 * diffusivity_zz(model, params, u) + reaction_derivative(model, params, u))


def _sturm_criterion_array(model, params, u):
    # vectorized interior evaluation; callers keep u away from a, b, 1
    if np.any(np.abs(u - model.a) < POLE_GUARD) or np.any(np.abs(u - model.b) < POLE_GUARD):
        raise PoleError("criterion sampled inside the pole guard band")
    Du = eval_diffusivity(model, u)
    rp = params.A + params.kappa * Du - params.A * eval_diffusivity(model, u, 1) * eval_flux_potential(model, u) / (Du * Du)
    return 0.5 * diffusivity_zz(model, params, u) + rp


@dataclass
class SturmCriterionTrace:
    u: np.ndarray
    values: np.ndarray
    interval: list  # "lower" for [0, u_l], "upper" for [u_r, 1]

    @property
    def max_value(self):
        return float(np.max(self.values))

    @property
    def satisfied(self):
        return self.max_value < 0.0


def sturm_criterion_trace(model, params, pair: ShockPair, n_samples=200, delta=TRACE_DELTA) -> SturmCriterionTrace:
    """Criterion sampled on [0, u_l] and [u_r, 1].

    Interior samples stay ``delta`` inside each interval; the endpoints
    u = 0 and u = 1 use the closed forms of R'. A non-positive u_l leaves
    only the upper interval.
    """
    if pair.rule != "continuity":
        raise ValueError("the stability criterion is stated for continuity-rule shocks")
    parts, tags = [], []
    if pair.u_l > 0.0:
        inner = np.linspace(delta, pair.u_l - delta, n_samples)
        vals = np.concatenate([[sturm_criterion(model, params, 0.0)], _sturm_criterion_array(model, params, inner)])
        parts.append((np.concatenate([[0.0], inner]), vals))
        tags.extend(["lower"] * len(vals))
    inner = np.linspace(pair.u_r + delta, 1.0 - delta, n_samples)
    vals = np.concatenate([_sturm_criterion_array(model, params, inner), [sturm_criterion(model, params, 1.0)]])
    parts.append((np.concatenate([inner, [1.0]]), vals))
    tags.extend(["upper"] * len(vals))
    u = np.concatenate([p[0] for p in parts])
    values = np.concatenate([p[1] for p in parts])
    return SturmCriterionTrace(u, values, tags)

# }}}


# {{{ (a, b) scan

@dataclass(frozen=True)
class GridSpec:
    a_min: float = 0.005
    a_max: float = 0.5
    n_a: int = 100
    b_min: float = 0.01
    b_max: float = 1.0
    n_b: int = 100

    def __post_init__(self):
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError("scan grid needs at least 2 points per axis")

    def axes(self):
        # rounding keeps nominal grid values (0.2, 0.4, ...) exact
        return (
            np.round(np.linspace(self.a_min, self.a_max, self.n_a), 12),
            np.round(np.linspace(self.b_min, self.b_max, self.n_b), 12),
        )


@dataclass
class StabilityCell:
    a: float
    b: float
    shock_feasible: bool
    sturm_ok: bool
    max_criterion: float

    @property
    def stable(self):
        return self.shock_feasible and self.sturm_ok


@dataclass
class StabilityRegionMask:
    grid: GridSpec
    cells: list = field(default_factory=list)

    def stable_pairs(self):
        return [(c.a, c.b) for c in self.cells if c.stable]

    def lookup(self, a, b, tol=1e-9):
        for c in self.cells:
            if abs(c.a - a) <= tol and abs(c.b - b) <= tol:
                return c
        raise KeyError((a, b))

    def to_dict(self):
        g = self.grid
        return {
            "grid": {"a_min": g.a_min, "a_max": g.a_max, "n_a": g.n_a, "b_min": g.b_min, "b_max": g.b_max, "n_b": g.n_b},
            "cells": [
                {
                    "a": c.a,
                    "b": c.b,
                    "shock_feasible": c.shock_feasible,
                    "sturm_ok": c.sturm_ok,
                    "stable": c.stable,
                    "max_criterion": c.max_criterion,
                }
                for c in self.cells
            ],
        }

    @classmethod
    def from_dict(cls, data):
        grid = GridSpec(**data["grid"])
        cells = [
            StabilityCell(float(c["a"]), float(c["b"]), bool(c["shock_feasible"]), bool(c["sturm_ok"]), _opt_float(c["max_criterion"]))
            for c in data["cells"]
        ]
        return cls(grid, cells)


def _opt_float(v):
    # JSON output writes NaN as null
    return math.nan if v is None else float(v)


def classify_pair(a, b, kappa=-1.0, n_samples=200) -> StabilityCell:
    """Shock feasibility and Sturm criterion for quadratic D with roots a, b."""
    model = DiffusivityModel.quadratic(a, b)
    params = make_params(model, kappa=kappa)
    feasible = b < a * (2.0 + SQRT3)
    # the wave itself needs Phi < 0 on [0, 1)
    if not b < (a + 2.0) / 3.0:
        return StabilityCell(float(a), float(b), feasible, False, math.nan)
    try:
        pair = shock_quadratic_closed_form(model)
    except InfeasibleShockError as exc:
        pair = ShockPair(exc.u_l, exc.u_r, "continuity", float(eval_flux_potential(model, exc.u_l)))
    trace = sturm_criterion_trace(model, params, pair, n_samples=n_samples)
    return StabilityCell(float(a), float(b), feasible, trace.satisfied, trace.max_value)


def stability_region_scan(grid: GridSpec | None = None, kappa=-1.0, n_samples=200) -> StabilityRegionMask:
    """Classify every (a, b) grid point with 0 < a < b < 1 and a + b < 1."""
    grid = grid or GridSpec()
    a_axis, b_axis = grid.axes()
    mask = StabilityRegionMask(grid)
    for a in a_axis:
        for b in b_axis:
            a_, b_ = float(a), float(b)
            if not (0.0 < a_ < b_ < 1.0 and a_ + b_ < 1.0):
                continue
            mask.cells.append(classify_pair(a_, b_, kappa=kappa, n_samples=n_samples))
    return mask

# }}}
