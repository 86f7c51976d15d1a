"""Shock placement in multi-valued profiles.

A shock joins u_l < a to u_r > b with Phi(u_l) = Phi(u_r). The second
condition is one of

* ``continuity``: D(u_l) = D(u_r), so Phi' is continuous as well;
* ``equal_area``: the signed area between Phi and the level Phi(u_l) over
  [u_l, u_r] vanishes.

Both reduce to a scalar problem in u_l once u_r is slaved to u_l through
Phi(u_r) = Phi(u_l) on the upper monotone piece. The reduced residual
changes sign across the lower fold interval, which gives a guaranteed
bracket; a damped 2x2 Newton iteration polishes each bracketed root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from rdshock.errors import ConvergenceError, InfeasibleShockError, LevelNotCrossedError
from rdshock.model import (
    SQRT3,
    DiffusivityModel,
    eval_diffusivity,
    eval_flux_potential,
    eval_reaction,
)
from rdshock.solution import (
    MultiValuedProfile,
    invert_flux_potential,
    kirchhoff_level,
    solve_psi_level,
)

RULES = ("continuity", "equal_area")

RESIDUAL_TOL = 1e-13
MAX_ITER = 200
_ACCEPT_TOL = 1e-11
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ShockPair:
    u_l: float
    u_r: float
    rule: str
    phi_level: float
    location: Optional[float] = None

    @property
    def width(self):
        return self.u_r - self.u_l

    def to_dict(self, jumps=None):
        out = {
            "rule": self.rule,
            "u_l": self.u_l,
            "u_r": self.u_r,
            "phi_level": self.phi_level,
            "location": self.location,
        }
        if jumps is not None:
            out["jumps"] = dict(jumps)
        return out

    @classmethod
    def from_dict(cls, data):
        loc = data.get("location")
        return cls(
            u_l=float(data["u_l"]),
            u_r=float(data["u_r"]),
            rule=data["rule"],
            phi_level=float(data["phi_level"]),
            location=None if loc is None else float(loc),
        )


def _make_pair(model, u_l, u_r, rule):
    return ShockPair(float(u_l), float(u_r), rule, float(eval_flux_potential(model, u_l)))


def _check_feasible(pair):
    if not 0.0 < pair.u_l or not pair.u_r < 1.0:
        raise InfeasibleShockError(
            f"shock endpoints ({pair.u_l:.6g}, {pair.u_r:.6g}) leave (0, 1)", u_l=pair.u_l, u_r=pair.u_r
        )
    return pair


# {{{ quadratic closed form

def quadratic_shock_endpoints(a, b):
    """Endpoints for D = (u - a)(u - b); symmetric about (a + b)/2."""
    half = SQRT3 * abs(b - a) / 2.0
    mid = (a + b) / 2.0
    return mid - half, mid + half


def shock_quadratic_closed_form(model: DiffusivityModel) -> ShockPair:
    if model.kind != "quadratic":
        raise ValueError("closed-form shock endpoints need a quadratic diffusivity")
    u_l, u_r = quadratic_shock_endpoints(model.a, model.b)
    return _check_feasible(_make_pair(model, u_l, u_r, "continuity"))

# }}}


# {{{ residuals

def _residuals(model, rule, u_l, u_r):
    phi_l = eval_flux_potential(model, u_l)
    r1 = phi_l - eval_flux_potential(model, u_r)
    if rule == "continuity":
        r2 = eval_diffusivity(model, u_l) - eval_diffusivity(model, u_r)
    else:
        r2 = equal_area_residual(model, u_l, u_r)
    return np.array([r1, r2])


def equal_area_residual(model, u_l, u_r):
    """Signed area between Phi and the level Phi(u_l) over [u_l, u_r].

    Uses the exact antiderivative of the Phi polynomial.
    """
    return model.Phi_integral(u_l, u_r) - eval_flux_potential(model, u_l) * (u_r - u_l)


def _jacobian(model, rule, u_l, u_r):
    D_l = eval_diffusivity(model, u_l)
    D_r = eval_diffusivity(model, u_r)
    if rule == "continuity":
        return np.array([[D_l, -D_r], [eval_diffusivity(model, u_l, 1), -eval_diffusivity(model, u_r, 1)]])
    return np.array(
        [[D_l, -D_r], [-D_l * (u_r - u_l), eval_flux_potential(model, u_r) - eval_flux_potential(model, u_l)]]
    )


def _newton(model, rule, u_l, u_r, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    """Damped Newton on the 2x2 system. Returns (u_l, u_r, max residual)."""
    F = _residuals(model, rule, u_l, u_r)
    norm = np.max(np.abs(F))
    for _ in range(max_iter):
        if norm <= tol:
            break
        J = _jacobian(model, rule, u_l, u_r)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-6:
            cand_l, cand_r = u_l + lam * step[0], u_r + lam * step[1]
            if cand_l < model.a and cand_r > model.b:
                F_new = _residuals(model, rule, cand_l, cand_r)
                if np.max(np.abs(F_new)) < norm:
                    break
            lam *= 0.5
        else:
            break
        u_l, u_r, F = cand_l, cand_r, F_new
        norm = np.max(np.abs(F))
    return float(u_l), float(u_r), float(norm)

# }}}


# {{{ reduced scalar problem and bracket scan

def _upper_partner(model, u_l, fold_hi):
    """u_r in [b, fold_hi] with Phi(u_r) = Phi(u_l)."""
    level = eval_flux_potential(model, u_l)
    f = lambda u: eval_flux_potential(model, u) - level  # noqa: E731
    f_lo, f_hi = f(model.b), f(fold_hi)
    if f_lo >= 0.0:
        return model.b
    if f_hi <= 0.0:
        return fold_hi
    return brentq(f, model.b, fold_hi, xtol=1e-15, rtol=4 * _EPS, maxiter=MAX_ITER)


def _reduced(model, rule, fold_hi):
    def g(u_l):
        u_r = _upper_partner(model, u_l, fold_hi)
        if rule == "continuity":
            return eval_diffusivity(model, u_l) - eval_diffusivity(model, u_r)
        return equal_area_residual(model, u_l, u_r)

    return g


def find_shock_pairs(model: DiffusivityModel, rule, n_scan=200):
    """Every shock pair for ``rule`` found by scanning the lower fold interval.

    Each sign change of the reduced residual is bracketed, solved, then
    polished with Newton. Feasibility (u_l > 0) is not enforced here.
    """
    if rule not in RULES:
        raise ValueError(f"unknown shock rule {rule!r}; expected one of {RULES}")
    fold_lo, fold_hi = model.multivalued_band()
    g = _reduced(model, rule, fold_hi)
    grid = np.linspace(fold_lo, model.a, n_scan + 1)
    vals = [g(u) for u in grid]
    pairs = []
    for i in range(n_scan):
        lo, hi, glo, ghi = grid[i], grid[i + 1], vals[i], vals[i + 1]
        if glo == 0.0:
            root = lo
        elif glo * ghi < 0.0:
            root = brentq(g, lo, hi, xtol=1e-15, rtol=4 * _EPS, maxiter=MAX_ITER)
        else:
            continue
        u_r = _upper_partner(model, root, fold_hi)
        u_l, u_r, res = _newton(model, rule, root, u_r)
        pairs.append((u_l, u_r, res))
    return pairs


def _solve(model, rule, check_feasible, n_scan, return_all):
    candidates = find_shock_pairs(model, rule, n_scan)
    # Newton from the quadratic endpoints built on the roots a, b
    guess_l, guess_r = quadratic_shock_endpoints(model.a, model.b)
    u_l, u_r, res = _newton(model, rule, guess_l, guess_r)
    if u_l < model.a and u_r > model.b:
        candidates.append((u_l, u_r, res))
    good = [c for c in candidates if c[2] <= _ACCEPT_TOL]
    if not good:
        best = min(candidates, key=lambda c: c[2]) if candidates else (guess_l, guess_r, math.inf)
        raise ConvergenceError(
            f"{rule} shock solve did not converge; best residual {best[2]:.3e} at u_l={best[0]:.12g}, u_r={best[1]:.12g}",
            residuals=_residuals(model, rule, best[0], best[1]).tolist(),
        )
    unique = []
    for c in sorted(good, key=lambda c: c[1] - c[0], reverse=True):
        if all(abs(c[0] - d[0]) > 1e-9 for d in unique):
            unique.append(c)
    pairs = [_make_pair(model, c[0], c[1], rule) for c in unique]
    if return_all:
        return pairs
    # widest jump wins when several pairs solve the system
    best = pairs[0]
    return _check_feasible(best) if check_feasible else best


def shock_by_continuity(model, check_feasible=True, n_scan=200, return_all=False):
    """Shock with Phi and D = Phi' both continuous."""
    return _solve(model, "continuity", check_feasible, n_scan, return_all)


def shock_by_equal_area(model, check_feasible=True, n_scan=200, return_all=False):
    """Shock with equal signed areas of Phi on either side of the level."""
    return _solve(model, "equal_area", check_feasible, n_scan, return_all)


def find_shock(model, rule="continuity", **kwargs):
    if rule == "continuity":
        return shock_by_continuity(model, **kwargs)
    if rule == "equal_area":
        return shock_by_equal_area(model, **kwargs)
    raise ValueError(f"unknown shock rule {rule!r}; expected one of {RULES}")

# }}}


# {{{ splicing

def locate_shock(params, pair: ShockPair, t=0.0):
    """x positions where exp(A t) Psi(x) equals the shock level."""
    return solve_psi_level(params, pair.phi_level, t)


@dataclass
class ShockedProfile:
    """Single-valued profile; each entry of ``shocks`` is a vertical jump."""

    t: float
    x: np.ndarray
    u: np.ndarray
    pair: ShockPair
    shocks: list = field(default_factory=list)

    def to_dict(self):
        return {
            "t": self.t,
            "samples": [{"x": float(x), "u": float(u)} for x, u in zip(self.x, self.u)],
            "shocks": list(self.shocks),
            "pair": self.pair.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            t=float(data["t"]),
            x=np.array([s["x"] for s in data["samples"]], dtype=float),
            u=np.array([s["u"] for s in data["samples"]], dtype=float),
            pair=ShockPair.from_dict(data["pair"]),
            shocks=[float(s) for s in data["shocks"]],
        )


def apply_shock(profile: MultiValuedProfile, pair: ShockPair) -> ShockedProfile:
    """Keep the upper branch above the shock level and the lower one below."""
    params = profile.params
    if params is None:
        raise ValueError("profile carries no solution parameters; build it with sample_profile")
    by_x = {}
    for s in profile.samples:
        by_x.setdefault(s.x, []).append(s.u)
    xs = sorted(by_x)
    if not xs:
        return ShockedProfile(profile.t, np.array([]), np.array([]), pair)
    out_x, out_u = [], []
    for x in xs:
        v = kirchhoff_level(params, x, profile.t)
        if v >= pair.phi_level:
            keep = [u for u in by_x[x] if u >= pair.u_r]
            u = max(keep) if keep else None
        else:
            keep = [u for u in by_x[x] if u <= pair.u_l]
            u = min(keep) if keep else None
        if u is not None:
            out_x.append(x)
            out_u.append(u)
    shocks = [x for x in locate_shock(params, pair, profile.t) if xs[0] <= x <= xs[-1]]
    multivalued = profile.is_multivalued() or any(b == "middle" for b in profile.branches)
    if not shocks and multivalued:
        raise LevelNotCrossedError(
            f"profile at t={profile.t} is multi-valued but never reaches the shock level {pair.phi_level:.6g} on its grid"
        )
    return ShockedProfile(profile.t, np.array(out_x), np.array(out_u), replace(pair, location=shocks[0] if shocks else None), shocks)

# }}}


# {{{ jump report

JUMP_QUANTITIES = ("Phi", "D", "R", "ux", "ut")


@dataclass
class ContinuityReport:
    rule: str
    location: Optional[float]
    values: dict  # quantity -> (lower side, upper side)

    @property
    def jumps(self):
        return {q: abs(hi - lo) for q, (lo, hi) in self.values.items()}

    def to_dict(self):
        return {
            "rule": self.rule,
            "location": self.location,
            "values": {q: {"lower": lo, "upper": hi} for q, (lo, hi) in self.values.items()},
            "jumps": self.jumps,
        }

    @classmethod
    def from_dict(cls, data):
        loc = data.get("location")
        values = {}
        for q, side in data["values"].items():
            lo, hi = side["lower"], side["upper"]
            values[q] = (math.nan if lo is None else float(lo), math.nan if hi is None else float(hi))
        return cls(data["rule"], None if loc is None else float(loc), values)


def shock_continuity_report(model, params, pair: ShockPair, t=0.0) -> ContinuityReport:
    """Left/right values of Phi, D, R, u_x and u_t at the shock.

    Phi_x = exp(A t) Psi'(x) and Phi_t = A Phi are shared by both sides, so
    u_x = Phi_x / D and u_t = A Phi / D jump only if D does.
    """
    location = pair.location
    if location is None:
        xs = locate_shock(params, pair, t)
        location = xs[0] if xs else None
    if location is not None:
        phi_x = math.exp(params.A * (t + params.time_gauge)) * params.k * (
            params.c1 * math.exp(params.k * location) - params.c2 * math.exp(-params.k * location)
        )
    else:
        phi_x = math.nan
    values = {}
    sides = (pair.u_l, pair.u_r)
    phi = [eval_flux_potential(model, u) for u in sides]
    D = [eval_diffusivity(model, u) for u in sides]
    values["Phi"] = tuple(phi)
    values["D"] = tuple(D)
    values["R"] = tuple(eval_reaction(model, params, u) for u in sides)
    values["ux"] = tuple(phi_x / d for d in D)
    values["ut"] = tuple(params.A * p / d for p, d in zip(phi, D))
    return ContinuityReport(pair.rule, location, {q: (float(lo), float(hi)) for q, (lo, hi) in values.items()})

# }}}
