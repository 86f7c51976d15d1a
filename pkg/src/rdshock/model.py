"""Diffusivity models, flux potential and the symmetry-linked reaction term.

The diffusivity is stored in factored form

    D(u) = (u - a)(u - b) g(u)

where ``g`` is a cofactor polynomial that stays positive on [0, 1]. Keeping the
roots explicit makes ``D(a)`` and ``D(b)`` exactly zero. The flux potential
(Kirchhoff variable) is the antiderivative anchored at u* = 1 and is stored as

    Phi(u) = (u - 1) Q(u)

so that ``Phi(1) == 0`` holds exactly as well.

The reaction term is

    R(u) = (A / D(u) + kappa) Phi(u),    A = -kappa D(0),

which vanishes at u = 0 and u = 1 and has simple poles at u = a, b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from rdshock.errors import PoleError

KINDS = ("quadratic", "quartic", "generic")

#: Half-width of the band around a and b where R and R' refuse to evaluate.
POLE_GUARD = 1e-12

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DiffusivityModel:
    """Polynomial diffusivity with two simple roots ``0 < a < b < 1``.

    ``cofactor`` holds ascending monomial coefficients of ``g`` and is only
    read for the ``generic`` kind; quadratic uses ``g = 1`` and quartic uses
    ``g = (u - c)**2 + d``.
    """

    kind: str
    a: float
    b: float
    c: float = 0.0
    d: float = 0.0
    cofactor: tuple[float, ...] = (1.0,)

    _g: Polynomial = field(init=False, repr=False, compare=False)
    _D: Polynomial = field(init=False, repr=False, compare=False)
    _Q: Polynomial = field(init=False, repr=False, compare=False)
    _Phi: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown diffusivity kind {self.kind!r}; expected one of {KINDS}")
        if not 0.0 < self.a < self.b < 1.0:
            raise ValueError(f"need 0 < a < b < 1, got a={self.a}, b={self.b}")
        if self.kind == "quadratic":
            g = Polynomial([1.0])
        elif self.kind == "quartic":
            if not self.d > 0.0:
                raise ValueError(f"quartic diffusivity needs d > 0, got d={self.d}")
            g = Polynomial([self.c * self.c + self.d, -2.0 * self.c, 1.0])
        else:
            coeffs = [float(x) for x in self.cofactor]
            if not coeffs:
                raise ValueError("generic diffusivity needs cofactor coefficients")
            g = Polynomial(coeffs)
            object.__setattr__(self, "cofactor", tuple(coeffs))
            _check_positive_on_unit_interval(g)
        D = Polynomial([self.a * self.b, -(self.a + self.b), 1.0]) * g
        object.__setattr__(self, "_g", g)
        object.__setattr__(self, "_D", D)
        object.__setattr__(self, "_Q", _quotient_coefficients(D))
        object.__setattr__(self, "_Phi", D.integ(lbnd=1.0))

    # constructors ------------------------------------------------------

    @classmethod
    def quadratic(cls, a, b):
        return cls("quadratic", float(a), float(b))

    @classmethod
    def quartic(cls, a, b, c, d):
        return cls("quartic", float(a), float(b), float(c), float(d))

    @classmethod
    def generic(cls, a, b, cofactor):
        return cls("generic", float(a), float(b), cofactor=tuple(float(x) for x in cofactor))

    # polynomial views --------------------------------------------------

    @property
    def diffusivity_poly(self) -> Polynomial:
        return self._D

    @property
    def flux_potential_poly(self) -> Polynomial:
        return self._Phi

    @property
    def degree(self) -> int:
        return self._D.degree()

    @property
    def is_symmetric(self) -> bool:
        """True when D is even about the midpoint of its roots."""
        if self.kind == "quadratic":
            return True
        if self.kind == "quartic":
            return abs(self.c - 0.5 * (self.a + self.b)) <= 1e-12
        m = 0.5 * (self.a + self.b)
        shifted = self._g(Polynomial([m, 1.0]))
        odd = shifted.coef[1::2]
        return bool(np.all(np.abs(odd) <= 1e-14 * max(1.0, np.max(np.abs(shifted.coef)))))

    # evaluation --------------------------------------------------------

    def D(self, u, order=0):
        return eval_diffusivity(self, u, order)

    def Phi(self, u):
        return eval_flux_potential(self, u)

    def Phi_integral(self, lo, hi):
        """Exact integral of Phi over [lo, hi]."""
        P = self._Phi.integ()
        return float(P(hi) - P(lo))

    def multivalued_band(self) -> tuple[float, float]:
        """Range of u over which the implicit solution has three branches.

        The lower end is where Phi returns to Phi(b) below a, the upper end
        where Phi climbs back to Phi(a) above b. Either end may fall outside
        [0, 1].
        """
        a, b = self.a, self.b
        if self.kind == "quadratic":
            return (3.0 * a - b) / 2.0, (3.0 * b - a) / 2.0
        phi_a, phi_b = self.Phi(a), self.Phi(b)
        lo = _expand_and_solve(lambda u: self.Phi(u) - phi_b, a, -1.0)
        hi = _expand_and_solve(lambda u: self.Phi(u) - phi_a, b, +1.0)
        return lo, hi


def _quotient_coefficients(D: Polynomial) -> Polynomial:
    # Phi(u) = sum_i d_i (u^{i+1} - 1)/(i+1) = (u - 1) sum_j Q_j u^j, Q_j = sum_{i>=j} d_i/(i+1)
    d = D.coef
    n = len(d)
    q = np.zeros(n)
    acc = 0.0
    for j in range(n - 1, -1, -1):
        acc += d[j] / (j + 1)
        q[j] = acc
    return Polynomial(q)


def _check_positive_on_unit_interval(g: Polynomial):
    if g.degree() == 0:
        if g.coef[0] <= 0.0:
            raise ValueError("generic cofactor must be positive on [0, 1]")
        return
    crit = [r.real for r in g.roots() if abs(r.imag) < 1e-12 and 0.0 <= r.real <= 1.0]
    for u in [0.0, 1.0, *crit]:
        if g(u) <= 0.0:
            raise ValueError(f"generic cofactor is not positive on [0, 1] (g({u:.6g}) = {g(u):.6g})")


def _expand_and_solve(f, start, direction):
    # f(start) and f far away in `direction` have opposite signs
    f0 = f(start)
    step = 0.05
    x = start + direction * step
    while f(x) * f0 > 0.0:
        step *= 2.0
        if step > 1e6:
            raise ValueError("could not bracket fold point")
        x = start + direction * step
    lo, hi = sorted((start, x))
    return float(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def eval_diffusivity(model: DiffusivityModel, u, order=0):
    """D(u), D'(u) or D''(u).

    Order 0 uses the factored form so the stored roots give exact zeros.
    """
    if order == 0:
        return (u - model.a) * (u - model.b) * model._g(u)
    if order == 1:
        return model._D.deriv(1)(u)
    if order == 2:
        return model._D.deriv(2)(u)
    raise ValueError(f"order must be 0, 1 or 2, got {order}")


def eval_flux_potential(model: DiffusivityModel, u):
    """Kirchhoff variable Phi(u), with Phi(1) = 0 exactly."""
    return (u - 1.0) * model._Q(u)


@dataclass(frozen=True)
class SolutionParams:
    """Constants fixing one analytic solution family.

    ``A`` and ``u_star`` are derived, not chosen: ``A = -kappa D(0)`` puts a
    zero of R at the origin and ``u_star = 1`` puts one at u = 1.
    ``time_gauge`` shifts the clock so that displayed time t corresponds to
    t + time_gauge in the formulas.
    """

    kappa: float
    A: float
    c1: float
    c2: float
    time_gauge: float = 0.0
    u_star: float = 1.0

    @property
    def k(self) -> float:
        return math.sqrt(-self.kappa)

    @property
    def speed(self) -> float:
        """Travelling-wave speed c = -A/k."""
        return -self.A / self.k


def make_params(model, kappa=-1.0, c1=None, c2=0.0, time_gauge=0.0) -> SolutionParams:
    """Build SolutionParams, with ``c1`` defaulting to Phi(0)."""
    kappa = float(kappa)
    if not kappa < 0.0:
        raise ValueError(f"kappa must be negative, got {kappa}")
    A = float(-(kappa * eval_diffusivity(model, 0.0)))
    if c1 is None:
        c1 = eval_flux_potential(model, 0.0)
    return SolutionParams(kappa=kappa, A=A, c1=float(c1), c2=float(c2), time_gauge=float(time_gauge))


def _guard(model, u, eps):
    if abs(u - model.a) < eps or abs(u - model.b) < eps:
        raise PoleError(f"u = {u!r} is within {eps:g} of a diffusivity root (a={model.a}, b={model.b})")


def diffusivity_times_reaction(model, params, u):
    """D(u) R(u) = (A + kappa D(u)) Phi(u), finite at the walls u = a, b."""
    return (params.A + params.kappa * eval_diffusivity(model, u)) * eval_flux_potential(model, u)


def eval_reaction(model, params, u, eps_pole=POLE_GUARD):
    _guard(model, u, eps_pole)
    Du = eval_diffusivity(model, u)
    # A + kappa*D(0) cancels to an exact zero, so R(0) == 0
    return (params.A + params.kappa * Du) * eval_flux_potential(model, u) / Du


def reaction_derivative(model, params, u, eps_pole=POLE_GUARD):
    """R'(u) = A + kappa D(u) - A D'(u) Phi(u) / D(u)**2."""
    A, kappa = params.A, params.kappa
    if u == 0.0:
        return kappa * eval_diffusivity(model, 0.0, 1) * eval_flux_potential(model, 0.0) / eval_diffusivity(model, 0.0)
    if u == 1.0:
        D1 = eval_diffusivity(model, 1.0)
        return -kappa * D1 * (eval_diffusivity(model, 0.0) / D1 - 1.0)
    _guard(model, u, eps_pole)
    Du = eval_diffusivity(model, u)
    return A + kappa * Du - A * eval_diffusivity(model, u, 1) * eval_flux_potential(model, u) / (Du * Du)


@dataclass(frozen=True)
class FeasibilityReport:
    checks: dict
    values: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self):
        return [name for name, passed in self.checks.items() if not passed]


def validate_params(model: DiffusivityModel, params: SolutionParams | None = None) -> FeasibilityReport:
    """Check the parameter regime; never raises on a failed constraint.

    ``phi_negative`` is Phi(a) < 0, which is Phi < 0 on [0, 1) and reduces to
    b < (a + 2)/3 for quadratic D. ``shock_positive`` is u_l > 0, which reduces
    to b < a(2 + sqrt 3) for quadratic D.
    """
    a, b = model.a, model.b
    values = {"a_plus_b": a + b, "phi_a": float(eval_flux_potential(model, a))}
    checks = {"ordered": 0.0 < a < b < 1.0, "a_plus_b_lt_1": a + b < 1.0}
    if model.kind == "quadratic":
        values["phi_negative_bound"] = (a + 2.0) / 3.0
        values["shock_positive_bound"] = a * (2.0 + SQRT3)
        checks["phi_negative"] = b < (a + 2.0) / 3.0
        checks["shock_positive"] = b < a * (2.0 + SQRT3)
    else:
        from rdshock.errors import NumericalError
        from rdshock.shock import shock_by_continuity

        checks["phi_negative"] = values["phi_a"] < 0.0
        try:
            pair = shock_by_continuity(model, check_feasible=False)
            values["u_l"] = pair.u_l
            checks["shock_positive"] = pair.u_l > 0.0
        except NumericalError:
            checks["shock_positive"] = False
    if params is not None:
        values["A"] = params.A
        checks["A_positive"] = params.A > 0.0
    return FeasibilityReport(checks=checks, values=values)
