import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdshock.errors import PoleError
from rdshock.model import (
    DiffusivityModel,
    eval_diffusivity,
    eval_flux_potential,
    eval_reaction,
    make_params,
    reaction_derivative,
    validate_params,
)
from rdshock.oracle import central_difference, flux_potential_by_quadrature, quadrature

roots = st.tuples(st.floats(0.02, 0.45), st.floats(0.02, 0.45)).map(lambda t: (t[0], t[0] + t[1]))


def test_reference_values(ref_model, ref_params):
    assert eval_diffusivity(ref_model, 0.0) == pytest.approx(0.08, abs=1e-15)
    assert eval_diffusivity(ref_model, 0.3) == pytest.approx(-0.01, abs=1e-15)
    assert eval_flux_potential(ref_model, 0.0) == pytest.approx(-0.11333333333333333, abs=1e-15)
    assert ref_params.A == pytest.approx(0.08, abs=1e-15)


def test_exact_zeros(ref_model, quartic_model, ref_params):
    for m in (ref_model, quartic_model):
        assert eval_diffusivity(m, m.a) == 0.0
        assert eval_diffusivity(m, m.b) == 0.0
        assert eval_flux_potential(m, 1.0) == 0.0
    assert eval_reaction(ref_model, ref_params, 0.0) == 0.0
    assert eval_reaction(ref_model, ref_params, 1.0) == 0.0


def test_quartic_value(quartic_model):
    # (0 - 0.2)(0 - 0.4)((0 - 0.6)^2 + 0.2)
    assert eval_diffusivity(quartic_model, 0.0) == pytest.approx(0.08 * 0.56, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(ab=roots, u=st.floats(0.0, 1.0))
def test_flux_potential_matches_quadrature(ab, u):
    a, b = ab
    if b >= 1.0:
        return
    m = DiffusivityModel.quadratic(a, b)
    assert eval_flux_potential(m, u) == pytest.approx(flux_potential_by_quadrature(m, u), abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.0, 1.0), d=st.floats(0.01, 1.0), u=st.floats(0.0, 1.0))
def test_quartic_flux_potential_matches_adaptive_simpson(c, d, u):
    m = DiffusivityModel.quartic(0.2, 0.4, c, d)
    ref = -quadrature(lambda s: eval_diffusivity(m, s), u, 1.0, tol=1e-11)
    assert eval_flux_potential(m, u) == pytest.approx(ref, abs=1e-10)


def test_phi_integral_exact(quartic_model):
    ref = quadrature(lambda s: eval_flux_potential(quartic_model, s), 0.1, 0.7, tol=1e-14)
    assert quartic_model.Phi_integral(0.1, 0.7) == pytest.approx(ref, abs=1e-13)


def test_pole_guard(ref_model, ref_params):
    with pytest.raises(PoleError):
        eval_reaction(ref_model, ref_params, 0.2)
    with pytest.raises(PoleError):
        reaction_derivative(ref_model, ref_params, 0.4 + 1e-13)
    assert isinstance(PoleError("x"), ValueError)


@pytest.mark.parametrize("u", [0.0, 0.05, 0.15, 0.3, 0.5, 0.8, 1.0])
def test_reaction_derivative_vs_finite_difference(ref_model, ref_params, u):
    fd = central_difference(lambda s: eval_reaction(ref_model, ref_params, s), u, 1e-6)
    assert reaction_derivative(ref_model, ref_params, u) == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_reaction_derivative_closed_forms(ref_model, ref_params):
    assert reaction_derivative(ref_model, ref_params, 0.0) == pytest.approx(-0.85, abs=1e-14)
    assert reaction_derivative(ref_model, ref_params, 1.0) == pytest.approx(-0.4, abs=1e-14)


def test_reaction_times_diffusivity_finite_on_walls(ref_model, ref_params):
    from rdshock.model import diffusivity_times_reaction

    for u in (ref_model.a, ref_model.b):
        assert diffusivity_times_reaction(ref_model, ref_params, u) != 0.0


def test_constructor_rejects_bad_roots():
    with pytest.raises(ValueError):
        DiffusivityModel.quadratic(0.4, 0.2)
    with pytest.raises(ValueError):
        DiffusivityModel.quadratic(0.0, 0.5)
    with pytest.raises(ValueError):
        DiffusivityModel.quartic(0.2, 0.4, 0.3, 0.0)
    with pytest.raises(ValueError):
        DiffusivityModel.generic(0.2, 0.4, [-1.0])
    with pytest.raises(ValueError):
        make_params(DiffusivityModel.quadratic(0.2, 0.4), kappa=1.0)


def test_generic_reduces_to_quartic():
    q = DiffusivityModel.quartic(0.2, 0.4, 0.6, 0.2)
    g = DiffusivityModel.generic(0.2, 0.4, [0.36 + 0.2, -1.2, 1.0])
    us = np.linspace(0, 1, 11)
    assert np.allclose(eval_diffusivity(q, us), eval_diffusivity(g, us), atol=1e-15)
    assert np.allclose(eval_flux_potential(q, us), eval_flux_potential(g, us), atol=1e-15)
    assert q.multivalued_band() == pytest.approx(g.multivalued_band(), abs=1e-12)


def test_symmetry_flag():
    assert DiffusivityModel.quadratic(0.2, 0.4).is_symmetric
    assert DiffusivityModel.quartic(0.2, 0.4, 0.3, 0.2).is_symmetric
    assert not DiffusivityModel.quartic(0.2, 0.4, 0.6, 0.2).is_symmetric
    # ((u - 0.3)^2 + 0.1)^2 expanded
    g = np.polynomial.Polynomial([-0.3, 1.0]) ** 2 + 0.1
    assert DiffusivityModel.generic(0.2, 0.4, (g**2).coef).is_symmetric


def test_multivalued_band_quadratic(ref_model):
    lo, hi = ref_model.multivalued_band()
    assert (lo, hi) == pytest.approx((0.1, 0.5), abs=1e-15)
    assert eval_flux_potential(ref_model, lo) == pytest.approx(eval_flux_potential(ref_model, ref_model.b), abs=1e-15)
    assert eval_flux_potential(ref_model, hi) == pytest.approx(eval_flux_potential(ref_model, ref_model.a), abs=1e-15)


def test_multivalued_band_generic(quartic_model):
    lo, hi = quartic_model.multivalued_band()
    assert eval_flux_potential(quartic_model, lo) == pytest.approx(eval_flux_potential(quartic_model, 0.4), abs=1e-13)
    assert eval_flux_potential(quartic_model, hi) == pytest.approx(eval_flux_potential(quartic_model, 0.2), abs=1e-13)


def test_validate_params_reference(ref_model, ref_params):
    rep = validate_params(ref_model, ref_params)
    assert rep.ok, rep.failed()


@pytest.mark.parametrize(
    "a,b,failed",
    [
        (0.05, 0.4, "shock_positive"),
        (0.5, 0.6, "a_plus_b_lt_1"),
        (0.1, 0.9, "phi_negative"),
    ],
)
def test_validate_params_reports(a, b, failed):
    rep = validate_params(DiffusivityModel.quadratic(a, b))
    assert failed in rep.failed()


@settings(max_examples=60, deadline=None)
@given(ab=roots)
def test_phi_negative_matches_closed_form(ab):
    a, b = ab
    if b >= 1.0 or abs(b - (a + 2) / 3) < 1e-9:
        return
    rep = validate_params(DiffusivityModel.quadratic(a, b))
    assert rep.checks["phi_negative"] == (b < (a + 2.0) / 3.0)
    if abs(b - a * (2 + math.sqrt(3))) > 1e-9:
        assert rep.checks["shock_positive"] == (b < a * (2 + math.sqrt(3)))
