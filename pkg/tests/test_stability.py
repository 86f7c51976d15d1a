import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdshock.model import DiffusivityModel, eval_diffusivity, eval_flux_potential, make_params
from rdshock.oracle import central_difference
from rdshock.shock import shock_by_equal_area, shock_quadratic_closed_form
from rdshock.solution import kirchhoff_level, invert_flux_potential
from rdshock.stability import (
    ConstantStateReport,
    GridSpec,
    StabilityRegionMask,
    _sturm_criterion_array,
    classify_constant_state,
    classify_pair,
    constant_state_dispersion,
    diffusivity_zz,
    essential_spectrum_curve,
    stability_region_scan,
    sturm_criterion,
    sturm_criterion_trace,
)


def test_constant_states_reference(ref_model, ref_params):
    r0 = classify_constant_state(ref_model, ref_params, 0)
    r1 = classify_constant_state(ref_model, ref_params, 1)
    assert (r0.status, r1.status) == ("stable", "stable")
    assert r0.r_prime == pytest.approx(-0.85, abs=1e-14)
    assert r1.r_prime == pytest.approx(-0.4, abs=1e-14)
    assert ConstantStateReport.from_dict(r1.to_dict()) == r1


def test_long_wave_instability():
    m = DiffusivityModel.quadratic(0.5, 0.6)
    r1 = classify_constant_state(m, make_params(m), 1)
    assert r1.status == "unstable" and r1.r_prime > 0


def test_classify_rejects_other_states(ref_model, ref_params):
    with pytest.raises(ValueError):
        classify_constant_state(ref_model, ref_params, 0.5)


def test_dispersion(ref_model, ref_params):
    alphas = np.linspace(-5, 5, 101)
    curve = constant_state_dispersion(ref_model, ref_params, 0, alphas)
    assert curve.max_real == pytest.approx((-0.85, 0.0), abs=1e-14)
    ess = essential_spectrum_curve(ref_model, ref_params, alphas)
    assert np.array_equal(ess.lambdas.imag, -ref_params.k * eval_diffusivity(ref_model, 0.0) * alphas)
    assert ess.max_real[0] == pytest.approx(-0.4, abs=1e-15)


def _u_of_z(model, params, z):
    # travelling wave as a function of z: lower branch for the criterion on [0, u_l]
    return invert_flux_potential(model, kirchhoff_level(params, z, 0.0))


def test_diffusivity_zz_against_finite_differences(ref_model, ref_params, ref_pair):
    # D(u(z)) sampled along the upper branch, differentiated twice numerically
    def D_of_z(z):
        return eval_diffusivity(ref_model, _u_of_z(ref_model, ref_params, z)[-1][0])

    for z in (-6.0, -3.0, -1.5):
        u = _u_of_z(ref_model, ref_params, z)[-1][0]
        h = 1e-3
        fd = (D_of_z(z + h) - 2 * D_of_z(z) + D_of_z(z - h)) / h**2
        assert diffusivity_zz(ref_model, ref_params, u) == pytest.approx(fd, rel=1e-5)


def test_array_and_scalar_criterion_agree(ref_model, ref_params):
    us = np.array([0.05, 0.1, 0.6, 0.9])
    vec = _sturm_criterion_array(ref_model, ref_params, us)
    assert vec == pytest.approx([sturm_criterion(ref_model, ref_params, u) for u in us], rel=1e-13)


def test_trace_reference(ref_model, ref_params, ref_pair):
    trace = sturm_criterion_trace(ref_model, ref_params, ref_pair)
    assert trace.satisfied
    assert trace.max_value == pytest.approx(-0.29931, abs=1e-4)
    assert trace.values[0] == pytest.approx(sturm_criterion(ref_model, ref_params, 0.0))
    assert trace.values[-1] == pytest.approx(-0.4, abs=1e-14)
    assert set(trace.interval) == {"lower", "upper"}
    with pytest.raises(ValueError):
        sturm_criterion_trace(ref_model, ref_params, shock_by_equal_area(ref_model))


def test_classify_pair():
    assert classify_pair(0.2, 0.4).stable
    cell = classify_pair(0.05, 0.4)
    assert not cell.shock_feasible and not cell.stable


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.01, 0.45), b=st.floats(0.02, 0.99))
def test_feasibility_is_the_closed_form_border(a, b):
    if not (a < b and a + b < 1) or abs(b - a * (2 + math.sqrt(3))) < 1e-9:
        return
    assert classify_pair(a, b).shock_feasible == (b < a * (2 + math.sqrt(3)))


def test_small_scan_roundtrip():
    grid = GridSpec(n_a=12, n_b=12)
    mask = stability_region_scan(grid)
    assert all(0 < c.a < c.b < 1 and c.a + c.b < 1 for c in mask.cells)
    back = StabilityRegionMask.from_dict(mask.to_dict())
    assert [(c.a, c.b, c.stable) for c in back.cells] == [(c.a, c.b, c.stable) for c in mask.cells]


def test_grid_axes_hit_nominal_values():
    a_axis, b_axis = GridSpec().axes()
    assert 0.2 in a_axis.tolist() and 0.4 in b_axis.tolist()
    with pytest.raises(ValueError):
        GridSpec(n_a=1)
