import math

import numpy as np
import pytest

from rdshock.model import diffusivity_times_reaction, eval_diffusivity, eval_flux_potential
from rdshock.oracle import central_difference, quadrature
from rdshock.phase_plane import (
    analytic_trajectory,
    field_grid,
    left_moving_condition,
    nullclines_and_walls,
    vector_field,
    wave_speed,
)


def test_wave_speed(ref_model, ref_params):
    assert wave_speed(ref_model, ref_params) == pytest.approx(-0.08, abs=1e-15)


def test_walls_flagged(ref_model, ref_params):
    for u in (0.2, 0.4):
        s = vector_field(ref_model, ref_params, u, -0.05)
        assert s.wall and math.isnan(s.du_dz)
        assert diffusivity_times_reaction(ref_model, ref_params, u) != 0.0
    assert not vector_field(ref_model, ref_params, 0.3, -0.05).wall


def test_field_grid_shape(ref_model, ref_params):
    grid = field_grid(ref_model, ref_params, np.linspace(0, 1.05, 40), np.linspace(-0.14, 0.02, 40))
    assert len(grid) == 1600
    assert grid[0].u == 0.0 and grid[1].u == 0.0  # u varies slowest


def test_trajectory_endpoints_and_branches(ref_model, ref_params, ref_pair):
    pts = analytic_trajectory(ref_model, ref_params, np.linspace(0, 1, 101), ref_pair)
    assert (pts[0].u, pts[0].q) == pytest.approx((0.0, -0.11333333333333333), abs=1e-15)
    assert (pts[-1].u, pts[-1].q) == (1.0, 0.0)
    assert all(p.u <= ref_pair.u_l or p.u >= ref_pair.u_r for p in pts)
    assert {p.branch for p in pts} == {"lower", "upper"}
    full = analytic_trajectory(ref_model, ref_params, [0.1, 0.3, 0.5])
    assert [p.branch for p in full] == ["lower", "middle", "upper"]
    with pytest.raises(ValueError):
        analytic_trajectory(ref_model, ref_params, [1.5])


def test_trajectory_tangent_to_field(ref_model, ref_params, ref_pair):
    k = ref_params.k
    for p in analytic_trajectory(ref_model, ref_params, np.linspace(0.01, 0.99, 99), ref_pair):
        f = vector_field(ref_model, ref_params, p.u, p.q)
        slope = central_difference(lambda u: k * eval_flux_potential(ref_model, u), p.u, 1e-5)
        angle = abs(math.atan2(f.du_dz * slope - f.dq_dz, f.du_dz + f.dq_dz * slope))
        # the orbit is traversed with u decreasing in z, so the field may point backwards
        assert min(angle, math.pi - angle) < 1e-8


def test_nullclines(ref_model, ref_params):
    us = np.array([0.1, 0.3, 0.7])
    nc = nullclines_and_walls(ref_model, ref_params, us)
    assert nc.walls == (0.2, 0.4)
    for u, q in zip(us, nc.q_nullcline):
        s = vector_field(ref_model, ref_params, float(u), float(q))
        assert s.dq_dz == pytest.approx(0.0, abs=1e-13)


def test_left_moving_sharp_holds(ref_model, ref_params, ref_pair):
    for u_a in np.linspace(0.01, ref_pair.u_l - 0.01, 10):
        rep = left_moving_condition(ref_model, ref_params, float(u_a), u_l=ref_pair.u_l)
        assert rep.holds
        # oracle: margin equals -A int_0^u_a Phi along the analytic wave
        ref = -ref_params.A * quadrature(lambda s: eval_flux_potential(ref_model, s), 0.0, float(u_a))
        assert rep.margin == pytest.approx(ref, rel=1e-8)


def test_left_moving_limits(ref_model, ref_params, ref_pair):
    tiny = left_moving_condition(ref_model, ref_params, 1e-6, u_l=ref_pair.u_l)
    assert 0.0 < tiny.margin < 1e-7
    smooth = left_moving_condition(ref_model, ref_params, 1e-6, "smooth", u_l=ref_pair.u_l)
    g0 = ref_params.k * eval_flux_potential(ref_model, 0.0)
    assert smooth.margin == pytest.approx(-0.5 * g0**2, rel=1e-4)


def test_left_moving_rejects_bad_input(ref_model, ref_params, ref_pair):
    with pytest.raises(ValueError):
        left_moving_condition(ref_model, ref_params, 0.2)
    with pytest.raises(ValueError):
        left_moving_condition(ref_model, ref_params, 0.05, variant="loose")
