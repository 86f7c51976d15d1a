import math

import numpy as np
import pytest

from rdshock.errors import StencilError
from rdshock.oracle import OracleConfig, bisection_root_grid, central_difference, gauss_legendre, pde_residual, quadrature


def test_quadrature_known_integrals():
    assert quadrature(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-11)
    assert quadrature(math.exp, 1.0, 0.0) == pytest.approx(1.0 - math.e, abs=1e-11)
    assert quadrature(math.exp, 0.5, 0.5) == 0.0
    assert gauss_legendre(lambda x: x**7, 0.0, 2.0) == pytest.approx(32.0, rel=1e-14)


def test_bisection_grid_finds_all_roots():
    roots = bisection_root_grid(np.sin, 0.1, 10.0, n=1000)
    assert roots == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi], abs=1e-13)


def test_central_difference():
    assert central_difference(math.exp, 0.0, 1e-5) == pytest.approx(1.0, rel=1e-9)


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(h_x=0.0)


def test_pde_residual_stencil_guard(ref_model, ref_params, ref_pair):
    from rdshock.shock import locate_shock

    x_s = locate_shock(ref_params, ref_pair, 0.0)[0]
    with pytest.raises(StencilError):
        pde_residual(ref_model, ref_params, ref_pair, [(x_s + 1e-5, 0.0)])
    with pytest.raises(StencilError):
        pde_residual(ref_model, ref_params, ref_pair, [(5.0, 0.0)])


def test_pde_residual_small_in_smooth_regions(ref_model, ref_params, ref_pair):
    res = pde_residual(ref_model, ref_params, ref_pair, [(-3.0, 0.0), (-0.3, 0.0), (-0.02, 0.0)], 1e-3, 1e-3)
    assert np.all(res < 1e-4)
