import pytest

from rdshock.model import DiffusivityModel, make_params
from rdshock.shock import shock_quadratic_closed_form


@pytest.fixture
def ref_model():
    return DiffusivityModel.quadratic(0.2, 0.4)


@pytest.fixture
def ref_params(ref_model):
    return make_params(ref_model, kappa=-1.0)


@pytest.fixture
def ref_pair(ref_model):
    return shock_quadratic_closed_form(ref_model)


@pytest.fixture
def quartic_model():
    return DiffusivityModel.quartic(0.2, 0.4, 0.6, 0.2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
