import pytest

from clarkson_mcleod_tools.core.asymptotics import PhaseData
from clarkson_mcleod_tools.core.connection import Params, connection_constants, kappa_star
from clarkson_mcleod_tools.core.piv_ode import OdeSettings, integrate

# Integrations are the slow part of the suite; each runs once per session.


@pytest.fixture(scope='session')
def base_params():
    return Params(0.0, 1.0)


@pytest.fixture(scope='session')
def base_phase(base_params):
    return PhaseData.from_connection(connection_constants(base_params))


@pytest.fixture(scope='session')
def base_trajectory(base_params):
    # deep enough for a_12^+ (about -11.52) and the residual grid down to -12
    return integrate(base_params, OdeSettings(), x_end=-12.5)


@pytest.fixture(scope='session')
def quarter_params():
    return Params(0.25, 2.0 * kappa_star(0.25))


@pytest.fixture(scope='session')
def quarter_trajectory(quarter_params):
    return integrate(quarter_params, OdeSettings(), x_end=-12.0)


@pytest.fixture(scope='session')
def negative_params():
    return Params(0.0, -0.5)


@pytest.fixture(scope='session')
def negative_trajectory(negative_params):
    return integrate(negative_params, OdeSettings(), x_end=-12.0)
