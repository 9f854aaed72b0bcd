# tests/conftest.py

import numpy as np
import pytest

from analysis.coeffs import MultiplicityFunction
from analysis.rootsys import ThetaSet, build_root_system
from config.setup import initialize_application, setup_configuration
from container import container
from database.repository import CalibrationRepository
from log_service.logger import LoggingService


@pytest.fixture
def a1():
    return build_root_system('A', 1)


@pytest.fixture
def a2():
    return build_root_system('A', 2)


@pytest.fixture
def b2():
    return build_root_system('B', 2)


@pytest.fixture
def m2_a1(a1):
    return MultiplicityFunction.constant(a1, 2)


@pytest.fixture
def m2_a2(a2):
    return MultiplicityFunction.constant(a2, 2)


@pytest.fixture
def full_a1():
    return ThetaSet.full(1)


@pytest.fixture
def empty_a1():
    return ThetaSet.empty(1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def dominant_point(rs, simple_values):
    """H with α_i(H) equal to the given values"""
    return np.linalg.solve(rs.simple_roots, np.asarray(simple_values, dtype=float))


@pytest.fixture
def app(tmp_path, monkeypatch):
    """Fully initialized application with logs and calibration cache under tmp_path"""
    monkeypatch.setenv('THETASPH_CACHE_DIR', str(tmp_path / 'cache'))
    monkeypatch.chdir(tmp_path)
    container.reset()
    app_config = initialize_application()
    yield app_config
    if container.is_registered(CalibrationRepository):
        container.resolve(CalibrationRepository).close()
    if container.is_registered(LoggingService):
        container.resolve(LoggingService).shutdown()
    container.reset()
    # restore the process-wide numeric defaults a test config may have changed
    setup_configuration(None)
    container.reset()


@pytest.fixture
def dominant():
    return dominant_point
