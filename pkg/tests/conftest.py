import pytest
from hypothesis import HealthCheck, settings

from plausibility.fixtures import kps_order, triangle_order
from plausibility.testspace import make_classical, make_triangle

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def triangle():
    return make_triangle()


@pytest.fixture
def classical5():
    return make_classical(["1", "2", "3", "4", "5"])


@pytest.fixture(scope="session")
def tri_order():
    return triangle_order()


@pytest.fixture(scope="session")
def kps():
    return kps_order()
