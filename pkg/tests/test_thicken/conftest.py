"""加厚测试的共享夹具：所有 Conley 对共用 (ε, τ)"""

import pytest

from app.core.conley import build_conley_pair
from app.core.geometry import build_mesh, find_critical_points
from app.core.thicken import ambient_thickenings, forward_thickenings

EPS, TAU = 0.2, 2.0


def _pairs(field, mesh, crit):
    return [build_conley_pair(field, mesh, x, EPS, TAU) for x in crit]


@pytest.fixture(scope="session")
def circle_pairs(cos_theta, circle_mesh, circle_crit):
    """[极小, 极大]"""
    return _pairs(cos_theta, circle_mesh, circle_crit)


@pytest.fixture(scope="session")
def circle_forward(cos_theta, circle_mesh, circle_crit, circle_pairs):
    return forward_thickenings(cos_theta, circle_mesh, circle_pairs, circle_crit)


@pytest.fixture(scope="session")
def circle_ambient(cos_theta, circle_mesh, circle_crit, circle_pairs):
    return ambient_thickenings(cos_theta, circle_mesh, circle_pairs, circle_crit)


@pytest.fixture(scope="session")
def well_mesh(circle, double_well):
    return build_mesh(circle, double_well, n=2048)


@pytest.fixture(scope="session")
def well_crit(double_well, well_mesh):
    return find_critical_points(double_well, well_mesh)


@pytest.fixture(scope="session")
def well_pairs(double_well, well_mesh, well_crit):
    return _pairs(double_well, well_mesh, well_crit)


@pytest.fixture(scope="session")
def torus_pairs(torus_height, torus_mesh, torus_crit):
    return _pairs(torus_height, torus_mesh, torus_crit)
