"""极小极大测试的共享夹具：网格顶点恰好落在临界点上"""

import pytest

from app.core.geometry import build_mesh
from app.core.minimax import build_filtration


@pytest.fixture(scope="session")
def coarse_torus_mesh(torus, torus_height):
    return build_mesh(torus, torus_height, n=16)


@pytest.fixture(scope="session")
def torus_filt(coarse_torus_mesh):
    """(M^b, M^a) = (M, ∅)，a = -3.5, b = 3.5"""
    return build_filtration(coarse_torus_mesh)


@pytest.fixture(scope="session")
def band_filt(coarse_torus_mesh):
    return build_filtration(coarse_torus_mesh, -2.0, 2.0)


@pytest.fixture(scope="session")
def coarse_sphere_mesh(sphere, sphere_height):
    return build_mesh(sphere, sphere_height, n=8)
