"""小规模复形夹具：约化在纯 Python 集合上进行，网格取粗分辨率"""

import pytest

from app.core.geometry import build_mesh, make_surface
from app.core.homology import complex_of


@pytest.fixture(scope="session")
def small_torus_mesh(torus, torus_height):
    return build_mesh(torus, torus_height, n=16)


@pytest.fixture(scope="session")
def torus_cx(small_torus_mesh):
    return complex_of(small_torus_mesh)


@pytest.fixture(scope="session")
def small_sphere_mesh(sphere, sphere_height):
    """细分一层的二十面体，42 个顶点"""
    return build_mesh(sphere, sphere_height, n=8)


@pytest.fixture(scope="session")
def sphere_cx(small_sphere_mesh):
    return complex_of(small_sphere_mesh)


@pytest.fixture(scope="session")
def rp2_cx(rp2_mesh):
    return complex_of(rp2_mesh)


@pytest.fixture(scope="session")
def rp2_subdivided_cx():
    return complex_of(build_mesh(make_surface("rp2"), None, subdivisions=1))
