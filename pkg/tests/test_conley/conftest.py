"""Conley 对测试的共享夹具"""

import pytest

from app.core.conley import build_conley_pair
from app.core.geometry import build_mesh


@pytest.fixture(scope="session")
def circle_max_pair(cos_theta, circle_mesh, circle_crit):
    """cos θ 的极大点，ε=0.2, τ=2"""
    return build_conley_pair(cos_theta, circle_mesh, circle_crit[-1], 0.2, 2.0)


@pytest.fixture(scope="session")
def circle_min_pair(cos_theta, circle_mesh, circle_crit):
    return build_conley_pair(cos_theta, circle_mesh, circle_crit[0], 0.3, 1.0)


@pytest.fixture(scope="session")
def fine_torus_mesh(torus, torus_height):
    """n=256：鞍点处 N 在不稳定方向上要有内部顶点"""
    return build_mesh(torus, torus_height, n=256)


@pytest.fixture(scope="session")
def upper_saddle_pair(torus_height, fine_torus_mesh, torus_crit):
    return build_conley_pair(torus_height, fine_torus_mesh, torus_crit[2], 0.2, 2.0)
