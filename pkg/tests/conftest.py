"""Root-level test configuration and shared fixtures.

This conftest.py provides shared fixtures and utilities for all tests.
Module-specific fixtures should be placed in their respective conftest.py files.

Meshes, critical points and Conley pairs are expensive to build, so the shared ones are
session-scoped; tests must treat them as read-only.
"""

import numpy as np
import pytest

from app.core.geometry import build_mesh, builtin_field, find_critical_points, make_surface
from app.core.utils import cache

# Disable cache for testing
cache.disable_cache()


# ============================================================================
# Surfaces and fields
# ============================================================================


@pytest.fixture(scope="session")
def torus():
    return make_surface("torus:R=2,r=1")


@pytest.fixture(scope="session")
def sphere():
    return make_surface("sphere:rho=1")


@pytest.fixture(scope="session")
def circle():
    return make_surface("circle")


@pytest.fixture(scope="session")
def torus_height(torus):
    return builtin_field("height", torus)


@pytest.fixture(scope="session")
def sphere_height(sphere):
    return builtin_field("height", sphere)


@pytest.fixture(scope="session")
def cos_theta(circle):
    return builtin_field("cos-theta", circle)


@pytest.fixture(scope="session")
def cubic_circle(circle):
    return builtin_field("cubic-circle", circle)


@pytest.fixture(scope="session")
def double_well(circle):
    return builtin_field("double-well", circle)


# ============================================================================
# Meshes and critical points
# ============================================================================


@pytest.fixture(scope="session")
def torus_mesh(torus, torus_height):
    """Torus(2,1) height, n=64"""
    return build_mesh(torus, torus_height, n=64)


@pytest.fixture(scope="session")
def torus_crit(torus_height, torus_mesh):
    return find_critical_points(torus_height, torus_mesh)


@pytest.fixture(scope="session")
def sphere_mesh(sphere, sphere_height):
    """Unit sphere height, icosphere level 4"""
    return build_mesh(sphere, sphere_height, n=64)


@pytest.fixture(scope="session")
def sphere_crit(sphere_height, sphere_mesh):
    return find_critical_points(sphere_height, sphere_mesh)


@pytest.fixture(scope="session")
def circle_mesh(circle, cos_theta):
    """cos θ on the circle, n=2048"""
    return build_mesh(circle, cos_theta, n=2048)


@pytest.fixture(scope="session")
def circle_crit(cos_theta, circle_mesh):
    return find_critical_points(cos_theta, circle_mesh)


@pytest.fixture(scope="session")
def cubic_mesh(circle, cubic_circle):
    return build_mesh(circle, cubic_circle, n=2048)


@pytest.fixture(scope="session")
def cubic_crit(cubic_circle, cubic_mesh):
    return find_critical_points(cubic_circle, cubic_mesh)


@pytest.fixture(scope="session")
def rp2_mesh():
    return build_mesh(make_surface("rp2"), None, n=8)


# ============================================================================
# Shared Utility Fixtures
# ============================================================================


@pytest.fixture
def rng():
    """Fresh seeded generator per test"""
    return np.random.default_rng(7)
