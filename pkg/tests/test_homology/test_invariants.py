"""上积长度、从属数与范畴界测试"""

import numpy as np
import pytest

from app.core.errors import InvalidCoverError
from app.core.homology import (
    cap,
    cat_bounds,
    cuplength,
    is_acyclic,
    subordination_chain,
    subordination_number,
    validate_cover,
)


class TestCuplength:
    """上积长度"""

    def test_torus(self, torus_cx):
        assert cuplength(torus_cx) == 2

    def test_rp2(self, rp2_cx):
        assert cuplength(rp2_cx) == 2

    def test_sphere(self, sphere_cx):
        assert cuplength(sphere_cx) == 1

    def test_bounded_by_dimension(self, torus_cx, sphere_cx, rp2_cx):
        for cx in (torus_cx, sphere_cx, rp2_cx):
            assert cuplength(cx) <= cx.dim


class TestSubordination:
    """从属链"""

    @pytest.mark.parametrize("name", ["torus_cx", "sphere_cx", "rp2_cx"])
    def test_equals_cuplength(self, name, request):
        cx = request.getfixturevalue(name)
        assert subordination_number(cx) == cuplength(cx)

    def test_torus_chain_degrees(self, torus_cx):
        chain = subordination_chain(torus_cx)
        assert chain.length == 2
        assert chain.degrees == [0, 1, 2]

    def test_degrees_strictly_increase(self, rp2_cx, sphere_cx):
        for cx in (rp2_cx, sphere_cx):
            degrees = subordination_chain(cx).degrees
            assert all(a < b for a, b in zip(degrees, degrees[1:]))

    def test_witnesses(self, torus_cx):
        chain = subordination_chain(torus_cx)
        assert len(chain.witnesses) == len(chain.classes) - 1
        for lo, w, hi in zip(chain.classes, chain.witnesses, chain.classes[1:]):
            assert w.degree > 0
            assert np.array_equal(cap(w, hi).coordinates(), lo.coordinates())

    def test_export(self, sphere_cx):
        data = subordination_chain(sphere_cx).to_dict()
        assert data == {"length": 1, "degrees": [0, 2], "witness_degrees": [2]}


class TestCatBounds:
    """LS 范畴界"""

    def test_torus_dimension_bound(self, torus_cx):
        bounds = cat_bounds(torus_cx)
        assert bounds.as_tuple() == (3, 3)
        assert bounds.exact == 3

    def test_rp2(self, rp2_cx):
        bounds = cat_bounds(rp2_cx)
        assert bounds.as_tuple() == (3, 3)
        assert bounds.cuplength == 2

    def test_sphere_without_cover(self, sphere_cx):
        bounds = cat_bounds(sphere_cx)
        assert bounds.as_tuple() == (2, 3)
        assert bounds.exact is None

    def test_sphere_two_caps(self, sphere_cx, small_sphere_mesh):
        values = small_sphere_mesh.values
        upper = np.flatnonzero(values > -0.5)
        lower = np.flatnonzero(values < 0.5)
        assert is_acyclic(sphere_cx.induced(upper))
        bounds = cat_bounds(sphere_cx, cover=[upper, lower])
        assert bounds.as_tuple() == (2, 2)
        assert bounds.cover_size == 2
        assert bounds.to_dict()["exact"] == 2

    def test_non_contractible_member(self, torus_cx, small_torus_mesh):
        with pytest.raises(InvalidCoverError):
            validate_cover(torus_cx, [range(small_torus_mesh.V)])

    def test_uncovered_vertices(self, sphere_cx, small_sphere_mesh):
        upper = np.flatnonzero(small_sphere_mesh.values > 0.0)
        with pytest.raises(InvalidCoverError):
            cat_bounds(sphere_cx, cover=[upper])
