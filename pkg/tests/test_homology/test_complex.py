"""链复形、列约化与 Betti 数测试"""

import numpy as np
import pytest

from app.core.errors import NotASubcomplexError
from app.core.geometry import build_mesh
from app.core.homology import (
    ChainComplexGF2,
    ColumnReduction,
    betti_numbers,
    coboundary_squares_zero,
    cohomology_basis,
    complex_of,
    gf2_rank,
    gf2_solve,
    in_span,
    reduced_betti_numbers,
    write_complex_triples,
)


class TestBettiNumbers:
    """GF(2) Betti 数"""

    def test_torus(self, torus_cx):
        assert betti_numbers(torus_cx) == (1, 2, 1)

    def test_sphere(self, sphere_cx):
        assert betti_numbers(sphere_cx) == (1, 0, 1)

    def test_rp2(self, rp2_cx):
        assert betti_numbers(rp2_cx) == (1, 1, 1)

    def test_rp2_subdivision_invariant(self, rp2_subdivided_cx):
        assert betti_numbers(rp2_subdivided_cx) == (1, 1, 1)

    def test_torus_resolution_doubling(self, torus, torus_height):
        cx = complex_of(build_mesh(torus, torus_height, n=32))
        assert betti_numbers(cx) == (1, 2, 1)

    def test_circle(self, circle, cos_theta):
        cx = complex_of(build_mesh(circle, cos_theta, n=16))
        assert betti_numbers(cx) == (1, 1)

    def test_reduced(self, sphere_cx):
        assert reduced_betti_numbers(sphere_cx) == (0, 0, 1)

    def test_empty_complex_is_not_acyclic(self):
        assert reduced_betti_numbers(ChainComplexGF2([])) == (-1,)

    def test_euler_characteristic(self, torus_cx, sphere_cx, rp2_cx):
        for cx, chi in ((torus_cx, 0), (sphere_cx, 2), (rp2_cx, 1)):
            counts = [cx.count(k) for k in range(cx.dim + 1)]
            betti = betti_numbers(cx)
            assert sum((-1) ** k * c for k, c in enumerate(counts)) == chi
            assert sum((-1) ** k * b for k, b in enumerate(betti)) == chi


class TestComplexConstruction:
    """子复形校验、相对复形与编号"""

    def test_boundary_squares_zero(self, torus_cx, rp2_cx):
        assert torus_cx.boundary_squares_zero()
        assert rp2_cx.boundary_squares_zero()

    def test_coboundary_squares_zero(self, torus_cx, rng):
        chains = []
        for k in (0, 1):
            level = torus_cx.simplices[k]
            for _ in range(5):
                picks = rng.choice(len(level), size=20, replace=False)
                chains.append([level[i] for i in picks])
        chains.extend(c.simplices for c in cohomology_basis(torus_cx, 1))
        assert coboundary_squares_zero(torus_cx, chains)

    def test_missing_face_rejected(self):
        with pytest.raises(NotASubcomplexError):
            ChainComplexGF2([(0,), (0, 1)])

    def test_relative_part_must_be_subcomplex(self):
        tri = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
        with pytest.raises(NotASubcomplexError):
            ChainComplexGF2(tri, relative=[(0, 1)])
        with pytest.raises(NotASubcomplexError):
            ChainComplexGF2(tri, relative=[(5,)])

    def test_relative_vertices_outside_total(self, small_torus_mesh):
        with pytest.raises(NotASubcomplexError):
            complex_of(small_torus_mesh, vertices=range(10), relative_vertices=[100])

    def test_relative_to_point(self, small_torus_mesh):
        cx = complex_of(small_torus_mesh, relative_vertices=[0])
        assert cx.is_relative
        assert betti_numbers(cx) == (0, 2, 1)

    def test_relative_to_whole(self, rp2_mesh):
        cx = complex_of(rp2_mesh, relative_vertices=range(rp2_mesh.V))
        assert cx.size == 0

    def test_identifiers(self, small_torus_mesh, torus_cx):
        again = complex_of(small_torus_mesh)
        rel = complex_of(small_torus_mesh, relative_vertices=[0])
        assert again.complex_id == torus_cx.complex_id
        assert rel.complex_id != torus_cx.complex_id
        assert rel.ambient_id == torus_cx.complex_id
        assert rel.ambient.complex_id == torus_cx.complex_id

    def test_simplex_order(self, rp2_cx):
        for level in rp2_cx.simplices:
            assert level == sorted(level)
            assert all(list(s) == sorted(s) for s in level)
        for g in range(rp2_cx.size):
            assert rp2_cx.global_index(rp2_cx.simplex_at(g)) == g

    def test_induced_subcomplex(self, rp2_cx):
        star = rp2_cx.induced([0])
        assert betti_numbers(star) == (1,)


class TestReduction:
    """列约化与 GF(2) 线性代数"""

    def test_triangle_boundary(self):
        # 顶点 0,1,2，边 3,4,5，三角形 6
        cols = [set(), set(), set(), {0, 1}, {0, 2}, {1, 2}, {3, 4, 5}]
        red = ColumnReduction(cols)
        assert red.essential == [0]
        assert (5, 6) in red.pairs
        assert red.coordinates({3, 4, 5}) == set()

    def test_non_cycle_rejected(self):
        red = ColumnReduction([set(), set(), {0, 1}])
        with pytest.raises(ValueError):
            red.coordinates({2})

    def test_rank_and_span(self):
        M = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert gf2_rank(M) == 2
        assert in_span(list(M[:2]), M[2])
        assert not in_span(list(M[:1]), M[1])
        assert in_span([], np.zeros(3))

    def test_solve(self):
        vecs = [np.array([1, 0, 1]), np.array([0, 1, 1])]
        x = gf2_solve(vecs, np.array([1, 1, 0]))
        assert x is not None and list(x) == [1, 1]
        assert gf2_solve(vecs, np.array([1, 0, 0])) is None


class TestTripleExport:
    """边缘矩阵三元组导出"""

    def test_rp2_triples(self, rp2_cx, tmp_path):
        path = write_complex_triples(rp2_cx, tmp_path / "complex.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2 * 15 + 3 * 10
        degrees = [int(line.split()[0]) for line in lines]
        assert degrees.count(1) == 30 and degrees.count(2) == 30
        for line in lines:
            k, row, col = map(int, line.split())
            assert 0 <= row < rp2_cx.count(k - 1)
            assert 0 <= col < rp2_cx.count(k)
