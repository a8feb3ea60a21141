"""上积、卡积与配对测试"""

import numpy as np
import pytest

from app.core.errors import ClassNotInComplexError, DegreeOverflowError, DegreeUnderflowError
from app.core.homology import (
    CohomologyClass,
    cap,
    cohomology_basis,
    complex_of,
    cup,
    gf2_rank,
    homology_basis,
    pairing,
)


def _fundamental(cx):
    (fund,) = homology_basis(cx, 2)
    return fund


class TestBases:
    """同调与上同调基"""

    def test_torus_degree_one(self, torus_cx):
        loops = homology_basis(torus_cx, 1)
        assert len(loops) == 2
        for b in loops:
            assert b.is_cycle()
            assert not b.is_zero()

    def test_intersection_form_nondegenerate(self, torus_cx):
        alphas = cohomology_basis(torus_cx, 1)
        fund = _fundamental(torus_cx)
        M = np.array([[pairing(cup(a, b), fund) for b in alphas] for a in alphas])
        assert gf2_rank(M) == 2

    def test_kronecker_pairing_nondegenerate(self, torus_cx):
        alphas = cohomology_basis(torus_cx, 1)
        loops = homology_basis(torus_cx, 1)
        M = np.array([[pairing(a, b) for b in loops] for a in alphas])
        assert gf2_rank(M) == 2

    def test_sphere_has_no_loops(self, sphere_cx):
        assert homology_basis(sphere_cx, 1) == []
        assert cohomology_basis(sphere_cx, 1) == []

    def test_degree_out_of_range(self, sphere_cx):
        assert homology_basis(sphere_cx, 3) == []
        assert cohomology_basis(sphere_cx, -1) == []

    def test_cocycles(self, rp2_cx):
        for p in range(3):
            for a in cohomology_basis(rp2_cx, p):
                assert a.is_cocycle()
                assert not a.is_zero()


class TestCup:
    """上积"""

    def test_torus_generators_multiply_to_top_class(self, torus_cx):
        a, b = cohomology_basis(torus_cx, 1)
        prod = cup(a, b)
        assert prod.degree == 2
        assert prod.is_cocycle()
        assert list(prod.coordinates()) == [1]

    def test_rp2_square_nonzero(self, rp2_cx):
        (a,) = cohomology_basis(rp2_cx, 1)
        assert not cup(a, a).is_zero()

    def test_torus_squares_vanish(self, torus_cx):
        for a in cohomology_basis(torus_cx, 1):
            assert cup(a, a).is_zero()

    def test_graded_commutative(self, torus_cx):
        basis = [c for p in range(3) for c in cohomology_basis(torus_cx, p)]
        for a in basis:
            for b in basis:
                if a.degree + b.degree <= 2:
                    assert np.array_equal(cup(a, b).coordinates(), cup(b, a).coordinates())

    def test_associative(self, rp2_cx):
        basis = [c for p in range(3) for c in cohomology_basis(rp2_cx, p)]
        for a in basis:
            for b in basis:
                for c in basis:
                    if a.degree + b.degree + c.degree <= 2:
                        left = cup(cup(a, b), c)
                        right = cup(a, cup(b, c))
                        assert np.array_equal(left.coordinates(), right.coordinates())

    def test_degree_overflow(self, sphere_cx):
        (top,) = cohomology_basis(sphere_cx, 2)
        with pytest.raises(DegreeOverflowError):
            cup(top, top)

    def test_different_complexes(self, torus_cx, rp2_cx):
        (a,) = cohomology_basis(rp2_cx, 1)
        b = cohomology_basis(torus_cx, 1)[0]
        with pytest.raises(ClassNotInComplexError):
            cup(a, b)


class TestCap:
    """卡积"""

    def test_fundamental_cap_loop_class(self, torus_cx):
        fund = _fundamental(torus_cx)
        for a in cohomology_basis(torus_cx, 1):
            dual = cap(a, fund)
            assert dual.degree == 1
            assert dual.is_cycle()
            assert not dual.is_zero()

    def test_unit_acts_as_identity(self, torus_cx):
        unit = CohomologyClass.unit(torus_cx)
        for k in range(3):
            for b in homology_basis(torus_cx, k):
                assert cap(unit, b).simplices == b.simplices

    def test_cap_cup_duality(self, torus_cx):
        fund = _fundamental(torus_cx)
        alphas = cohomology_basis(torus_cx, 1)
        for a in alphas:
            for b in alphas:
                assert pairing(b, cap(a, fund)) == pairing(cup(a, b), fund)

    def test_compatibility_on_random_triples(self, torus_cx, rng):
        coh = [c for p in range(3) for c in cohomology_basis(torus_cx, p)]
        hom = [c for k in range(3) for c in homology_basis(torus_cx, k)]
        triples = [
            (a, b, c)
            for a in coh
            for b in coh
            for c in hom
            if a.degree + b.degree <= c.degree
        ]
        picks = rng.choice(len(triples), size=50, replace=True)
        for i in picks:
            a, b, c = triples[i]
            assert cap(cup(a, b), c).simplices == cap(a, cap(b, c)).simplices

    def test_degree_underflow(self, torus_cx):
        (top,) = cohomology_basis(torus_cx, 2)
        loop = homology_basis(torus_cx, 1)[0]
        with pytest.raises(DegreeUnderflowError):
            cap(top, loop)

    def test_omega_from_other_complex(self, torus_cx, rp2_cx):
        (a,) = cohomology_basis(rp2_cx, 1)
        with pytest.raises(ClassNotInComplexError):
            cap(a, _fundamental(torus_cx))

    def test_relative_class_with_ambient_omega(self, small_torus_mesh, torus_cx):
        rel = complex_of(small_torus_mesh, relative_vertices=[0])
        (fund,) = homology_basis(rel, 2)
        for a in cohomology_basis(torus_cx, 1):
            dual = cap(a, fund)
            assert dual.complex_id == rel.complex_id
            assert dual.is_cycle()
            assert not dual.is_zero()
