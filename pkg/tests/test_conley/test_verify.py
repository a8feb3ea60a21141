"""Conley 对公理校验测试"""

from dataclasses import replace

import pytest

from app.core.conley import build_conley_pair, no_reentry_check, verify_conley_pair


class TestCircleVerification:
    """圆周上的 cos θ"""

    def test_maximum_pair_passes(self, circle_max_pair, cos_theta, circle_mesh, circle_crit):
        report = verify_conley_pair(circle_max_pair, cos_theta, circle_mesh, m=200, seed=1, critical=circle_crit)
        assert report.passed, report.to_dict()
        assert report.exiting > 0
        assert report.axioms["iii"].checked == 200
        assert report.exit_level.passed

    def test_minimum_pair_nothing_exits(self, circle_min_pair, cos_theta, circle_mesh):
        passed, witnesses, exiting = no_reentry_check(circle_min_pair, cos_theta, circle_mesh, m=100, seed=2)
        assert passed
        assert witnesses == []
        assert exiting == 0

    def test_maximum_pair_no_reentry(self, circle_max_pair, cos_theta, circle_mesh):
        passed, witnesses, exiting = no_reentry_check(circle_max_pair, cos_theta, circle_mesh, m=100, seed=3)
        assert passed and exiting > 0

    def test_broken_pair_fails_exit_axiom(self, circle_max_pair, cos_theta, circle_mesh):
        broken = replace(circle_max_pair, L=frozenset())
        report = verify_conley_pair(broken, cos_theta, circle_mesh, m=100, seed=4)
        assert not report.axioms["iv"].passed
        assert report.axioms["iv"].counterexamples
        assert not report.passed

    def test_reproducible(self, circle_max_pair, cos_theta, circle_mesh):
        a = verify_conley_pair(circle_max_pair, cos_theta, circle_mesh, m=50, seed=5)
        b = verify_conley_pair(circle_max_pair, cos_theta, circle_mesh, m=50, seed=5)
        assert a.to_dict() == b.to_dict()
        assert a.to_dict()["rng"] == "PCG64"

    def test_other_critical_point_inside(self, cos_theta, circle_mesh, circle_crit):
        # ε 足够大时 {f ≤ c+ε} 包含极大点
        pair = build_conley_pair(cos_theta, circle_mesh, circle_crit[0], 2.5, 1.0)
        report = verify_conley_pair(pair, cos_theta, circle_mesh, m=20, seed=6, critical=circle_crit)
        assert not report.axioms["ii"].passed


@pytest.mark.slow
class TestDegenerateVerification:
    """sin³θ 在 θ=0 的退化临界点，ε=0.1, τ=4"""

    def test_axioms_pass(self, cubic_circle, cubic_mesh, cubic_crit):
        x = min(cubic_crit, key=lambda c: cubic_circle.surface.chart_distance(c.point, [0.0]))
        pair = build_conley_pair(cubic_circle, cubic_mesh, x, 0.1, 4.0)
        report = verify_conley_pair(pair, cubic_circle, cubic_mesh, m=100, seed=7, critical=cubic_crit)
        assert report.passed, report.to_dict()


@pytest.mark.slow
class TestTorusSaddleVerification:
    """环面上鞍点"""

    def test_axioms_pass(self, upper_saddle_pair, torus_height, fine_torus_mesh, torus_crit):
        report = verify_conley_pair(
            upper_saddle_pair, torus_height, fine_torus_mesh, m=500, seed=0, critical=torus_crit
        )
        assert report.passed, report.to_dict()
        assert report.exiting > 0
