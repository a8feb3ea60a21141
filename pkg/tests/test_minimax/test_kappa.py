"""极小极大值 κ 测试"""

import numpy as np
import pytest

from app.core.errors import (
    ClassNotInComplexError,
    InvalidParametersError,
    NotSubordinatedError,
    TrivialClassError,
)
from app.core.homology import CohomologyClass, HomologyClass, cap, cohomology_basis
from app.core.minimax import (
    build_filtration,
    kappa,
    kappa_table,
    no_gap_interval,
    refined_minimax,
    subordinated_minimax,
    threshold_scan,
    write_scan_csv,
)


def _tol(filt):
    return 2 * filt.mesh.max_edge_gap


class TestFiltration:
    """下星过滤"""

    def test_faces_precede_cofaces(self, torus_filt):
        pos = torus_filt.position
        for s in torus_filt.simplices:
            if len(s) > 1:
                for i in range(len(s)):
                    assert pos[s[:i] + s[i + 1 :]] < pos[s]

    def test_values_monotone(self, torus_filt):
        assert np.all(np.diff(torus_filt.values) >= 0)

    def test_global_essential_classes(self, torus_filt):
        assert torus_filt.is_global
        counts = [len(torus_filt.essential_classes(k)) for k in range(3)]
        assert counts == [1, 2, 1]

    def test_band_essential_classes(self, band_filt):
        assert not band_filt.is_global
        assert band_filt.essential_classes(0) == []
        assert band_filt.essential_classes(2) == []
        assert len(band_filt.essential_classes(1)) == 2

    def test_thresholds(self, torus_filt):
        th = torus_filt.thresholds
        assert th[0] == pytest.approx(-3.5)
        assert th[-1] == pytest.approx(3.5)

    def test_invalid_band(self, coarse_torus_mesh):
        with pytest.raises(InvalidParametersError):
            build_filtration(coarse_torus_mesh, 1.0, -1.0)


class TestKappa:
    """环面高度函数上的 κ"""

    def test_point_class(self, torus_filt, torus_crit):
        res = kappa(torus_filt.essential_classes(0)[0], torus_filt, torus_crit)
        assert res.kappa == pytest.approx(-3.0, abs=1e-9)
        assert res.critical.id == torus_crit[0].id
        assert res.morse_match is True

    def test_loop_classes_at_saddles(self, torus_filt, torus_crit):
        results = [kappa(c, torus_filt, torus_crit) for c in torus_filt.essential_classes(1)]
        values = sorted(r.kappa for r in results)
        assert values[0] == pytest.approx(-1.0, abs=_tol(torus_filt))
        assert values[1] == pytest.approx(1.0, abs=_tol(torus_filt))
        assert {r.critical.id for r in results} == {torus_crit[1].id, torus_crit[2].id}
        assert all(r.morse_match for r in results)

    def test_fundamental_class(self, torus_filt, torus_crit):
        res = kappa(torus_filt.essential_classes(2)[0], torus_filt, torus_crit)
        assert res.kappa == pytest.approx(3.0, abs=1e-9)
        assert res.critical.id == torus_crit[3].id

    def test_all_checks_pass(self, torus_filt, torus_crit):
        table = kappa_table(torus_filt, torus_crit)
        assert len(table) == 4
        for res in table:
            assert res.passed, res.to_dict()
            assert res.kappa == res.kappa_exact
            assert res.kappa <= res.support_max
            assert res.checks["quotient_recheck"]

    def test_band_case(self, band_filt, torus_crit):
        results = kappa_table(band_filt, torus_crit)
        assert [r.degree for r in results] == [1, 1]
        assert {r.critical.id for r in results} == {torus_crit[1].id, torus_crit[2].id}
        assert all(-2.0 < r.kappa <= 2.0 for r in results)
        assert all(r.passed for r in results)

    def test_sum_of_loops(self, torus_filt):
        lo, hi = torus_filt.essential_classes(1)
        res = kappa(lo + hi, torus_filt, recheck=False)
        assert res.kappa == max(kappa(lo, torus_filt).kappa, kappa(hi, torus_filt).kappa)

    def test_trivial_class(self, torus_filt):
        tri = torus_filt.complex.simplices[2][0]
        edges = [tri[:i] + tri[i + 1 :] for i in range(3)]
        with pytest.raises(TrivialClassError):
            kappa(HomologyClass.of(torus_filt.complex, 1, edges), torus_filt)

    def test_class_from_other_complex(self, torus_filt, band_filt):
        with pytest.raises(ClassNotInComplexError):
            kappa(band_filt.essential_classes(1)[0], torus_filt)

    def test_export(self, torus_filt, torus_crit):
        data = kappa(torus_filt.essential_classes(0)[0], torus_filt, torus_crit).to_dict()
        assert data["critical_point"] == torus_crit[0].id
        assert data["interval"]["closed"] is True
        assert data["passed"] is True


class TestNoGap:
    """零集 {s : j^s_*(c) = 0}"""

    def test_interval_starts_at_kappa(self, torus_filt):
        for c in torus_filt.essential_classes(1):
            s0, closed = no_gap_interval(c, torus_filt)
            assert s0 == kappa(c, torus_filt, recheck=False).kappa
            assert closed

    def test_endpoints(self, torus_filt):
        for k in range(3):
            for c in torus_filt.essential_classes(k):
                scan = threshold_scan(c, torus_filt)
                assert scan[0] == (pytest.approx(torus_filt.a), False)
                assert scan[-1][1] is True

    def test_up_closed(self, torus_filt):
        scan = threshold_scan(torus_filt.essential_classes(2)[0], torus_filt)
        flags = [zero for _, zero in scan]
        first = flags.index(True)
        assert all(flags[first:])
        assert not any(flags[:first])

    def test_scan_csv(self, torus_filt, tmp_path):
        scan = threshold_scan(torus_filt.essential_classes(1)[0], torus_filt)
        path = write_scan_csv(scan, tmp_path / "scan.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "s,is_zero"
        assert len(lines) == len(scan) + 1
        assert lines[-1].endswith(",1")


class TestRefinedMinimax:
    """从属类的 κ 比较"""

    def test_point_below_fundamental(self, torus_filt, torus_crit):
        fund = torus_filt.essential_classes(2)[0]
        (omega,) = cohomology_basis(torus_filt.complex, 2)
        point = cap(omega, fund)
        pair = refined_minimax(point, fund, omega, torus_filt, torus_crit)
        assert pair.lower.kappa == pytest.approx(-3.0, abs=1e-9)
        assert pair.upper.kappa == pytest.approx(3.0, abs=1e-9)
        assert pair.strict and pair.distinct

    def test_loops_below_fundamental(self, torus_filt, torus_crit):
        fund = torus_filt.essential_classes(2)[0]
        tol = _tol(torus_filt)
        for omega in cohomology_basis(torus_filt.complex, 1):
            pair = refined_minimax(cap(omega, fund), fund, omega, torus_filt, torus_crit)
            assert min(abs(pair.lower.kappa + 1), abs(pair.lower.kappa - 1)) <= tol
            assert pair.strict and pair.distinct
            assert pair.lower.critical.index == 1

    def test_chain_realizes_distinct_points(self, torus_filt, torus_crit):
        chain = subordinated_minimax(torus_filt, torus_crit)
        assert len(chain) == 2
        kappas = [chain[0].lower.kappa] + [p.upper.kappa for p in chain]
        assert kappas == sorted(kappas) and len(set(kappas)) == 3
        ids = {chain[0].lower.critical.id} | {p.upper.critical.id for p in chain}
        assert len(ids) == 3 < len(torus_crit)

    def test_not_subordinated(self, torus_filt):
        fund = torus_filt.essential_classes(2)[0]
        loops = torus_filt.essential_classes(1)
        omega = cohomology_basis(torus_filt.complex, 1)[0]
        image = cap(omega, fund)
        wrong = next(l for l in loops if not (image + l).is_zero())
        with pytest.raises(NotSubordinatedError):
            refined_minimax(wrong, fund, omega, torus_filt)
        with pytest.raises(NotSubordinatedError):
            refined_minimax(loops[0], fund, cohomology_basis(torus_filt.complex, 2)[0], torus_filt)

    def test_omega_must_have_positive_degree(self, torus_filt):
        fund = torus_filt.essential_classes(2)[0]
        with pytest.raises(InvalidParametersError):
            refined_minimax(fund, fund, CohomologyClass.unit(torus_filt.complex), torus_filt)
