"""不等式总表

|Crit f| ≥ cat_amb ≥ cat > cupp = sub，Morse 函数另有
|Crit f| ≥ dim H_* ≥ 1 + sub、弱 Morse 不等式与 Euler 恒等式。
cat_amb 只有上界（环境覆盖的大小）。cat 未定时改用上界检验 "cat 上界 > cupp"。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from ..entities import SurfaceKind
from ..errors import InvalidCoverError
from ..geometry.critical import CriticalPoint, is_morse, morse_counts
from ..geometry.mesh import Mesh
from ..homology.complex import ChainComplexGF2, complex_of
from ..homology.invariants import betti_numbers, cat_bounds, cuplength, subordination_number
from ..thicken.cover import verify_cover
from ..thicken.thickening import Thickening
from ..utils.logger import setup_logger
from .kappa import SubordinatedPair

logger = setup_logger("minimax")

Number = Union[int, float]

# 闭曲面的已知值
REFERENCE_VALUES: Dict[SurfaceKind, Dict[str, int]] = {
    SurfaceKind.CIRCLE: {"cat": 2, "cupp": 1},
    SurfaceKind.SPHERE: {"cat": 2, "cupp": 1},
    SurfaceKind.TORUS: {"cat": 3, "cupp": 2},
    SurfaceKind.RP2: {"cat": 3, "cupp": 2},
}

_RELATIONS = {
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "=": lambda a, b: a == b,
    "<=": lambda a, b: a <= b,
}


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: Number
    relation: str
    rhs: Number
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(_RELATIONS[self.relation](self.lhs, self.rhs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "relation": self.relation,
            "rhs": self.rhs,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class InequalityReport:
    """逐条实例化的不等式及判定

    Attributes:
        partial: 没有函数（只有同调）时只报告同调部分
        values: 各项不变量的数值
    """

    surface: str
    entries: List[Inequality] = field(default_factory=list)
    values: Dict[str, Any] = field(default_factory=dict)
    partial: bool = False

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, name: str) -> Inequality:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def failures(self) -> List[str]:
        return [e.name for e in self.entries if not e.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "surface": self.surface,
            "partial": self.partial,
            "passed": self.passed,
            "values": dict(self.values),
            "inequalities": [e.to_dict() for e in self.entries],
        }


def _homology_entries(report: InequalityReport, bounds, cupp: int, sub: int, dim: int) -> None:
    # cat 未定时下界恒为 cupp + 1，只有上界能检验
    if bounds.exact is not None:
        cat_entry = Inequality("cat > cupp", bounds.exact, ">", cupp)
    else:
        cat_entry = Inequality("cat 上界 > cupp", bounds.upper, ">", cupp, "cat 取覆盖给出的上界")
    report.entries.extend(
        [
            cat_entry,
            Inequality("cupp = sub", cupp, "=", sub),
            Inequality("cupp <= dim", cupp, "<=", dim),
            Inequality("cat <= 1 + dim", bounds.upper, "<=", 1 + dim),
        ]
    )


def _reference_entries(report: InequalityReport, kind: SurfaceKind, bounds, cupp: int) -> None:
    ref = REFERENCE_VALUES.get(kind)
    if ref is None:
        return
    report.values["reference"] = dict(ref)
    report.entries.append(Inequality("cupp = 已知值", cupp, "=", ref["cupp"]))
    if bounds.exact is not None:
        report.entries.append(Inequality("cat = 已知值", bounds.exact, "=", ref["cat"]))
    else:
        report.entries.append(Inequality("cat 上界 >= 已知值", bounds.upper, ">=", ref["cat"]))


def _critical_entries(
    report: InequalityReport,
    mesh: Mesh,
    critical: Sequence[CriticalPoint],
    bounds,
    betti: Sequence[int],
    sub: int,
    ambient: Optional[Sequence[Thickening]],
) -> None:
    n_crit = len(critical)
    cat = bounds.exact if bounds.exact is not None else bounds.lower
    report.values["crit"] = n_crit
    if ambient is not None:
        amb = len(ambient)
        report.values["cat_amb_upper"] = amb
        covered = verify_cover(ambient, mesh).uncovered == 0
        report.entries.extend(
            [
                Inequality("ambient cover complete", int(covered), "=", 1),
                Inequality("|Crit f| >= cat_amb", n_crit, ">=", amb, "cat_amb 取环境覆盖大小作上界"),
                Inequality("cat_amb >= cat", amb, ">=", cat),
            ]
        )
    else:
        report.entries.append(Inequality("|Crit f| >= cat", n_crit, ">=", cat))

    if not is_morse(critical):
        report.values["morse"] = False
        return
    dim = len(betti) - 1
    counts = morse_counts(critical, dim)
    total = sum(betti)
    euler = sum((-1) ** k * c for k, c in enumerate(counts))
    chi = sum((-1) ** k * b for k, b in enumerate(betti))
    report.values.update({"morse": True, "morse_counts": counts, "dim_homology": total})
    report.entries.extend(
        [
            Inequality("|Crit f| >= dim H_*", n_crit, ">=", total),
            Inequality("dim H_* >= 1 + sub", total, ">=", 1 + sub),
        ]
    )
    report.entries.extend(Inequality(f"c_{k} >= b_{k}", c, ">=", b) for k, (c, b) in enumerate(zip(counts, betti)))
    report.entries.append(Inequality("sum (-1)^k c_k = chi", euler, "=", chi))
    report.entries.append(Inequality("chi(mesh) = chi", mesh.euler_characteristic, "=", chi))


def _chain_entries(report: InequalityReport, chain: Sequence[SubordinatedPair], sub: int) -> None:
    if not chain:
        return
    kappas = [chain[0].lower.kappa] + [p.upper.kappa for p in chain]
    realized = [chain[0].lower.critical] + [p.upper.critical for p in chain]
    ids = {c.id for c in realized if c is not None}
    report.values["chain_kappas"] = kappas
    report.entries.extend(
        [
            Inequality("κ 严格递增", int(all(p.strict for p in chain)), "=", 1),
            Inequality("链上不同临界点数 = sub + 1", len(ids), "=", sub + 1),
        ]
    )


def inequality_report(
    mesh: Mesh,
    cx: Optional[ChainComplexGF2] = None,
    critical: Optional[Sequence[CriticalPoint]] = None,
    forward: Optional[Sequence[Thickening]] = None,
    ambient: Optional[Sequence[Thickening]] = None,
    chain: Sequence[SubordinatedPair] = (),
) -> InequalityReport:
    """汇总所有不等式；critical 为 None 时只给同调部分

    Args:
        forward: 前向加厚族，作为 cat 的范畴覆盖
        ambient: 环境加厚族，其大小作为 cat_amb 的上界
        chain: subordinated_minimax 的结果
    """
    cx = (cx or complex_of(mesh)).ambient
    betti = betti_numbers(cx)
    cupp = cuplength(cx)
    sub = subordination_number(cx)
    report = InequalityReport(surface=mesh.surface.descriptor, partial=critical is None)

    cover_ok = True
    bounds = cat_bounds(cx, cupp=cupp)
    if forward is not None:
        try:
            bounds = cat_bounds(cx, [th.vertices for th in forward], cupp=cupp)
        except InvalidCoverError as e:
            logger.warning(f"前向加厚不构成范畴覆盖: {e}")
            cover_ok = False
        report.entries.append(Inequality("forward cover valid", int(cover_ok), "=", 1))

    report.values.update(
        {
            "betti": list(betti),
            "cupp": cupp,
            "sub": sub,
            "dim": cx.dim,
            "cat": bounds.to_dict(),
        }
    )
    _homology_entries(report, bounds, cupp, sub, cx.dim)
    _reference_entries(report, mesh.surface.kind, bounds, cupp)
    if critical is not None:
        _critical_entries(report, mesh, critical, bounds, betti, sub, ambient)
        _chain_entries(report, chain, sub)

    if report.passed:
        logger.info(f"不等式总表: 全部 {len(report.entries)} 项通过")
    else:
        logger.warning(f"不等式总表: 未通过 {report.failures}")
    return report
