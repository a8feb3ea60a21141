"""加厚族的覆盖检查"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..geometry.mesh import Mesh
from ..homology.complex import ChainComplexGF2, complex_of
from ..homology.invariants import reduced_betti_numbers
from ..utils.logger import setup_logger
from .thickening import Thickening

logger = setup_logger("thicken")


@dataclass
class CoverReport:
    """覆盖报告

    可缩性只做同调代理：导出满子复形的约化 GF(2) Betti 数全为零是零伦的必要条件。

    Attributes:
        owner: 每个顶点所属的第一个加厚（临界点编号），未覆盖为 -1
        uncovered: 未覆盖的顶点数
        same_level_overlaps: 同一临界值上相交的加厚对
        reduced_betti: 每个加厚的约化 Betti 数
        vertex_counts: 每个加厚的顶点数
    """

    owner: np.ndarray
    uncovered: int
    same_level_overlaps: List[Tuple[int, int]] = field(default_factory=list)
    reduced_betti: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    vertex_counts: Dict[int, int] = field(default_factory=dict)

    @property
    def covered(self) -> int:
        return int((self.owner >= 0).sum())

    @property
    def disjoint(self) -> bool:
        return not self.same_level_overlaps

    @property
    def contractible(self) -> Dict[int, bool]:
        return {k: all(b == 0 for b in betti) for k, betti in self.reduced_betti.items()}

    @property
    def passed(self) -> bool:
        return self.uncovered == 0 and self.disjoint and all(self.contractible.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "covered": self.covered,
            "uncovered": self.uncovered,
            "axioms": {
                "cover": self.uncovered == 0,
                "same_level_disjoint": self.disjoint,
                "contractible": all(self.contractible.values()),
            },
            "same_level_overlaps": [list(p) for p in self.same_level_overlaps],
            "thickenings": [
                {
                    "critical_point": k,
                    "vertices": self.vertex_counts[k],
                    "reduced_betti": list(self.reduced_betti[k]),
                    "contractible": self.contractible[k],
                }
                for k in sorted(self.reduced_betti)
            ],
            "owner": [int(o) for o in self.owner],
        }


def verify_cover(
    ths: Sequence[Thickening],
    mesh: Mesh,
    cx: Optional[ChainComplexGF2] = None,
    level_tol: float = 1e-8,
) -> CoverReport:
    """检查并集覆盖全部顶点、同层互不相交、各加厚同调可缩"""
    cx = (cx or complex_of(mesh)).ambient
    owner = np.full(mesh.V, -1, dtype=int)
    for th in ths:
        idx = np.fromiter(th.vertices, dtype=int)
        free = idx[owner[idx] < 0]
        owner[free] = th.critical.id

    overlaps: List[Tuple[int, int]] = []
    for a, b in combinations(ths, 2):
        if abs(a.value - b.value) <= level_tol and a.vertices & b.vertices:
            overlaps.append((a.critical.id, b.critical.id))

    report = CoverReport(
        owner=owner,
        uncovered=int((owner < 0).sum()),
        same_level_overlaps=overlaps,
        reduced_betti={th.critical.id: reduced_betti_numbers(cx.induced(th.vertices)) for th in ths},
        vertex_counts={th.critical.id: len(th) for th in ths},
    )
    if report.uncovered:
        logger.warning(f"{report.uncovered}/{mesh.V} 个顶点未被覆盖")
    for a, b in overlaps:
        logger.warning(f"同层加厚 {a} 与 {b} 相交")
    for k, ok in report.contractible.items():
        if not ok:
            logger.warning(f"加厚 {k} 的约化 Betti 数非零: {report.reduced_betti[k]}")
    logger.info(f"覆盖检查: {'通过' if report.passed else '未通过'}（{report.covered}/{mesh.V}）")
    return report
