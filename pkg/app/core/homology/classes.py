"""同调类与上同调类"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List

import numpy as np

from .complex import ChainComplexGF2, Simplex


@dataclass(frozen=True)
class HomologyClass:
    """H_k 中的类，代表元为闭链（单纯形集合）"""

    degree: int
    simplices: FrozenSet[Simplex]
    complex_id: str
    complex: ChainComplexGF2 = field(compare=False, repr=False)

    @classmethod
    def of(cls, cx: ChainComplexGF2, degree: int, chain: Iterable[Simplex]) -> "HomologyClass":
        return cls(degree, frozenset(tuple(s) for s in chain), cx.complex_id, cx)

    def coordinates(self) -> np.ndarray:
        return self.complex.homology_coordinates(self.degree, self.simplices)

    def is_zero(self) -> bool:
        return not self.coordinates().any()

    def is_cycle(self) -> bool:
        return not self.complex.boundary_chain(self.simplices)

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        if other.complex_id != self.complex_id or other.degree != self.degree:
            raise ValueError("只能在同一复形的同一次数内相加")
        return HomologyClass(self.degree, self.simplices ^ other.simplices, self.complex_id, self.complex)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "complex": self.complex_id,
            "support": [list(s) for s in sorted(self.simplices)],
        }


@dataclass(frozen=True)
class CohomologyClass:
    """H^p 中的类，代表元为上闭链"""

    degree: int
    simplices: FrozenSet[Simplex]
    complex_id: str
    complex: ChainComplexGF2 = field(compare=False, repr=False)

    @classmethod
    def of(cls, cx: ChainComplexGF2, degree: int, cochain: Iterable[Simplex]) -> "CohomologyClass":
        return cls(degree, frozenset(tuple(s) for s in cochain), cx.complex_id, cx)

    @classmethod
    def unit(cls, cx: ChainComplexGF2) -> "CohomologyClass":
        """0 次单位类（所有顶点取 1）"""
        return cls.of(cx, 0, cx.simplices[0] if cx.dim >= 0 else [])

    def coordinates(self) -> np.ndarray:
        return self.complex.cohomology_coordinates(self.degree, self.simplices)

    def is_zero(self) -> bool:
        return not self.coordinates().any()

    def is_cocycle(self) -> bool:
        return not self.complex.coboundary_chain(self.simplices)

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        if other.complex_id != self.complex_id or other.degree != self.degree:
            raise ValueError("只能在同一复形的同一次数内相加")
        return CohomologyClass(self.degree, self.simplices ^ other.simplices, self.complex_id, self.complex)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "complex": self.complex_id,
            "support": [list(s) for s in sorted(self.simplices)],
        }


def homology_basis(cx: ChainComplexGF2, k: int) -> List[HomologyClass]:
    """H_k 的基（列约化中未配对的正单形），k 超出维数时为空"""
    if not 0 <= k <= cx.dim:
        return []
    return [HomologyClass.of(cx, k, cx.cycle_representative(g)) for g in cx.homology_generators(k)]


def cohomology_basis(cx: ChainComplexGF2, k: int) -> List[CohomologyClass]:
    if not 0 <= k <= cx.dim:
        return []
    return [CohomologyClass.of(cx, k, cx.cocycle_representative(g)) for g in cx.cohomology_generators(k)]
