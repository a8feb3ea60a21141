"""次水平集对 (M^b, M^a) 的下星过滤

单纯形的过滤值取其顶点 f 值的最大值，M^s 即 {f ≤ s} 诱导的满子复形。
同值时按维数、再按字典序排列，面总在余面之前。
"""

from __future__ import annotations

from functools import cached_property
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from ..entities import DEFAULT_MINIMAX, MinimaxConfig
from ..errors import ClassNotInComplexError, InvalidParametersError
from ..geometry.mesh import Mesh
from ..homology.classes import HomologyClass
from ..homology.complex import ChainComplexGF2, Simplex, complex_of
from ..homology.reduction import ColumnReduction
from ..utils.logger import setup_logger

logger = setup_logger("minimax")


def _faces(s: Simplex) -> List[Simplex]:
    return [s[:i] + s[i + 1 :] for i in range(len(s))] if len(s) > 1 else []


class Filtration:
    """相对复形 (M^b, M^a) 上按下星值排序的过滤

    Attributes:
        mesh: 网格（顶点值即 f）
        a, b: 阈值，a < b
        complex: 相对链复形，a 低于全部顶点值时为绝对复形
        simplices: 过滤顺序下的单纯形
        values: 对应的过滤值（单调不减）
    """

    def __init__(self, mesh: Mesh, a: float, b: float):
        if not a < b:
            raise InvalidParametersError(f"需要 a < b，得到 a={a}, b={b}")
        self.mesh = mesh
        self.a = float(a)
        self.b = float(b)
        f = mesh.values
        lower = np.flatnonzero(f <= a)
        self.complex: ChainComplexGF2 = complex_of(
            mesh, np.flatnonzero(f <= b), lower if lower.size else None
        )

        cx = self.complex
        keyed = [
            (float(np.max(f[list(s)])), k, s)
            for k in range(cx.dim + 1)
            for s in cx.simplices[k]
        ]
        keyed.sort()
        self.simplices: List[Simplex] = [s for _, _, s in keyed]
        self.values = np.asarray([v for v, _, _ in keyed], dtype=float)
        self.position: Dict[Simplex, int] = {s: i for i, s in enumerate(self.simplices)}
        logger.debug(
            f"过滤 ({self.a:g}, {self.b:g}]: {len(self.simplices)} 个单纯形, 复形 {cx.complex_id}"
        )

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def is_global(self) -> bool:
        """(M^b, M^a) = (M, ∅)"""
        f = self.mesh.values
        return self.a < float(f.min()) and self.b >= float(f.max())

    @cached_property
    def reduction(self) -> ColumnReduction:
        columns = [{self.position[g] for g in _faces(s) if g in self.position} for s in self.simplices]
        red = ColumnReduction(columns)
        logger.debug(f"过滤约化完成: {len(red.pivot_col)} 个配对, {len(red.essential)} 个本质类")
        return red

    @cached_property
    def thresholds(self) -> np.ndarray:
        """扫描用阈值：a、(a, b] 内的全部顶点值、b"""
        f = self.mesh.values
        inner = np.unique(f[(f > self.a) & (f <= self.b)])
        return np.unique(np.concatenate([[self.a], inner, [self.b]]))

    def degree_of(self, j: int) -> int:
        return len(self.simplices[j]) - 1

    def count_below(self, s: float) -> int:
        """M^s 中（A 之外）的单纯形个数，即过滤前缀的长度"""
        return int(np.searchsorted(self.values, s, side="right"))

    def previous_threshold(self, s: float) -> float:
        """严格小于 s 的最大扫描阈值（不低于 a）"""
        th = self.thresholds
        below = th[th < s]
        return float(below[-1]) if below.size else self.a

    def to_positions(self, chain: Iterable[Simplex]) -> Set[int]:
        """链 -> 过滤位置，落在 M^a 中的单纯形丢弃

        Raises:
            ClassNotInComplexError: 单纯形不在 M^b 中
        """
        out: Set[int] = set()
        for s in chain:
            s = tuple(s)
            j = self.position.get(s)
            if j is not None:
                out ^= {j}
            elif not self.complex.in_relative_part(s):
                raise ClassNotInComplexError(f"单纯形 {s} 不在 M^{self.b:g} 中")
        return out

    def essential_classes(self, k: int) -> List[HomologyClass]:
        """H_k(M^b, M^a) 的持续性适配基，按出生值排序"""
        red = self.reduction
        return [
            HomologyClass.of(self.complex, k, (self.simplices[i] for i in red.V[j]))
            for j in red.essential
            if self.degree_of(j) == k
        ]

    def births(self, k: int) -> List[float]:
        return [float(self.values[j]) for j in self.reduction.essential if self.degree_of(j) == k]

    def birth_of(self, chain: Set[int]) -> Optional[float]:
        """“来自 H(M^s, M^a)” 的最小 s：闭链在本质基下坐标的最大出生值，零类为 None"""
        found = self.reduction.coordinates(chain)
        if not found:
            return None
        return float(max(self.values[j] for j in found))

    def _eliminate(self, chain: Set[int], limit: int) -> Set[int]:
        z = set(chain)
        red = self.reduction
        while z:
            low = max(z)
            if low < limit:
                break
            k = red.pivot_col.get(low)
            if k is None:
                break
            z ^= red.R[k]
        return z

    def vanishes_at(self, chain: Set[int], s: float) -> bool:
        """j^s_*(c) = 0：闭链加上 M^b 中的边缘后能否落进 M^s"""
        limit = self.count_below(s)
        z = self._eliminate(chain, limit)
        return not z or max(z) < limit

    def death_of(self, chain: Set[int]) -> Optional[float]:
        """j^s_*(c) = 0 的最小 s，零类为 None"""
        z = self._eliminate(chain, 0)
        if not z:
            return None
        return float(self.values[max(z)])

    def scan(self, chain: Set[int]) -> List[Tuple[float, bool]]:
        return [(float(s), self.vanishes_at(chain, s)) for s in self.thresholds]

    def quotient_vanishes(self, cls: HomologyClass, s: float) -> bool:
        """在相对复形 (M^b, M^s) 上重新约化判定 j^s_*(c) = 0"""
        f = self.mesh.values
        upper = np.flatnonzero(f <= self.b)
        lower = np.flatnonzero(f <= s)
        cx = complex_of(self.mesh, upper, lower if lower.size else None)
        if cx.size == 0:
            return True
        return not cx.homology_coordinates(cls.degree, cls.simplices).any()

    def support_max(self, chain: Iterable[Simplex]) -> float:
        """代表元支撑上 f 的最大值"""
        f = self.mesh.values
        return float(max(np.max(f[list(s)]) for s in chain))


def build_filtration(
    mesh: Mesh,
    a: Optional[float] = None,
    b: Optional[float] = None,
    config: MinimaxConfig = DEFAULT_MINIMAX,
) -> Filtration:
    """缺省 a = min f − margin, b = max f + margin，此时 H_*(M^b, M^a) ≅ H_*(M)"""
    f = mesh.values
    if a is None:
        a = float(f.min()) - config.margin
    if b is None:
        b = float(f.max()) + config.margin
    return Filtration(mesh, a, b)
