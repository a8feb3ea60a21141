"""GF(2) 单纯链复形（绝对或相对）

单纯形为排好序的顶点元组，每个次数内按字典序排列；全局编号按次数优先。
相对复形 (K, A) 直接去掉 A 的单纯形（商链群），边缘中落在 A 的面被丢弃。
"""

from __future__ import annotations

import hashlib
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
from scipy import sparse

from ..errors import NotASubcomplexError
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger
from .reduction import ColumnReduction

logger = setup_logger("homology")

Simplex = Tuple[int, ...]


def _faces(s: Simplex) -> List[Simplex]:
    return [s[:i] + s[i + 1 :] for i in range(len(s))] if len(s) > 1 else []


def _closure_missing(simplices: Set[Simplex]) -> Optional[Tuple[Simplex, Simplex]]:
    for s in simplices:
        for f in _faces(s):
            if f not in simplices:
                return s, f
    return None


def _digest(*groups: Iterable[Simplex]) -> str:
    h = hashlib.sha256()
    for g in groups:
        h.update(repr(sorted(g)).encode("utf-8"))
        h.update(b"|")
    return h.hexdigest()[:16]


class ChainComplexGF2:
    """GF(2) 链复形

    Attributes:
        simplices: 每个次数的单纯形列表（字典序，不含 A）
        dim: 全复形 K 的维数（空复形为 -1）
        complex_id: 由 (K, A) 决定的确定性编号
        ambient_id: 全复形 K 的编号（绝对复形与 complex_id 相同）
    """

    def __init__(self, simplices: Iterable[Simplex], relative: Iterable[Simplex] = ()):
        total = {tuple(sorted(int(v) for v in s)) for s in simplices}
        sub = {tuple(sorted(int(v) for v in s)) for s in relative}
        missing = _closure_missing(total)
        if missing:
            raise NotASubcomplexError(f"单纯形 {missing[0]} 的面 {missing[1]} 不在复形中")
        if not sub <= total:
            extra = min(sub - total)
            raise NotASubcomplexError(f"A 的单纯形 {extra} 不在 K 中")
        missing = _closure_missing(sub)
        if missing:
            raise NotASubcomplexError(f"A 不是子复形：{missing[0]} 的面 {missing[1]} 不在 A 中")

        self.dim = max((len(s) - 1 for s in total), default=-1)
        self.is_relative = bool(sub)
        self._total = frozenset(total)
        self._sub = frozenset(sub)
        kept = total - sub
        self.simplices: List[List[Simplex]] = [
            sorted(s for s in kept if len(s) == k + 1) for k in range(self.dim + 1)
        ]
        self.index: List[Dict[Simplex, int]] = [
            {s: i for i, s in enumerate(level)} for level in self.simplices
        ]
        self.offsets = np.concatenate([[0], np.cumsum([len(level) for level in self.simplices])]).astype(int)
        self.complex_id = _digest(total, sub)
        self.ambient_id = _digest(total, ())

    # ============ 构造 ============

    @classmethod
    def from_mesh(
        cls,
        mesh: Mesh,
        vertices: Optional[Iterable[int]] = None,
        relative_vertices: Optional[Iterable[int]] = None,
    ) -> "ChainComplexGF2":
        """网格（或顶点子集诱导的满子复形），可选相对于顶点子集 A 诱导的满子复形"""
        keep = np.ones(mesh.V, dtype=bool) if vertices is None else _mask(mesh.V, vertices)
        total = _induced(mesh, keep)
        sub: List[Simplex] = []
        if relative_vertices is not None:
            amask = _mask(mesh.V, relative_vertices)
            if np.any(amask & ~keep):
                raise NotASubcomplexError("A 的顶点不全在 K 中")
            sub = _induced(mesh, amask)
        return cls(total, sub)

    @cached_property
    def ambient(self) -> "ChainComplexGF2":
        """全复形 K（绝对）"""
        if not self.is_relative:
            return self
        return ChainComplexGF2(self._total)

    def induced(self, vertices: Iterable[int]) -> "ChainComplexGF2":
        """K 中由顶点子集诱导的满子复形（绝对）"""
        vs = {int(v) for v in vertices}
        return ChainComplexGF2(s for s in self._total if all(v in vs for v in s))

    def contains(self, simplices: Iterable[Simplex]) -> bool:
        return all(tuple(s) in self._total for s in simplices)

    def in_relative_part(self, s: Simplex) -> bool:
        return s in self._sub

    # ============ 编号 ============

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def global_index(self, s: Simplex) -> int:
        k = len(s) - 1
        return int(self.offsets[k]) + self.index[k][s]

    def simplex_at(self, g: int) -> Simplex:
        k = int(np.searchsorted(self.offsets, g, side="right")) - 1
        return self.simplices[k][g - int(self.offsets[k])]

    def to_indices(self, chain: Iterable[Simplex]) -> Set[int]:
        """单纯形集合 -> 全局编号（A 中的单纯形丢弃）"""
        out: Set[int] = set()
        for s in chain:
            s = tuple(s)
            k = len(s) - 1
            if 0 <= k <= self.dim and s in self.index[k]:
                out ^= {int(self.offsets[k]) + self.index[k][s]}
        return out

    def to_simplices(self, indices: Iterable[int]) -> FrozenSet[Simplex]:
        return frozenset(self.simplex_at(g) for g in indices)

    # ============ 边缘 ============

    def boundary_chain(self, chain: Iterable[Simplex]) -> Set[Simplex]:
        out: Set[Simplex] = set()
        for s in chain:
            for f in _faces(tuple(s)):
                if f not in self._sub:
                    out ^= {f}
        return out

    def coboundary_chain(self, cochain: Iterable[Simplex]) -> Set[Simplex]:
        cochain = set(map(tuple, cochain))
        out: Set[Simplex] = set()
        for k in {len(s) for s in cochain}:
            if k > self.dim:
                continue
            for t in self.simplices[k]:
                if sum(f in cochain for f in _faces(t)) % 2:
                    out.add(t)
        return out

    def boundary_matrix(self, k: int) -> sparse.csc_matrix:
        """∂_k：C_k -> C_{k-1}，按局部编号"""
        rows: List[int] = []
        cols: List[int] = []
        if 1 <= k <= self.dim:
            lower = self.index[k - 1]
            for j, s in enumerate(self.simplices[k]):
                for f in _faces(s):
                    i = lower.get(f)
                    if i is not None:
                        rows.append(i)
                        cols.append(j)
        data = np.ones(len(rows), dtype=np.int64)
        return sparse.csc_matrix((data, (rows, cols)), shape=(self.count(k - 1), self.count(k)))

    def boundary_squares_zero(self) -> bool:
        """∂_{k-1}∘∂_k = 0 (mod 2)"""
        for k in range(2, self.dim + 1):
            prod = (self.boundary_matrix(k - 1) @ self.boundary_matrix(k)).tocoo()
            if np.any(prod.data % 2):
                return False
        return True

    def _cofaces(self) -> List[Set[int]]:
        cof: List[Set[int]] = [set() for _ in range(self.size)]
        for k in range(1, self.dim + 1):
            for s in self.simplices[k]:
                g = self.global_index(s)
                for f in _faces(s):
                    if f in self.index[k - 1]:
                        cof[self.global_index(f)].add(g)
        return cof

    # ============ 约化 ============

    @cached_property
    def homology_reduction(self) -> ColumnReduction:
        columns = []
        for k, level in enumerate(self.simplices):
            for s in level:
                columns.append({self.global_index(f) for f in _faces(s) if f in self.index[k - 1]} if k else set())
        red = ColumnReduction(columns)
        logger.debug(f"复形 {self.complex_id}: {self.size} 个单纯形, {len(red.pivot_col)} 个配对")
        return red

    @cached_property
    def cohomology_reduction(self) -> ColumnReduction:
        """反转编号下的上边缘矩阵约化"""
        n = self.size
        cof = self._cofaces()
        columns = [{n - 1 - c for c in cof[n - 1 - r]} for r in range(n)]
        return ColumnReduction(columns)

    def degree_of(self, g: int) -> int:
        return int(np.searchsorted(self.offsets, g, side="right")) - 1

    def homology_generators(self, k: int) -> List[int]:
        """H_k 的基：本质正单形的全局编号"""
        return [g for g in self.homology_reduction.essential if self.degree_of(g) == k]

    def cohomology_generators(self, k: int) -> List[int]:
        n = self.size
        gens = [n - 1 - r for r in self.cohomology_reduction.essential]
        return sorted(g for g in gens if self.degree_of(g) == k)

    def cycle_representative(self, g: int) -> FrozenSet[Simplex]:
        return self.to_simplices(self.homology_reduction.V[g])

    def cocycle_representative(self, g: int) -> FrozenSet[Simplex]:
        n = self.size
        return self.to_simplices(n - 1 - r for r in self.cohomology_reduction.V[n - 1 - g])

    def homology_coordinates(self, k: int, chain: Iterable[Simplex]) -> np.ndarray:
        """闭链在 homology_generators(k) 下的坐标"""
        gens = self.homology_generators(k)
        found = self.homology_reduction.coordinates(self.to_indices(chain))
        return np.array([1 if g in found else 0 for g in gens], dtype=np.uint8)

    def cohomology_coordinates(self, k: int, cochain: Iterable[Simplex]) -> np.ndarray:
        n = self.size
        gens = self.cohomology_generators(k)
        found_rev = self.cohomology_reduction.coordinates(n - 1 - g for g in self.to_indices(cochain))
        found = {n - 1 - r for r in found_rev}
        return np.array([1 if g in found else 0 for g in gens], dtype=np.uint8)

    def __repr__(self) -> str:
        counts = ",".join(str(len(level)) for level in self.simplices)
        rel = " rel" if self.is_relative else ""
        return f"ChainComplexGF2({self.complex_id}{rel}: [{counts}])"


def _mask(n: int, vertices: Iterable[int]) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(v) for v in vertices), dtype=int)
    if idx.size:
        m[idx] = True
    return m


def _induced(mesh: Mesh, keep: np.ndarray) -> List[Simplex]:
    simplices: List[Simplex] = [(int(v),) for v in np.flatnonzero(keep)]
    for e in mesh.edges[np.all(keep[mesh.edges], axis=1)]:
        simplices.append(tuple(int(v) for v in e))
    if mesh.F:
        for t in mesh.triangles[np.all(keep[mesh.triangles], axis=1)]:
            simplices.append(tuple(int(v) for v in t))
    return simplices


def complex_of(
    mesh: Mesh,
    vertices: Optional[Iterable[int]] = None,
    relative_vertices: Optional[Iterable[int]] = None,
) -> ChainComplexGF2:
    """网格或顶点子集的链复形，可选相对于子集 A

    Raises:
        NotASubcomplexError: A 不在 K 中
    """
    cx = ChainComplexGF2.from_mesh(mesh, vertices, relative_vertices)
    if not cx.boundary_squares_zero():
        raise RuntimeError(f"复形 {cx.complex_id} 的 ∂² ≠ 0")
    return cx
