"""Betti 数、上积长度、从属数与 LS 范畴界"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import InvalidCoverError
from ..utils.logger import setup_logger
from .classes import CohomologyClass, HomologyClass, cohomology_basis, homology_basis
from .complex import ChainComplexGF2
from .products import cap, cup
from .reduction import gf2_solve, in_span

logger = setup_logger("homology")

# 枚举非零类时每个次数的基大小上限
MAX_ENUMERATED_RANK = 10


def betti_numbers(cx: ChainComplexGF2) -> Tuple[int, ...]:
    return tuple(len(cx.homology_generators(k)) for k in range(cx.dim + 1))


def reduced_betti_numbers(cx: ChainComplexGF2) -> Tuple[int, ...]:
    """β̃₀ = β₀ − 1；空复形为 (-1,)，不会被当成可缩"""
    if cx.dim < 0:
        return (-1,)
    b = list(betti_numbers(cx))
    if not cx.is_relative:
        b[0] -= 1
    return tuple(b)


def is_acyclic(cx: ChainComplexGF2) -> bool:
    return all(b == 0 for b in reduced_betti_numbers(cx))


def coboundary_squares_zero(cx: ChainComplexGF2, cochains: Iterable[Iterable]) -> bool:
    """δδ = 0 在给定上链上成立"""
    return all(not cx.coboundary_chain(cx.coboundary_chain(c)) for c in cochains)


# ============ 上积长度 ============


def cuplength(cx: ChainComplexGF2) -> int:
    """最大的 k 使得某 k 个正次数上同调类之积非零

    上积在 GF(2) 上多重线性，只需搜索基元素的乘积；总次数超过维数的组合直接跳过。
    """
    basis: List[CohomologyClass] = []
    for p in range(1, cx.dim + 1):
        basis.extend(cohomology_basis(cx, p))
    best = 0
    for k in range(1, cx.dim + 1):
        found = False
        for combo in combinations_with_replacement(range(len(basis)), k):
            if sum(basis[i].degree for i in combo) > cx.dim:
                continue
            prod = basis[combo[0]]
            for i in combo[1:]:
                prod = cup(prod, basis[i])
            if not prod.is_zero():
                found = True
                break
        if not found:
            break
        best = k
    logger.debug(f"复形 {cx.complex_id}: cuplength = {best}")
    return best


# ============ 从属数 ============


@dataclass(frozen=True)
class SubordinationChain:
    """b₁ < b₂ < … < b_{k+1}，witnesses[i] 满足 classes[i] = witnesses[i] ∩ classes[i+1]"""

    classes: List[HomologyClass]
    witnesses: List[CohomologyClass]

    @property
    def length(self) -> int:
        return max(len(self.classes) - 1, 0)

    @property
    def degrees(self) -> List[int]:
        return [c.degree for c in self.classes]

    def to_dict(self) -> Dict:
        return {
            "length": self.length,
            "degrees": self.degrees,
            "witness_degrees": [w.degree for w in self.witnesses],
        }


@dataclass
class _Node:
    cls: HomologyClass
    coords: np.ndarray
    caps: Dict[int, List[np.ndarray]] = field(default_factory=dict)


def _combine(basis: Sequence, coeffs: Iterable[int], make) -> object:
    support = frozenset()
    for b, c in zip(basis, coeffs):
        if c:
            support = support ^ b.simplices
    return make(support)


def _nonzero_classes(cx: ChainComplexGF2, k: int) -> List[HomologyClass]:
    basis = homology_basis(cx, k)
    if len(basis) > MAX_ENUMERATED_RANK:
        raise ValueError(f"H_{k} 的秩 {len(basis)} 超过可枚举上限 {MAX_ENUMERATED_RANK}")
    out = []
    for coeffs in product((0, 1), repeat=len(basis)):
        if any(coeffs):
            out.append(_combine(basis, coeffs, lambda s: HomologyClass.of(cx, k, s)))
    return out


def subordination_chain(cx: ChainComplexGF2) -> SubordinationChain:
    """最长从属链

    b' < b 当且仅当存在正次数 ω 使 b' = ω ∩ b；ω 在 H^p 基上的系数由 GF(2) 线性方程给出。
    关系按次数严格递增，在有向无环图上取最长路。
    """
    ambient = cx.ambient
    omegas = {p: cohomology_basis(ambient, p) for p in range(1, cx.dim + 1)}
    nodes: List[_Node] = []
    for k in range(cx.dim + 1):
        for c in _nonzero_classes(cx, k):
            nodes.append(_Node(c, c.coordinates()))
    if not nodes:
        return SubordinationChain([], [])

    def cap_images(node: _Node, p: int) -> List[np.ndarray]:
        if p not in node.caps:
            node.caps[p] = [cap(w, node.cls).coordinates() for w in omegas[p]]
        return node.caps[p]

    # nodes 已按次数排好序
    best = [0] * len(nodes)
    prev: List[Optional[int]] = [None] * len(nodes)
    for j, hi in enumerate(nodes):
        for i in range(j):
            lo = nodes[i]
            p = hi.cls.degree - lo.cls.degree
            if p <= 0 or best[i] + 1 <= best[j]:
                continue
            if in_span(cap_images(hi, p), lo.coords):
                best[j] = best[i] + 1
                prev[j] = i

    end = int(np.argmax(best))
    chain = [end]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    chain.reverse()

    classes = [nodes[i].cls for i in chain]
    witnesses: List[CohomologyClass] = []
    for i, j in zip(chain, chain[1:]):
        p = nodes[j].cls.degree - nodes[i].cls.degree
        coeffs = gf2_solve(cap_images(nodes[j], p), nodes[i].coords)
        witnesses.append(
            _combine(omegas[p], coeffs, lambda s, p=p: CohomologyClass.of(ambient, p, s))  # type: ignore[arg-type]
        )
    logger.debug(f"复形 {cx.complex_id}: 从属链次数 {[c.degree for c in classes]}")
    return SubordinationChain(classes, witnesses)


def subordination_number(cx: ChainComplexGF2) -> int:
    return subordination_chain(cx).length


# ============ 范畴界 ============


@dataclass(frozen=True)
class CatBounds:
    """cupp + 1 ≤ cat ≤ min(1 + dim, 覆盖大小)"""

    lower: int
    upper: int
    cuplength: int
    dimension: int
    cover_size: Optional[int] = None

    @property
    def exact(self) -> Optional[int]:
        return self.lower if self.lower == self.upper else None

    def as_tuple(self) -> Tuple[int, int]:
        return self.lower, self.upper

    def to_dict(self) -> Dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "cuplength": self.cuplength,
            "dimension": self.dimension,
            "cover_size": self.cover_size,
        }


def validate_cover(cx: ChainComplexGF2, cover: Sequence[Iterable[int]]) -> None:
    """每个成员的诱导子复形约化 Betti 数全为零，且并集覆盖所有顶点

    Raises:
        InvalidCoverError: 任一条件不满足
    """
    members = [frozenset(int(v) for v in m) for m in cover]
    vertices = {s[0] for s in cx.ambient.simplices[0]} if cx.dim >= 0 else set()
    missing = vertices - frozenset().union(*members) if members else vertices
    if missing:
        raise InvalidCoverError(f"覆盖漏掉 {len(missing)} 个顶点，例如 {min(missing)}")
    for i, m in enumerate(members):
        rb = reduced_betti_numbers(cx.ambient.induced(m))
        if any(rb):
            raise InvalidCoverError(f"覆盖成员 {i} 的约化 Betti 数为 {rb}，不满足可缩代理条件")


def cat_bounds(
    cx: ChainComplexGF2,
    cover: Optional[Sequence[Iterable[int]]] = None,
    cupp: Optional[int] = None,
) -> CatBounds:
    """(cupp + 1, min(1 + dim, |cover|))

    Raises:
        InvalidCoverError: 覆盖不合法
    """
    if cover is not None:
        validate_cover(cx, cover)
    cupp = cuplength(cx) if cupp is None else cupp
    upper = 1 + cx.dim
    size = None
    if cover is not None:
        size = len(cover)
        upper = min(upper, size)
    return CatBounds(cupp + 1, upper, cupp, cx.dim, size)


# ============ 导出 ============


def write_complex_triples(cx: ChainComplexGF2, path: Union[str, Path]) -> Path:
    """边缘矩阵的 GF(2) 三元组 "k row col"，每个 ∂_k 内按 (col, row) 排序"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for k in range(1, cx.dim + 1):
        coo = cx.boundary_matrix(k).tocoo()
        for row, col in sorted(zip(coo.row.tolist(), coo.col.tolist()), key=lambda rc: (rc[1], rc[0])):
            lines.append(f"{k} {row} {col}")
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path
