"""GF(2) 列约化

列存为行号集合，列加法即对称差。最低位主元法，同时记录 V（R = D·V）。
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np


class ColumnReduction:
    """上三角 GF(2) 矩阵的标准列约化

    Attributes:
        R: 约化后的列
        V: 变换列，V[j] 总包含 j 且 max(V[j]) = j
        pivot_col: 行号 -> 以其为最低位的列
    """

    def __init__(self, columns: Sequence[Iterable[int]]):
        self.n = len(columns)
        self.R: List[Set[int]] = [set(c) for c in columns]
        self.V: List[Set[int]] = [{j} for j in range(self.n)]
        self.pivot_col: Dict[int, int] = {}
        for j in range(self.n):
            col = self.R[j]
            while col:
                low = max(col)
                k = self.pivot_col.get(low)
                if k is None:
                    self.pivot_col[low] = j
                    break
                col ^= self.R[k]
                self.V[j] ^= self.V[k]

    def low(self, j: int) -> Optional[int]:
        return max(self.R[j]) if self.R[j] else None

    def is_cycle(self, j: int) -> bool:
        return not self.R[j]

    def is_essential(self, j: int) -> bool:
        """R[j] = 0 且 j 不是任何列的最低位"""
        return not self.R[j] and j not in self.pivot_col

    @property
    def essential(self) -> List[int]:
        return [j for j in range(self.n) if self.is_essential(j)]

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        """(出生, 死亡) 配对"""
        return sorted((low, j) for low, j in self.pivot_col.items())

    def coordinates(self, chain: Iterable[int]) -> Set[int]:
        """把闭链按最低位消去，返回出现的本质生成元集合

        最低位若是某列的主元则加上该列（边缘），若是本质生成元则记录并加上它的代表元。

        Raises:
            ValueError: 输入不是闭链（最低位不是正单形）
        """
        z = set(chain)
        found: Set[int] = set()
        while z:
            low = max(z)
            k = self.pivot_col.get(low)
            if k is not None:
                z ^= self.R[k]
            elif self.is_essential(low):
                found ^= {low}
                z ^= self.V[low]
            else:
                raise ValueError(f"输入不是闭链：最低位 {low} 是负单形")
        return found


def gf2_row_echelon(M) -> Tuple[np.ndarray, List[int]]:
    """GF(2) 行阶梯形，返回 (R, 主元列)"""
    R = (np.asarray(M, dtype=np.uint8) % 2).copy()
    m, n = R.shape
    pivots: List[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        hits = np.flatnonzero(R[row:, col])
        if hits.size == 0:
            continue
        found = row + int(hits[0])
        if found != row:
            R[[row, found]] = R[[found, row]]
        below = row + 1 + np.flatnonzero(R[row + 1 :, col])
        R[below] ^= R[row]
        pivots.append(col)
        row += 1
    return R, pivots


def gf2_rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(gf2_row_echelon(M)[1])


def in_span(vectors: Sequence[np.ndarray], target: np.ndarray) -> bool:
    """target 是否在 vectors 的 GF(2) 线性张成中"""
    t = np.asarray(target, dtype=np.uint8) % 2
    if not t.any():
        return True
    if len(vectors) == 0:
        return False
    S = np.asarray(vectors, dtype=np.uint8) % 2
    return gf2_rank(S) == gf2_rank(np.vstack([S, t[None, :]]))


def gf2_solve(vectors: Sequence[np.ndarray], target: np.ndarray) -> Optional[np.ndarray]:
    """求 x 使 Σ x_i·vectors[i] = target (mod 2)，无解返回 None"""
    t = np.asarray(target, dtype=np.uint8) % 2
    k = len(vectors)
    if k == 0:
        return np.zeros(0, dtype=np.uint8) if not t.any() else None
    # 增广矩阵 [A | t]，A 的列为 vectors
    A = np.column_stack([np.asarray(v, dtype=np.uint8) % 2 for v in vectors] + [t])
    R, pivots = gf2_row_echelon(A)
    if k in pivots:
        return None
    x = np.zeros(k, dtype=np.uint8)
    for row in range(len(pivots) - 1, -1, -1):
        col = pivots[row]
        x[col] = (int(R[row, k]) + int(R[row, col + 1 : k].astype(int) @ x[col + 1 : k].astype(int))) % 2
    return x
