"""顶点集合的带保护带隶属判定"""

from __future__ import annotations

from typing import Iterable, Optional, Union

import numpy as np

from ..entities import Membership
from ..geometry.mesh import Mesh
from ..geometry.surfaces import as_batch

# classify 返回的整数编码
OUT, IN, BORDER = 0, 1, 2

_CODES = {OUT: Membership.OUT, IN: Membership.IN, BORDER: Membership.BORDER}

# 每次查询的近邻上限
_MAX_NEIGHBOURS = 48


class MembershipOracle:
    """判断任意坐标卡点是否属于网格顶点集合

    取距离不超过（最近距离 + 一个平均边长）的顶点：全在集合内为 IN，
    全不在为 OUT，否则为 BORDER。
    """

    def __init__(self, mesh: Mesh, vertices: Iterable[int], band: Optional[float] = None):
        self.mesh = mesh
        self.mask = np.zeros(mesh.V, dtype=bool)
        idx = np.fromiter(vertices, dtype=int)
        self.mask[idx] = True
        self.band = mesh.mean_edge_length if band is None else float(band)
        self.k = min(mesh.V, _MAX_NEIGHBOURS)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def classify(self, points) -> np.ndarray:
        """批量判定，返回 OUT / IN / BORDER 编码数组"""
        U, _ = as_batch(points, self.mesh.dim)
        codes = np.full(U.shape[0], BORDER, dtype=np.int8)
        finite = np.all(np.isfinite(U), axis=1)
        if not finite.any():
            return codes
        if not self.mask.any():
            codes[finite] = OUT
            return codes

        X = self.mesh.surface.chart(U[finite])
        dist, idx = self.mesh.tree.query(X, k=self.k)
        dist = dist.reshape(X.shape[0], -1)
        idx = idx.reshape(X.shape[0], -1)
        near = dist <= dist[:, :1] + self.band
        inside = self.mask[idx]
        all_in = np.all(inside | ~near, axis=1)
        none_in = np.all(~inside | ~near, axis=1)
        sub = np.where(all_in, IN, np.where(none_in, OUT, BORDER)).astype(np.int8)
        codes[finite] = sub
        return codes

    def __call__(self, point) -> Union[Membership, np.ndarray]:
        codes = self.classify(point)
        if np.ndim(point) <= 1 and codes.size == 1:
            return _CODES[int(codes[0])]
        return np.asarray([_CODES[int(c)] for c in codes], dtype=object)
