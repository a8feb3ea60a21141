"""全部顶点的反向扫描

每个顶点沿反向流积分，按检查点记录进入过哪些 Conley 块 N_k；梯度低于 capture_tol
并落在某临界点附近时停止（捕获）。进入反向不变块（没有入口与反弹顶点）后也停止。
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..conley.membership import IN, MembershipOracle
from ..conley.pair import ConleyPair
from ..entities import DEFAULT_FLOW, DEFAULT_THICKEN, FlowConfig, ThickenConfig
from ..flow.integrator import BatchFlow
from ..flow.limits import match_rows
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger
from ..utils.parallel import ordered_map, thread_cap

logger = setup_logger("thicken")


@dataclass
class SweepResult:
    """反向扫描结果

    Attributes:
        vertices: 扫描的顶点
        entered: (R, P) 第 r 行的反向轨线是否进入过 pairs[p].N
        captured: (R,) 捕获的临界点编号，未捕获为 -1
        truncated: (R,) 到达时间上限仍在运动
        failed: (R,) 步长下溢
    """

    vertices: np.ndarray
    entered: np.ndarray
    captured: np.ndarray
    truncated: np.ndarray
    failed: np.ndarray

    def region(self, p: int, pair: ConleyPair) -> frozenset:
        """N ∪ 反向进入 N ∪ 反向收敛到 x 的顶点"""
        hit = self.entered[:, p] | (self.captured == pair.critical.id)
        return frozenset(int(v) for v in self.vertices[hit]) | pair.N


def _sweep_rows(
    field: ScalarField,
    mesh: Mesh,
    vertices: np.ndarray,
    pairs: Sequence[ConleyPair],
    critical: Sequence[CriticalPoint],
    config: ThickenConfig,
    flow: FlowConfig,
) -> SweepResult:
    R, P = vertices.size, len(pairs)
    oracles = [MembershipOracle(mesh, pair.N) for pair in pairs]
    # 没有入口与反弹顶点的块反向不变，进入后无需继续
    sticky = np.asarray([not (pair.n_plus or pair.n_zero) for pair in pairs], dtype=bool)

    entered = np.zeros((R, P), dtype=bool)
    for p, pair in enumerate(pairs):
        entered[:, p] = np.isin(vertices, np.fromiter(pair.N, dtype=int))
    captured = np.full(R, -1, dtype=int)

    bf = BatchFlow(field, mesh.params[vertices], direction=-1, config=flow)

    def settle() -> None:
        rows = np.flatnonzero(bf.active)
        if rows.size == 0:
            return
        grad = bf.grad_norms()[rows]
        small = rows[grad < flow.capture_tol]
        if small.size:
            captured[small] = match_rows(field, bf.points[small], critical, flow.match_radius)
            bf.deactivate(small)
        if sticky.any():
            bf.deactivate(np.flatnonzero(bf.active & entered[:, sticky].any(axis=1)))

    settle()
    for _ in range(math.ceil(config.horizon / config.check_dt)):
        if not bf.active.any():
            break
        bf.advance(config.check_dt)
        rows = np.flatnonzero(bf.active)
        if rows.size:
            pts = bf.points[rows]
            for p, oracle in enumerate(oracles):
                todo = ~entered[rows, p]
                if todo.any():
                    codes = oracle.classify(pts[todo])
                    entered[rows[todo][codes == IN], p] = True
        settle()

    truncated = bf.active.copy()
    return SweepResult(
        vertices=vertices,
        entered=entered,
        captured=captured,
        truncated=truncated,
        failed=bf.failed.copy(),
    )


def backward_sweep(
    field: ScalarField,
    mesh: Mesh,
    pairs: Sequence[ConleyPair],
    critical: Sequence[CriticalPoint],
    config: ThickenConfig = DEFAULT_THICKEN,
    flow: FlowConfig = DEFAULT_FLOW,
    vertices: Optional[np.ndarray] = None,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """对网格顶点（默认全部）做反向扫描，按线程上限分块并行"""
    vs = np.arange(mesh.V) if vertices is None else np.asarray(vertices, dtype=int)
    workers = max_workers or thread_cap()
    chunks: List[np.ndarray] = [c for c in np.array_split(vs, max(1, workers)) if c.size]
    parts = ordered_map(
        lambda chunk: _sweep_rows(field, mesh, chunk, pairs, critical, config, flow),
        chunks,
        max_workers=workers,
        label="sweep",
    )
    if not parts:
        empty = np.zeros(0, dtype=bool)
        return SweepResult(vs, np.zeros((0, len(pairs)), dtype=bool), np.zeros(0, dtype=int), empty, empty)
    result = SweepResult(
        vertices=np.concatenate([r.vertices for r in parts]),
        entered=np.concatenate([r.entered for r in parts]),
        captured=np.concatenate([r.captured for r in parts]),
        truncated=np.concatenate([r.truncated for r in parts]),
        failed=np.concatenate([r.failed for r in parts]),
    )
    n_trunc = int(result.truncated.sum())
    if n_trunc:
        logger.warning(f"{n_trunc} 个顶点在时间上限 {config.horizon:g} 内未判定，已排除")
    if result.failed.any():
        logger.warning(f"{int(result.failed.sum())} 个顶点的反向积分步长下溢")
    logger.debug(
        f"反向扫描 {vs.size} 个顶点: 捕获 {int((result.captured >= 0).sum())}, 截断 {n_trunc}"
    )
    return result
