"""Conley 对 (N, L) 的构造

N 是 {f ≤ c+ε} ∩ {f∘φ_τ ≥ c-ε} 中包含临界点 x 的连通分支，
L = {p ∈ N : f(φ_2τ p) ≤ c-ε}。集合都是网格顶点集，连通性取网格图。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional, Set

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..entities import DEFAULT_CONLEY, DEFAULT_FLOW, ConleyConfig, FlowConfig
from ..errors import EmptyBlockError, InvalidParametersError, NonregularEpsilonError
from ..flow.integrator import BatchFlow
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger

logger = setup_logger("conley")


@dataclass(frozen=True)
class ConleyPair:
    """孤立临界点的 Conley 对

    Attributes:
        critical: 临界点 x
        c: f(x)
        epsilon, tau: 构造参数
        N, L: 顶点集
        n_plus, n_zero, n_minus: 入口 / 反弹 / 出口轨迹集（N 的边界顶点划分）
        interior: N 去掉边界顶点
        start_vertex: x 的最近顶点
    """

    critical: CriticalPoint
    c: float
    epsilon: float
    tau: float
    N: FrozenSet[int]
    L: FrozenSet[int]
    n_plus: FrozenSet[int]
    n_zero: FrozenSet[int]
    n_minus: FrozenSet[int]
    interior: FrozenSet[int]
    start_vertex: int

    @property
    def boundary(self) -> FrozenSet[int]:
        return self.n_plus | self.n_zero | self.n_minus

    @property
    def is_local_minimum_pair(self) -> bool:
        return not self.L

    def to_dict(self) -> Dict[str, Any]:
        return {
            "critical_point": self.critical.id,
            "c": float(self.c),
            "epsilon": float(self.epsilon),
            "tau": float(self.tau),
            "N": sorted(self.N),
            "L": sorted(self.L),
            "Nplus": sorted(self.n_plus),
            "Nzero": sorted(self.n_zero),
            "Nminus": sorted(self.n_minus),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], critical: CriticalPoint, start_vertex: int) -> "ConleyPair":
        """从导出格式恢复；start_vertex 不在导出格式中，由调用方按网格给出"""
        if int(data["critical_point"]) != critical.id:
            raise InvalidParametersError(
                f"Conley 对属于临界点 {data['critical_point']}，给出的是 {critical.id}"
            )
        N = frozenset(int(v) for v in data["N"])
        n_plus = frozenset(int(v) for v in data["Nplus"])
        n_zero = frozenset(int(v) for v in data["Nzero"])
        n_minus = frozenset(int(v) for v in data["Nminus"])
        return cls(
            critical=critical,
            c=float(data["c"]),
            epsilon=float(data["epsilon"]),
            tau=float(data["tau"]),
            N=N,
            L=frozenset(int(v) for v in data["L"]),
            n_plus=n_plus,
            n_zero=n_zero,
            n_minus=n_minus,
            interior=N - (n_plus | n_zero | n_minus),
            start_vertex=int(start_vertex),
        )


class _FlowMemo:
    """按顶点缓存 f(φ_τ v) 与 f(φ_2τ v)"""

    def __init__(self, field: ScalarField, mesh: Mesh, tau: float, config: FlowConfig):
        self.field = field
        self.mesh = mesh
        self.tau = tau
        self.config = config
        self.f_tau = np.full(mesh.V, np.nan)
        self.f_2tau = np.full(mesh.V, np.nan)
        self.done = np.zeros(mesh.V, dtype=bool)
        self.failed = 0

    def ensure(self, vertices: np.ndarray) -> None:
        todo = vertices[~self.done[vertices]]
        if todo.size == 0:
            return
        flow = BatchFlow(self.field, self.mesh.params[todo], direction=1, config=self.config)
        flow.advance(self.tau)
        self.f_tau[todo] = flow.values()
        flow.advance(self.tau)
        self.f_2tau[todo] = flow.values()
        self.failed += int(flow.failed.sum())
        self.done[todo] = True


def check_regular(
    field: ScalarField,
    mesh: Mesh,
    c: float,
    epsilon: float,
    grad_floor: float = DEFAULT_CONLEY.grad_floor,
) -> float:
    """检查 c±ε 是正则值：带 |f - (c±ε)| ≤ 2·平均边差 上梯度不低于 grad_floor

    Returns:
        两条带上的最小梯度范数（带内无顶点时为 inf）

    Raises:
        NonregularEpsilonError: 最小梯度低于 grad_floor
    """
    delta = 2.0 * mesh.mean_edge_gap
    smallest = float("inf")
    for level in (c + epsilon, c - epsilon):
        band = np.abs(mesh.values - level) <= delta
        if not band.any():
            continue
        g = float(np.min(field.grad_norm(mesh.params[band])))
        smallest = min(smallest, g)
        if g < grad_floor:
            raise NonregularEpsilonError(
                f"水平 {level:.6g} 附近梯度范数 {g:.3e} 低于 {grad_floor:g}，请扰动 ε={epsilon:g}"
            )
    return smallest


def build_conley_pair(
    field: ScalarField,
    mesh: Mesh,
    x: CriticalPoint,
    epsilon: float,
    tau: float,
    config: ConleyConfig = DEFAULT_CONLEY,
    flow: FlowConfig = DEFAULT_FLOW,
) -> ConleyPair:
    """构造临界点 x 的 Conley 对

    从 x 的最近顶点出发逐层广度优先扩张，每层的候选顶点一次批量积分。

    Raises:
        InvalidParametersError: ε ≤ 0 或 τ < 1
        NonregularEpsilonError: c±ε 不是数值正则值
        EmptyBlockError: x 的最近顶点本身不满足 N 的条件
    """
    if not epsilon > 0:
        raise InvalidParametersError(f"ε 必须为正: {epsilon}")
    if not tau >= 1:
        raise InvalidParametersError(f"τ 必须不小于 1: {tau}")

    c = float(x.value)
    check_regular(field, mesh, c, epsilon, config.grad_floor)

    tol = flow.tol_level
    upper_level = c + epsilon + tol
    lower_level = c - epsilon - tol
    memo = _FlowMemo(field, mesh, tau, flow)

    def upper_bad(vs: np.ndarray) -> np.ndarray:
        return ~(mesh.values[vs] <= upper_level)

    def lower_bad(vs: np.ndarray) -> np.ndarray:
        return ~(memo.f_tau[vs] >= lower_level)

    start = int(mesh.nearest_vertex(x.point))
    first = np.array([start])
    memo.ensure(first)
    if upper_bad(first)[0] or lower_bad(first)[0]:
        raise EmptyBlockError(
            f"临界点 {x.id} 的最近顶点 {start} 不满足 N 的条件（ε={epsilon:g}, τ={tau:g}）"
        )

    members: Set[int] = {start}
    rejected: Set[int] = set()
    frontier = [start]
    while frontier:
        candidates = sorted(
            {int(w) for v in frontier for w in mesh.neighbors(v)} - members - rejected
        )
        if not candidates:
            break
        cand = np.asarray(candidates, dtype=int)
        memo.ensure(cand)
        ok = ~(upper_bad(cand) | lower_bad(cand))
        frontier = cand[ok].tolist()
        members.update(frontier)
        rejected.update(cand[~ok].tolist())

    if memo.failed:
        logger.warning(f"{memo.failed} 个顶点的积分步长下溢，按不满足条件处理")

    n_plus: Set[int] = set()
    n_zero: Set[int] = set()
    n_minus: Set[int] = set()
    for v in members:
        outside = np.asarray([w for w in mesh.neighbors(v) if w not in members], dtype=int)
        if outside.size == 0:
            continue
        memo.ensure(outside)
        up = bool(upper_bad(outside).any())
        low = bool(lower_bad(outside).any())
        if up and low:
            n_zero.add(v)
        elif up:
            n_plus.add(v)
        else:
            n_minus.add(v)

    block = np.asarray(sorted(members), dtype=int)
    exit_level = c - epsilon + tol
    L = frozenset(int(v) for v in block[memo.f_2tau[block] <= exit_level])
    N = frozenset(members)
    boundary = n_plus | n_zero | n_minus

    pair = ConleyPair(
        critical=x,
        c=c,
        epsilon=float(epsilon),
        tau=float(tau),
        N=N,
        L=L,
        n_plus=frozenset(n_plus),
        n_zero=frozenset(n_zero),
        n_minus=frozenset(n_minus),
        interior=frozenset(N - boundary),
        start_vertex=start,
    )
    logger.debug(
        f"临界点 {x.id}: |N|={len(N)} |L|={len(L)} |N+|={len(n_plus)} "
        f"|N0|={len(n_zero)} |N-|={len(n_minus)}"
    )
    return pair


def pair_component_counts(pair: ConleyPair, mesh: Mesh) -> Dict[str, int]:
    """N⁺、N⁰、N⁻ 与 L 的连通分支数"""
    return {
        "Nplus": mesh.component_count(pair.n_plus),
        "Nzero": mesh.component_count(pair.n_zero),
        "Nminus": mesh.component_count(pair.n_minus),
        "L": mesh.component_count(pair.L),
    }


def brute_force_block(
    field: ScalarField,
    mesh: Mesh,
    x: CriticalPoint,
    epsilon: float,
    tau: float,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Optional[FrozenSet[int]]:
    """在全部顶点上求谓词再取 x 所在分支，用于核对广度优先构造"""
    c = float(x.value)
    memo = _FlowMemo(field, mesh, tau, flow)
    memo.ensure(np.arange(mesh.V))
    ok = (mesh.values <= c + epsilon + flow.tol_level) & (memo.f_tau >= c - epsilon - flow.tol_level)
    start = int(mesh.nearest_vertex(x.point))
    if not ok[start]:
        return None
    vs = np.flatnonzero(ok)
    _, labels = connected_components(mesh.adjacency[vs][:, vs], directed=False)
    here = labels[int(np.searchsorted(vs, start))]
    return frozenset(int(v) for v in vs[labels == here])
