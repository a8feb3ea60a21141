"""环境加厚 𝒰ᵢ* = φ_{Tᵢ}⁻¹ 𝒩ᵢ

按临界值从高到低递推 Tᵢ = 𝒯ᵢ + T_{i+1}（T_{ℓ+1} = 0），𝒯ᵢ 由入口轨迹集 Nᵢ⁺ 上
反向到达出口轨迹集 Nⱼ⁻ 的时间给出。𝒩ᵢ 在网格上取最近顶点落在 Nᵢ 中的点。
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..conley.membership import MembershipOracle
from ..conley.pair import ConleyPair, build_conley_pair
from ..entities import (
    DEFAULT_CONLEY,
    DEFAULT_FLOW,
    DEFAULT_THICKEN,
    ConleyConfig,
    FlowConfig,
    ThickenConfig,
    ThickeningKind,
)
from ..errors import InvalidParametersError, NoCrossingError, StepUnderflowError
from ..flow.arrival import Locus, arrival_time
from ..flow.integrator import BatchFlow, advance
from ..flow.limits import backward_limits
from ..geometry.critical import CriticalPoint, find_critical_points
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger
from ..utils.parallel import ordered_map
from .thickening import EntranceTimeBound, Thickening

logger = setup_logger("thicken")


def _check_common_parameters(pairs: Sequence[ConleyPair]) -> None:
    params = {(p.epsilon, p.tau) for p in pairs}
    if len(params) > 1:
        raise InvalidParametersError(f"所有 Conley 对须使用相同的 (ε, τ)，得到 {sorted(params)}")


def entrance_time_bound(
    field: ScalarField,
    mesh: Mesh,
    pairs: Sequence[ConleyPair],
    i: int,
    critical: Sequence[CriticalPoint],
    config: ThickenConfig = DEFAULT_THICKEN,
    flow: FlowConfig = DEFAULT_FLOW,
) -> EntranceTimeBound:
    """𝒯ᵢ = 1 + safety · sup_{Nᵢ⁺} 𝒯ᵢ⁺，Nᵢ⁺ 为空时 𝒯ᵢ = 1

    对每个入口顶点 p 求反向极限 xⱼ，再求反向到达 Nⱼ⁻ 的时间。反向极限或到达失败的样本
    跳过并计数。

    Args:
        pairs: 全部临界点的 Conley 对（相同的 ε, τ）
        i: pairs 中的下标
    """
    _check_common_parameters(pairs)
    pair = pairs[i]
    entrance = np.asarray(sorted(pair.n_plus), dtype=int)
    if entrance.size == 0:
        return EntranceTimeBound(pair.critical.id, 1.0, 0.0, config.safety, 0)

    by_id: Dict[int, ConleyPair] = {p.critical.id: p for p in pairs}
    origins = backward_limits(field, mesh.params[entrance], critical, flow)

    def one(k: int) -> Optional[float]:
        j = int(origins[k])
        target = by_id.get(j)
        if target is None or j == pair.critical.id:
            return None
        locus = Locus.exit(target.c, target.epsilon, target.tau, MembershipOracle(mesh, target.N))
        try:
            t = arrival_time(field, mesh.params[entrance[k]], locus, flow, direction=-1)
        except (NoCrossingError, StepUnderflowError) as e:
            logger.warning(f"入口顶点 {int(entrance[k])} 反向到达 N[{j}]⁻ 失败: {e}")
            return None
        return -t

    times = ordered_map(one, list(range(entrance.size)), label="entrance")
    ok = [t for t in times if t is not None]
    skipped = len(times) - len(ok)
    if skipped:
        logger.warning(f"临界点 {pair.critical.id}: {skipped}/{entrance.size} 个入口样本被跳过")
    raw = max(ok) if ok else 0.0
    bound = EntranceTimeBound(
        critical_point=pair.critical.id,
        calT=1.0 + config.safety * raw,
        raw_sup=raw,
        safety=config.safety,
        samples=int(entrance.size),
        skipped=skipped,
    )
    logger.debug(f"𝒯[{pair.critical.id}] = {bound.calT:.6g}（sup={raw:.6g}, 样本 {entrance.size}）")
    return bound


def pullback_times(bounds: Sequence[EntranceTimeBound]) -> List[float]:
    """按临界值升序排列的 𝒯 递推出 Tᵢ = 𝒯ᵢ + T_{i+1}"""
    T = [0.0] * (len(bounds) + 1)
    for i in range(len(bounds) - 1, -1, -1):
        T[i] = bounds[i].calT + T[i + 1]
    return T[:-1]


def _nearest_in(mesh: Mesh, block: frozenset, points: np.ndarray) -> np.ndarray:
    mask = np.zeros(mesh.V, dtype=bool)
    mask[np.fromiter(block, dtype=int)] = True
    ok = np.all(np.isfinite(points), axis=1)
    hit = np.zeros(points.shape[0], dtype=bool)
    if ok.any():
        hit[ok] = mask[np.asarray(mesh.nearest_vertex(points[ok])).reshape(-1)]
    return hit


def ambient_thickenings(
    field: ScalarField,
    mesh: Mesh,
    pairs: Sequence[ConleyPair],
    critical: Sequence[CriticalPoint],
    config: ThickenConfig = DEFAULT_THICKEN,
    flow: FlowConfig = DEFAULT_FLOW,
    kind: ThickeningKind = ThickeningKind.AMBIENT_U_STAR,
) -> Tuple[List[Thickening], List[EntranceTimeBound]]:
    """全部 𝒰ᵢ* 与各自的入口时间界

    所有顶点只沿正向推进一次，依次停在递增的 Tᵢ 上判定最近顶点是否属于 Nᵢ。
    """
    _check_common_parameters(pairs)
    order = sorted(range(len(pairs)), key=lambda k: (pairs[k].c, pairs[k].critical.id))
    ordered = [pairs[k] for k in order]
    bounds = [entrance_time_bound(field, mesh, ordered, i, critical, config, flow) for i in range(len(ordered))]
    T = pullback_times(bounds)

    bf = BatchFlow(field, mesh.params, direction=1, config=flow)
    elapsed = 0.0
    regions: Dict[int, frozenset] = {}
    # T 随 i 递减，按从大到小的 i 逐段推进
    for i in range(len(ordered) - 1, -1, -1):
        bf.advance(T[i] - elapsed)
        elapsed = T[i]
        hit = _nearest_in(mesh, ordered[i].N, bf.points)
        regions[i] = frozenset(int(v) for v in np.flatnonzero(hit))
    if bf.failed.any():
        logger.warning(f"{int(bf.failed.sum())} 个顶点的正向推进步长下溢，未计入任何 𝒰*")

    ths = [
        Thickening(
            critical=ordered[i].critical,
            kind=kind,
            vertices=regions[i],
            horizon=float(T[0]),
            T=float(T[i]),
            calT=float(bounds[i].calT),
        )
        for i in range(len(ordered))
    ]
    for th in ths:
        logger.info(f"{kind.value}[{th.critical.id}]: T={th.T:.4g}, {len(th)}/{mesh.V} 个顶点")
    return ths, bounds


def ambient_homotopy(field: ScalarField, th: Thickening, lam: float, points, flow: FlowConfig = DEFAULT_FLOW) -> np.ndarray:
    """环境同伦 h_λ = φ_{λTᵢ}，λ=1 时把 𝒰ᵢ* 送进 𝒩ᵢ"""
    if th.T is None:
        raise InvalidParametersError(f"{th.kind.value} 加厚没有回拉时间")
    if not 0.0 <= lam <= 1.0:
        raise InvalidParametersError(f"λ 必须在 [0, 1] 内: {lam}")
    return advance(field, points, lam * th.T, flow)


def unstable_ambient_thickenings(
    field: ScalarField,
    mesh: Mesh,
    epsilon: float,
    tau: float,
    config: ThickenConfig = DEFAULT_THICKEN,
    conley: ConleyConfig = DEFAULT_CONLEY,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Tuple[List[Thickening], List[EntranceTimeBound]]:
    """对 -f 运行同一构造，得到不稳定侧的 𝒰ᵢ"""
    neg = field.negated()
    neg_mesh = mesh.with_field(neg)
    crit = find_critical_points(neg, neg_mesh)
    pairs = [build_conley_pair(neg, neg_mesh, x, epsilon, tau, conley, flow) for x in crit]
    return ambient_thickenings(neg, neg_mesh, pairs, crit, config, flow, kind=ThickeningKind.AMBIENT_U)
