"""前向穷竭 𝒲ᵢ = ⋃_{t≥0} φ_t 𝒩ᵢ 及其收缩同伦"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..conley.membership import OUT, MembershipOracle
from ..conley.pair import ConleyPair
from ..entities import DEFAULT_FLOW, DEFAULT_THICKEN, FlowConfig, ThickenConfig, ThickeningKind
from ..errors import ArrivalFailureError, InvalidParametersError, NoCrossingError, StepUnderflowError
from ..flow.arrival import Locus, arrival_time
from ..flow.integrator import BatchFlow, advance
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..geometry.surfaces import as_batch
from ..utils.logger import setup_logger
from .sweep import SweepResult, backward_sweep
from .thickening import Thickening

logger = setup_logger("thicken")


def _from_sweep(sweep: SweepResult, p: int, pair: ConleyPair, horizon: float) -> Thickening:
    vertices = sweep.region(p, pair)
    undecided = sweep.truncated & ~sweep.entered[:, p]
    return Thickening(
        critical=pair.critical,
        kind=ThickeningKind.FORWARD_W,
        vertices=vertices,
        horizon=horizon,
        truncated=int(undecided.sum()),
    )


def forward_thickenings(
    field: ScalarField,
    mesh: Mesh,
    pairs: Sequence[ConleyPair],
    critical: Sequence[CriticalPoint],
    config: ThickenConfig = DEFAULT_THICKEN,
    flow: FlowConfig = DEFAULT_FLOW,
    sweep: Optional[SweepResult] = None,
) -> List[Thickening]:
    """一次反向扫描得到所有 𝒲ᵢ

    顶点 v 属于 𝒲ᵢ 当且仅当 v ∈ Nᵢ，或其反向轨线在时间上限内进入 Nᵢ，或反向收敛到 xᵢ。
    """
    if sweep is None:
        sweep = backward_sweep(field, mesh, pairs, critical, config, flow)
    ths = [_from_sweep(sweep, p, pair, config.horizon) for p, pair in enumerate(pairs)]
    for th in ths:
        logger.info(
            f"𝒲[{th.critical.id}]: {len(th)}/{mesh.V} 个顶点"
            + (f", 截断 {th.truncated}" if th.truncated else "")
        )
    return ths


def forward_thickening(
    field: ScalarField,
    mesh: Mesh,
    pair: ConleyPair,
    critical: Sequence[CriticalPoint],
    config: ThickenConfig = DEFAULT_THICKEN,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Thickening:
    """单个临界点的前向穷竭 𝒲ᵢ"""
    return forward_thickenings(field, mesh, [pair], critical, config, flow)[0]


def retraction_homotopy(
    field: ScalarField,
    mesh: Mesh,
    th: Thickening,
    pair: ConleyPair,
    lam: float,
    p,
    flow: FlowConfig = DEFAULT_FLOW,
) -> np.ndarray:
    """h(λ, p)：p 在 N 中（最近顶点属于 N）时不动，否则为 φ_{λ𝒯(p)} p

    𝒯(p) < 0 是 p 反向到达出口轨迹集 N⁻ 的时间，λ=1 时像落在 N 上。

    Raises:
        InvalidParametersError: λ 不在 [0, 1] 或加厚不是 forward-W
        ArrivalFailureError: 反向轨线在时间上限内未到达 N⁻
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidParametersError(f"λ 必须在 [0, 1] 内: {lam}")
    if th.kind != ThickeningKind.FORWARD_W:
        raise InvalidParametersError(f"收缩同伦只对 forward-W 定义，得到 {th.kind.value}")
    x, _ = as_batch(p, field.dim)
    x = field.surface.normalize(x)[0]
    if int(mesh.nearest_vertex(x)) in pair.N or lam == 0.0:
        return x

    oracle = MembershipOracle(mesh, pair.N)
    locus = Locus.exit(pair.c, pair.epsilon, pair.tau, membership=oracle)
    try:
        t = arrival_time(field, x, locus, flow)
    except (NoCrossingError, StepUnderflowError) as e:
        raise ArrivalFailureError(f"点 {x.tolist()} 未能反向到达临界点 {pair.critical.id} 的出口轨迹集: {e}")
    if t > 0:
        raise ArrivalFailureError(f"点 {x.tolist()} 的到达时间为正 ({t:.6g})，不在 N 的前向像中")
    return advance(field, x[None, :], lam * t, flow)[0]


def forward_invariance_check(
    field: ScalarField,
    th: Thickening,
    mesh: Mesh,
    m: int = 100,
    seed: int = 0,
    t_max: float = 5.0,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Tuple[bool, int, List[Dict[str, Any]]]:
    """抽样 p ∈ 𝒲ᵢ 与 t ∈ [0, t_max]，检查 φ_t p 不落在 𝒲ᵢ 外（保护带判定）

    Returns:
        (是否通过, 检查数, 反例)
    """
    rng = np.random.default_rng(seed)
    members = np.asarray(sorted(th.vertices), dtype=int)
    if members.size == 0:
        return True, 0, []
    draw = rng.choice(members, size=m, replace=True)
    times = rng.uniform(0.0, t_max, size=m)
    bf = BatchFlow(field, mesh.params[draw], direction=1, config=flow)
    bf.advance(times)
    codes = MembershipOracle(mesh, th.vertices).classify(bf.points)
    bad = np.flatnonzero((codes == OUT) & ~bf.failed)
    examples = [{"vertex": int(draw[r]), "t": float(times[r])} for r in bad[:10]]
    if bad.size:
        logger.warning(f"𝒲[{th.critical.id}] 前向不变性有 {bad.size}/{m} 个反例")
    return bad.size == 0, m, examples
