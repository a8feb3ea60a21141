"""渐近极限：沿流积分直到梯度足够小并落在已知临界点附近"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..entities import DEFAULT_FLOW, FlowConfig
from ..errors import HorizonExceededError
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..utils.logger import setup_logger
from .integrator import BatchFlow

logger = setup_logger("flow")

# 每次检查收敛前推进的时长
LIMIT_CHUNK = 1.0


def match_critical(
    field: ScalarField, x, critical: Sequence[CriticalPoint], radius: float
) -> Optional[int]:
    """坐标卡距离 radius 内最近的临界点编号，没有则 None"""
    if not critical:
        return None
    C = np.asarray([c.x for c in critical], dtype=float)
    X = np.broadcast_to(np.asarray(x, dtype=float).reshape(1, -1), C.shape)
    d = field.surface.chart_distance(X, C)
    k = int(np.argmin(d))
    return critical[k].id if d[k] <= radius else None


def match_rows(
    field: ScalarField, P: np.ndarray, critical: Sequence[CriticalPoint], radius: float
) -> np.ndarray:
    """逐行匹配临界点编号，没有则 -1"""
    ids = np.full(P.shape[0], -1, dtype=int)
    if not critical or P.shape[0] == 0:
        return ids
    C = np.asarray([c.x for c in critical], dtype=float)
    for j, c in enumerate(C):
        d = field.surface.chart_distance(P, np.broadcast_to(c, P.shape))
        ids = np.where((ids < 0) & (d <= radius), critical[j].id, ids)
    return ids


def find_limits(
    field: ScalarField,
    points,
    critical: Sequence[CriticalPoint],
    direction: int,
    config: FlowConfig = DEFAULT_FLOW,
    delta_conv: Optional[float] = None,
    horizon: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """批量极限搜索

    Returns:
        (临界点编号数组，未收敛为 -1, 各行最终坐标)
    """
    delta = config.delta_conv if delta_conv is None else delta_conv
    limit = config.horizon if horizon is None else horizon
    flow = BatchFlow(field, points, direction=direction, config=config)
    ids = np.full(len(flow), -1, dtype=int)

    def settle() -> None:
        rows = np.flatnonzero(flow.active)
        if rows.size == 0:
            return
        small = rows[flow.grad_norms()[rows] < delta]
        if small.size == 0:
            return
        matched = match_rows(field, flow.points[small], critical, config.match_radius)
        ids[small] = matched
        stuck = small[matched < 0]
        if stuck.size:
            logger.warning(f"{stuck.size} 条轨线停在未知临界点附近")
        flow.deactivate(small)

    settle()
    for _ in range(math.ceil(limit / LIMIT_CHUNK)):
        if not flow.active.any():
            break
        flow.advance(LIMIT_CHUNK)
        settle()

    unresolved = int(np.sum(ids < 0))
    if unresolved:
        logger.debug(f"{unresolved}/{len(flow)} 条轨线在时间上限 {limit:g} 内未收敛")
    return ids, flow.points


def forward_limits(field, points, critical, config: FlowConfig = DEFAULT_FLOW, **kwargs) -> np.ndarray:
    return find_limits(field, points, critical, 1, config, **kwargs)[0]


def backward_limits(field, points, critical, config: FlowConfig = DEFAULT_FLOW, **kwargs) -> np.ndarray:
    return find_limits(field, points, critical, -1, config, **kwargs)[0]


def _single_limit(field, p, critical, direction, config, delta_conv, horizon) -> CriticalPoint:
    ids, final = find_limits(field, p, critical, direction, config, delta_conv, horizon)
    if ids[0] < 0:
        x = final[0]
        value = float(field.value(x)) if np.all(np.isfinite(x)) else float("nan")
        side = "正向" if direction > 0 else "反向"
        raise HorizonExceededError(
            f"{side}极限未在时间上限内收敛（终点 {x.tolist()}, f={value:.6g}）",
            final_point=x,
            final_value=value,
        )
    by_id = {c.id: c for c in critical}
    return by_id[int(ids[0])]


def forward_limit(
    field: ScalarField,
    p,
    critical: Sequence[CriticalPoint],
    delta_conv: Optional[float] = None,
    horizon: Optional[float] = None,
    config: FlowConfig = DEFAULT_FLOW,
) -> CriticalPoint:
    """ω 极限：lim φ_t p (t → +∞)

    Raises:
        HorizonExceededError: 时间上限内未收敛，异常携带终点状态
    """
    return _single_limit(field, p, critical, 1, config, delta_conv, horizon)


def backward_limit(
    field: ScalarField,
    p,
    critical: Sequence[CriticalPoint],
    delta_conv: Optional[float] = None,
    horizon: Optional[float] = None,
    config: FlowConfig = DEFAULT_FLOW,
) -> CriticalPoint:
    """α 极限：lim φ_t p (t → -∞)"""
    return _single_limit(field, p, critical, -1, config, delta_conv, horizon)
