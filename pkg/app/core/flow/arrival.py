"""到达时间与水平流

arrival_time 沿流走到目标水平集（或轨迹集的载体超曲面），在最后一步内二分细化。
level_flow 沿 X = -∇f/‖∇f‖² 积分，函数值以单位速率下降。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..entities import DEFAULT_FLOW, FlowConfig, Membership
from ..errors import (
    CriticalLevelInRangeError,
    InvalidParametersError,
    NoCrossingError,
    StepUnderflowError,
)
from ..geometry.critical import find_critical_points
from ..geometry.fields import ScalarField
from ..geometry.mesh import build_mesh
from ..geometry.surfaces import as_batch
from ..utils.cache import generate_cache_key, get_critical_cache, get_or_compute
from ..utils.logger import setup_logger
from .integrator import attempt_step, integrate, rk4_step

logger = setup_logger("flow")

BISECT_ITER = 100
LEVEL_STEPS_PER_UNIT = 100
LEVEL_GRAD_FLOOR = 1e-6
NEWTON_ITER = 20

_CRITICAL_VALUES: Dict[str, Tuple[float, ...]] = {}


@dataclass(frozen=True)
class Locus:
    """入口 / 出口轨迹集

    入口轨迹集的载体是 {f = c+ε}；出口轨迹集的载体是 {f∘φ_τ = c-ε}，
    等价于到达 c-ε 的时间再减去 τ。membership 给出时用于确认到达点属于 N。
    """

    kind: str
    c: float
    epsilon: float
    tau: float
    membership: Optional[Callable[[np.ndarray], Membership]] = dc_field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("entrance", "exit"):
            raise InvalidParametersError(f"未知的轨迹集类型: {self.kind!r}")

    @classmethod
    def entrance(cls, c: float, epsilon: float, tau: float, membership=None) -> "Locus":
        return cls("entrance", c, epsilon, tau, membership)

    @classmethod
    def exit(cls, c: float, epsilon: float, tau: float, membership=None) -> "Locus":
        return cls("exit", c, epsilon, tau, membership)

    @property
    def carrier_level(self) -> float:
        return self.c + self.epsilon if self.kind == "entrance" else self.c - self.epsilon

    @property
    def shift(self) -> float:
        return 0.0 if self.kind == "entrance" else self.tau


def _level_arrival(
    field: ScalarField,
    p,
    level: float,
    config: FlowConfig,
    direction: Optional[int],
) -> float:
    s = field.surface
    x, _ = as_batch(p, field.dim)
    x = s.normalize(x)
    f0 = float(field.value(x)[0])
    if abs(f0 - level) <= config.tol_level:
        return 0.0

    wanted = 1 if level < f0 else -1
    if direction is None:
        direction = wanted
    elif direction != wanted:
        side = "正向" if direction > 0 else "反向"
        raise NoCrossingError(f"{side}流不可能从 f={f0:.6g} 到达水平 {level:.6g}")

    elapsed, h = 0.0, config.h
    while elapsed < config.horizon:
        if field.grad_norm(x)[0] < config.delta_conv:
            raise NoCrossingError(f"轨线在 t={direction * elapsed:.6g} 收敛于临界点，未到达水平 {level:.6g}")
        step = min(h, config.horizon - elapsed)
        new, err = attempt_step(field, x, np.array([step]), direction)
        if err[0] > config.tol_int:
            h = step / 2
            if h < config.h_min:
                raise StepUnderflowError(f"到达时间积分步长下溢（t={direction * elapsed:.6g}）")
            continue

        fn = float(field.value(new)[0])
        if (fn - level) * direction <= 0:
            lo, hi = 0.0, step
            for _ in range(BISECT_ITER):
                mid = 0.5 * (lo + hi)
                q = rk4_step(field, x, np.array([mid]), direction)
                fq = float(field.value(q)[0])
                if abs(fq - level) <= config.tol_level:
                    return direction * (elapsed + mid)
                if (fq - level) * direction > 0:
                    lo = mid
                else:
                    hi = mid
            return direction * (elapsed + 0.5 * (lo + hi))

        x = s.normalize(new)
        elapsed += step
        if err[0] < config.tol_int / 32:
            h = min(2 * h, config.h_max)

    raise NoCrossingError(f"时间上限 {config.horizon:g} 内未到达水平 {level:.6g}")


def arrival_time(
    field: ScalarField,
    p,
    target: Union[float, Locus],
    config: FlowConfig = DEFAULT_FLOW,
    direction: Optional[int] = None,
) -> float:
    """带符号的到达时间 𝒯：φ_𝒯 p 落在目标上

    Args:
        target: 水平值，或 Locus
        direction: 强制正向 (+1) / 反向 (-1)；缺省按目标在哪一侧推断

    Raises:
        NoCrossingError: 方向不可能到达、先收敛到临界点或超出时间上限
    """
    if not isinstance(target, Locus):
        return _level_arrival(field, p, float(target), config, direction)

    t = _level_arrival(field, p, target.carrier_level, config, direction) - target.shift
    if target.membership is not None:
        q = integrate(field, p, t, config).final_point
        verdict = target.membership(q)
        if verdict == Membership.OUT:
            raise NoCrossingError(f"到达点 {q.tolist()} 不在 N 内（{target.kind} 轨迹集）")
    return t


def critical_values_of(field: ScalarField) -> Tuple[float, ...]:
    """函数的全部临界值：在缺省分辨率网格上搜索一次，按 (曲面, 函数) 缓存"""
    key = generate_cache_key(["critical-values", field.surface.descriptor, field.label])
    values = _CRITICAL_VALUES.get(key)
    if values is None:
        mesh = build_mesh(field.surface, field)
        points = get_or_compute(get_critical_cache(), key, lambda: find_critical_points(field, mesh))
        values = tuple(sorted(float(p.value) for p in points))
        _CRITICAL_VALUES[key] = values
    return values


def _level_vector(field: ScalarField, U: np.ndarray) -> np.ndarray:
    """X = -g⁻¹∂f / ‖∇f‖²，df(X) = -1"""
    rg = field.riemannian_gradient(U)
    norm2 = np.asarray(field.grad_norm(U)) ** 2
    return -rg / norm2[:, None]


def level_flow(
    field: ScalarField,
    p,
    dc: float,
    config: FlowConfig = DEFAULT_FLOW,
    critical_values: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """沿水平流下降 Δc，返回 f(q) = f(p) - Δc 的点 q

    critical_values 缺省时由 critical_values_of 在缺省分辨率网格上求出。

    Raises:
        CriticalLevelInRangeError: [f(p)-Δc, f(p)] 内含临界值，或途中梯度过小
    """
    s = field.surface
    x, single = as_batch(p, field.dim)
    x = s.normalize(x)
    if dc == 0:
        return x[0] if single else x

    f0 = float(field.value(x)[0])
    target = f0 - dc
    lo, hi = min(target, f0), max(target, f0)
    if critical_values is None:
        critical_values = critical_values_of(field)
    inside = [c for c in critical_values if lo <= c <= hi]
    if inside:
        raise CriticalLevelInRangeError(f"水平区间 [{lo:.6g}, {hi:.6g}] 含临界值 {inside[0]:.6g}")

    n = max(1, math.ceil(abs(dc) * LEVEL_STEPS_PER_UNIT))
    ds = dc / n
    for _ in range(n):
        if field.grad_norm(x)[0] < LEVEL_GRAD_FLOOR:
            raise CriticalLevelInRangeError(f"水平流在 f={float(field.value(x)[0]):.6g} 处遇到临界点")
        k1 = _level_vector(field, x)
        k2 = _level_vector(field, x + 0.5 * ds * k1)
        k3 = _level_vector(field, x + 0.5 * ds * k2)
        k4 = _level_vector(field, x + ds * k3)
        x = s.normalize(x + ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0)

    # 牛顿校正回目标水平
    for _ in range(NEWTON_ITER):
        gap = float(field.value(x)[0]) - target
        if abs(gap) <= config.tol_level:
            break
        x = s.normalize(x + gap * _level_vector(field, x))

    return x[0] if single else x
