"""梯度流积分：坐标卡中的经典四阶 Runge-Kutta，步长加倍误差控制

向下梯度流 dφ/dt = -∇f∘φ（∇f = g⁻¹∂f）。负时间积分 +∇f。
单条轨线（integrate）记录全部样本，步长不超过 h；批量推进（BatchFlow / advance）
每行独立自适应步长，步长可放大到 h_max，只保留当前状态。
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import simpson

from ..entities import DEFAULT_FLOW, FlowConfig, Termination
from ..errors import StepUnderflowError
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.surfaces import as_batch
from ..utils.logger import setup_logger

logger = setup_logger("flow")

_TIME_EPS = 1e-12


def velocity(field: ScalarField, U: np.ndarray, direction: int) -> np.ndarray:
    """direction=+1 为向下梯度流 -∇f，-1 为反向"""
    return -direction * field.riemannian_gradient(U)


def rk4_step(field: ScalarField, U: np.ndarray, h: np.ndarray, direction: int) -> np.ndarray:
    """一步经典 RK4，h 为每行步长 (N,)"""
    hh = h[:, None]
    k1 = velocity(field, U, direction)
    k2 = velocity(field, U + 0.5 * hh * k1, direction)
    k3 = velocity(field, U + 0.5 * hh * k2, direction)
    k4 = velocity(field, U + hh * k3, direction)
    return U + hh * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def attempt_step(
    field: ScalarField, U: np.ndarray, h: np.ndarray, direction: int
) -> Tuple[np.ndarray, np.ndarray]:
    """步长加倍：一步 h 与两步 h/2 比较

    Returns:
        (两步半步的结果, 误差 max(|Δf|, ‖Δx‖) )，误差为嵌入空间距离，极点附近也有意义
    """
    full = rk4_step(field, U, h, direction)
    half = rk4_step(field, rk4_step(field, U, h / 2, direction), h / 2, direction)
    s = field.surface
    err = np.maximum(
        np.abs(field.value(full) - field.value(half)),
        np.linalg.norm(s.chart(full) - s.chart(half), axis=1),
    )
    err = np.where(np.isfinite(err), err, np.inf)
    return half, err


@dataclass
class Trajectory:
    """一条记录下来的轨线

    times 为带符号时间（反向积分时为负，按积分顺序记录）。
    """

    times: np.ndarray
    points: np.ndarray
    values: np.ndarray
    h: float
    termination: Termination
    critical_id: Optional[int] = None

    @property
    def direction(self) -> int:
        return -1 if len(self.times) > 1 and self.times[-1] < 0 else 1

    @property
    def final_point(self) -> np.ndarray:
        return self.points[-1]

    @property
    def final_value(self) -> float:
        return float(self.values[-1])

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return len(self.times)


def integrate(
    field: ScalarField,
    p,
    t: float,
    config: FlowConfig = DEFAULT_FLOW,
    until_converged: bool = False,
    critical: Optional[Sequence[CriticalPoint]] = None,
) -> Trajectory:
    """积分时长 t 的轨线（t < 0 为反向流）

    Args:
        field: 标量函数
        p: 起点参数坐标
        t: 带符号时长，±inf 时截断到 config.horizon
        config: 积分参数
        until_converged: ‖∇f‖ < delta_conv 时提前停止
        critical: 已知临界点，收敛时用于标记 critical_id

    Raises:
        StepUnderflowError: 自适应步长低于 h_min
    """
    s = field.surface
    direction = -1 if t < 0 else 1
    total = abs(t) if np.isfinite(t) else config.horizon
    x, _ = as_batch(p, field.dim)
    x = s.normalize(x)

    times = [0.0]
    points = [x[0].copy()]
    values = [float(field.value(x)[0])]
    termination = Termination.HORIZON
    elapsed, h = 0.0, config.h

    while total - elapsed > _TIME_EPS:
        if until_converged and field.grad_norm(x)[0] < config.delta_conv:
            termination = Termination.CONVERGED
            break
        step = min(h, total - elapsed)
        new, err = attempt_step(field, x, np.array([step]), direction)
        if err[0] > config.tol_int:
            h = step / 2
            if h < config.h_min:
                raise StepUnderflowError(
                    f"步长 {h:.3e} 低于 h_min={config.h_min:g}（t={direction * elapsed:.6g}, x={x[0].tolist()}）"
                )
            continue
        x = s.normalize(new)
        elapsed = total if total - (elapsed + step) <= _TIME_EPS else elapsed + step
        times.append(direction * elapsed)
        points.append(x[0].copy())
        values.append(float(field.value(x)[0]))
        if err[0] < config.tol_int / 32 and step >= h:
            h = min(2 * h, config.h)

    critical_id = None
    if termination == Termination.CONVERGED and critical:
        from .limits import match_critical

        critical_id = match_critical(field, x[0], critical, config.match_radius)

    return Trajectory(
        times=np.asarray(times),
        points=np.asarray(points),
        values=np.asarray(values),
        h=config.h,
        termination=termination,
        critical_id=critical_id,
    )


class BatchFlow:
    """批量推进多个起点：每行独立步长，按需分段推进

    步长加倍误差控制，误差小于 tol_int/32 时步长加倍直到 h_max。
    步长下溢的行被冻结并标记为 failed，坐标置为 NaN。
    """

    def __init__(
        self,
        field: ScalarField,
        points,
        direction: int = 1,
        config: FlowConfig = DEFAULT_FLOW,
    ):
        self.field = field
        self.config = config
        self.direction = 1 if direction >= 0 else -1
        P, _ = as_batch(points, field.dim)
        self.points = field.surface.normalize(P).copy()
        n = self.points.shape[0]
        self.h = np.full(n, config.h)
        self.elapsed = np.zeros(n)
        self.active = np.ones(n, dtype=bool)
        self.failed = np.zeros(n, dtype=bool)

    def __len__(self) -> int:
        return self.points.shape[0]

    def deactivate(self, rows) -> None:
        self.active[rows] = False

    def values(self) -> np.ndarray:
        return np.asarray(self.field.value(self.points))

    def grad_norms(self) -> np.ndarray:
        return np.asarray(self.field.grad_norm(self.points))

    def advance(self, dt: Union[float, np.ndarray]) -> "BatchFlow":
        """所有活动行再推进 dt（非负，可逐行给出）"""
        cfg = self.config
        target = self.elapsed + np.broadcast_to(np.abs(np.asarray(dt, dtype=float)), self.elapsed.shape)
        pending = self.active & (target - self.elapsed > _TIME_EPS)
        s = self.field.surface
        while pending.any():
            idx = np.flatnonzero(pending)
            remaining = target[idx] - self.elapsed[idx]
            step = np.minimum(self.h[idx], remaining)
            new, err = attempt_step(self.field, self.points[idx], step, self.direction)
            ok = err <= cfg.tol_int

            acc = idx[ok]
            if acc.size:
                self.points[acc] = s.normalize(new[ok])
                done = remaining[ok] - step[ok] <= _TIME_EPS
                self.elapsed[acc] = np.where(done, target[acc], self.elapsed[acc] + step[ok])
                grow = (err[ok] < cfg.tol_int / 32) & (step[ok] >= self.h[acc])
                self.h[acc] = np.where(grow, np.minimum(2 * self.h[acc], cfg.h_max), self.h[acc])

            rej = idx[~ok]
            if rej.size:
                self.h[rej] = step[~ok] / 2
                under = rej[self.h[rej] < cfg.h_min]
                if under.size:
                    logger.warning(f"{under.size} 条轨线步长下溢，已冻结")
                    self.failed[under] = True
                    self.active[under] = False
                    self.points[under] = np.nan

            pending = self.active & (target - self.elapsed > _TIME_EPS)
        return self


def advance(field: ScalarField, points, t: float, config: FlowConfig = DEFAULT_FLOW) -> np.ndarray:
    """批量求 φ_t(points)，下溢的行为 NaN"""
    flow = BatchFlow(field, points, direction=-1 if t < 0 else 1, config=config)
    return flow.advance(abs(t)).points


def energy_defect(trajectory: Trajectory, field: ScalarField) -> float:
    """|f(p) - f(φ_t p)| 与 ∫‖∇f‖² ds 之差（Simpson 求积）"""
    if len(trajectory) < 3:
        return 0.0
    t = np.abs(trajectory.times)
    integrand = np.asarray(field.grad_norm(trajectory.points)) ** 2
    integral = float(simpson(integrand, x=t))
    drop = abs(trajectory.values[0] - trajectory.values[-1])
    return abs(drop - integral)


def write_trajectory_csv(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """导出 CSV，表头 "t,u,v,f"（一维为 "t,u,f"）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    two_d = trajectory.points.shape[1] == 2
    lines = ["t,u,v,f" if two_d else "t,u,f"]
    for t, x, f in zip(trajectory.times, trajectory.points, trajectory.values):
        coords = ",".join(f"{c:.12g}" for c in x)
        lines.append(f"{t:.12g},{coords},{f:.12g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
