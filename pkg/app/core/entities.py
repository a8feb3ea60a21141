from dataclasses import dataclass
from enum import Enum


class SurfaceKind(Enum):
    """内置闭曲面"""

    CIRCLE = "circle"
    SPHERE = "sphere"
    TORUS = "torus"
    RP2 = "rp2"  # 仅三角剖分，无坐标卡、无流


class FieldName(Enum):
    """内置标量函数"""

    HEIGHT = "height"  # 嵌入坐标 z
    COS_THETA = "cos-theta"
    CUBIC_CIRCLE = "cubic-circle"  # sin³θ，0 与 π 处退化
    DOUBLE_WELL = "double-well"  # cos 2θ，两个等值极大


class CriticalKind(Enum):
    """临界点分类"""

    NONDEGENERATE = "nondegenerate"
    DEGENERATE = "degenerate-isolated"


class Termination(Enum):
    """轨线终止原因"""

    HORIZON = "horizon"  # 到达指定时长或时间上限
    CONVERGED = "converged"
    CROSSED = "crossed-level"


class Membership(Enum):
    """带保护带的集合隶属判定"""

    IN = "in"
    OUT = "out"
    BORDER = "border"  # 保护带内，既不计入也不排除


class ThickeningKind(Enum):
    """加厚类型"""

    FORWARD_W = "forward-W"
    AMBIENT_U_STAR = "ambient-U-star"
    AMBIENT_U = "ambient-U"  # 对 -f 运行同一流程


@dataclass(frozen=True)
class FlowConfig:
    """流积分参数"""

    h: float = 1e-2  # 初始步长，同时是记录轨线的最大步长
    h_min: float = 1e-6
    h_max: float = 0.25  # 批量推进允许放大到的步长
    tol_int: float = 1e-8  # 步长加倍误差容差
    delta_conv: float = 1e-8  # 极限判定的梯度范数阈值
    horizon: float = 200.0
    tol_level: float = 1e-9
    tol_mono: float = 1e-9
    capture_tol: float = 1e-6  # 扫描中判定"停在某临界点"的梯度阈值
    match_radius: float = 0.05  # 收敛点与已知临界点的坐标卡距离


@dataclass(frozen=True)
class ConleyConfig:
    """Conley 对构造与校验参数"""

    grad_floor: float = 1e-3  # c±ε 带上的最小梯度范数
    eps_min: float = 1e-4
    tau_max: float = 64.0
    verify_dt: float = 0.05  # 轨线隶属检查的时间间隔
    verify_horizon: float = 200.0


@dataclass(frozen=True)
class ThickenConfig:
    """加厚构造参数"""

    horizon: float = 100.0
    safety: float = 1.25  # 入口时间上确界的安全系数
    check_dt: float = 0.1


@dataclass(frozen=True)
class MinimaxConfig:
    """极小极大参数"""

    margin: float = 0.5  # a = min f - margin, b = max f + margin


DEFAULT_FLOW = FlowConfig()
DEFAULT_CONLEY = ConleyConfig()
DEFAULT_THICKEN = ThickenConfig()
DEFAULT_MINIMAX = MinimaxConfig()
