"""内置闭曲面：坐标卡、第一基本形式与周期约化

所有求值函数都接受单点 (dim,) 或批量 (N, dim) 的参数坐标，返回形状与输入对应。
RP² 只有三角剖分，没有坐标卡，调用坐标卡相关方法会抛出 UnsupportedCombinationError。
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Tuple, Union

import numpy as np

from ..entities import SurfaceKind
from ..errors import InvalidParametersError, UnsupportedCombinationError
from ..utils.logger import setup_logger

logger = setup_logger("geometry")

TWO_PI = 2.0 * np.pi

_DIMENSION = {
    SurfaceKind.CIRCLE: 1,
    SurfaceKind.SPHERE: 2,
    SurfaceKind.TORUS: 2,
    SurfaceKind.RP2: 2,
}

_EULER = {
    SurfaceKind.CIRCLE: 0,
    SurfaceKind.SPHERE: 2,
    SurfaceKind.TORUS: 0,
    SurfaceKind.RP2: 1,
}

# 每个周期上的默认顶点数
DEFAULT_RESOLUTION = {
    SurfaceKind.CIRCLE: 2048,
    SurfaceKind.SPHERE: 64,
    SurfaceKind.TORUS: 64,
    SurfaceKind.RP2: 8,
}

_DESCRIPTOR_PATTERN = re.compile(r"^\s*([a-zA-Z0-9]+)\s*(?::\s*(.*))?$")


def as_batch(u, dim: int) -> Tuple[np.ndarray, bool]:
    """把参数坐标整理成 (N, dim)，并返回是否为单点输入"""
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 1:
        return arr.reshape(1, dim), True
    return arr.reshape(-1, dim), False


def _unbatch(arr: np.ndarray, single: bool) -> np.ndarray:
    return arr[0] if single else arr


@dataclass(frozen=True)
class Surface:
    """解析闭曲面（或 RP² 的纯三角剖分）

    Attributes:
        kind: 曲面类型
        rho: 球面半径
        R: 环面中心圆半径
        r: 环面管半径
    """

    kind: SurfaceKind
    rho: float = 1.0
    R: float = 2.0
    r: float = 1.0

    @property
    def dim(self) -> int:
        return _DIMENSION[self.kind]

    @property
    def has_chart(self) -> bool:
        return self.kind != SurfaceKind.RP2

    @property
    def euler_characteristic(self) -> int:
        return _EULER[self.kind]

    @property
    def periodic(self) -> Tuple[bool, ...]:
        if self.kind == SurfaceKind.CIRCLE:
            return (True,)
        if self.kind == SurfaceKind.SPHERE:
            return (True, False)
        return (True, True)

    @property
    def param_box(self) -> List[Tuple[float, float]]:
        """参数域（周期方向为一个周期）"""
        if self.kind == SurfaceKind.CIRCLE:
            return [(0.0, TWO_PI)]
        if self.kind == SurfaceKind.SPHERE:
            return [(0.0, TWO_PI), (0.0, np.pi)]
        return [(0.0, TWO_PI), (0.0, TWO_PI)]

    @property
    def descriptor(self) -> str:
        """规范化的描述串，可被 make_surface 解析回同一曲面"""
        if self.kind == SurfaceKind.TORUS:
            return f"torus:R={self.R:g},r={self.r:g}"
        if self.kind == SurfaceKind.SPHERE:
            return f"sphere:rho={self.rho:g}"
        return self.kind.value

    def _require_chart(self) -> None:
        if not self.has_chart:
            raise UnsupportedCombinationError(f"{self.kind.value} 没有坐标卡")

    # ============ 坐标卡 ============

    def chart(self, u) -> np.ndarray:
        """参数坐标 -> 三维嵌入坐标"""
        self._require_chart()
        U, single = as_batch(u, self.dim)
        if self.kind == SurfaceKind.CIRCLE:
            t = U[:, 0]
            out = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
        elif self.kind == SurfaceKind.TORUS:
            a, b = U[:, 0], U[:, 1]
            w = self.R + self.r * np.cos(b)
            out = np.stack([w * np.cos(a), self.r * np.sin(b), w * np.sin(a)], axis=1)
        else:
            a, b = U[:, 0], U[:, 1]
            sb = np.sin(b)
            out = self.rho * np.stack([sb * np.cos(a), np.cos(b), sb * np.sin(a)], axis=1)
        return _unbatch(out, single)

    def jacobian(self, u) -> np.ndarray:
        """坐标卡的雅可比矩阵，形状 (..., 3, dim)"""
        self._require_chart()
        U, single = as_batch(u, self.dim)
        n = U.shape[0]
        if self.kind == SurfaceKind.CIRCLE:
            t = U[:, 0]
            J = np.zeros((n, 3, 1))
            J[:, 0, 0] = -np.sin(t)
            J[:, 1, 0] = np.cos(t)
        elif self.kind == SurfaceKind.TORUS:
            a, b = U[:, 0], U[:, 1]
            w = self.R + self.r * np.cos(b)
            J = np.zeros((n, 3, 2))
            J[:, 0, 0] = -w * np.sin(a)
            J[:, 2, 0] = w * np.cos(a)
            J[:, 0, 1] = -self.r * np.sin(b) * np.cos(a)
            J[:, 1, 1] = self.r * np.cos(b)
            J[:, 2, 1] = -self.r * np.sin(b) * np.sin(a)
        else:
            a, b = U[:, 0], U[:, 1]
            J = np.zeros((n, 3, 2))
            J[:, 0, 0] = -self.rho * np.sin(b) * np.sin(a)
            J[:, 2, 0] = self.rho * np.sin(b) * np.cos(a)
            J[:, 0, 1] = self.rho * np.cos(b) * np.cos(a)
            J[:, 1, 1] = -self.rho * np.sin(b)
            J[:, 2, 1] = self.rho * np.cos(b) * np.sin(a)
        return _unbatch(J, single)

    def _metric_diagonal(self, U: np.ndarray) -> np.ndarray:
        if self.kind == SurfaceKind.CIRCLE:
            return np.ones((U.shape[0], 1))
        b = U[:, 1]
        if self.kind == SurfaceKind.TORUS:
            w = self.R + self.r * np.cos(b)
            return np.stack([w * w, np.full_like(b, self.r * self.r)], axis=1)
        sb = np.sin(b)
        return self.rho**2 * np.stack([sb * sb, np.ones_like(b)], axis=1)

    def metric(self, u) -> np.ndarray:
        """第一基本形式 g(u)，形状 (..., dim, dim)"""
        self._require_chart()
        U, single = as_batch(u, self.dim)
        diag = self._metric_diagonal(U)
        g = np.zeros((U.shape[0], self.dim, self.dim))
        idx = np.arange(self.dim)
        g[:, idx, idx] = diag
        return _unbatch(g, single)

    def inverse_metric(self, u) -> np.ndarray:
        """g(u)⁻¹（内置曲面的度量均为对角阵）"""
        self._require_chart()
        U, single = as_batch(u, self.dim)
        diag = self._metric_diagonal(U)
        ginv = np.zeros((U.shape[0], self.dim, self.dim))
        idx = np.arange(self.dim)
        ginv[:, idx, idx] = 1.0 / diag
        return _unbatch(ginv, single)

    # ============ 周期约化 ============

    def normalize(self, u) -> np.ndarray:
        """周期约化到参数域；球面在极点处反射（v -> -v, u -> u + π）"""
        self._require_chart()
        U, single = as_batch(u, self.dim)
        U = U.copy()
        if self.kind == SurfaceKind.SPHERE:
            v = np.mod(U[:, 1], TWO_PI)
            flip = v > np.pi
            v[flip] = TWO_PI - v[flip]
            U[:, 0] = U[:, 0] + np.where(flip, np.pi, 0.0)
            U[:, 1] = v
            U[:, 0] = np.mod(U[:, 0], TWO_PI)
        else:
            U = np.mod(U, TWO_PI)
        return _unbatch(U, single)

    def wrap_delta(self, du) -> np.ndarray:
        """参数差在周期方向上取 [-π, π) 代表元"""
        D, single = as_batch(du, self.dim)
        D = D.copy()
        for k, periodic in enumerate(self.periodic):
            if periodic:
                D[:, k] = np.mod(D[:, k] + np.pi, TWO_PI) - np.pi
        return _unbatch(D, single)

    def chart_distance(self, u1, u2) -> np.ndarray:
        """参数空间中的周期距离"""
        U1, s1 = as_batch(u1, self.dim)
        U2, s2 = as_batch(u2, self.dim)
        d = np.linalg.norm(self.wrap_delta(U1 - U2), axis=-1)
        return d[0] if (s1 and s2) else d

    def params_from_points(self, xyz: np.ndarray) -> np.ndarray:
        """嵌入坐标 -> 参数坐标（坐标卡的逆）"""
        self._require_chart()
        X = np.atleast_2d(np.asarray(xyz, dtype=float))
        if self.kind == SurfaceKind.CIRCLE:
            return np.mod(np.arctan2(X[:, 1], X[:, 0]), TWO_PI)[:, None]
        if self.kind == SurfaceKind.SPHERE:
            v = np.arccos(np.clip(X[:, 1] / self.rho, -1.0, 1.0))
            u = np.mod(np.arctan2(X[:, 2], X[:, 0]), TWO_PI)
            return np.stack([u, v], axis=1)
        u = np.mod(np.arctan2(X[:, 2], X[:, 0]), TWO_PI)
        rad = np.hypot(X[:, 0], X[:, 2]) - self.R
        v = np.mod(np.arctan2(X[:, 1], rad), TWO_PI)
        return np.stack([u, v], axis=1)


def metric_defect(s: Surface, samples: np.ndarray) -> float:
    """max |g - JᵀJ|，用于坐标卡与度量的一致性检查"""
    J = s.jacobian(samples)
    JtJ = np.einsum("nki,nkj->nij", J, J)
    return float(np.max(np.abs(s.metric(samples) - JtJ)))


def _spot_samples(s: Surface) -> np.ndarray:
    """确定性的抽查点（避开球面坐标卡极点）"""
    if s.dim == 1:
        return np.linspace(0.05, TWO_PI - 0.05, 16)[:, None]
    a = np.linspace(0.05, TWO_PI - 0.05, 4)
    lo, hi = s.param_box[1]
    b = np.linspace(lo + 0.1, hi - 0.1, 4)
    A, B = np.meshgrid(a, b, indexing="ij")
    return np.stack([A.ravel(), B.ravel()], axis=1)


def parse_surface_descriptor(spec: str) -> Tuple[SurfaceKind, Dict[str, float]]:
    """解析 "torus:R=2,r=1" 形式的描述串"""
    match = _DESCRIPTOR_PATTERN.match(spec or "")
    if not match:
        raise InvalidParametersError(f"无法解析曲面描述: {spec!r}")
    name, rest = match.group(1).lower(), match.group(2)
    try:
        kind = SurfaceKind(name)
    except ValueError:
        raise InvalidParametersError(f"未知曲面类型: {name}")
    params: Dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise InvalidParametersError(f"曲面参数格式应为 key=value: {item!r}")
            key, value = item.split("=", 1)
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise InvalidParametersError(f"曲面参数不是数字: {item!r}")
    return kind, params


_ALLOWED_PARAMS = {
    SurfaceKind.CIRCLE: set(),
    SurfaceKind.RP2: set(),
    SurfaceKind.SPHERE: {"rho"},
    SurfaceKind.TORUS: {"R", "r"},
}


def make_surface(spec: Union[str, SurfaceKind], **params: float) -> Surface:
    """构造内置曲面

    Args:
        spec: 描述串（如 "torus:R=2,r=1"）或 SurfaceKind
        **params: 形状参数，覆盖描述串中的同名参数

    Raises:
        InvalidParametersError: 参数不合法（如环面 r >= R）
    """
    if isinstance(spec, SurfaceKind):
        kind, parsed = spec, {}
    else:
        kind, parsed = parse_surface_descriptor(spec)
    parsed.update(params)

    unknown = set(parsed) - _ALLOWED_PARAMS[kind]
    if unknown:
        raise InvalidParametersError(f"{kind.value} 不接受参数: {sorted(unknown)}")
    values = [v for v in parsed.values()]
    if any(not np.isfinite(v) for v in values):
        raise InvalidParametersError(f"曲面参数必须有限: {parsed}")

    if kind == SurfaceKind.TORUS:
        R, r = parsed.get("R", 2.0), parsed.get("r", 1.0)
        if not (R > r > 0):
            raise InvalidParametersError(f"环面要求 R > r > 0，收到 R={R}, r={r}")
        surface = Surface(kind, R=R, r=r)
    elif kind == SurfaceKind.SPHERE:
        rho = parsed.get("rho", 1.0)
        if rho <= 0:
            raise InvalidParametersError(f"球面半径必须为正，收到 rho={rho}")
        surface = Surface(kind, rho=rho)
    else:
        surface = Surface(kind)

    if surface.has_chart:
        defect = metric_defect(surface, _spot_samples(surface))
        if defect > 1e-8:
            raise InvalidParametersError(f"度量与坐标卡不一致: defect={defect:.3e}")
        logger.debug(f"曲面 {surface.descriptor} 度量抽查 defect={defect:.2e}")
    return surface


def surface_area(s: Surface, n: int = 256) -> float:
    """对 √det g 做中点求积得到总面积（一维时为总长度）"""
    s._require_chart()
    boxes = s.param_box
    mids = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi in boxes]
    cell = float(np.prod([(hi - lo) / n for lo, hi in boxes]))
    if s.dim == 1:
        U = mids[0][:, None]
    else:
        A, B = np.meshgrid(mids[0], mids[1], indexing="ij")
        U = np.stack([A.ravel(), B.ravel()], axis=1)
    det = np.linalg.det(s.metric(U))
    return float(np.sum(np.sqrt(det)) * cell)
