"""内置标量函数：解析的值、坐标卡梯度与坐标卡 Hessian"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Dict, Tuple, Union

import numpy as np

from ..entities import FieldName, SurfaceKind
from ..errors import UnsupportedCombinationError
from .surfaces import Surface, _unbatch, as_batch

Kernel = Callable[[Surface, np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


def _cos_theta(s: Surface, U: np.ndarray):
    t = U[:, 0]
    return np.cos(t), -np.sin(t)[:, None], -np.cos(t)[:, None, None]


def _cubic_circle(s: Surface, U: np.ndarray):
    t = U[:, 0]
    st, ct = np.sin(t), np.cos(t)
    f = st**3
    df = 3.0 * st**2 * ct
    ddf = 6.0 * st * ct**2 - 3.0 * st**3
    return f, df[:, None], ddf[:, None, None]


def _double_well(s: Surface, U: np.ndarray):
    t = U[:, 0]
    return np.cos(2 * t), (-2.0 * np.sin(2 * t))[:, None], (-4.0 * np.cos(2 * t))[:, None, None]


def _torus_height(s: Surface, U: np.ndarray):
    a, b = U[:, 0], U[:, 1]
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
    w = s.R + s.r * cb
    f = w * sa
    df = np.stack([w * ca, -s.r * sb * sa], axis=1)
    ddf = np.empty((U.shape[0], 2, 2))
    ddf[:, 0, 0] = -w * sa
    ddf[:, 0, 1] = ddf[:, 1, 0] = -s.r * sb * ca
    ddf[:, 1, 1] = -s.r * cb * sa
    return f, df, ddf


def _sphere_height(s: Surface, U: np.ndarray):
    a, b = U[:, 0], U[:, 1]
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
    rho = s.rho
    f = rho * sb * sa
    df = rho * np.stack([sb * ca, cb * sa], axis=1)
    ddf = np.empty((U.shape[0], 2, 2))
    ddf[:, 0, 0] = -rho * sb * sa
    ddf[:, 0, 1] = ddf[:, 1, 0] = rho * cb * ca
    ddf[:, 1, 1] = -rho * sb * sa
    return f, df, ddf


_KERNELS: Dict[Tuple[FieldName, SurfaceKind], Kernel] = {
    (FieldName.COS_THETA, SurfaceKind.CIRCLE): _cos_theta,
    (FieldName.CUBIC_CIRCLE, SurfaceKind.CIRCLE): _cubic_circle,
    (FieldName.DOUBLE_WELL, SurfaceKind.CIRCLE): _double_well,
    (FieldName.HEIGHT, SurfaceKind.TORUS): _torus_height,
    (FieldName.HEIGHT, SurfaceKind.SPHERE): _sphere_height,
}


@dataclass(frozen=True)
class ScalarField:
    """曲面上的 C² 函数

    sign = -1 表示 -f，所有导数同时取反。
    """

    surface: Surface
    name: FieldName
    sign: float = 1.0

    @property
    def dim(self) -> int:
        return self.surface.dim

    @property
    def label(self) -> str:
        return self.name.value if self.sign > 0 else f"-{self.name.value}"

    def negated(self) -> "ScalarField":
        return replace(self, sign=-self.sign)

    def _eval(self, u):
        U, single = as_batch(u, self.dim)
        f, df, ddf = _KERNELS[(self.name, self.surface.kind)](self.surface, U)
        return U, single, self.sign * f, self.sign * df, self.sign * ddf

    def value(self, u) -> Union[float, np.ndarray]:
        _, single, f, _, _ = self._eval(u)
        return float(f[0]) if single else f

    def gradient(self, u) -> np.ndarray:
        """坐标卡梯度 ∂f"""
        _, single, _, df, _ = self._eval(u)
        return _unbatch(df, single)

    def hessian(self, u) -> np.ndarray:
        """坐标卡 Hessian ∂²f"""
        _, single, _, _, ddf = self._eval(u)
        return _unbatch(ddf, single)

    def riemannian_gradient(self, u) -> np.ndarray:
        """∇f = g⁻¹∂f"""
        U, single, _, df, _ = self._eval(u)
        rg = np.einsum("nij,nj->ni", self.surface.inverse_metric(U), df)
        return _unbatch(rg, single)

    def grad_norm(self, u) -> Union[float, np.ndarray]:
        """‖∇f‖_g = sqrt(∂fᵀ g⁻¹ ∂f)"""
        U, single, _, df, _ = self._eval(u)
        ginv = self.surface.inverse_metric(U)
        sq = np.einsum("ni,nij,nj->n", df, ginv, df)
        norm = np.sqrt(np.maximum(sq, 0.0))
        return float(norm[0]) if single else norm


def parse_field_name(name: Union[str, FieldName]) -> FieldName:
    if isinstance(name, FieldName):
        return name
    try:
        return FieldName(str(name).strip().lower())
    except ValueError:
        raise UnsupportedCombinationError(f"未知函数: {name!r}")


def builtin_field(name: Union[str, FieldName], s: Surface) -> ScalarField:
    """内置函数

    height 取嵌入坐标 z，需要二维带坐标卡的曲面；cos-theta / cubic-circle / double-well
    只定义在圆周上。

    Raises:
        UnsupportedCombinationError: 函数与曲面组合不受支持
    """
    field_name = parse_field_name(name)
    if (field_name, s.kind) not in _KERNELS:
        raise UnsupportedCombinationError(
            f"函数 {field_name.value} 不能定义在 {s.kind.value} 上"
        )
    return ScalarField(surface=s, name=field_name)
