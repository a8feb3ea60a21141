"""临界点搜索：网格种子 + 阻尼牛顿迭代 + 广义特征值分类"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..entities import CriticalKind
from ..errors import InvalidParametersError
from ..utils.logger import setup_logger
from ..utils.parallel import ordered_map
from .fields import ScalarField
from .mesh import Mesh
from .surfaces import Surface

logger = setup_logger("critical")

TOL_CRIT = 1e-10
TOL_EIG = 1e-6
STEP_TOL = 1e-10
MAX_STEP = 0.5
MAX_ITER = 200

# 度量最小/最大特征值之比低于此值视为坐标卡奇异（球面极点附近）
_SINGULAR_RATIO = 1e-4


@dataclass(frozen=True)
class CriticalPoint:
    """临界点

    Attributes:
        id: 按函数值排序后的编号
        x: 参数坐标
        value: f(x)
        grad_norm: ‖∇f(x)‖_g
        kind: 非退化 / 退化孤立
        index: Morse 指标（退化点为 None）
        eigenvalues: (Hessian, g) 的广义特征值
    """

    id: int
    x: Tuple[float, ...]
    value: float
    grad_norm: float
    kind: CriticalKind
    index: Optional[int]
    eigenvalues: Tuple[float, ...]

    @property
    def point(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)

    @property
    def is_degenerate(self) -> bool:
        return self.kind == CriticalKind.DEGENERATE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "x": [float(c) for c in self.x],
            "value": float(self.value),
            "grad_norm": float(self.grad_norm),
            "kind": self.kind.value,
            "index": self.index,
            "eigenvalues": [float(e) for e in self.eigenvalues],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CriticalPoint":
        return cls(
            id=int(data["id"]),
            x=tuple(float(c) for c in data["x"]),
            value=float(data["value"]),
            grad_norm=float(data["grad_norm"]),
            kind=CriticalKind(data["kind"]),
            index=data.get("index"),
            eigenvalues=tuple(float(e) for e in data["eigenvalues"]),
        )


def _seed_vertices(field: ScalarField, mesh: Mesh) -> np.ndarray:
    """种子顶点：∂f 各分量都变号的单元中梯度最小的顶点，以及 ‖∇f‖ 的顶点局部极小"""
    rg = field.riemannian_gradient(mesh.params)
    norms = field.grad_norm(mesh.params)

    cells = mesh.triangles if mesh.F else mesh.edges
    comp = rg[cells]  # (cells, k, dim)
    changes = np.all((comp.min(axis=1) <= 0) & (comp.max(axis=1) >= 0), axis=1)
    picked = cells[changes]
    seeds = set(picked[np.arange(len(picked)), np.argmin(norms[picked], axis=1)].tolist())

    A = mesh.adjacency
    for k in range(mesh.V):
        nb = A.indices[A.indptr[k] : A.indptr[k + 1]]
        if nb.size and norms[k] <= norms[nb].min():
            seeds.add(k)

    if mesh.dim == 2:
        eig = mesh.surface._metric_diagonal(mesh.params)
        ratio = eig.min(axis=1) / eig.max(axis=1)
        singular = {k for k in seeds if ratio[k] < _SINGULAR_RATIO}
        if singular:
            logger.debug(f"跳过 {len(singular)} 个坐标卡奇异处的种子")
        seeds -= singular
    return np.asarray(sorted(seeds), dtype=int)


def _newton(field: ScalarField, x0: np.ndarray, tol_crit: float) -> Optional[np.ndarray]:
    """阻尼牛顿迭代求 ∂f = 0；Hessian 奇异时退化为最小二乘步"""
    s = field.surface
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(MAX_ITER):
        g = field.gradient(x)
        H = field.hessian(x)
        try:
            step = -np.linalg.solve(H, g)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, g, rcond=None)[0]
        norm = float(np.linalg.norm(step))
        if norm > MAX_STEP:
            step *= MAX_STEP / norm
            norm = MAX_STEP
        if field.grad_norm(x) <= tol_crit and norm <= STEP_TOL:
            return s.normalize(x)
        x = s.normalize(x + step)
    if field.grad_norm(x) <= tol_crit:
        return x
    return None


def classify(field: ScalarField, x: np.ndarray, tol_eig: float = TOL_EIG):
    """(Hessian, g) 广义特征值分类，返回 (kind, index, eigenvalues)"""
    H = np.atleast_2d(field.hessian(x))
    g = np.atleast_2d(field.surface.metric(x))
    eig = linalg.eigh(H, g, eigvals_only=True)
    if np.any(np.abs(eig) <= tol_eig):
        return CriticalKind.DEGENERATE, None, tuple(float(e) for e in eig)
    return CriticalKind.NONDEGENERATE, int(np.sum(eig < 0)), tuple(float(e) for e in eig)


def find_critical_points(
    field: ScalarField,
    mesh: Mesh,
    tol_crit: float = TOL_CRIT,
    tol_eig: float = TOL_EIG,
    max_workers: Optional[int] = None,
) -> List[CriticalPoint]:
    """在网格种子上做牛顿迭代找出全部临界点

    结果在嵌入距离小于平均边长时去重（保留梯度最小者），按 (函数值, 参数坐标) 排序。
    不收敛的种子记录为警告，不会中断搜索。
    """
    s = field.surface
    seeds = _seed_vertices(field, mesh)
    results = ordered_map(
        lambda k: _newton(field, mesh.params[k], tol_crit), list(seeds), max_workers, label="newton"
    )

    found: List[Tuple[float, np.ndarray]] = []
    failed = 0
    for x in results:
        if x is None:
            failed += 1
            continue
        found.append((float(field.grad_norm(x)), x))
    if failed:
        logger.warning(f"{failed}/{len(seeds)} 个种子的牛顿迭代未收敛")

    found.sort(key=lambda item: item[0])
    radius = mesh.mean_edge_length
    kept: List[np.ndarray] = []
    for _, x in found:
        if all(np.linalg.norm(s.chart(x) - s.chart(y)) > radius for y in kept):
            kept.append(x)

    def sort_key(x: np.ndarray):
        return (round(float(field.value(x)), 9), tuple(np.round(x, 9)))

    kept.sort(key=sort_key)
    points = []
    for cid, x in enumerate(kept):
        kind, index, eig = classify(field, x, tol_eig)
        points.append(
            CriticalPoint(
                id=cid,
                x=tuple(float(c) for c in x),
                value=float(field.value(x)),
                grad_norm=float(field.grad_norm(x)),
                kind=kind,
                index=index,
                eigenvalues=eig,
            )
        )
    logger.info(
        f"找到 {len(points)} 个临界点: "
        + ", ".join(f"{p.value:.6g}({p.index if p.index is not None else 'deg'})" for p in points)
    )
    return points


def min_pairwise_distance(points: Sequence[CriticalPoint], surface: Surface) -> float:
    """临界点之间的最小嵌入距离（孤立性只能确认到网格分辨率）"""
    if len(points) < 2:
        return float("inf")
    X = surface.chart(np.asarray([p.x for p in points]))
    diff = X[:, None, :] - X[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    d[np.diag_indices(len(points))] = np.inf
    return float(d.min())


def morse_counts(points: Sequence[CriticalPoint], dim: int) -> List[int]:
    """每个 Morse 指标的非退化临界点个数"""
    counts = [0] * (dim + 1)
    for p in points:
        if p.index is not None:
            counts[p.index] += 1
    return counts


def is_morse(points: Sequence[CriticalPoint]) -> bool:
    return all(not p.is_degenerate for p in points)


def select_points(points: Sequence[CriticalPoint], selector: str, dim: int) -> List[CriticalPoint]:
    """按选择器挑选临界点：all / min / max / saddle / degenerate / 编号"""
    key = str(selector).strip().lower()
    if key == "all":
        return list(points)
    if key == "min":
        return [p for p in points if p.index == 0]
    if key == "max":
        return [p for p in points if p.index == dim]
    if key == "saddle":
        return [p for p in points if p.index is not None and 0 < p.index < dim]
    if key == "degenerate":
        return [p for p in points if p.is_degenerate]
    try:
        idx = int(key)
    except ValueError:
        raise InvalidParametersError(f"未知的临界点选择器: {selector!r}")
    if not 0 <= idx < len(points):
        raise InvalidParametersError(f"临界点编号 {idx} 越界（共 {len(points)} 个）")
    return [points[idx]]
