"""曲面的三角剖分采样

环面为 n×n 周期网格，圆周为 n 边形，球面为细分二十面体（两个对径顶点落在高度极值上），
RP² 为 6 顶点极小三角剖分（可做重心细分）。
"""

from __future__ import annotations

from functools import cached_property
from itertools import permutations
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..entities import SurfaceKind
from ..errors import ResolutionTooSmallError, UnsupportedCombinationError
from ..utils.logger import setup_logger
from .fields import ScalarField
from .surfaces import DEFAULT_RESOLUTION, TWO_PI, Surface

logger = setup_logger("mesh")

MIN_RESOLUTION = 8

# 球面网格绕 z 轴的旋转角，使顶点避开坐标卡极点 (0, ±ρ, 0)
_SPHERE_ROTATION = 0.1

RP2_FACES = [
    (1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6),
]


class Mesh:
    """顶点带参数坐标、嵌入坐标和函数值的三角剖分

    Attributes:
        surface: 所属曲面
        n: 分辨率参数
        params: (V, dim) 参数坐标（RP² 为零）
        points: (V, 3) 嵌入坐标（RP² 为零）
        values: (V,) 顶点函数值（无函数时为零）
        edges: (E, 2) 排序后的边
        triangles: (F, 3) 排序后的三角形，一维时为空
    """

    def __init__(
        self,
        surface: Surface,
        n: int,
        params: np.ndarray,
        points: np.ndarray,
        values: np.ndarray,
        edges: np.ndarray,
        triangles: np.ndarray,
        field: Optional[ScalarField] = None,
        subdivisions: int = 0,
    ):
        self.surface = surface
        self.n = n
        self.params = params
        self.points = points
        self.values = values
        self.edges = edges
        self.triangles = triangles
        self.field = field
        self.subdivisions = subdivisions

    @property
    def V(self) -> int:
        return int(self.values.shape[0])

    @property
    def E(self) -> int:
        return int(self.edges.shape[0])

    @property
    def F(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def dim(self) -> int:
        return self.surface.dim

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.E, dtype=np.int8)
        A = sparse.coo_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(self.V, self.V)
        )
        return A.tocsr()

    def neighbors(self, i: int) -> np.ndarray:
        A = self.adjacency
        return A.indices[A.indptr[i] : A.indptr[i + 1]]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.points[self.edges[:, 0]] - self.points[self.edges[:, 1]], axis=1)

    @property
    def mean_edge_length(self) -> float:
        return float(np.mean(self.edge_lengths)) if self.E else 0.0

    @cached_property
    def edge_gaps(self) -> np.ndarray:
        """每条边两端的 |Δf|"""
        return np.abs(self.values[self.edges[:, 0]] - self.values[self.edges[:, 1]])

    @property
    def mean_edge_gap(self) -> float:
        return float(np.mean(self.edge_gaps)) if self.E else 0.0

    @property
    def max_edge_gap(self) -> float:
        return float(np.max(self.edge_gaps)) if self.E else 0.0

    @cached_property
    def tree(self) -> cKDTree:
        if not self.surface.has_chart:
            raise UnsupportedCombinationError("RP² 网格没有嵌入坐标")
        return cKDTree(self.points)

    def nearest_vertex(self, u) -> Union[int, np.ndarray]:
        """参数点的最近顶点（嵌入距离）"""
        X = self.surface.chart(u)
        _, idx = self.tree.query(X)
        return int(idx) if np.ndim(idx) == 0 else idx

    def component_count(self, vertices) -> int:
        """顶点子集诱导子图的连通分支数"""
        vs = np.asarray(sorted(vertices), dtype=int)
        if vs.size == 0:
            return 0
        sub = self.adjacency[vs][:, vs]
        count, _ = connected_components(sub, directed=False)
        return int(count)

    def with_field(self, field: ScalarField) -> "Mesh":
        """同一剖分上换一个函数（如 -f）"""
        return Mesh(
            self.surface,
            self.n,
            self.params,
            self.points,
            field.value(self.params) if self.V else self.values,
            self.edges,
            self.triangles,
            field=field,
            subdivisions=self.subdivisions,
        )


def _edges_of(triangles: np.ndarray) -> np.ndarray:
    pairs = np.concatenate([triangles[:, [0, 1]], triangles[:, [0, 2]], triangles[:, [1, 2]]])
    pairs.sort(axis=1)
    return np.unique(pairs, axis=0)


def _circle_complex(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    theta = TWO_PI * np.arange(n) / n
    k = np.arange(n)
    edges = np.sort(np.stack([k, (k + 1) % n], axis=1), axis=1)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return theta[:, None], edges, np.zeros((0, 3), dtype=int)


def _torus_complex(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grid = TWO_PI * np.arange(n) / n
    A, B = np.meshgrid(grid, grid, indexing="ij")
    params = np.stack([A.ravel(), B.ravel()], axis=1)

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    a = i * n + j
    b = ((i + 1) % n) * n + j
    c = ((i + 1) % n) * n + (j + 1) % n
    d = i * n + (j + 1) % n
    tris = np.concatenate([np.stack([a, b, c], axis=1), np.stack([a, c, d], axis=1)])
    tris.sort(axis=1)
    return params, _edges_of(tris), tris


def _icosahedron() -> Tuple[np.ndarray, List[Tuple[int, int, int]]]:
    """两个顶点位于 (0, 0, ±1) 的正二十面体"""
    h = 1.0 / np.sqrt(5.0)
    rad = 2.0 / np.sqrt(5.0)
    verts = [(0.0, 0.0, 1.0)]
    for k in range(5):
        phi = TWO_PI * k / 5
        verts.append((rad * np.cos(phi), rad * np.sin(phi), h))
    for k in range(5):
        phi = TWO_PI * k / 5 + np.pi / 5
        verts.append((rad * np.cos(phi), rad * np.sin(phi), -h))
    verts.append((0.0, 0.0, -1.0))

    faces = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        faces.append((0, u0, u1))
        faces.append((u0, l0, u1))
        faces.append((l0, l1, u1))
        faces.append((11, l1, l0))
    return np.asarray(verts), faces


def _icosphere(level: int) -> Tuple[np.ndarray, np.ndarray]:
    verts, faces = _icosahedron()
    points = [tuple(v) for v in verts]
    for _ in range(level):
        cache: Dict[Tuple[int, int], int] = {}

        def midpoint(p: int, q: int) -> int:
            key = (min(p, q), max(p, q))
            if key not in cache:
                m = (np.asarray(points[p]) + np.asarray(points[q])) / 2.0
                points.append(tuple(m / np.linalg.norm(m)))
                cache[key] = len(points) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = new_faces

    P = np.asarray(points)
    cz, sz = np.cos(_SPHERE_ROTATION), np.sin(_SPHERE_ROTATION)
    rot = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    tris = np.sort(np.asarray(faces, dtype=int), axis=1)
    return P @ rot.T, tris


def sphere_level(n: int) -> int:
    """分辨率 n 对应的二十面体细分层数"""
    return max(1, int(np.ceil(np.log2(n / 5.0))))


def _barycentric(triangles: np.ndarray, n_vertices: int) -> Tuple[np.ndarray, int]:
    """一次重心细分：新顶点依次为原顶点、边、三角形"""
    edges = _edges_of(triangles)
    edge_id = {tuple(e): n_vertices + k for k, e in enumerate(edges.tolist())}
    base = n_vertices + len(edges)
    new = []
    for t, tri in enumerate(triangles.tolist()):
        center = base + t
        for a, b, c in permutations(tri):
            e = edge_id[(min(a, b), max(a, b))]
            new.append(sorted((a, e, center)))
    return np.asarray(new, dtype=int), base + len(triangles)


def _rp2_complex(subdivisions: int) -> Tuple[int, np.ndarray]:
    tris = np.asarray([[v - 1 for v in face] for face in RP2_FACES], dtype=int)
    count = 6
    for _ in range(subdivisions):
        tris, count = _barycentric(tris, count)
    tris = np.unique(np.sort(tris, axis=1), axis=0)
    return count, tris


def build_mesh(
    s: Surface,
    field: Optional[ScalarField] = None,
    n: Optional[int] = None,
    subdivisions: int = 0,
) -> Mesh:
    """构造曲面的三角剖分并在顶点上求函数值

    Args:
        s: 曲面
        field: 顶点函数（RP² 可为 None）
        n: 每周期顶点数，None 时取曲面默认值；球面映射为细分层数 ceil(log2(n/5))
        subdivisions: RP² 的重心细分次数

    Raises:
        ResolutionTooSmallError: n < 8
        UnsupportedCombinationError: 函数不属于该曲面
    """
    n = DEFAULT_RESOLUTION[s.kind] if n is None else int(n)
    if n < MIN_RESOLUTION:
        raise ResolutionTooSmallError(f"分辨率 n={n} 过低，至少需要 {MIN_RESOLUTION}")
    if field is not None and field.surface != s:
        raise UnsupportedCombinationError(
            f"函数 {field.label} 定义在 {field.surface.descriptor} 上，而网格曲面为 {s.descriptor}"
        )

    if s.kind == SurfaceKind.CIRCLE:
        params, edges, tris = _circle_complex(n)
        points = s.chart(params)
    elif s.kind == SurfaceKind.TORUS:
        params, edges, tris = _torus_complex(n)
        points = s.chart(params)
    elif s.kind == SurfaceKind.SPHERE:
        unit, tris = _icosphere(sphere_level(n))
        points = s.rho * unit
        params = s.params_from_points(points)
        edges = _edges_of(tris)
    else:
        count, tris = _rp2_complex(subdivisions)
        params = np.zeros((count, 2))
        points = np.zeros((count, 3))
        edges = _edges_of(tris)

    values = field.value(params) if field is not None else np.zeros(params.shape[0])
    mesh = Mesh(s, n, params, points, np.asarray(values, dtype=float), edges, tris, field, subdivisions)

    if mesh.euler_characteristic != s.euler_characteristic:
        raise RuntimeError(
            f"网格欧拉示性数 {mesh.euler_characteristic} 与 {s.kind.value} 的 {s.euler_characteristic} 不符"
        )
    count, _ = connected_components(mesh.adjacency, directed=False)
    if count != 1:
        raise RuntimeError(f"网格边图不连通（{count} 个分支）")

    logger.debug(f"网格 {s.descriptor} n={n}: V={mesh.V} E={mesh.E} F={mesh.F}")
    return mesh


def write_mesh_text(mesh: Mesh, path: Union[str, Path]) -> Path:
    """导出网格：首行 "V E F"，随后 V 行 "u v x y z f"，再写三角形（一维写边）

    一维曲面的 v 列写 0。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{mesh.V} {mesh.E} {mesh.F}"]
    for k in range(mesh.V):
        u = mesh.params[k, 0]
        v = mesh.params[k, 1] if mesh.dim == 2 else 0.0
        x, y, z = mesh.points[k]
        lines.append(f"{u:.12g} {v:.12g} {x:.12g} {y:.12g} {z:.12g} {mesh.values[k]:.12g}")
    cells = mesh.triangles if mesh.F else mesh.edges
    lines.extend(" ".join(str(int(i)) for i in cell) for cell in cells)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
