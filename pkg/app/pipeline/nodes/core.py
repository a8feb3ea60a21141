"""核心节点实现：每个 CLI 阶段由下列节点按顺序组成"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.conley import ConleyPair, build_conley_pair, verify_conley_pair
from app.core.entities import ThickeningKind
from app.core.errors import InvalidParametersError
from app.core.flow import integrate, write_trajectory_csv
from app.core.geometry import (
    CriticalPoint,
    build_mesh,
    builtin_field,
    find_critical_points,
    is_morse,
    make_surface,
    min_pairwise_distance,
    morse_counts,
    select_points,
    write_mesh_text,
)
from app.core.homology import (
    betti_numbers,
    cat_bounds,
    complex_of,
    cuplength,
    reduced_betti_numbers,
    subordination_chain,
    write_complex_triples,
)
from app.core.minimax import (
    REFERENCE_VALUES,
    build_filtration,
    inequality_report,
    kappa_table,
    subordinated_minimax,
    threshold_scan,
    write_scan_csv,
)
from app.core.thicken import (
    EntranceTimeBound,
    Thickening,
    ambient_thickenings,
    backward_sweep,
    forward_invariance_check,
    forward_thickenings,
    unstable_ambient_thickenings,
    verify_cover,
)
from app.core.utils.cache import generate_cache_key, get_critical_cache, get_or_compute, get_sweep_cache
from app.core.utils.logger import setup_logger
from app.core.utils.parallel import ordered_map
from app.pipeline.context import PipelineContext
from app.pipeline.node_base import PipelineNode

logger = setup_logger("pipeline_nodes")

# CLI 中的加厚类型名
KIND_NAMES: Dict[str, ThickeningKind] = {
    "forward": ThickeningKind.FORWARD_W,
    "ambient": ThickeningKind.AMBIENT_U_STAR,
    "ambient-u": ThickeningKind.AMBIENT_U,
}

# 前向不变性检查的时间上限
INVARIANCE_T_MAX = 5.0


def parse_kind(name: str) -> str:
    key = str(name).strip().lower()
    if key not in KIND_NAMES:
        raise InvalidParametersError(f"未知的加厚类型 {name!r}，可选 {', '.join(KIND_NAMES)}")
    return key


def child_seeds(seed: int, count: int) -> List[int]:
    """从同一个种子按任务顺序派生子种子"""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


# ============ 几何 ============


class MeshNode(PipelineNode):
    """构造曲面、标量函数与网格

    params:
        field: "required"（默认）必须有函数；"optional" 曲面没有坐标卡时不要函数；
               "none" 只要三角剖分
        export: 是否导出 mesh.txt
    """

    def run(self, ctx: PipelineContext) -> None:
        cfg = ctx.config
        mode = self.params.get("field", "required")
        surface = make_surface(cfg.surface)
        field = None
        if mode == "required" or (mode == "optional" and surface.has_chart):
            field = builtin_field(cfg.field, surface)
        mesh = build_mesh(surface, field, cfg.n, cfg.subdivisions)
        ctx.surface, ctx.field, ctx.mesh = surface, field, mesh
        logger.info(f"网格 {surface.descriptor} n={mesh.n}: V={mesh.V} E={mesh.E} F={mesh.F}")

        if self.params.get("export") and ctx.bundle is not None:
            write_mesh_text(mesh, ctx.bundle.path("mesh.txt"))
            ctx.bundle.register("mesh.txt", ctx.key("mesh"))

    def get_output_keys(self) -> List[str]:
        return ["surface", "field", "mesh"]


class CritNode(PipelineNode):
    """临界点搜索：优先读 critical_points.json，其次 diskcache，最后重新计算"""

    requires = ("mesh", "field")
    artifact = "critical_points.json"

    def run(self, ctx: PipelineContext) -> None:
        mesh, field = ctx.require_mesh(), ctx.require_field()
        key = ctx.key("critical")
        bundle = ctx.bundle
        if bundle is not None and bundle.has(self.artifact, key):
            data = bundle.read(self.artifact, key)
            points = [CriticalPoint.from_dict(d) for d in data["points"]]
            logger.info(f"复用 {self.artifact}: {len(points)} 个临界点")
        else:
            points = get_or_compute(get_critical_cache(), key, lambda: find_critical_points(field, mesh))
            logger.info(f"找到 {len(points)} 个临界点")
        ctx.critical = list(points)

        payload = self._payload(ctx)
        if bundle is not None:
            bundle.write(self.artifact, payload, key)
        ctx.result = payload

    def _payload(self, ctx: PipelineContext) -> Dict[str, Any]:
        mesh = ctx.require_mesh()
        points = ctx.critical
        morse = is_morse(points)
        return {
            "stage": "crit",
            "surface": mesh.surface.descriptor,
            "field": ctx.config.field,
            "n": mesh.n,
            "count": len(points),
            "morse": morse,
            "morse_counts": morse_counts(points, mesh.dim) if morse else None,
            "min_distance": min_pairwise_distance(points, mesh.surface) if len(points) > 1 else None,
            "selected": [p.id for p in select_points(points, ctx.config.crit, mesh.dim)],
            "points": [p.to_dict() for p in points],
        }

    def get_output_keys(self) -> List[str]:
        return ["critical"]


# ============ Conley 对 ============


def pair_artifact(critical_id: int) -> str:
    return f"pairs/pair_{critical_id}.json"


class PairsNode(PipelineNode):
    """为选中的临界点构造 Conley 对，已有且配置键一致的 pair 文件直接读取

    params:
        selector: "config" 用 --crit 选择器，"all"（默认）取全部临界点
    """

    requires = ("mesh", "field", "critical")

    def run(self, ctx: PipelineContext) -> None:
        cfg, mesh, field = ctx.config, ctx.require_mesh(), ctx.require_field()
        selector = cfg.crit if self.params.get("selector", "all") == "config" else "all"
        points = select_points(ctx.critical, selector, mesh.dim)
        if not points:
            raise InvalidParametersError(f"选择器 {selector!r} 没有选中任何临界点")

        key = ctx.key("pair")
        bundle = ctx.bundle
        todo: List[CriticalPoint] = []
        for x in points:
            name = pair_artifact(x.id)
            if bundle is not None and bundle.has(name, key):
                data = bundle.read(name, key)
                ctx.pairs[x.id] = ConleyPair.from_dict(data, x, int(mesh.nearest_vertex(x.point)))
            elif x.id not in ctx.pairs:
                todo.append(x)
        if len(todo) < len(points):
            logger.info(f"复用 {len(points) - len(todo)} 个 Conley 对")

        flow = ctx.flow
        built = ordered_map(
            lambda x: build_conley_pair(field, mesh, x, cfg.epsilon, cfg.tau, flow=flow),
            todo,
            label="conley",
        )
        for pair in built:
            ctx.pairs[pair.critical.id] = pair
            if bundle is not None:
                bundle.write(pair_artifact(pair.critical.id), {**pair.to_dict(), "verification": None}, key)
        ctx.set("selected", [x.id for x in points])

    def get_output_keys(self) -> List[str]:
        return ["pairs", "selected"]


class VerifyNode(PipelineNode):
    """抽样校验选中的 Conley 对，校验结果随 pair 文件一起写出

    每个对从运行种子按顺序派生一个子种子，与线程数无关。

    params:
        export: 是否导出每个对的一条轨线 trajectory_<k>.csv
    """

    requires = ("mesh", "field", "pairs", "selected")

    def run(self, ctx: PipelineContext) -> None:
        cfg, mesh, field = ctx.config, ctx.require_mesh(), ctx.require_field()
        pairs = [ctx.pairs[i] for i in ctx.get("selected")]
        seeds = child_seeds(cfg.seed, len(pairs))
        flow = ctx.flow
        reports = ordered_map(
            lambda item: verify_conley_pair(
                item[0], field, mesh, m=cfg.samples, seed=item[1], critical=ctx.critical, flow=flow
            ),
            list(zip(pairs, seeds)),
            label="verify",
        )

        entries = []
        for pair, report in zip(pairs, reports):
            k = pair.critical.id
            ctx.verifications[k] = report
            data = {**pair.to_dict(), "verification": report.to_dict()}
            entries.append(data)
            if not report.passed:
                ctx.fail(f"pair_{k}")
            if ctx.bundle is not None:
                ctx.bundle.write(pair_artifact(k), data, ctx.key("pair"))
                if self.params.get("export"):
                    self._export_trajectory(ctx, pair)

        ctx.result = {
            "stage": "conley",
            "selector": cfg.crit,
            "seed": cfg.seed,
            "rng": "PCG64",
            "samples": cfg.samples,
            "passed": all(r.passed for r in reports),
            "pairs": entries,
        }

    def _export_trajectory(self, ctx: PipelineContext, pair: ConleyPair) -> None:
        """从第一个入口顶点（没有则取 N 的最小顶点）出发积分 2τ"""
        mesh = ctx.require_mesh()
        start = min(pair.n_plus) if pair.n_plus else min(pair.N)
        traj = integrate(ctx.require_field(), mesh.params[start], 2.0 * pair.tau, ctx.flow)
        name = f"trajectory_{pair.critical.id}.csv"
        write_trajectory_csv(traj, ctx.bundle.path(name))
        ctx.bundle.register(name, ctx.key("pair"))

    def get_output_keys(self) -> List[str]:
        return ["verifications", "result"]


# ============ 加厚与覆盖 ============


def thickening_artifact(kind: str, critical_id: int) -> str:
    return f"thickenings/{kind}_{critical_id}.json"


class ThickenNode(PipelineNode):
    """构造一族加厚：forward（𝒲ᵢ）、ambient（𝒰ᵢ*）或 ambient-u（对 -f 的 𝒰ᵢ）

    params:
        kind: 加厚类型名
        invariance: forward 时是否抽样检查前向不变性（默认是）
    """

    requires = ("mesh", "field", "critical")

    def run(self, ctx: PipelineContext) -> None:
        kind = parse_kind(self.params.get("kind", "forward"))
        key = ctx.key("thickening")
        loaded = self._load(ctx, kind, key)
        if loaded is None:
            ths, bounds = self._compute(ctx, kind)
            self._write(ctx, kind, key, ths, bounds)
        else:
            ths, bounds = loaded
            logger.info(f"复用 {len(ths)} 个 {kind} 加厚")
        ctx.thickenings[kind] = ths
        ctx.bounds[kind] = bounds

        invariance = []
        if kind == "forward" and self.params.get("invariance", True):
            invariance = self._invariance(ctx, ths)

        by_id = {b.critical_point: b for b in bounds}
        ctx.result = {
            "stage": "thicken",
            "kind": kind,
            "passed": all(item["passed"] for item in invariance),
            "family": [self._summary(th, by_id.get(th.critical.id)) for th in ths],
            "invariance": invariance,
        }

    def _compute(self, ctx: PipelineContext, kind: str) -> Tuple[List[Thickening], List[EntranceTimeBound]]:
        cfg, mesh, field, flow = ctx.config, ctx.require_mesh(), ctx.require_field(), ctx.flow
        if kind == "ambient-u":
            return unstable_ambient_thickenings(field, mesh, cfg.epsilon, cfg.tau, flow=flow)
        missing = [x.id for x in ctx.critical if x.id not in ctx.pairs]
        if missing:
            raise RuntimeError(f"缺少临界点 {missing} 的 Conley 对")
        pairs = [ctx.pairs[x.id] for x in ctx.critical]
        if kind == "ambient":
            return ambient_thickenings(field, mesh, pairs, ctx.critical, flow=flow)
        sweep_key = generate_cache_key(["sweep", ctx.key("thickening")])
        sweep = get_or_compute(
            get_sweep_cache(),
            sweep_key,
            lambda: backward_sweep(field, mesh, pairs, ctx.critical, flow=flow),
        )
        return forward_thickenings(field, mesh, pairs, ctx.critical, flow=flow, sweep=sweep), []

    def _write(
        self,
        ctx: PipelineContext,
        kind: str,
        key: str,
        ths: Sequence[Thickening],
        bounds: Sequence[EntranceTimeBound],
    ) -> None:
        if ctx.bundle is None:
            return
        by_id = {b.critical_point: b for b in bounds}
        for order, th in enumerate(ths):
            bound = by_id.get(th.critical.id)
            data = {
                **th.to_dict(),
                "critical": th.critical.to_dict(),
                "entrance_time": None if bound is None else bound.to_dict(),
                "order": order,
                "family_size": len(ths),
            }
            ctx.bundle.write(thickening_artifact(kind, th.critical.id), data, key)

    def _load(
        self, ctx: PipelineContext, kind: str, key: str
    ) -> Optional[Tuple[List[Thickening], List[EntranceTimeBound]]]:
        bundle = ctx.bundle
        if bundle is None:
            return None
        names = bundle.names(f"thickenings/{kind}_")
        if not names or not all(bundle.has(name, key) for name in names):
            return None
        records = sorted((bundle.read(name, key) for name in names), key=lambda d: d["order"])
        if any(d["family_size"] != len(records) for d in records):
            return None
        if kind != "ambient-u" and {d["critical_point"] for d in records} != {x.id for x in ctx.critical}:
            return None
        ths, bounds = [], []
        for data in records:
            ths.append(Thickening.from_dict(data, CriticalPoint.from_dict(data["critical"])))
            if data.get("entrance_time") is not None:
                bounds.append(EntranceTimeBound.from_dict(data["entrance_time"]))
        return ths, bounds

    def _invariance(self, ctx: PipelineContext, ths: Sequence[Thickening]) -> List[Dict[str, Any]]:
        cfg, mesh, field, flow = ctx.config, ctx.require_mesh(), ctx.require_field(), ctx.flow
        seeds = child_seeds(cfg.seed + 1, len(ths))
        results = ordered_map(
            lambda item: forward_invariance_check(
                field, item[0], mesh, m=cfg.samples, seed=item[1], t_max=INVARIANCE_T_MAX, flow=flow
            ),
            list(zip(ths, seeds)),
            label="invariance",
        )
        out = []
        for th, (ok, checked, examples) in zip(ths, results):
            if not ok:
                ctx.fail(f"invariance_{th.critical.id}")
            out.append(
                {"critical_point": th.critical.id, "passed": ok, "checked": checked, "counterexamples": examples}
            )
        return out

    @staticmethod
    def _summary(th: Thickening, bound: Optional[EntranceTimeBound]) -> Dict[str, Any]:
        return {
            "critical_point": th.critical.id,
            "value": float(th.critical.value),
            "index": th.critical.index,
            "vertices": len(th),
            "T": th.T,
            "calT": th.calT,
            "truncated": th.truncated,
            "entrance_time": None if bound is None else bound.to_dict(),
        }

    def get_output_keys(self) -> List[str]:
        return ["thickenings", "bounds"]


class CoverNode(PipelineNode):
    """检查加厚族：覆盖、同值不交、同调可缩"""

    requires = ("mesh", "thickenings")
    artifact = "cover.json"

    def run(self, ctx: PipelineContext) -> None:
        kind = parse_kind(self.params.get("kind", "forward"))
        ths = ctx.thickenings.get(kind)
        if not ths:
            raise RuntimeError(f"没有 {kind} 加厚")
        report = verify_cover(ths, ctx.require_mesh())
        if not report.passed:
            ctx.fail(f"cover_{kind}")
        data = {"stage": "cover", "kind": kind, **report.to_dict()}
        if ctx.bundle is not None:
            ctx.bundle.write(self.artifact, data, ctx.key("thickening"))
        ctx.result = data

    def get_output_keys(self) -> List[str]:
        return ["result"]


# ============ 同调与极小极大 ============


class HomologyNode(PipelineNode):
    """GF(2) Betti 数、杯长、从属数与 cat 的界，并与已知值比对"""

    requires = ("mesh",)
    artifact = "homology.json"

    def run(self, ctx: PipelineContext) -> None:
        mesh = ctx.require_mesh()
        cx = complex_of(mesh)
        cupp = cuplength(cx)
        chain = subordination_chain(cx)
        bounds = cat_bounds(cx, cupp=cupp)
        reference = REFERENCE_VALUES.get(mesh.surface.kind)
        matches = None
        if reference is not None:
            matches = cupp == reference["cupp"] and (bounds.exact is None or bounds.exact == reference["cat"])
            if not matches:
                ctx.fail("homology_reference")

        data = {
            "stage": "homology",
            "surface": mesh.surface.descriptor,
            "complex": {"vertices": mesh.V, "edges": mesh.E, "faces": mesh.F},
            "euler_characteristic": mesh.euler_characteristic,
            "betti": list(betti_numbers(cx)),
            "reduced_betti": list(reduced_betti_numbers(cx)),
            "cuplength": cupp,
            "sub": chain.length,
            "subordination_chain": chain.to_dict(),
            "cat": bounds.to_dict(),
            "reference": reference,
            "matches_reference": matches,
        }
        ctx.set("complex", cx)
        if ctx.bundle is not None:
            key = ctx.key("homology")
            ctx.bundle.write(self.artifact, data, key)
            if self.params.get("export"):
                write_complex_triples(cx, ctx.bundle.path("complex.txt"))
                ctx.bundle.register("complex.txt", key)
        ctx.result = data

    def get_output_keys(self) -> List[str]:
        return ["complex", "result"]


class MinimaxNode(PipelineNode):
    """下星过滤上的 κ 表与从属链

    params:
        band: (a, b)，None 为整体情形
        recheck: 是否在 κ 两侧重建商复形复核
        table: 是否计算全部基类的 κ 表（report 阶段只要从属链）
        export: 是否导出每个基类的阈值扫描 scan_<k>.csv
    """

    requires = ("mesh", "critical")
    artifact = "minimax.json"

    def run(self, ctx: PipelineContext) -> None:
        mesh = ctx.require_mesh()
        band = self.params.get("band")
        recheck = self.params.get("recheck", True)
        a, b = band if band is not None else (None, None)
        filt = build_filtration(mesh, a, b)
        ctx.set("filtration", filt)

        table = kappa_table(filt, ctx.critical, recheck) if self.params.get("table", True) else []
        chain = subordinated_minimax(filt, ctx.critical, recheck) if filt.is_global else []
        ctx.set("chain", chain)

        for i, res in enumerate(table):
            if not res.passed:
                ctx.fail(f"kappa_{i}")
        chain_ok = all(p.strict and p.distinct for p in chain)
        if not chain_ok:
            ctx.fail("subordinated_chain")

        data = {
            "stage": "minimax",
            "band": {"a": filt.a, "b": filt.b, "global": filt.is_global},
            "tol_match": 2.0 * mesh.max_edge_gap,
            "passed": all(r.passed for r in table) and chain_ok,
            "classes": [r.to_dict() for r in table],
            "chain": [p.to_dict() for p in chain],
        }
        if ctx.bundle is not None:
            key = ctx.key("minimax")
            ctx.bundle.write(self.artifact, data, key)
            if self.params.get("export"):
                for i, res in enumerate(table):
                    name = f"scan_{i}.csv"
                    write_scan_csv(threshold_scan(res.cls, filt), ctx.bundle.path(name))
                    ctx.bundle.register(name, key)
        ctx.result = data

    def get_output_keys(self) -> List[str]:
        return ["filtration", "chain", "result"]


class ReportNode(PipelineNode):
    """不等式总表；没有函数的曲面只给同调部分"""

    requires = ("mesh",)
    artifact = "report.json"

    def run(self, ctx: PipelineContext) -> None:
        mesh = ctx.require_mesh()
        if ctx.field is None:
            report = inequality_report(mesh)
        else:
            filt = ctx.get("filtration")
            report = inequality_report(
                mesh,
                None if filt is None else filt.complex,
                ctx.critical,
                ctx.thickenings.get("forward"),
                ctx.thickenings.get("ambient"),
                ctx.get("chain") or (),
            )
        if not report.passed:
            ctx.fail("report")

        cfg = ctx.config
        data = {
            "stage": "report",
            "config": cfg.public_dict(),
            "seed": cfg.seed,
            "rng": "PCG64",
            **report.to_dict(),
        }
        if ctx.bundle is not None:
            ctx.bundle.write(self.artifact, data, ctx.key("report"))
        ctx.result = data

    def get_output_keys(self) -> List[str]:
        return ["result"]
