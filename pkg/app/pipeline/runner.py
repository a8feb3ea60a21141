"""阶段编排：把节点串成 CLI 的各个子命令，逐步记录耗时"""

from __future__ import annotations

import time
from typing import Any, Dict, List, Optional, Tuple

from app.core.errors import InvalidParametersError
from app.core.geometry import make_surface
from app.core.utils.logger import setup_logger
from app.pipeline.context import PipelineContext
from app.pipeline.node_base import PipelineNode
from app.pipeline.nodes import (
    CoverNode,
    CritNode,
    HomologyNode,
    MeshNode,
    MinimaxNode,
    PairsNode,
    ReportNode,
    ThickenNode,
    VerifyNode,
    parse_kind,
)

logger = setup_logger("pipeline")

STAGES = ("crit", "conley", "thicken", "cover", "homology", "minimax", "report")


def build_stage(
    stage: str,
    kind: str = "forward",
    band: Optional[Tuple[float, float]] = None,
    recheck: bool = True,
    export: bool = False,
    with_flow: bool = True,
) -> List[PipelineNode]:
    """子命令对应的节点序列

    with_flow=False（曲面没有坐标卡）时 report 只做同调部分。

    Raises:
        InvalidParametersError: 未知子命令或加厚类型
    """
    if stage not in STAGES:
        raise InvalidParametersError(f"未知子命令 {stage!r}，可选 {', '.join(STAGES)}")
    if stage == "homology":
        return [MeshNode("mesh", {"field": "none"}), HomologyNode("homology", {"export": export})]
    if stage == "report" and not with_flow:
        return [MeshNode("mesh", {"field": "none"}), ReportNode("report")]
    if stage == "report":
        return [
            MeshNode("mesh"),
            CritNode("crit"),
            PairsNode("pairs"),
            ThickenNode("thicken_forward", {"kind": "forward", "invariance": False}),
            ThickenNode("thicken_ambient", {"kind": "ambient"}),
            MinimaxNode("minimax", {"recheck": False, "table": False}),
            ReportNode("report"),
        ]

    nodes: List[PipelineNode] = [MeshNode("mesh", {"export": export}), CritNode("crit")]
    if stage == "conley":
        nodes += [PairsNode("pairs", {"selector": "config"}), VerifyNode("verify", {"export": export})]
    elif stage in ("thicken", "cover"):
        kind = parse_kind(kind)
        if kind != "ambient-u":
            nodes.append(PairsNode("pairs"))
        nodes.append(ThickenNode(f"thicken_{kind}", {"kind": kind, "invariance": stage == "thicken"}))
        if stage == "cover":
            nodes.append(CoverNode("cover", {"kind": kind}))
    elif stage == "minimax":
        nodes.append(MinimaxNode("minimax", {"band": band, "recheck": recheck, "export": export}))
    return nodes


def run_step(node: PipelineNode, ctx: PipelineContext) -> None:
    """执行单个节点，记录耗时日志，异常时记录错误后重新抛出。"""
    prefix = f"run={ctx.run_id}"
    start = time.time()
    logger.info("step start %s step=%s", prefix, node.node_id)
    try:
        node(ctx)
    except Exception as e:
        elapsed_ms = int((time.time() - start) * 1000)
        logger.error("step failed %s step=%s elapsed_ms=%d error=%s", prefix, node.node_id, elapsed_ms, e)
        ctx.add_trace(node.node_id, "failed", elapsed_ms=elapsed_ms, error=str(e))
        raise
    elapsed_ms = int((time.time() - start) * 1000)
    logger.info("step done %s step=%s elapsed_ms=%d", prefix, node.node_id, elapsed_ms)
    ctx.add_trace(node.node_id, "done", elapsed_ms=elapsed_ms, output_keys=node.get_output_keys())


def run_stage(ctx: PipelineContext, stage: str, **options: Any) -> Dict[str, Any]:
    """按顺序执行子命令的节点，返回本阶段的 JSON 结果"""
    if stage == "report":
        options.setdefault("with_flow", make_surface(ctx.config.surface).has_chart)
    for node in build_stage(stage, **options):
        run_step(node, ctx)
    if ctx.failures:
        logger.warning(f"{stage} 未通过: {ctx.failures}")
    return ctx.result
