"""Pipeline 节点实现"""

from app.pipeline.nodes.core import (
    KIND_NAMES,
    CoverNode,
    CritNode,
    HomologyNode,
    MeshNode,
    MinimaxNode,
    PairsNode,
    ReportNode,
    ThickenNode,
    VerifyNode,
    child_seeds,
    parse_kind,
)

__all__ = [
    # 几何
    "MeshNode",
    "CritNode",
    # Conley 对
    "PairsNode",
    "VerifyNode",
    # 加厚
    "ThickenNode",
    "CoverNode",
    # 同调与极小极大
    "HomologyNode",
    "MinimaxNode",
    "ReportNode",
    "KIND_NAMES",
    "child_seeds",
    "parse_kind",
]
