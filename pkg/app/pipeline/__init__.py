"""固定流程执行所需的上下文、节点基类、产物目录与阶段编排"""

from app.pipeline.bundle import ArtifactBundle, BundleManifest, dumps
from app.pipeline.context import PipelineContext, TraceEvent
from app.pipeline.node_base import PipelineNode
from app.pipeline.runner import STAGES, build_stage, run_stage, run_step

__all__ = [
    "ArtifactBundle",
    "BundleManifest",
    "PipelineContext",
    "PipelineNode",
    "STAGES",
    "TraceEvent",
    "build_stage",
    "dumps",
    "run_stage",
    "run_step",
]
