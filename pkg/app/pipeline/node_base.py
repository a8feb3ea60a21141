"""Pipeline 节点抽象基类"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Tuple

from app.pipeline.context import PipelineContext


class PipelineNode(ABC):
    """管线节点：读上下文、算一步、把结果与产物写回上下文

    子类用 requires 声明运行前必须就绪的上下文字段，缺失时在执行前报错，
    不会带着半成品继续算。
    """

    requires: Tuple[str, ...] = ()

    def __init__(self, node_id: str, params: Dict[str, Any] | None = None):
        """
        Args:
            node_id: 节点标识（日志中的 step 名）
            params: 节点参数
        """
        self.node_id = node_id
        self.params = params or {}

    def missing(self, ctx: PipelineContext) -> List[str]:
        return [k for k in self.requires if not ctx.get(k)]

    def __call__(self, ctx: PipelineContext) -> None:
        missing = self.missing(ctx)
        if missing:
            raise RuntimeError(f"{self.node_id} 缺少前置结果: {', '.join(missing)}")
        self.run(ctx)

    @abstractmethod
    def run(self, ctx: PipelineContext) -> None:
        """执行节点逻辑，结果写入 ctx"""

    @abstractmethod
    def get_output_keys(self) -> List[str]:
        """该节点写入上下文的字段名"""

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(node_id={self.node_id!r})"
