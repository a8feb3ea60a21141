"""管线执行上下文 - 承载一次运行的全局状态"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Any, Dict, List, Optional

from app.cli.settings import RunConfig
from app.core.conley import ConleyPair, VerificationReport
from app.core.entities import FlowConfig
from app.core.geometry import CriticalPoint, Mesh, ScalarField, Surface
from app.core.thicken import EntranceTimeBound, Thickening
from app.pipeline.bundle import ArtifactBundle


@dataclass
class TraceEvent:
    node_id: str
    status: str
    elapsed_ms: Optional[int] = None
    error: Optional[str] = None
    output_keys: Optional[List[str]] = None


@dataclass
class PipelineContext:
    """管线执行上下文，承载执行过程中的全局状态

    Attributes:
        config: 运行配置
        bundle: 产物目录，None 时不读写文件
        critical: 全部临界点（按值排序）
        pairs: 临界点编号 -> Conley 对
        thickenings / bounds: 加厚类型名 -> 加厚族 / 入口时间界
        result: 本阶段输出到 stdout 的 JSON
        failures: 未通过的校验项，非空时退出码为 1
    """

    config: RunConfig
    bundle: Optional[ArtifactBundle] = None

    # 运行标识（只用于日志，不写入报告）
    run_id: str = dc_field(default_factory=lambda: f"r_{uuid.uuid4().hex[:12]}")

    # 几何
    surface: Optional[Surface] = None
    field: Optional[ScalarField] = None
    mesh: Optional[Mesh] = None
    critical: List[CriticalPoint] = dc_field(default_factory=list)

    # Conley 对与加厚
    pairs: Dict[int, ConleyPair] = dc_field(default_factory=dict)
    verifications: Dict[int, VerificationReport] = dc_field(default_factory=dict)
    thickenings: Dict[str, List[Thickening]] = dc_field(default_factory=dict)
    bounds: Dict[str, List[EntranceTimeBound]] = dc_field(default_factory=dict)

    # 输出
    result: Dict[str, Any] = dc_field(default_factory=dict)
    failures: List[str] = dc_field(default_factory=list)

    # 执行追踪
    trace: List[TraceEvent] = dc_field(default_factory=list)

    # 扩展字段存储
    extra: Dict[str, Any] = dc_field(default_factory=dict)

    @property
    def flow(self) -> FlowConfig:
        return self.config.flow_config()

    @property
    def passed(self) -> bool:
        return not self.failures

    def key(self, stage: str) -> str:
        return self.config.stage_key(stage)

    def fail(self, item: str) -> None:
        """记录一项未通过的校验（不中断管线）"""
        if item not in self.failures:
            self.failures.append(item)

    def require_mesh(self) -> Mesh:
        if self.mesh is None:
            raise RuntimeError("网格尚未构造")
        return self.mesh

    def require_field(self) -> ScalarField:
        if self.field is None:
            raise RuntimeError("标量函数尚未构造")
        return self.field

    def add_trace(self, node_id: str, status: str, **details: Any) -> None:
        """追加一条节点执行记录（elapsed_ms / error / output_keys）"""
        self.trace.append(TraceEvent(node_id, status, **details))

    def get(self, key: str, default: Any = None) -> Any:
        """获取上下文中的值，优先从标准字段获取，否则从 extra 获取"""
        if hasattr(self, key) and key != "extra":
            return getattr(self, key)
        return self.extra.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """设置上下文中的值，优先写入标准字段，否则写入 extra"""
        if hasattr(self, key) and key not in ("extra", "trace", "config", "run_id"):
            setattr(self, key, value)
        else:
            self.extra[key] = value
