"""
运行配置，基于 pydantic / pydantic-settings 实现。

RunConfig 描述一次计算（曲面、函数、分辨率、Conley 参数、积分参数、抽样与种子），
优先级为 默认值 < --config 文件 < 命令行参数；RuntimeSettings 只读环境变量
（前缀 CONLEY_KIT_），使用 lru_cache 保证进程内只实例化一次。
"""

from __future__ import annotations

from dataclasses import replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.config import DEFAULT_OUT_PATH, SCHEMA
from app.core.entities import DEFAULT_FLOW, FlowConfig
from app.core.errors import InvalidParametersError
from app.core.utils.cache import generate_cache_key

# 各类产物依赖的配置字段；字段不变时产物可以复用
_MESH_FIELDS = ("surface", "field", "n", "subdivisions")
_FLOW_FIELDS = ("h", "h_min", "delta_conv", "horizon")
STAGE_FIELDS: Dict[str, tuple] = {
    "mesh": _MESH_FIELDS,
    "critical": _MESH_FIELDS,
    "pair": _MESH_FIELDS + ("epsilon", "tau") + _FLOW_FIELDS,
    "verification": _MESH_FIELDS + ("epsilon", "tau", "samples", "seed") + _FLOW_FIELDS,
    "thickening": _MESH_FIELDS + ("epsilon", "tau", "samples", "seed") + _FLOW_FIELDS,
    "homology": ("surface", "n", "subdivisions"),
    "minimax": _MESH_FIELDS,
    "report": _MESH_FIELDS + ("epsilon", "tau", "samples", "seed") + _FLOW_FIELDS,
}


class RunConfig(BaseModel):
    """一次运行的全部参数，未知字段直接报错"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    surface: str = "torus:R=2,r=1"
    field: str = "height"
    # None 时按曲面取默认分辨率
    n: Optional[int] = Field(default=None, gt=0)
    # RP² 的重心细分次数
    subdivisions: int = Field(default=0, ge=0)
    epsilon: float = Field(default=0.2, gt=0)
    tau: float = Field(default=2.0, ge=1.0)
    h: float = Field(default=DEFAULT_FLOW.h, gt=0)
    h_min: float = Field(default=DEFAULT_FLOW.h_min, gt=0)
    delta_conv: float = Field(default=DEFAULT_FLOW.delta_conv, gt=0)
    horizon: float = Field(default=DEFAULT_FLOW.horizon, gt=0)
    # 公理校验、前向不变性等每项的抽样数
    samples: int = Field(default=500, ge=1)
    seed: int = Field(default=0, ge=0)
    # 临界点选择器：all / min / max / saddle / degenerate / 编号
    crit: str = "all"
    out: Path = DEFAULT_OUT_PATH

    @model_validator(mode="after")
    def _check_steps(self) -> "RunConfig":
        if self.h_min > self.h:
            raise ValueError(f"h_min={self.h_min:g} 大于初始步长 h={self.h:g}")
        if self.h > DEFAULT_FLOW.h_max:
            raise ValueError(f"初始步长 h={self.h:g} 超过上限 {DEFAULT_FLOW.h_max:g}")
        return self

    def flow_config(self) -> FlowConfig:
        return replace(
            DEFAULT_FLOW,
            h=self.h,
            h_min=self.h_min,
            delta_conv=self.delta_conv,
            horizon=self.horizon,
        )

    def public_dict(self) -> Dict[str, Any]:
        """写入报告的配置（不含输出目录）"""
        return self.model_dump(mode="json", exclude={"out"})

    def stage_key(self, stage: str) -> str:
        """某类产物的配置键"""
        try:
            names = STAGE_FIELDS[stage]
        except KeyError:
            raise InvalidParametersError(f"未知的产物类别: {stage!r}")
        values = self.public_dict()
        return generate_cache_key({"schema": SCHEMA, "stage": stage, **{k: values[k] for k in names}})


def _summarize(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item.get("loc", ())) or "config"
        parts.append(f"{where}: {item.get('msg', '')}")
    return "; ".join(parts)


def build_run_config(
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """合并配置文件与命令行参数（值为 None 的参数视为未给出）

    Raises:
        InvalidParametersError: 字段未知或取值不合法
    """
    data: Dict[str, Any] = dict(file_values or {})
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**data)
    except ValidationError as e:
        raise InvalidParametersError(f"运行参数不合法: {_summarize(e)}") from e


class RuntimeSettings(BaseSettings):
    """进程级设置，环境变量前缀为 CONLEY_KIT_。"""

    model_config = SettingsConfigDict(env_prefix="CONLEY_KIT_", extra="ignore")

    # 所有线程池的上限，至少为 1
    threads: int = Field(default=1, ge=1)
    # 日志级别名称（DEBUG / INFO / ...），为空时用 app.config.LOG_LEVEL
    log_level: Optional[str] = None
    # 是否启用 diskcache
    cache: bool = True


@lru_cache
def get_runtime_settings() -> RuntimeSettings:
    return RuntimeSettings()


def load_runtime_settings() -> RuntimeSettings:
    """读取环境变量；取值不合法时转成 InvalidParametersError"""
    try:
        return get_runtime_settings()
    except ValidationError as e:
        raise InvalidParametersError(f"环境变量不合法: {_summarize(e)}") from e


__all__ = [
    "RunConfig",
    "RuntimeSettings",
    "STAGE_FIELDS",
    "build_run_config",
    "get_runtime_settings",
    "load_runtime_settings",
]
