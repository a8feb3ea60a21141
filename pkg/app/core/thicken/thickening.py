"""加厚区域的数据类型"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional

from ..entities import ThickeningKind
from ..geometry.critical import CriticalPoint


@dataclass(frozen=True)
class EntranceTimeBound:
    """入口时间界 𝒯ᵢ = 1 + safety · sup 𝒯ᵢ⁺

    Attributes:
        calT: 𝒯ᵢ
        raw_sup: 抽样得到的 sup 𝒯ᵢ⁺（N⁺ 为空时为 0）
        safety: 上确界的安全系数
        samples: 抽样的入口顶点数
        skipped: 反向极限或到达时间失败而跳过的样本数
        limit_failure: 是否有样本被跳过
    """

    critical_point: int
    calT: float
    raw_sup: float
    safety: float
    samples: int
    skipped: int = 0

    @property
    def limit_failure(self) -> bool:
        return self.skipped > 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "critical_point": self.critical_point,
            "calT": float(self.calT),
            "raw_sup": float(self.raw_sup),
            "safety": float(self.safety),
            "samples": self.samples,
            "skipped": self.skipped,
            "limit_failure": self.limit_failure,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EntranceTimeBound":
        return cls(
            critical_point=int(data["critical_point"]),
            calT=float(data["calT"]),
            raw_sup=float(data["raw_sup"]),
            safety=float(data["safety"]),
            samples=int(data["samples"]),
            skipped=int(data.get("skipped", 0)),
        )


@dataclass(frozen=True)
class Thickening:
    """临界点 xᵢ 的加厚区域（网格顶点集）

    Attributes:
        critical: 临界点
        kind: forward-W / ambient-U-star / ambient-U
        vertices: 区域顶点
        horizon: 反向扫描的截断时长
        T: 回拉时间 Tᵢ（仅 ambient）
        calT: 入口时间界 𝒯ᵢ（仅 ambient）
        truncated: 截断时仍未判定的顶点数（仅 forward-W）
    """

    critical: CriticalPoint
    kind: ThickeningKind
    vertices: FrozenSet[int]
    horizon: float
    T: Optional[float] = None
    calT: Optional[float] = None
    truncated: int = 0

    @property
    def value(self) -> float:
        return float(self.critical.value)

    def __len__(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "critical_point": self.critical.id,
            "kind": self.kind.value,
            "T": None if self.T is None else float(self.T),
            "calT": None if self.calT is None else float(self.calT),
            "horizon": float(self.horizon),
            "truncated": self.truncated,
            "vertices": sorted(self.vertices),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], critical: CriticalPoint) -> "Thickening":
        return cls(
            critical=critical,
            kind=ThickeningKind(data["kind"]),
            vertices=frozenset(int(v) for v in data["vertices"]),
            horizon=float(data["horizon"]),
            T=None if data.get("T") is None else float(data["T"]),
            calT=None if data.get("calT") is None else float(data["calT"]),
            truncated=int(data.get("truncated", 0)),
        )
