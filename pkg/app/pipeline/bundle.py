"""产物目录管理

--out 目录即一个 bundle，包含:
- bundle.json: 清单（当前配置键与产物列表）
- critical_points.json、pairs/pair_<k>.json、thickenings/<kind>_<k>.json、
  cover.json、homology.json、minimax.json、report.json
- 可选导出 (mesh.txt, complex.txt, trajectory_<k>.csv, scan_<k>.csv)

每个产物记录自己依赖的配置键与 sha256；键一致且文件未被改动时后续阶段直接读取。
JSON 一律 sort_keys、两格缩进、不含时间戳，同一配置写出的字节相同。
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from app.config import SCHEMA, VERSION
from app.core.errors import ArtifactMismatchError
from app.core.utils.logger import setup_logger

logger = setup_logger("bundle")

MANIFEST_NAME = "bundle.json"


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return obj.as_posix()
    raise TypeError(f"无法序列化 {type(obj).__name__}")


def dumps(data: Dict[str, Any]) -> str:
    """带 schema 字段的确定性 JSON 文本"""
    payload = {"schema": SCHEMA, **data}
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2, default=_json_default) + "\n"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class ArtifactInfo:
    """产物信息"""

    path: str  # 相对于 bundle 目录的路径
    key: str  # 产物依赖的配置键
    sha256: str


@dataclass
class BundleManifest:
    """Bundle 清单 (bundle.json)"""

    schema: str = SCHEMA
    version: str = VERSION
    config_key: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    artifacts: Dict[str, ArtifactInfo] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": self.schema,
            "version": self.version,
            "config_key": self.config_key,
            "config": dict(self.config),
            "artifacts": {
                k: {"path": v.path, "key": v.key, "sha256": v.sha256}
                for k, v in sorted(self.artifacts.items())
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BundleManifest":
        artifacts = {
            k: ArtifactInfo(path=v.get("path", k), key=v.get("key", ""), sha256=v.get("sha256", ""))
            for k, v in data.get("artifacts", {}).items()
        }
        return cls(
            schema=data.get("schema", ""),
            version=data.get("version", VERSION),
            config_key=data.get("config_key", ""),
            config=dict(data.get("config", {})),
            artifacts=artifacts,
        )


class ArtifactBundle:
    """--out 目录下的产物读写"""

    def __init__(self, out_dir: Path, config_key: str, config: Optional[Dict[str, Any]] = None):
        """
        Args:
            out_dir: 输出目录，不存在时创建
            config_key: 本次运行的完整配置键
            config: 写入清单的配置
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.out_dir / MANIFEST_NAME
        self.manifest = self._load_manifest()
        if self.manifest.config_key and self.manifest.config_key != config_key:
            logger.info("配置已变化，只复用配置键仍一致的产物")
        self.manifest.config_key = config_key
        self.manifest.config = dict(config or {})

    def _load_manifest(self) -> BundleManifest:
        if not self.manifest_path.exists():
            return BundleManifest()
        try:
            data = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, OSError) as e:
            logger.warning(f"加载 bundle 清单失败，重新开始: {e}")
            return BundleManifest()
        manifest = BundleManifest.from_dict(data)
        if manifest.schema != SCHEMA:
            logger.warning(f"bundle 清单版本 {manifest.schema!r} 与 {SCHEMA} 不符，旧产物不复用")
            return BundleManifest()
        return manifest

    def save_manifest(self) -> None:
        self.manifest_path.write_text(dumps(self.manifest.to_dict()), encoding="utf-8")

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def names(self, prefix: str = "") -> List[str]:
        return sorted(k for k in self.manifest.artifacts if k.startswith(prefix))

    def has(self, name: str, key: str) -> bool:
        """产物存在且配置键一致"""
        info = self.manifest.artifacts.get(name)
        return info is not None and info.key == key and self.path(info.path).is_file()

    def read(self, name: str, key: str) -> Dict[str, Any]:
        """读取 JSON 产物并核对配置键、sha256 与 schema

        Raises:
            ArtifactMismatchError: 产物缺失、配置键不同或文件已被改动
        """
        info = self.manifest.artifacts.get(name)
        if info is None:
            raise ArtifactMismatchError(f"产物 {name} 不在 {self.manifest_path} 中")
        if info.key != key:
            raise ArtifactMismatchError(f"产物 {name} 的配置键 {info.key[:12]} 与当前 {key[:12]} 不一致")
        path = self.path(info.path)
        if not path.is_file():
            raise ArtifactMismatchError(f"产物文件不存在: {path}")
        if _sha256(path) != info.sha256:
            raise ArtifactMismatchError(f"产物 {name} 在写出后被改动")
        data = json.loads(path.read_text(encoding="utf-8"))
        if data.get("schema") != SCHEMA:
            raise ArtifactMismatchError(f"产物 {name} 的 schema 为 {data.get('schema')!r}，需要 {SCHEMA}")
        return data

    def write(self, name: str, data: Dict[str, Any], key: str) -> Path:
        """写出 JSON 产物并登记"""
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(data), encoding="utf-8")
        return self.register(name, key)

    def register(self, name: str, key: str) -> Path:
        """登记已写出的文件（CSV / 文本导出）"""
        path = self.path(name)
        if not path.is_file():
            raise ArtifactMismatchError(f"登记的产物文件不存在: {path}")
        self.manifest.artifacts[name] = ArtifactInfo(path=name, key=key, sha256=_sha256(path))
        self.save_manifest()
        logger.debug(f"写出产物 {name}")
        return path
