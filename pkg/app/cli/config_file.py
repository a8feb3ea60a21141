"""--config 指定的 key=value 配置文件

每行一个 key=value，# 开头为注释，空行忽略。键名不区分大小写，'-' 与 '_' 等价，
与命令行参数同名（如 h-min=1e-6）。
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Union

from app.core.errors import InvalidParametersError
from app.core.utils.logger import setup_logger

logger = setup_logger("cli")


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """解析配置文本，重复的键以后出现的为准

    Raises:
        InvalidParametersError: 行中没有 '=' 或键为空
    """
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidParametersError(f"{source}:{lineno} 缺少 '=': {raw!r}")
        key, value = line.split("=", 1)
        key = normalize_key(key)
        if not key:
            raise InvalidParametersError(f"{source}:{lineno} 键为空: {raw!r}")
        if key in values:
            logger.warning(f"{source}:{lineno} 重复的键 {key}，以后者为准")
        values[key] = value.strip()
    return values


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise InvalidParametersError(f"配置文件不存在: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
