import json
import logging
import os
from pathlib import Path

VERSION = "v0.3.0"
APP_NAME = "conley-kit"

# JSON 报告的版本标识，格式变化时递增
SCHEMA = "conley-kit/1"

# 核心路径
ROOT_PATH = Path(__file__).parent.parent

# 配置 / 日志（小文件，与代码同盘）
APPDATA_PATH = ROOT_PATH / "AppData"
LOG_PATH = APPDATA_PATH / "logs"
SETTINGS_PATH = APPDATA_PATH / "settings.json"


def _resolve_data_root() -> Path:
    """解析大块数据根目录。

    优先读环境变量 CONLEY_KIT_DATA_ROOT，其次读 settings.json 的 storage.data_root，
    都为空则回退到项目内 work-dir。相对路径按项目根目录解析。
    """
    configured = os.getenv("CONLEY_KIT_DATA_ROOT", "").strip()
    try:
        if not configured and SETTINGS_PATH.exists():
            data = json.loads(SETTINGS_PATH.read_text(encoding="utf-8"))
            configured = str(data.get("storage", {}).get("data_root", "")).strip()
    except (json.JSONDecodeError, OSError):
        configured = ""
    if configured:
        path = Path(configured).expanduser()
        return path if path.is_absolute() else ROOT_PATH / path
    return ROOT_PATH / "work-dir"


# 大块数据根目录：流扫描缓存等
DATA_ROOT = _resolve_data_root()
CACHE_PATH = DATA_ROOT / "diskcache"   # diskcache：临界点搜索、加厚扫描结果
DEFAULT_OUT_PATH = Path("conley-out")  # CLI 产物默认输出目录（相对当前工作目录）

# 日志配置
LOG_LEVEL = logging.INFO
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# 创建核心路径
for _p in (LOG_PATH, DATA_ROOT, CACHE_PATH):
    _p.mkdir(parents=True, exist_ok=True)
