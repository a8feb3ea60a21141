import logging
import logging.handlers
import os
from pathlib import Path
from typing import Dict, Optional

from ...config import LOG_FORMAT, LOG_LEVEL, LOG_PATH

DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
QUIET_LIBRARIES = ("numba", "matplotlib", "PIL", "urllib3")

# 同一路径只开一个轮转文件处理器，多个模块共用
_file_handlers: Dict[str, logging.Handler] = {}


class LevelFormatter(logging.Formatter):
    """INFO 只打印消息本身，其他级别带时间、模块名和级别"""

    def __init__(self, info_fmt: str = "%(message)s", default_fmt: str = LOG_FORMAT):
        super().__init__(default_fmt, datefmt=DATE_FORMAT)
        self._info = logging.Formatter(info_fmt, datefmt=DATE_FORMAT)

    def format(self, record: logging.LogRecord) -> str:
        if record.levelno == logging.INFO:
            return self._info.format(record)
        return super().format(record)


def _env_level(default: int) -> int:
    """CONLEY_KIT_LOG_LEVEL 可以是名称或数字，无效时用默认值"""
    raw = os.getenv("CONLEY_KIT_LOG_LEVEL", "").strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    resolved = logging.getLevelName(raw.upper())
    return resolved if isinstance(resolved, int) else default


def _file_handler(log_file: str) -> logging.Handler:
    handler = _file_handlers.get(log_file)
    if handler is None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handler = logging.handlers.RotatingFileHandler(
            log_file, maxBytes=10 * 1024 * 1024, backupCount=5, encoding="utf-8"
        )
        handler.setFormatter(LevelFormatter())
        _file_handlers[log_file] = handler
    return handler


def setup_logger(
    name: str,
    level: int = LOG_LEVEL,
    log_file: Optional[str] = str(LOG_PATH / "app.log"),
    console_output: bool = True,
) -> logging.Logger:
    """
    取得模块日志记录器。

    参数：
    - name: 日志记录器的名称（按模块区域，如 "flow"、"cli"）
    - level: 日志级别（CONLEY_KIT_LOG_LEVEL 环境变量优先）
    - log_file: 轮转日志文件，None 表示不写文件
    - console_output: 是否输出到 stderr；stdout 留给 JSON 报告
    """
    logger = logging.getLogger(name)
    logger.setLevel(_env_level(level))

    if not logger.handlers:
        if console_output:
            console = logging.StreamHandler()
            console.setFormatter(LevelFormatter())
            logger.addHandler(console)
        if log_file:
            logger.addHandler(_file_handler(log_file))

    for lib in QUIET_LIBRARIES:
        logging.getLogger(lib).setLevel(logging.ERROR)
    return logger


def set_global_level(level: int) -> None:
    """调整所有已创建日志记录器的级别（CLI --log-level 使用）"""
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and logger.handlers:
            logger.setLevel(level)
