"""线程池工具：按任务顺序收集结果，保证并行与串行输出一致"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from .logger import setup_logger

logger = setup_logger("parallel")

T = TypeVar("T")
R = TypeVar("R")


def _env_int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


def thread_cap() -> int:
    """CONLEY_KIT_THREADS 给出的线程上限（至少 1）"""
    return max(1, _env_int("CONLEY_KIT_THREADS", 1))


def ordered_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: Optional[int] = None,
    label: str = "task",
) -> List[R]:
    """并行执行 fn(item)，结果按 items 顺序返回

    Args:
        fn: 任务函数
        items: 任务输入
        max_workers: 线程数，None 时取 CONLEY_KIT_THREADS
        label: 日志中的任务名

    Returns:
        与 items 一一对应的结果列表

    Raises:
        任务中的第一个异常（按任务顺序）
    """
    workers = min(max_workers or thread_cap(), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]

    results: List[Optional[R]] = [None] * len(items)
    errors: dict = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, item): idx for idx, item in enumerate(items)}
        for future in as_completed(futures):
            idx = futures[future]
            try:
                results[idx] = future.result()
            except Exception as e:
                logger.error(f"{label} {idx} 失败: {e}")
                errors[idx] = e
    if errors:
        raise errors[min(errors)]
    return results  # type: ignore[return-value]
