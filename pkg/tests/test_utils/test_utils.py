"""线程池、缓存键与日志工具测试"""

import logging
import time

import pytest
from diskcache import Cache

from app.core.entities import FlowConfig, SurfaceKind
from app.core.utils import cache
from app.core.utils.logger import LevelFormatter, set_global_level, setup_logger
from app.core.utils.parallel import ordered_map, thread_cap


class TestOrderedMap:
    """结果按输入顺序返回"""

    def test_order_with_threads(self):
        def slow_square(x):
            time.sleep(0.01 * (5 - x))
            return x * x

        assert ordered_map(slow_square, list(range(5)), max_workers=4) == [0, 1, 4, 9, 16]

    def test_serial_equals_parallel(self):
        items = list(range(20))
        assert ordered_map(str, items, max_workers=1) == ordered_map(str, items, max_workers=8)

    def test_empty(self):
        assert ordered_map(str, [], max_workers=4) == []

    def test_first_error_by_index(self):
        def fail_odd(x):
            if x % 2:
                raise ValueError(f"bad {x}")
            return x

        with pytest.raises(ValueError, match="bad 1"):
            ordered_map(fail_odd, list(range(6)), max_workers=3)

    def test_thread_cap(self, monkeypatch):
        monkeypatch.setenv("CONLEY_KIT_THREADS", "4")
        assert thread_cap() == 4
        monkeypatch.setenv("CONLEY_KIT_THREADS", "0")
        assert thread_cap() == 1
        monkeypatch.setenv("CONLEY_KIT_THREADS", "many")
        assert thread_cap() == 1


class TestCacheKey:
    """配置的 sha256 键"""

    def test_order_independent(self):
        assert cache.generate_cache_key({"a": 1, "b": 2}) == cache.generate_cache_key({"b": 2, "a": 1})

    def test_dataclass_and_enum(self):
        key = cache.generate_cache_key([SurfaceKind.TORUS, FlowConfig()])
        assert key == cache.generate_cache_key(["torus", FlowConfig()])
        assert key != cache.generate_cache_key([SurfaceKind.TORUS, FlowConfig(h=0.02)])
        assert len(key) == 64


class TestGetOrCompute:
    """缓存开关"""

    def test_hit_after_miss(self, tmp_path):
        calls = []

        def compute():
            calls.append(1)
            return [1, 2, 3]

        store = Cache(str(tmp_path / "c"))
        cache.enable_cache()
        try:
            assert cache.get_or_compute(store, "k", compute) == [1, 2, 3]
            assert cache.get_or_compute(store, "k", compute) == [1, 2, 3]
        finally:
            cache.disable_cache()
            store.close()
        assert len(calls) == 1

    def test_disabled_always_computes(self, tmp_path):
        calls = []
        store = Cache(str(tmp_path / "c"))
        assert not cache.is_cache_enabled()
        for _ in range(2):
            cache.get_or_compute(store, "k", lambda: calls.append(1) or 7)
        store.close()
        assert len(calls) == 2


class TestLogger:
    """级别格式与全局级别"""

    def test_info_is_bare(self):
        record = logging.LogRecord("flow", logging.INFO, __file__, 1, "步长 %s", (0.01,), None)
        assert LevelFormatter().format(record) == "步长 0.01"

    def test_warning_has_level(self):
        record = logging.LogRecord("flow", logging.WARNING, __file__, 1, "未收敛", (), None)
        text = LevelFormatter().format(record)
        assert "WARNING" in text and "flow" in text and text.endswith("未收敛")

    def test_set_global_level(self):
        logger = setup_logger("utils-test", log_file=None)
        previous = logger.level
        set_global_level(logging.ERROR)
        try:
            assert logger.level == logging.ERROR
        finally:
            set_global_level(previous)
