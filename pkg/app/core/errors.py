"""conley-kit 异常定义

每个具名异常同时继承 ConleyKitError 和对应的内置异常（ValueError / RuntimeError），
调用方可以按任一层级捕获。校验失败（公理、覆盖、不等式）写入报告，不抛异常。
"""

from __future__ import annotations

from typing import Any, Optional, Sequence


class ConleyKitError(Exception):
    """所有 conley-kit 异常的基类"""


# ============ geometry ============


class InvalidParametersError(ConleyKitError, ValueError):
    """曲面形状参数或运行参数不合法"""


class UnsupportedCombinationError(ConleyKitError, ValueError):
    """函数与曲面组合不受支持"""


class ResolutionTooSmallError(ConleyKitError, ValueError):
    """网格分辨率过低"""


# ============ flow ============


class StepUnderflowError(ConleyKitError, RuntimeError):
    """自适应步长低于 h_min"""


class HorizonExceededError(ConleyKitError, RuntimeError):
    """在时间上限内未收敛到临界点"""

    def __init__(self, message: str, final_point: Any = None, final_value: Optional[float] = None):
        super().__init__(message)
        self.final_point = final_point
        self.final_value = final_value


class NoCrossingError(ConleyKitError, RuntimeError):
    """轨线在时间上限内未穿过目标"""


class CriticalLevelInRangeError(ConleyKitError, ValueError):
    """水平流区间内含临界值"""


# ============ conley ============


class NonregularEpsilonError(ConleyKitError, ValueError):
    """c±ε 附近梯度过小，需要扰动 ε"""


class EmptyBlockError(ConleyKitError, ValueError):
    """N 为空（参数退化）"""


class SearchExhaustedError(ConleyKitError, RuntimeError):
    """收缩搜索超出预算"""

    def __init__(self, message: str, smallest_block: Sequence[int] = (), parameters: Any = None):
        super().__init__(message)
        self.smallest_block = tuple(smallest_block)
        self.parameters = parameters


# ============ thicken ============


class ArrivalFailureError(ConleyKitError, RuntimeError):
    """反向轨线未到达出口轨迹集"""


# ============ homology ============


class NotASubcomplexError(ConleyKitError, ValueError):
    """子集不构成子复形"""


class DegreeOverflowError(ConleyKitError, ValueError):
    """杯积次数超过复形维数"""


class DegreeUnderflowError(ConleyKitError, ValueError):
    """卡积次数高于链的次数"""


class InvalidCoverError(ConleyKitError, ValueError):
    """覆盖不合法（未覆盖全部顶点或成员不可缩）"""


# ============ minimax ============


class TrivialClassError(ConleyKitError, ValueError):
    """同调类为零"""


class ClassNotInComplexError(ConleyKitError, ValueError):
    """同调类不属于该复形"""


class GapDetectedError(ConleyKitError, RuntimeError):
    """零集合不是向上封闭的区间"""


class NotSubordinatedError(ConleyKitError, ValueError):
    """卡积恒等式不成立"""


# ============ pipeline ============


class ArtifactMismatchError(ConleyKitError, ValueError):
    """产物与当前配置不匹配"""
