"""极小极大值 κ(c, f) = inf{s ∈ [a, b] : j^s_*(c) = 0}

两种刻画同时计算并互相核对：
  - c 来自 H_*(M^s, M^a)：本质基坐标的最大出生值
  - j^s_*(c) = 0：闭链加边缘后能否落进 M^s
再在 κ 两侧的阈值上对商复形 (M^b, M^s) 从头约化复核。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..errors import (
    ClassNotInComplexError,
    GapDetectedError,
    InvalidParametersError,
    NotSubordinatedError,
    TrivialClassError,
)
from ..geometry.critical import CriticalPoint
from ..homology.classes import CohomologyClass, HomologyClass
from ..homology.invariants import subordination_chain
from ..homology.products import cap
from ..utils.logger import setup_logger
from .filtration import Filtration

logger = setup_logger("minimax")


@dataclass
class MinimaxResult:
    """一个同调类的极小极大值

    Attributes:
        cls: 类
        kappa: 来自 H_*(M^s, M^a) 的最小 s
        kappa_exact: j^s_*(c) = 0 的最小 s（应与 kappa 相同）
        critical: 实现 κ 的临界点（容差内最近的临界值），没有则 None
        interval: 零集区间 (s₀, 是否闭)
        support_max: 存储代表元支撑上 f 的最大值
        checks: 各项交叉核对
    """

    cls: HomologyClass
    kappa: float
    kappa_exact: float
    tol_match: float
    critical: Optional[CriticalPoint] = None
    interval: Optional[Tuple[float, bool]] = None
    support_max: float = float("nan")
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return self.cls.degree

    @property
    def morse_match(self) -> Optional[bool]:
        """非退化时类的次数是否等于实现点的 Morse 指标"""
        if self.critical is None or self.critical.index is None:
            return None
        return self.critical.index == self.degree

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and self.morse_match is not False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "kappa": self.kappa,
            "kappa_exact": self.kappa_exact,
            "tol_match": self.tol_match,
            "critical_point": None if self.critical is None else self.critical.id,
            "critical_value": None if self.critical is None else float(self.critical.value),
            "interval": None if self.interval is None else {"s0": self.interval[0], "closed": self.interval[1]},
            "support_max": self.support_max,
            "morse_match": self.morse_match,
            "checks": dict(self.checks),
            "passed": self.passed,
        }


def _cycle_positions(cls: HomologyClass, filt: Filtration) -> set:
    if cls.complex_id != filt.complex.complex_id:
        raise ClassNotInComplexError(
            f"类属于复形 {cls.complex_id}，过滤的复形为 {filt.complex.complex_id}"
        )
    if not cls.is_cycle():
        raise InvalidParametersError("代表元不是相对闭链")
    return filt.to_positions(cls.simplices)


def _realizing(kappa: float, critical: Sequence[CriticalPoint], tol: float) -> Optional[CriticalPoint]:
    if not critical:
        return None
    best = min(critical, key=lambda x: (abs(x.value - kappa), x.id))
    return best if abs(best.value - kappa) <= tol else None


def threshold_scan(cls: HomologyClass, filt: Filtration) -> List[Tuple[float, bool]]:
    """每个阈值 s 上 j^s_*(c) 是否为零"""
    return filt.scan(_cycle_positions(cls, filt))


def no_gap_interval(cls: HomologyClass, filt: Filtration) -> Tuple[float, bool]:
    """零集 {s : j^s_*(c) = 0} 是包含 b 的区间，返回 (下确界 s₀, 是否闭)

    阈值取顶点值，M^s 含值为 s 的顶点，区间总是闭的。

    Raises:
        TrivialClassError: c 在 s = a 处已为零
        GapDetectedError: 零集不是上闭的
    """
    scan = threshold_scan(cls, filt)
    if scan[0][1]:
        raise TrivialClassError(f"{cls.degree} 次类在 M^b 中为零")
    if not scan[-1][1]:
        raise GapDetectedError(f"类在 s=b={filt.b:g} 处不为零")
    first = next(i for i, (_, zero) in enumerate(scan) if zero)
    holes = [s for s, zero in scan[first:] if not zero]
    if holes:
        raise GapDetectedError(f"零集在 s={holes[0]:.6g} 处出现空隙（s₀={scan[first][0]:.6g}）")
    return scan[first][0], True


def kappa(
    cls: HomologyClass,
    filt: Filtration,
    critical: Sequence[CriticalPoint] = (),
    recheck: bool = True,
) -> MinimaxResult:
    """计算 κ(c, f) 并找实现它的临界点

    tol_match = 2·(相邻顶点 f 值之差的最大值)。

    Raises:
        TrivialClassError: c 在 H_*(M^b, M^a) 中为零
        ClassNotInComplexError: c 不属于过滤的复形
    """
    z = _cycle_positions(cls, filt)
    birth = filt.birth_of(z)
    if birth is None:
        raise TrivialClassError(f"{cls.degree} 次类在 H_*(M^b, M^a) 中为零")
    death = filt.death_of(z)
    tol = 2.0 * filt.mesh.max_edge_gap

    result = MinimaxResult(
        cls=cls,
        kappa=birth,
        kappa_exact=float("nan") if death is None else death,
        tol_match=tol,
        critical=_realizing(birth, critical, tol),
        support_max=filt.support_max(cls.simplices),
    )
    result.checks["exactness"] = death is not None and abs(death - birth) <= 1e-12
    result.checks["inside_band"] = filt.a < birth <= filt.b
    result.checks["support"] = birth <= result.support_max + 1e-12
    try:
        result.interval = no_gap_interval(cls, filt)
        result.checks["no_gap"] = abs(result.interval[0] - birth) <= 1e-12
    except GapDetectedError as e:
        logger.error(f"{cls.degree} 次类: {e}")
        result.checks["no_gap"] = False
    if recheck:
        below = filt.previous_threshold(birth)
        result.checks["quotient_recheck"] = filt.quotient_vanishes(cls, birth) and not filt.quotient_vanishes(
            cls, below
        )
    if critical:
        result.checks["realized"] = result.critical is not None

    failed = [k for k, ok in result.checks.items() if not ok]
    if failed:
        logger.warning(f"{cls.degree} 次类 κ={birth:.6g} 的核对未通过: {failed}")
    else:
        where = "" if result.critical is None else f"，临界点 {result.critical.id}"
        logger.debug(f"{cls.degree} 次类 κ={birth:.6g}{where}")
    return result


def kappa_table(filt: Filtration, critical: Sequence[CriticalPoint] = (), recheck: bool = True) -> List[MinimaxResult]:
    """持续性适配基中每个类的 κ，按次数与出生值排序"""
    return [
        kappa(c, filt, critical, recheck)
        for k in range(filt.complex.dim + 1)
        for c in filt.essential_classes(k)
    ]


@dataclass
class SubordinatedPair:
    """a = ω ∩ b 的两端 κ 值

    Attributes:
        strict: κ_a < κ_b
        distinct: 实现两端的临界点不同
    """

    lower: MinimaxResult
    upper: MinimaxResult
    omega_degree: int

    @property
    def monotone(self) -> bool:
        return self.lower.kappa <= self.upper.kappa

    @property
    def strict(self) -> bool:
        return self.lower.kappa < self.upper.kappa

    @property
    def distinct(self) -> bool:
        a, b = self.lower.critical, self.upper.critical
        return a is not None and b is not None and a.id != b.id

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kappa_a": self.lower.kappa,
            "kappa_b": self.upper.kappa,
            "omega_degree": self.omega_degree,
            "monotone": self.monotone,
            "strict": self.strict,
            "distinct": self.distinct,
        }


def refined_minimax(
    a_cls: HomologyClass,
    b_cls: HomologyClass,
    omega: CohomologyClass,
    filt: Filtration,
    critical: Sequence[CriticalPoint] = (),
    recheck: bool = True,
) -> SubordinatedPair:
    """a ≺ b（a = ω ∩ b，deg ω > 0）时比较 κ(a) 与 κ(b)

    Raises:
        NotSubordinatedError: ω ∩ b 与 a 不同调
    """
    if omega.degree <= 0:
        raise InvalidParametersError(f"ω 的次数必须为正，得到 {omega.degree}")
    capped = cap(omega, b_cls)
    if capped.degree != a_cls.degree or capped.complex_id != a_cls.complex_id:
        raise NotSubordinatedError(
            f"ω ∩ b 是复形 {capped.complex_id} 中的 {capped.degree} 次类，a 是 {a_cls.degree} 次类"
        )
    if not (capped + a_cls).is_zero():
        raise NotSubordinatedError("ω ∩ b 与 a 不同调")

    pair = SubordinatedPair(
        lower=kappa(a_cls, filt, critical, recheck),
        upper=kappa(b_cls, filt, critical, recheck),
        omega_degree=omega.degree,
    )
    if not pair.monotone:
        logger.error(f"κ 不单调: κ(a)={pair.lower.kappa:.6g} > κ(b)={pair.upper.kappa:.6g}")
    elif not pair.strict:
        logger.warning(f"κ(a) = κ(b) = {pair.lower.kappa:.6g}，不严格")
    return pair


def subordinated_minimax(
    filt: Filtration,
    critical: Sequence[CriticalPoint] = (),
    recheck: bool = True,
) -> List[SubordinatedPair]:
    """沿最长从属链逐对比较，链长 sub+1 时给出 sub+1 个严格递增的 κ"""
    chain = subordination_chain(filt.complex)
    return [
        refined_minimax(lo, hi, w, filt, critical, recheck)
        for lo, w, hi in zip(chain.classes, chain.witnesses, chain.classes[1:])
    ]


def write_scan_csv(scan: Sequence[Tuple[float, bool]], path: Union[str, Path]) -> Path:
    """导出阈值扫描，表头 "s,is_zero" """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["s,is_zero"] + [f"{s:.12g},{int(bool(zero))}" for s, zero in scan]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
