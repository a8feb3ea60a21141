"""上积、卡积与 Kronecker 配对（有序单形的前面/后面公式）"""

from __future__ import annotations

from typing import Set

from ..errors import ClassNotInComplexError, DegreeOverflowError, DegreeUnderflowError
from .classes import CohomologyClass, HomologyClass
from .complex import Simplex


def cup(alpha: CohomologyClass, beta: CohomologyClass) -> CohomologyClass:
    """α∪β(σ) = α(σ[0..p]) · β(σ[p..p+q])

    Raises:
        ClassNotInComplexError: 两个类不属于同一复形
        DegreeOverflowError: p + q 超过复形维数
    """
    if alpha.complex_id != beta.complex_id:
        raise ClassNotInComplexError(
            f"上积要求同一复形：{alpha.complex_id} ≠ {beta.complex_id}"
        )
    cx = alpha.complex
    p, q = alpha.degree, beta.degree
    if p + q > cx.dim:
        raise DegreeOverflowError(f"上积次数 {p}+{q} 超过复形维数 {cx.dim}")

    support: Set[Simplex] = set()
    a, b = alpha.simplices, beta.simplices
    if a and b:
        for s in cx.simplices[p + q]:
            if s[: p + 1] in a and s[p:] in b:
                support.add(s)
    return CohomologyClass.of(cx, p + q, support)


def cap(omega: CohomologyClass, b: HomologyClass) -> HomologyClass:
    """ω∩σ = ω(σ[m-p..m]) · σ[0..m-p]，落在 A 中的前面丢弃

    ω 取自 b 所在复形的全复形 K（绝对上同调），b 可以是相对类。

    Raises:
        ClassNotInComplexError: ω 不是 b 的全复形上的类
        DegreeUnderflowError: p > m
    """
    cx = b.complex
    if omega.complex_id != cx.ambient_id:
        raise ClassNotInComplexError(
            f"ω 属于复形 {omega.complex_id}，而 b 的全复形为 {cx.ambient_id}"
        )
    p, m = omega.degree, b.degree
    if p > m:
        raise DegreeUnderflowError(f"卡积次数 {m}-{p} 为负")

    support: Set[Simplex] = set()
    w = omega.simplices
    for s in b.simplices:
        if s[m - p :] in w:
            front = s[: m - p + 1]
            if not cx.in_relative_part(front):
                support ^= {front}
    return HomologyClass.of(cx, m - p, support)


def pairing(alpha: CohomologyClass, b: HomologyClass) -> int:
    """⟨α, b⟩ ∈ GF(2)"""
    if alpha.degree != b.degree:
        return 0
    if alpha.complex_id not in (b.complex_id, b.complex.ambient_id):
        raise ClassNotInComplexError(
            f"配对要求同一复形：{alpha.complex_id} 与 {b.complex_id}"
        )
    return len(alpha.simplices & b.simplices) % 2
