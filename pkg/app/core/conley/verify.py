"""Conley 对公理的轨线抽样校验

(i)   x 在 N 的内部且不在 L 中
(ii)  其它临界点的最近顶点不在 N 中
(iii) L 在 N 中正向不变：从 L 出发、尚未离开 N 的轨线始终在 L 中
(iv)  离开 N 的轨线在离开前经过 L
另外检查离开后不再进入，以及 L 的顶点在 2τ 内降到 c-ε。
校验失败写入报告，不抛异常。
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..entities import DEFAULT_CONLEY, DEFAULT_FLOW, ConleyConfig, FlowConfig
from ..flow.integrator import BatchFlow, advance
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger
from .membership import BORDER, IN, OUT, MembershipOracle
from .pair import ConleyPair

logger = setup_logger("conley")

MAX_COUNTEREXAMPLES = 10

# 出口水平复核的容差（与构造时的积分路径不同）
_EXIT_LEVEL_TOL = 1e-6


@dataclass
class AxiomOutcome:
    """单项校验结果"""

    name: str
    passed: bool
    checked: int = 0
    counterexamples: List[Dict[str, Any]] = dc_field(default_factory=list)
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexamples": self.counterexamples,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    """一个 Conley 对的校验报告（同一种子可复现）"""

    critical_point: int
    c: float
    epsilon: float
    tau: float
    samples: int
    seed: int
    axioms: Dict[str, AxiomOutcome]
    no_reentry: AxiomOutcome
    exit_level: AxiomOutcome
    borderline: int = 0
    exiting: int = 0
    failed: int = 0
    rng: str = "PCG64"

    @property
    def passed(self) -> bool:
        return (
            all(a.passed for a in self.axioms.values())
            and self.no_reentry.passed
            and self.exit_level.passed
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "critical_point": self.critical_point,
            "c": self.c,
            "epsilon": self.epsilon,
            "tau": self.tau,
            "samples": self.samples,
            "seed": self.seed,
            "rng": self.rng,
            "passed": self.passed,
            "axioms": {k: v.to_dict() for k, v in self.axioms.items()},
            "no_reentry": self.no_reentry.to_dict(),
            "exit_level": self.exit_level.to_dict(),
            "borderline": self.borderline,
            "exiting": self.exiting,
            "failed": self.failed,
        }


@dataclass
class _Sweep:
    """抽样顶点的检查点记录"""

    vertices: np.ndarray
    values: np.ndarray  # (R, K+1)
    codes_n: np.ndarray
    codes_l: np.ndarray
    exit_index: np.ndarray  # 第一次 OUT(N) 的检查点，未离开为 -1
    failed: np.ndarray
    dt: float
    shift: int  # τ 对应的检查点数

    def row(self, vertex: int) -> int:
        return int(np.searchsorted(self.vertices, vertex))


def _sweep(
    pair: ConleyPair,
    field: ScalarField,
    mesh: Mesh,
    vertices: np.ndarray,
    config: ConleyConfig,
    flow: FlowConfig,
) -> _Sweep:
    shift = max(1, math.ceil(pair.tau / config.verify_dt))
    dt = pair.tau / shift
    K = math.ceil(config.verify_horizon / dt) + 2 * shift
    R = vertices.size

    oracle_n = MembershipOracle(mesh, pair.N)
    oracle_l = MembershipOracle(mesh, pair.L)
    bf = BatchFlow(field, mesh.params[vertices], direction=1, config=flow)

    values = np.full((R, K + 1), np.nan)
    codes_n = np.full((R, K + 1), OUT, dtype=np.int8)
    codes_l = np.full((R, K + 1), OUT, dtype=np.int8)
    exit_index = np.full(R, -1, dtype=int)
    stop_index = np.full(R, K, dtype=int)
    watching = np.ones(R, dtype=bool)
    exit_floor = pair.c - pair.epsilon - flow.tol_level

    def record(k: int) -> None:
        rows = np.flatnonzero(bf.active)
        if rows.size == 0:
            return
        values[rows, k] = field.value(bf.points[rows])
        look = rows[watching[rows]]
        if look.size == 0:
            return
        P = bf.points[look]
        cn = oracle_n.classify(P)
        codes_n[look, k] = cn
        codes_l[look, k] = oracle_l.classify(P)
        gone = look[cn == OUT]
        exit_index[gone] = k
        watching[gone] = False

    record(0)
    for k in range(1, K + 1):
        if not bf.active.any():
            break
        before = bf.active.copy()
        bf.advance(dt)
        record(k)
        stopped_now = before & ~bf.active
        stop_index[stopped_now] = k - 1
        active = np.flatnonzero(bf.active)
        if active.size == 0:
            continue
        grad = field.grad_norm(bf.points[active])
        captured = grad < flow.capture_tol
        settled = ~watching[active] & (values[active, k] < exit_floor)
        done = active[captured | settled]
        bf.deactivate(done)
        stop_index[done] = k

    # 停止后的检查点沿用最后记录（f 单调不增）
    for r in np.flatnonzero(stop_index < K):
        s = stop_index[r]
        values[r, s + 1 :] = values[r, s]
        if watching[r]:
            codes_n[r, s + 1 :] = codes_n[r, s]
            codes_l[r, s + 1 :] = codes_l[r, s]

    return _Sweep(
        vertices=vertices,
        values=values,
        codes_n=codes_n,
        codes_l=codes_l,
        exit_index=exit_index,
        failed=bf.failed.copy(),
        dt=dt,
        shift=shift,
    )


def _reentry_witness(sw: _Sweep, r: int, pair: ConleyPair, flow: FlowConfig) -> Optional[int]:
    """离开后谓词重新成立的检查点，没有则 None"""
    e = sw.exit_index[r]
    K = sw.values.shape[1] - 1
    ks = np.arange(e, K - sw.shift + 1)
    if ks.size == 0:
        return None
    f_now = sw.values[r, ks]
    f_later = sw.values[r, ks + sw.shift]
    pred = (f_now <= pair.c + pair.epsilon + flow.tol_level) & (
        f_later >= pair.c - pair.epsilon + flow.tol_mono
    )
    false_at = np.flatnonzero(~pred)
    if false_at.size == 0:
        return None
    again = np.flatnonzero(pred[false_at[0] :])
    return int(ks[false_at[0] + again[0]]) if again.size else None


def _example(field: ScalarField, mesh: Mesh, vertex: int, t: float, flow: FlowConfig) -> Dict[str, Any]:
    x = advance(field, mesh.params[vertex][None, :], t, flow)[0]
    return {"vertex": int(vertex), "t": float(t), "x": [float(c) for c in x]}


def verify_conley_pair(
    pair: ConleyPair,
    field: ScalarField,
    mesh: Mesh,
    m: int = 500,
    seed: int = 0,
    critical: Optional[Sequence[CriticalPoint]] = None,
    config: ConleyConfig = DEFAULT_CONLEY,
    flow: FlowConfig = DEFAULT_FLOW,
) -> VerificationReport:
    """抽样 m 个 L 顶点与 m 个 N 顶点（有放回）检查公理 (i)-(iv)

    Args:
        pair: 在同一网格和函数上构造的 Conley 对
        m: 每项的抽样数
        seed: numpy 随机种子
        critical: 全部临界点，用于公理 (ii)
    """
    rng = np.random.default_rng(seed)
    L_sorted = np.asarray(sorted(pair.L), dtype=int)
    N_sorted = np.asarray(sorted(pair.N), dtype=int)
    l_draw = rng.choice(L_sorted, size=m, replace=True) if L_sorted.size else np.empty(0, dtype=int)
    n_draw = rng.choice(N_sorted, size=m, replace=True)
    vertices = np.unique(np.concatenate([l_draw, n_draw]))

    sw = _sweep(pair, field, mesh, vertices, config, flow)
    l_rows = np.searchsorted(vertices, l_draw)
    n_rows = np.searchsorted(vertices, n_draw)
    failed = int(sw.failed[l_rows].sum() + sw.failed[n_rows].sum())
    K = sw.values.shape[1] - 1

    axioms: Dict[str, AxiomOutcome] = {}

    interior_ok = pair.start_vertex in pair.interior
    outside_l = pair.start_vertex not in pair.L
    axioms["i"] = AxiomOutcome(
        name="x interior to N, x not in L",
        passed=interior_ok and outside_l,
        checked=1,
        note="" if interior_ok else "x 的最近顶点在 N 的边界上",
    )

    if critical is None:
        axioms["ii"] = AxiomOutcome(name="no other critical point in N", passed=True, note="未提供临界点列表")
    else:
        intruders = []
        others = [c for c in critical if c.id != pair.critical.id]
        for c in others:
            v = int(mesh.nearest_vertex(c.point))
            if v in pair.N:
                intruders.append({"critical_point": c.id, "vertex": v, "x": list(c.x)})
        axioms["ii"] = AxiomOutcome(
            name="no other critical point in N",
            passed=not intruders,
            checked=len(others),
            counterexamples=intruders,
        )

    borderline = 0

    # (iii)
    bad_iii: List[Tuple[int, float]] = []
    for r in l_rows:
        if sw.failed[r]:
            continue
        e = sw.exit_index[r]
        end = e if e >= 0 else K + 1
        cn, cl = sw.codes_n[r, :end], sw.codes_l[r, :end]
        if np.any(cn == BORDER) or np.any(cl == BORDER):
            borderline += 1
        hits = np.flatnonzero((cn == IN) & (cl == OUT))
        if hits.size:
            bad_iii.append((int(sw.vertices[r]), float(hits[0] * sw.dt)))
    axioms["iii"] = AxiomOutcome(
        name="L positively invariant in N",
        passed=not bad_iii,
        checked=int(l_rows.size),
        counterexamples=[_example(field, mesh, v, t, flow) for v, t in bad_iii[:MAX_COUNTEREXAMPLES]],
        note="" if l_rows.size else "L 为空",
    )

    # (iv) 与离开后不再进入
    bad_iv: List[Tuple[int, float]] = []
    reentry: List[Tuple[int, float]] = []
    exiting = 0
    for r in n_rows:
        if sw.failed[r]:
            continue
        e = sw.exit_index[r]
        if e < 0:
            continue
        exiting += 1
        if np.any(sw.codes_n[r, :e] == BORDER):
            borderline += 1
        if not np.any(sw.codes_l[r, :e] != OUT):
            bad_iv.append((int(sw.vertices[r]), float(e * sw.dt)))
        k = _reentry_witness(sw, r, pair, flow)
        if k is not None:
            reentry.append((int(sw.vertices[r]), float(k * sw.dt)))
    axioms["iv"] = AxiomOutcome(
        name="exits pass through L",
        passed=not bad_iv,
        checked=exiting,
        counterexamples=[_example(field, mesh, v, t, flow) for v, t in bad_iv[:MAX_COUNTEREXAMPLES]],
    )
    no_reentry = AxiomOutcome(
        name="no re-entry after exit",
        passed=not reentry,
        checked=exiting,
        counterexamples=[_example(field, mesh, v, t, flow) for v, t in reentry[:MAX_COUNTEREXAMPLES]],
    )

    # L 的顶点在 2τ 内降到 c-ε
    level_bad = []
    l_unique = np.unique(l_rows)
    for r in l_unique:
        if sw.failed[r]:
            continue
        f2 = sw.values[r, 2 * sw.shift]
        if not f2 <= pair.c - pair.epsilon + _EXIT_LEVEL_TOL:
            level_bad.append({"vertex": int(sw.vertices[r]), "f": float(f2)})
    exit_level = AxiomOutcome(
        name="L reaches c-eps by 2tau",
        passed=not level_bad,
        checked=int(l_unique.size),
        counterexamples=level_bad[:MAX_COUNTEREXAMPLES],
    )

    report = VerificationReport(
        critical_point=pair.critical.id,
        c=pair.c,
        epsilon=pair.epsilon,
        tau=pair.tau,
        samples=m,
        seed=seed,
        axioms=axioms,
        no_reentry=no_reentry,
        exit_level=exit_level,
        borderline=borderline,
        exiting=exiting,
        failed=failed,
    )
    verdicts = " ".join(f"({k}){'✓' if a.passed else '✗'}" for k, a in axioms.items())
    logger.info(
        f"临界点 {pair.critical.id} 校验: {verdicts} 不再进入{'✓' if no_reentry.passed else '✗'} "
        f"离开 {exiting} 条, 边界 {borderline} 条"
    )
    if failed:
        logger.warning(f"{failed} 条抽样轨线步长下溢，未计入统计")
    return report


def no_reentry_check(
    pair: ConleyPair,
    field: ScalarField,
    mesh: Mesh,
    m: int = 500,
    seed: int = 0,
    config: ConleyConfig = DEFAULT_CONLEY,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Tuple[bool, List[Dict[str, Any]], int]:
    """离开 N 的轨线不再进入

    Returns:
        (是否通过, 反例, 离开的抽样轨线数)
    """
    report = verify_conley_pair(pair, field, mesh, m, seed, None, config, flow)
    return report.no_reentry.passed, report.no_reentry.counterexamples, report.exiting
