"""收缩搜索：减小 ε、增大 τ，直到 N 落入给定邻域"""

from __future__ import annotations

from typing import Iterable, Optional, Tuple

from ..entities import DEFAULT_CONLEY, DEFAULT_FLOW, ConleyConfig, FlowConfig
from ..errors import EmptyBlockError, NonregularEpsilonError, SearchExhaustedError
from ..geometry.critical import CriticalPoint
from ..geometry.fields import ScalarField
from ..geometry.mesh import Mesh
from ..utils.logger import setup_logger
from .pair import ConleyPair, build_conley_pair

logger = setup_logger("conley")

# 非正则 ε 的扰动因子
_PERTURB = 0.9


def shrink_into(
    field: ScalarField,
    mesh: Mesh,
    x: CriticalPoint,
    U: Iterable[int],
    epsilon: float = 0.2,
    tau: float = 2.0,
    config: ConleyConfig = DEFAULT_CONLEY,
    flow: FlowConfig = DEFAULT_FLOW,
) -> Tuple[float, float]:
    """交替将 ε 减半、τ 加倍，返回第一个满足 N ⊆ U 且 x 在 N 内部的 (ε*, τ*)

    Raises:
        SearchExhaustedError: ε < eps_min 或 τ > tau_max，异常携带得到过的最小 N
    """
    allowed = frozenset(int(v) for v in U)
    eps, t = float(epsilon), float(tau)
    smallest: Optional[ConleyPair] = None
    halve_next = True

    while eps >= config.eps_min and t <= config.tau_max:
        try:
            pair = build_conley_pair(field, mesh, x, eps, t, config, flow)
        except NonregularEpsilonError:
            logger.debug(f"ε={eps:g} 非正则，扰动为 {eps * _PERTURB:g}")
            eps *= _PERTURB
            continue
        except EmptyBlockError:
            pair = None

        if pair is not None:
            if smallest is None or len(pair.N) < len(smallest.N):
                smallest = pair
            if pair.N <= allowed and pair.start_vertex in pair.interior:
                logger.info(f"临界点 {x.id}: 收缩到 ε*={eps:g}, τ*={t:g}, |N|={len(pair.N)}")
                return eps, t

        if halve_next:
            eps /= 2
        else:
            t *= 2
        halve_next = not halve_next

    block = sorted(smallest.N) if smallest is not None else []
    params = (smallest.epsilon, smallest.tau) if smallest is not None else None
    raise SearchExhaustedError(
        f"临界点 {x.id}: 收缩搜索超出预算（ε_min={config.eps_min:g}, τ_max={config.tau_max:g}），"
        f"最小 |N|={len(block)}",
        smallest_block=block,
        parameters=params,
    )
