from .arrival import Locus, arrival_time, critical_values_of, level_flow
from .integrator import (
    BatchFlow,
    Trajectory,
    advance,
    energy_defect,
    integrate,
    write_trajectory_csv,
)
from .limits import (
    backward_limit,
    backward_limits,
    find_limits,
    forward_limit,
    forward_limits,
    match_critical,
)

__all__ = [
    "BatchFlow",
    "Locus",
    "Trajectory",
    "advance",
    "arrival_time",
    "critical_values_of",
    "backward_limit",
    "backward_limits",
    "energy_defect",
    "find_limits",
    "forward_limit",
    "forward_limits",
    "integrate",
    "level_flow",
    "match_critical",
    "write_trajectory_csv",
]
