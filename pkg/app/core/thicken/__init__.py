from .ambient import (
    ambient_homotopy,
    ambient_thickenings,
    entrance_time_bound,
    pullback_times,
    unstable_ambient_thickenings,
)
from .cover import CoverReport, verify_cover
from .forward import forward_invariance_check, forward_thickening, forward_thickenings, retraction_homotopy
from .sweep import SweepResult, backward_sweep
from .thickening import EntranceTimeBound, Thickening

__all__ = [
    "CoverReport",
    "EntranceTimeBound",
    "SweepResult",
    "Thickening",
    "ambient_homotopy",
    "ambient_thickenings",
    "backward_sweep",
    "entrance_time_bound",
    "forward_invariance_check",
    "forward_thickening",
    "forward_thickenings",
    "pullback_times",
    "retraction_homotopy",
    "unstable_ambient_thickenings",
]
