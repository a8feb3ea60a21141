from .filtration import Filtration, build_filtration
from .kappa import (
    MinimaxResult,
    SubordinatedPair,
    kappa,
    kappa_table,
    no_gap_interval,
    refined_minimax,
    subordinated_minimax,
    threshold_scan,
    write_scan_csv,
)
from .report import REFERENCE_VALUES, Inequality, InequalityReport, inequality_report

__all__ = [
    "Filtration",
    "Inequality",
    "InequalityReport",
    "MinimaxResult",
    "REFERENCE_VALUES",
    "SubordinatedPair",
    "build_filtration",
    "inequality_report",
    "kappa",
    "kappa_table",
    "no_gap_interval",
    "refined_minimax",
    "subordinated_minimax",
    "threshold_scan",
    "write_scan_csv",
]
