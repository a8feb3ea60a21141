from .membership import MembershipOracle
from .pair import (
    ConleyPair,
    brute_force_block,
    build_conley_pair,
    check_regular,
    pair_component_counts,
)
from .shrink import shrink_into
from .verify import AxiomOutcome, VerificationReport, no_reentry_check, verify_conley_pair

__all__ = [
    "AxiomOutcome",
    "ConleyPair",
    "MembershipOracle",
    "VerificationReport",
    "brute_force_block",
    "build_conley_pair",
    "check_regular",
    "no_reentry_check",
    "pair_component_counts",
    "shrink_into",
    "verify_conley_pair",
]
