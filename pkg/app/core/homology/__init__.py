from .classes import CohomologyClass, HomologyClass, cohomology_basis, homology_basis
from .complex import ChainComplexGF2, Simplex, complex_of
from .invariants import (
    CatBounds,
    SubordinationChain,
    betti_numbers,
    cat_bounds,
    coboundary_squares_zero,
    cuplength,
    is_acyclic,
    reduced_betti_numbers,
    subordination_chain,
    subordination_number,
    validate_cover,
    write_complex_triples,
)
from .products import cap, cup, pairing
from .reduction import ColumnReduction, gf2_rank, gf2_solve, in_span

__all__ = [
    "CatBounds",
    "ChainComplexGF2",
    "CohomologyClass",
    "ColumnReduction",
    "HomologyClass",
    "Simplex",
    "SubordinationChain",
    "betti_numbers",
    "cap",
    "cat_bounds",
    "coboundary_squares_zero",
    "cohomology_basis",
    "complex_of",
    "cup",
    "cuplength",
    "gf2_rank",
    "gf2_solve",
    "homology_basis",
    "in_span",
    "is_acyclic",
    "pairing",
    "reduced_betti_numbers",
    "subordination_chain",
    "subordination_number",
    "validate_cover",
    "write_complex_triples",
]
