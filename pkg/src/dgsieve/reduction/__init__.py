from .lll import LLLResult, lll_reduce, lll_transform
from .enumerate import (first_minimum_sq, short_vectors_gram,
                        shortest_vector_gram, svp_exact)
from .insert import (insert_block_vector, insert_transform, primitive_part,
                     primal_from_dual_transform)
from .hkz import hkz_reduce, is_hkz_reduced
from .oracle import (BlockStep, OracleSpec, block_reduce,
                     projected_block_basis, reversed_dual_gram)
from .dbkz import SweepReport, calls_for_schedule, dbkz, planned_tours
from .slide import (PotentialTrace, ReductionParams, SlideLevel, SlideReport,
                    SlideSvpResult, slide_reduce, slide_svp_solve)
from .predicates import (PredicateCheck, SlideVerdict, block_vol_sq,
                         dhsvp_check, hsvp_check, is_slide_reduced,
                         svp_check, twin_gap_check)

__all__ = [
    "LLLResult",
    "lll_reduce",
    "lll_transform",
    "first_minimum_sq",
    "short_vectors_gram",
    "shortest_vector_gram",
    "svp_exact",
    "insert_block_vector",
    "insert_transform",
    "primitive_part",
    "primal_from_dual_transform",
    "hkz_reduce",
    "is_hkz_reduced",
    "BlockStep",
    "OracleSpec",
    "block_reduce",
    "projected_block_basis",
    "reversed_dual_gram",
    "SweepReport",
    "calls_for_schedule",
    "dbkz",
    "planned_tours",
    "PotentialTrace",
    "ReductionParams",
    "SlideLevel",
    "SlideReport",
    "SlideSvpResult",
    "slide_reduce",
    "slide_svp_solve",
    "PredicateCheck",
    "SlideVerdict",
    "block_vol_sq",
    "dhsvp_check",
    "hsvp_check",
    "is_slide_reduced",
    "svp_check",
    "twin_gap_check",
]
