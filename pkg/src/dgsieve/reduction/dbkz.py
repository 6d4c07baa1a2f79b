"""Self-dual block sweeps that drive a basis toward a Hermite-quality head.

Each tour walks the working window forward with primal block visits and
back with dual ones, so the basis and its reversed dual get the same
treatment. The tour budget depends only on the rank, the block size, the
requested accuracy and the starting column lengths; after the budget the
head block gets one closing primal visit. Drivers that only need the head
to reach a quality target can instead stop as soon as an exact check says
so, with the same budget as the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParamError, SolverFailure
from ..gso import size_reduce
from .oracle import OracleSpec
from .state import GramState


def planned_tours(n: int, k: int, eps: float, start_norm: float) -> int:
    """Sweep budget for rank n, block size k, accuracy eps.

    start_norm is the largest column length of the input; it only enters
    through a log, so a rough value is fine.
    """
    if not 2 <= k < n:
        raise ParamError(f"block size {k} must lie in [2, {n})")
    if not 0 < eps <= 1:
        raise ParamError("accuracy must lie in (0, 1]")
    inner = max(5.0 * max(start_norm, 1.0), 2.0)
    arg = max(n * math.log2(inner) / eps, 2.0)
    return max(1, math.ceil(2.0 * n * n / (k - 1) ** 2 * math.log2(arg)))


def calls_for_schedule(n: int, k: int, tours: int) -> int:
    """Oracle queries a full run makes: per tour one primal visit at each
    of the n-k forward offsets and one dual visit at each of the n-k+1
    backward offsets, plus the closing head visit."""
    return tours * (2 * n - 2 * k + 1) + 1


def _tour(state: GramState, wlo: int, whi: int, k: int,
          oracle: OracleSpec) -> None:
    for lo in range(wlo, whi - k):
        state.primal_step(lo, lo + k, oracle)
    for lo in range(whi - k, wlo - 1, -1):
        state.dual_step(lo, lo + k, oracle)
    state.size_reduce()


@dataclass(frozen=True)
class SweepReport:
    """What a full sweep run did and how its head came out."""

    rank: int
    block: int
    eps: float
    tours_planned: int
    tours_run: int
    capped: bool
    oracle_calls: int
    delta: float
    first_norm: float
    hermite_bound: float
    bound_ok: bool


def _start_norm(state: GramState, scale) -> float:
    worst = max(state.gram[i][i] for i in range(state.n))
    return math.sqrt(float(worst)) * float(scale)


def dbkz(basis, k, eps=0.1, oracle=None, max_tours=None):
    """Run the full sweep schedule. Returns (reduced_basis, report).

    The head of the output is short relative to the lattice determinant:
    within (1 + eps) * delta ** ((n-1)/(k-1)) of the determinant's n-th
    root, with delta the oracle's promise at rank k. Capping the tours
    (max_tours) keeps runs cheap but forfeits that bound; the report says
    whether the cap bit.
    """
    n = basis.rank
    if oracle is None:
        oracle = OracleSpec(kind="hsvp", backend="enum")
    if not 2 <= k < n:
        raise ParamError(f"block size {k} must lie in [2, {n})")
    delta = oracle.delta_for(k)
    if not 1.0 <= delta <= 2.0 ** k:
        raise ParamError(f"oracle promise {delta:.3f} outside [1, 2^{k}]")
    eps_f = float(eps)

    state = GramState(basis)
    planned = planned_tours(n, k, eps_f, _start_norm(state, basis.scale))
    tours = planned if max_tours is None else min(planned, int(max_tours))
    before = oracle.calls
    state.size_reduce()
    for _ in range(tours):
        _tour(state, 0, n, k, oracle)
    state.primal_step(0, k, oracle)
    out = size_reduce(basis.transform(state.u), "exact")

    det_sq = state.leading_det(n)
    root = float(det_sq) ** (1.0 / (2 * n)) * float(basis.scale)
    first = math.sqrt(float(out.gram()[0][0]))
    bound = (1.0 + eps_f) * delta ** ((n - 1) / (k - 1)) * root
    report = SweepReport(
        rank=n, block=k, eps=eps_f, tours_planned=planned, tours_run=tours,
        capped=tours < planned, oracle_calls=oracle.calls - before,
        delta=delta, first_norm=first, hermite_bound=bound,
        bound_ok=first <= bound * (1.0 + 1e-9))
    return out, report


def head_meets_target(state: GramState, w: int, e: int,
                      target_pow: Fraction) -> bool:
    """Exact check that the head column is target-short for its window.

    The inequality tested is bstar[0] <= T * vol(window) ** (1/w) with
    T ** (2e) = target_pow; raising both sides to the power 2*w*e makes
    every quantity rational.
    """
    head_sq = Fraction(state.gram[0][0])
    vol_sq = Fraction(state.leading_det(w))
    return head_sq ** (w * e) <= target_pow ** w * vol_sq ** e


def reduce_head(state: GramState, w: int, k: int, eps: float,
                oracle: OracleSpec, target_pow: Fraction, e: int) -> int:
    """Sweep the leading w columns until the head meets its target.

    The exact check makes early exit safe; the full schedule is the cap.
    Returns the number of tours run. Raises SolverFailure if the budget
    runs out with the target unmet, which an honest oracle cannot cause.
    """
    if w == k:
        # a single block: one primal visit is the whole schedule
        state.primal_step(0, k, oracle)
        state.size_reduce()
        if not head_meets_target(state, w, e, target_pow):
            raise SolverFailure("single-block head missed its target")
        return 0
    planned = planned_tours(w, k, eps, _start_norm(state, 1))
    for t in range(planned):
        if head_meets_target(state, w, e, target_pow):
            return t
        _tour(state, 0, w, k, oracle)
    state.primal_step(0, k, oracle)
    state.size_reduce()
    if not head_meets_target(state, w, e, target_pow):
        raise SolverFailure("head sweeps exhausted without reaching the "
                            "target quality")
    return planned
