"""Slide-style reduction: twin block constraints with an audited potential.

The driver alternates a primal phase (head sweeps, middle block visits,
an exact tail search) with a dual phase (a head rebuild when a check
fires, then guarded dual visits to each middle block). Progress is
measured by the product of squared prefix volumes at the block seams, an
exact integer that primal steps provably leave alone and every accepted
dual step shrinks by a definite factor. The loop stops when a full pass
moves none of the tracked volumes; the output then satisfies the twin
constraints with the promised slack and is size-reduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..basis import Basis
from ..errors import BudgetError, ParamError, SolverFailure
from ..gso import block_gram_from_gso, size_reduce
from ..intmath import bareiss_det, congruent_transform, mat_mul
from .dbkz import _start_norm, reduce_head
from .enumerate import first_minimum_sq, svp_exact
from .insert import primal_from_dual_transform
from .oracle import OracleSpec, reversed_dual_gram
from .state import GramState, _embed, _unit_head
from ..intmath import unimodular_completion
from .insert import primitive_part


@dataclass(frozen=True)
class ReductionParams:
    """Rank split n = p*k + q + ell with p >= 1, 0 <= q < k, k, ell >= 2."""

    n: int
    k: int
    ell: int
    p: int
    q: int
    eps: Fraction

    @classmethod
    def from_rank(cls, n, k, ell, eps) -> "ReductionParams":
        eps = Fraction(eps)
        if k < 2:
            raise ParamError("block size must be at least 2")
        if ell < 2:
            raise ParamError("tail rank must be at least 2")
        if not 0 < eps <= 1:
            raise ParamError("slack must lie in (0, 1]")
        body = n - ell
        if body < k:
            raise ParamError(
                f"rank {n} cannot host block size {k} plus tail {ell}")
        return cls(n, k, ell, body // k, body % k, eps)

    def __post_init__(self):
        if self.n != self.p * self.k + self.q + self.ell:
            raise ParamError("inconsistent rank split")
        if self.p < 1 or not 0 <= self.q < self.k:
            raise ParamError("inconsistent rank split")

    @property
    def prefix_marks(self) -> tuple:
        """Column counts whose squared volumes the potential tracks."""
        return tuple(i * self.k + self.q for i in range(1, self.p + 1))


@dataclass
class PotentialTrace:
    """Chronological samples of the exact progress measure."""

    entries: list = field(default_factory=list)

    def append(self, label: str, value: int) -> None:
        self.entries.append((label, value))

    def values(self):
        return [v for _, v in self.entries]

    def log2_values(self):
        return [math.log2(v) for v in self.values()]

    def non_increasing(self) -> bool:
        vals = self.values()
        return all(b <= a for a, b in zip(vals, vals[1:]))

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class SlideReport:
    params: ReductionParams
    passes: int
    oracle_calls: int
    budget: int
    head_rebuilds: int
    dual_accepts: int
    trace: PotentialTrace


def _potential(state: GramState, marks) -> int:
    out = 1
    for j in marks:
        out *= state.leading_det(j)
    return out


def _dhsvp_ok_exact(state: GramState, lo: int, hi: int, e: int,
                    target_pow: Fraction) -> bool:
    """vol(block)^(1/d) <= T * bstar[hi-1], exact via leading minors."""
    d = hi - lo
    det_hi = state.leading_det(hi)
    vol_sq = Fraction(det_hi, state.leading_det(lo))
    last_sq = Fraction(det_hi, state.leading_det(hi - 1))
    return vol_sq ** e <= target_pow ** d * last_sq ** (d * e)


def _rebuild_dual_head(state: GramState, params: ReductionParams,
                       oracle: OracleSpec, target_pow: Fraction) -> None:
    """Dual-side sweeps on the window starting at column 1.

    Runs on an integerized reversed-dual Gram of the projected window and
    maps the accumulated transform back to primal columns.
    """
    k, q = params.k, params.q
    w = k + q
    lo, hi = 1, k + q + 1
    if w == k:
        state.dual_step(lo, hi, oracle)
        return
    block = block_gram_from_gso(state.gso_exact(), lo, hi)
    dual = reversed_dual_gram(block)
    den = 1
    for row in dual:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    idual = [[int(x * den) for x in row] for row in dual]
    sub = GramState.from_gram(idual)
    sub.size_reduce()
    eps8 = math.sqrt(1.0 + float(params.eps)) - 1.0
    reduce_head(sub, w, k, eps8, oracle, target_pow, k - 1)
    state.apply(_embed(state.n, lo, primal_from_dual_transform(sub.u)))


def slide_reduce(basis: Basis, k: int, ell: int, eps=Fraction(1, 10),
                 hsvp_oracle: OracleSpec | None = None,
                 svp_oracle: OracleSpec | None = None,
                 max_calls: int | None = None, max_passes: int = 64):
    """Reduce until every tracked prefix volume survives a full pass.

    Returns (reduced_basis, report). The output head block meets the
    Hermite-style target with slack (1 + eps), interior blocks are twin
    reduced at the oracle's promise times (1 + eps), and the tail block is
    reduced against its exact first minimum. Raises BudgetError when the
    oracle-call budget or the pass cap runs out first.
    """
    params = ReductionParams.from_rank(basis.rank, k, ell, eps)
    if hsvp_oracle is None:
        hsvp_oracle = OracleSpec(kind="hsvp", backend="enum")
    if svp_oracle is None:
        svp_oracle = OracleSpec(kind="svp", backend="enum")
    delta = hsvp_oracle.delta_for(k)
    if not 1.0 <= delta <= 2.0 ** k:
        raise ParamError(f"head promise {delta:.3f} outside [1, 2^{k}]")

    n, p, q = params.n, params.p, params.q
    eps_x = params.eps
    dh_sq = hsvp_oracle.delta_sq_pow(k, 1)
    # target powers T**(2(k-1)) for the head window of rank k+q:
    # the primal/dual-check target T = (1+eps) * eta and the rebuild
    # target T = sqrt(1+eps) * eta, with eta the promise taken to the
    # power (k+q-1)/(k-1)
    head_pow = (1 + eps_x) ** (2 * (k - 1)) * dh_sq ** (k + q - 1)
    rebuild_pow = (1 + eps_x) ** (k - 1) * dh_sq ** (k + q - 1)

    state = GramState(basis)
    state.size_reduce()
    marks = params.prefix_marks
    trace = PotentialTrace()
    trace.append("input", _potential(state, marks))

    start_norm = _start_norm(state, basis.scale)
    log_norm = max(1.0, math.log2(max(2.0, start_norm)))
    budget = math.ceil(4 * p * n * n * log_norm / math.log2(1 + float(eps_x)))
    if max_calls is not None:
        budget = min(budget, int(max_calls))

    shared = hsvp_oracle is svp_oracle
    base_calls = hsvp_oracle.calls + (0 if shared else svp_oracle.calls)

    def used():
        return hsvp_oracle.calls + (0 if shared else svp_oracle.calls) \
            - base_calls

    passes = 0
    head_rebuilds = 0
    dual_accepts = 0
    while True:
        passes += 1
        before_marks = tuple(state.leading_det(j) for j in marks)

        # primal phase: head window, middle blocks, exact tail
        reduce_head(state, k + q, k, float(eps_x), hsvp_oracle,
                    head_pow, k - 1)
        for i in range(1, p):
            state.primal_step(i * k + q, (i + 1) * k + q, hsvp_oracle)
        state.primal_step_exact(p * k + q, n, svp_oracle)
        state.size_reduce()
        mid_marks = tuple(state.leading_det(j) for j in marks)
        if mid_marks != before_marks:
            raise SolverFailure("a primal step moved a tracked prefix volume")

        # dual phase: head rebuild when the check fires
        if not _dhsvp_ok_exact(state, 1, k + q + 1, k - 1, head_pow):
            p_before = _potential(state, marks)
            _rebuild_dual_head(state, params, hsvp_oracle, rebuild_pow)
            state.size_reduce()
            p_after = _potential(state, marks)
            trace.append(f"pass{passes}/head-rebuild", p_after)
            if Fraction(p_after) * (1 + eps_x) >= Fraction(p_before):
                raise SolverFailure("head rebuild fired without the "
                                    "guaranteed potential drop")
            head_rebuilds += 1

        # dual phase: guarded visits to the middle blocks
        for i in range(1, p):
            lo = i * k + q + 1
            hi = (i + 1) * k + q + 1
            coeffs = state.dual_coeffs(lo, hi, hsvp_oracle)
            if _unit_head(coeffs):
                continue
            ud = unimodular_completion(primitive_part(list(coeffs)))
            step = _embed(state.n, lo, primal_from_dual_transform(ud))
            cand = congruent_transform(state.gram, step)
            j = (i + 1) * k + q
            det_old = state.leading_det(j)
            det_new = bareiss_det([row[:j] for row in cand[:j]])
            # adopt only a definite improvement of the prefix volume
            if Fraction(det_new) * (1 + eps_x) ** 2 < det_old:
                state.gram = cand
                state.u = mat_mul(state.u, step)
                state.size_reduce()
                dual_accepts += 1
                trace.append(f"pass{passes}/dual-accept@{j}",
                             _potential(state, marks))

        after_marks = tuple(state.leading_det(j) for j in marks)
        trace.append(f"pass{passes}", _potential(state, marks))
        if after_marks == before_marks:
            break
        if used() > budget:
            raise BudgetError(
                f"oracle budget {budget} exhausted after {passes} passes",
                trace=trace)
        if passes >= max_passes:
            raise BudgetError(f"pass cap {max_passes} reached", trace=trace)

    if not trace.non_increasing():
        raise SolverFailure("the progress measure increased")
    out = size_reduce(basis.transform(state.u), "exact")
    report = SlideReport(params=params, passes=passes, oracle_calls=used(),
                         budget=budget, head_rebuilds=head_rebuilds,
                         dual_accepts=dual_accepts, trace=trace)
    return out, report


@dataclass(frozen=True)
class SlideLevel:
    """One reduction level of the recursive short-vector search."""

    rank: int
    head_norm_sq: Fraction
    lambda1_sq: Fraction
    prefix_lambda1_sq: Fraction
    condition_held: bool
    bound_factor: float
    bound_ok: bool
    passes: int
    oracle_calls: int


@dataclass(frozen=True)
class SlideSvpResult:
    vector: tuple
    coeffs: tuple
    norm_sq: Fraction
    levels: tuple
    base_rank: int
    base_norm_sq: Fraction
    depth: int


def slide_svp_solve(basis: Basis, k: int, ell: int | None = None,
                    eps=Fraction(1, 10), hsvp_backend="enum",
                    seed: int = 0) -> SlideSvpResult:
    """Short vector via repeated reduction of shrinking leading sections.

    Each level slide-reduces the current section and contributes its head
    as a candidate; the section then loses its last ell columns and the
    search recurses until too small to slide, where an exact search closes
    the run. The shortest candidate wins. Per level the result records
    whether the leading section kept the first minimum strictly above the
    section's own, which is the regime where the head provably lands
    within bound_factor of that section's first minimum.
    """
    if ell is None:
        ell = max(2, round(0.5 * k / 0.802))
    n = basis.rank
    if n < 1:
        raise ParamError("empty basis")
    max_depth = math.ceil(n / ell)

    levels = []
    best_sq = None
    best_vec = None
    cur = basis
    while cur.rank >= k + ell:
        hsvp = OracleSpec(kind="hsvp", backend=hsvp_backend,
                          seed=seed * 97 + len(levels))
        svp = OracleSpec(kind="svp", backend="enum")
        red, rep = slide_reduce(cur, k, ell, eps, hsvp, svp)
        head_sq = red.gram()[0][0]
        head_vec = red.column(0)
        lam = first_minimum_sq(red)
        prefix = Basis([list(c) for c in red.cols[:red.rank - ell]],
                       red.scale)
        lam_pre = first_minimum_sq(prefix)
        factor = float(hsvp.delta_sq_pow(k, 1)) ** \
            ((red.rank - ell) / (k - 1))
        ratio = math.sqrt(float(Fraction(head_sq) / lam))
        levels.append(SlideLevel(
            rank=red.rank, head_norm_sq=head_sq, lambda1_sq=lam,
            prefix_lambda1_sq=lam_pre, condition_held=lam_pre > lam,
            bound_factor=factor, bound_ok=ratio <= factor * (1 + 1e-9),
            passes=rep.passes, oracle_calls=rep.oracle_calls))
        if best_sq is None or head_sq < best_sq:
            best_sq, best_vec = head_sq, head_vec
        cur = prefix
        if len(levels) > max_depth:
            raise SolverFailure("recursion outlived its depth budget")

    base_vec, _, base_sq = svp_exact(cur)
    if best_sq is None or base_sq < best_sq:
        best_sq, best_vec = base_sq, base_vec

    coeffs = basis.integer_coordinates_of(best_vec)
    return SlideSvpResult(
        vector=tuple(best_vec), coeffs=tuple(coeffs), norm_sq=best_sq,
        levels=tuple(levels), base_rank=cur.rank, base_norm_sq=base_sq,
        depth=len(levels))
