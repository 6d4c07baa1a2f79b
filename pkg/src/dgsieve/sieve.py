"""Pool-based pair-and-sum solver for short lattice vectors.

Pipeline: descend the input lattice to a denser level-0 lattice via a
halving tower, draw a Gaussian start pool on a smooth sublattice of
level 0, then repeatedly pair vectors that agree modulo the next level
and sum them.  Each pairing step roughly halves the pool and lands one
level up; after the last step the survivors live in the input lattice
and the expected total squared length has not grown, so the shortest
nonzero survivor is a short-vector candidate.  A geometric grid over
the unknown width parameter turns the promise routine into a solver.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ._kernel import pair_scan
from .basis import Basis
from .errors import (AllZeroFailure, ParamError, PoolError, SolverFailure,
                     StartFailure)
from .gso import gso_compute
from .reduction import first_minimum_sq, hkz_reduce, lll_reduce
from .sampling import klein_sample, min_safe_width
from .smoothing import min_sublattice_smoothing
from .tower import Tower, build_tower

# int64 is the pool coordinate dtype; quadratic-form work checks this
# headroom bound and falls back to exact python ints beyond it
_INT64_SAFE = 2 ** 62

# soft slack on the realized per-level sum of squared norms; the clean
# statement only holds in expectation, so single runs get this much room
NONINCREASE_SLACK = 1.25


def _form_values(gram_int, coeffs) -> list:
    """Exact squared norms (integer Gram units) of int64 coordinate rows."""
    m, n = coeffs.shape
    if m == 0:
        return []
    g = np.asarray(gram_int, dtype=np.int64)
    amax = int(np.abs(coeffs).max())
    gmax = int(np.abs(g).max())
    if n * n * amax * amax * gmax < _INT64_SAFE:
        vals = np.einsum("ij,jk,ik->i", coeffs, g, coeffs)
        return [int(v) for v in vals]
    out = []
    for a in coeffs.tolist():
        acc = 0
        for i in range(n):
            if a[i]:
                row = gram_int[i]
                acc += a[i] * sum(row[j] * a[j] for j in range(n))
        out.append(acc)
    return out


@dataclass(frozen=True)
class PairingTrace:
    """Audit record of one pairing step."""

    pairs: tuple
    keys: tuple
    index: int
    input_m: int


@dataclass(frozen=True)
class StartInfo:
    """How the start pool was drawn."""

    s: float
    prefix_rank: int
    gamma: float
    eta_upper: float
    precondition_ok: bool
    width_ok: bool


@dataclass(frozen=True)
class LevelStats:
    level: int
    count: int
    nonzero: int
    sum_norm_sq: Fraction
    within_slack: bool | None = None


@dataclass
class VectorPool:
    """Integer coordinate rows over a fixed lattice basis.

    Membership at the pool's level holds by construction: rows are
    coordinates, so every row denotes a lattice vector of `basis`.
    """

    basis: Basis
    coeffs: np.ndarray
    level: int = 0
    trace: PairingTrace | None = None
    start: StartInfo | None = None
    history: tuple = ()
    truncated_from: int | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.coeffs, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[1] != self.basis.rank:
            raise ParamError("coordinate array must be m x rank")
        self.coeffs = arr

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]

    def norms_sq_int(self) -> list:
        return _form_values(self.basis.gram_int(), self.coeffs)

    def norms_sq(self) -> list:
        s2 = self.basis.scale * self.basis.scale
        return [v * s2 for v in self.norms_sq_int()]

    def sum_norm_sq(self) -> Fraction:
        s2 = self.basis.scale * self.basis.scale
        return Fraction(sum(self.norms_sq_int())) * s2

    def nonzero_count(self) -> int:
        if self.m == 0:
            return 0
        return int(np.any(self.coeffs != 0, axis=1).sum())

    def vectors(self) -> list:
        return [self.basis.apply_coords(row) for row in self.coeffs.tolist()]

    def shortest_nonzero(self):
        """(row index, exact squared norm) of the best nonzero entry."""
        best = None
        rows = self.coeffs.tolist()
        for i, v in enumerate(self.norms_sq_int()):
            if any(rows[i]) and (best is None or v < best[1]):
                best = (i, v)
        if best is None:
            return None
        s2 = self.basis.scale * self.basis.scale
        return best[0], best[1] * s2

    def stats(self, within_slack=None) -> LevelStats:
        return LevelStats(self.level, self.m, self.nonzero_count(),
                          self.sum_norm_sq(), within_slack)

    def check_membership(self, lattice: Basis) -> bool:
        return all(lattice.contains(v) for v in self.vectors())


@dataclass(frozen=True)
class SieveConfig:
    """Sieve parameters plus a record of any relaxations.

    The faithful parameter schedule is astronomically expensive at any
    rank a workstation can hold, so `overrides` names every field that
    departs from it; reports carry the record along.
    """

    eps: float
    alpha: int
    ell: int
    m: int
    seed: int = 0
    s_grid: tuple | None = None
    retries: int = 20
    overrides: dict = field(default_factory=dict)

    @classmethod
    def theory(cls, n: int, eps, seed: int = 0) -> "SieveConfig":
        """Faithful schedule; m is typically far beyond desk scale."""
        if isinstance(eps, Fraction):
            log_inv = math.log(eps.denominator) - math.log(eps.numerator)
        else:
            log_inv = -math.log(float(eps))
        if log_inv <= 0:
            raise ParamError("eps must be below 1")
        ell = max(1, int(log_inv / math.log(10)) - 1)
        alpha = min(n, math.ceil(
            n / 2 + 100 * n * math.log2(max(n, 2)) * math.log(2) / log_inv))
        return cls(eps=eps, alpha=alpha, ell=ell,
                   m=2 ** (ell + alpha + 1), seed=seed)

    @classmethod
    def desk(cls, n: int, eps: float = 0.25, alpha: int | None = None,
             ell: int = 2, m: int | None = None, seed: int = 0,
             s_grid=None, retries: int = 20) -> "SieveConfig":
        """Workstation-scale schedule with every relaxation recorded."""
        if alpha is None:
            alpha = min(n, n // 2 + 2)
        if m is None:
            m = 2 ** (ell + alpha + 1)
        overrides = {
            "eps": f"desk value {eps}; the analysis wants eps < {n}^-200",
            "alpha": f"desk value {alpha} near n/2; the full schedule "
                     f"grows with 1/log(1/eps)",
        }
        if s_grid is not None:
            overrides["s_grid"] = "caller-supplied width grid"
        cfg = cls(eps=eps, alpha=alpha, ell=ell, m=m, seed=seed,
                  s_grid=None if s_grid is None else tuple(s_grid),
                  retries=retries, overrides=overrides)
        if m < 2 ** (ell + alpha + 1):
            cfg = replace(cfg, overrides={
                **overrides, "m": f"desk value {m} below 2^(ell+alpha+1)"})
        return cfg

    def validate(self, n: int) -> None:
        if 2 * self.alpha < n or self.alpha > n:
            raise ParamError(f"alpha={self.alpha} outside [n/2, n] at rank {n}")
        if self.ell < 1:
            raise ParamError("ell must be at least 1")
        if self.m < 2 ** (self.ell + self.alpha + 1) and "m" not in self.overrides:
            raise ParamError("pool budget m below 2^(ell+alpha+1) needs an "
                             "override record")
        if not 0 < float(self.eps) < 1:
            raise ParamError("eps must lie in (0, 1)")
        if (Fraction(self.eps) >= Fraction(1, n ** 200)
                and "eps" not in self.overrides):
            raise ParamError("eps above the analysis target needs an "
                             "override record")
        if self.retries < 0:
            raise ParamError("retries must be nonnegative")


def _parity_transfer(l0: Basis, l1: Basis):
    """Integer matrix K with K a = 2 * (coordinates in l1) for l0-coords a.

    Exists exactly when 2 L0 lies inside L1; a vector of L0 is in L1 iff
    K a is even, and its l1-coordinates are then K a / 2.
    """
    n = l0.rank
    rows = [[0] * n for _ in range(n)]
    for j in range(n):
        x = l1.coordinates_of(l0.column(j))
        if x is None:
            raise ParamError("lattices do not share a span")
        for t in range(n):
            v = 2 * x[t]
            if v.denominator != 1:
                raise ParamError("doubled fine lattice escapes the coarse one")
            rows[t][j] = int(v)
    return rows


def _quotient_index(l0: Basis, l1: Basis) -> int:
    ratio = l1.det_sq() / l0.det_sq()
    if ratio.denominator != 1:
        raise ParamError("fine lattice does not contain the coarse one")
    idx = math.isqrt(ratio.numerator)
    if idx * idx != ratio.numerator:
        raise ParamError("quotient index is not integral")
    if idx & (idx - 1):
        raise ParamError("quotient index must be a power of two")
    return idx


def pair_and_sum_step(l0: Basis, l1: Basis, pool: VectorPool) -> VectorPool:
    """One pairing pass: sum same-coset pairs of an L0 pool into L1.

    Deterministic scan: ascending first index, each paired with the
    smallest unused later index in the same coset of L0/L1.  Output
    count is exactly ceil((m - index)/2); a pigeonhole count shows the
    scan always finds that many pairs once m >= 2 * index.
    """
    if pool.basis != l0:
        raise ParamError("pool coordinates are not over the fine basis")
    n = l0.rank
    if l1.rank != n or l1.ambient != l0.ambient:
        raise ParamError("level bases must share rank and ambient dimension")
    if n > 63:
        raise ParamError("packed coset keys support rank up to 63")
    if not l0.contains_basis(l1):
        raise ParamError("coarse lattice escapes the fine one")
    k_mat = _parity_transfer(l0, l1)
    idx = _quotient_index(l0, l1)
    m = pool.m
    if m < 2 * idx:
        raise PoolError(f"pool of {m} cannot cover a quotient of size {idx}: "
                        f"need at least {2 * idx}")
    target = (m - idx + 1) // 2

    k_arr = np.asarray(k_mat, dtype=np.int64)
    parity = (k_arr & 1) @ (pool.coeffs.T & 1)
    weights = (np.int64(1) << np.arange(n, dtype=np.int64))
    keys = np.ascontiguousarray(weights @ (parity & 1))
    pairs = pair_scan(keys, target)
    if pairs.shape[0] != target:
        raise PoolError("pairing scan fell short of the guaranteed count")

    sums = pool.coeffs[pairs[:, 0]] + pool.coeffs[pairs[:, 1]]
    smax = int(np.abs(sums).max()) if sums.size else 0
    kmax = int(np.abs(k_arr).max()) if n else 0
    if n * smax * kmax < _INT64_SAFE:
        doubled = sums @ k_arr.T
        if np.any(doubled & 1):
            raise PoolError("paired vectors landed outside the coarse lattice")
        out = doubled // 2
    else:
        rows = []
        for a in sums.tolist():
            row = []
            for t in range(n):
                v = sum(k_mat[t][j] * a[j] for j in range(n))
                if v & 1:
                    raise PoolError("paired vectors landed outside the "
                                    "coarse lattice")
                row.append(v // 2)
            rows.append(row)
        out = np.asarray(rows, dtype=np.int64).reshape(target, n)
    trace = PairingTrace(tuple(map(tuple, pairs.tolist())),
                         tuple(int(k) for k in keys), idx, m)
    return VectorPool(l1, out, level=pool.level + 1, trace=trace)


def run_sieve(tower: Tower, pool: VectorPool) -> VectorPool:
    """Drive the pairing step across all tower levels.

    The returned pool's `history` holds per-level statistics; when the
    input count matches the canonical 2^(ell+alpha+1) budget the output
    is truncated to the canonical 2^alpha vectors.
    """
    if pool.basis != tower.levels[0]:
        raise ParamError("pool must carry level-0 coordinates of the tower")
    if pool.level != 0:
        raise ParamError("sieve input must sit at level 0")
    theory_m = 2 ** (tower.depth + tower.alpha + 1)
    history = [pool.stats()]
    cur = pool
    for i in range(tower.depth):
        cur = pair_and_sum_step(tower.levels[i], tower.levels[i + 1], cur)
        prev_sum, cur_sum = history[-1].sum_norm_sq, cur.sum_norm_sq()
        ok = float(cur_sum) <= float(prev_sum) * NONINCREASE_SLACK + 1e-12
        history.append(cur.stats(within_slack=ok))
    truncated_from = None
    if pool.m == theory_m and cur.m > 2 ** tower.alpha:
        truncated_from = cur.m
        cur = VectorPool(cur.basis, cur.coeffs[:2 ** tower.alpha],
                         level=cur.level, trace=cur.trace)
        history.append(cur.stats())
    cur.start = pool.start
    cur.history = tuple(history)
    cur.truncated_from = truncated_from
    return cur


_ETA_CACHE: dict = {}


def eta_upper_estimate(basis: Basis, eps, rel_tol: float = 1e-4) -> float:
    """Memoized certified upper bound on the best sublattice smoothing width."""
    key = (basis, float(eps), rel_tol)
    if key not in _ETA_CACHE:
        _ETA_CACHE[key] = min_sublattice_smoothing(basis, eps,
                                                   rel_tol=rel_tol).upper
    return _ETA_CACHE[key]


def start_sampling(l0: Basis, r: int, m: int, s, eps, rng,
                   hkz_basis: Basis | None = None,
                   eta_upper: float | None = None):
    """Gaussian start pool on the widest smooth prefix of a reduced basis.

    Fully reduces l0 (recursively, so every projected tail starts with
    its own shortest vector), keeps the longest basis prefix whose
    orthogonalized lengths stay below s/sqrt(log2 n), and draws m
    randomized-rounding Gaussian samples of width s on that prefix.
    Returns (prefix basis, pool with level-0 coordinates).
    """
    n = l0.rank
    if n == 0:
        raise ParamError("rank must be positive")
    if m < 0:
        raise ParamError("sample count must be nonnegative")
    s = float(s)
    if s <= 0:
        raise ParamError("width must be positive")
    if r < 1:
        raise ParamError("window exponent r must be a positive integer")
    h = hkz_basis if hkz_basis is not None else hkz_reduce(l0)
    gso = gso_compute(h)
    if n == 1:
        prefix_rank = 1
    else:
        limit = s * s / math.log2(n)
        prefix_rank = 0
        while (prefix_rank < n
               and float(gso.bstar_sq[prefix_rank]) <= limit * (1 + 1e-12)):
            prefix_rank += 1
    if prefix_rank == 0:
        raise StartFailure(f"no basis direction fits below width {s:.6g}")
    prefix = Basis(list(h.cols[:prefix_rank]), h.scale, ambient=h.ambient)
    gamma = float(r) ** (n / r)
    if eta_upper is None:
        eta_upper = eta_upper_estimate(l0, eps)
    need = gamma * math.sqrt(n * math.log2(n)) * eta_upper if n > 1 else 0.0
    pg = gso_compute(prefix)
    draws = klein_sample(prefix, s, rng, count=m, enforce_width=False, gso=pg)
    lift = np.asarray(
        [l0.integer_coordinates_of(prefix.column(j))
         for j in range(prefix_rank)], dtype=np.int64)
    coords = draws @ lift
    info = StartInfo(s=s, prefix_rank=prefix_rank, gamma=gamma,
                     eta_upper=eta_upper, precondition_ok=s >= need,
                     width_ok=s >= min_safe_width(pg))
    pool = VectorPool(l0, coords, level=0, start=info)
    return prefix, pool


@dataclass(frozen=True)
class GridPointStats:
    """Outcome of one width guess inside one attempt."""

    s: float
    s_start: float
    prefix_rank: int | None
    pool_sizes: tuple
    zero_counts: tuple
    sum_norms: tuple
    shortest_sq: float | None
    note: str = ""


@dataclass(frozen=True)
class FailureReport:
    attempts: int
    grid: tuple
    per_attempt: tuple


@dataclass(frozen=True)
class GsvpResult:
    """Best vector found by the width sweep, with the run's audit trail."""

    coeffs: tuple
    vector: tuple
    norm_sq: Fraction
    s: float
    attempt: int
    eta_upper: float
    bound: float
    meets_bound: bool
    grid: tuple
    stats: tuple
    config: SieveConfig


def default_s_grid(basis: Basis) -> tuple:
    """Geometric sqrt(2) width grid bracketing every plausible scale.

    Low end: the proven lower bound on the first minimum from a swap
    reduction, shrunk by sqrt(n).  High end: sqrt(n) times the longest
    orthogonalized direction, above which sampling is unhelpfully wide.
    """
    red, res = lll_reduce(basis)
    s2 = red.scale * red.scale
    n = basis.rank
    b1 = math.sqrt(float(res.gram[0][0] * s2))
    bmax = math.sqrt(max(float(x * s2) for x in res.bstar_sq))
    low = b1 / (2 ** (n / 2) * math.sqrt(n))
    high = math.sqrt(n) * bmax
    grid = [low]
    while grid[-1] < high:
        grid.append(grid[-1] * math.sqrt(2))
    return tuple(grid)


def gsvp_solve(basis: Basis, cfg: SieveConfig) -> GsvpResult:
    """Width-sweep sieve driver returning the shortest nonzero find.

    Every grid width gets a fresh start pool and a full pairing run;
    the shortest nonzero output across the sweep wins.  If the entire
    sweep only ever yields zero pools the sweep is retried with fresh
    randomness up to cfg.retries times before giving up.
    """
    n = basis.rank
    cfg.validate(n)
    tower = build_tower(basis, cfg.alpha, cfg.ell)
    l0 = tower.levels[0]
    hkz0 = hkz_reduce(l0)
    eta0 = eta_upper_estimate(l0, cfg.eps)
    eta_in = eta_upper_estimate(basis, cfg.eps)
    grid = cfg.s_grid if cfg.s_grid is not None else default_s_grid(basis)
    if not grid:
        raise ParamError("width grid is empty")
    r = max(1, round(n / 5))
    scale_down = 2.0 ** (-cfg.ell / 2)

    best = None
    attempts_stats = []
    for attempt in range(cfg.retries + 1):
        rng = np.random.default_rng([cfg.seed, attempt])
        stats = []
        for s in grid:
            s_start = s * scale_down
            try:
                _, pool = start_sampling(l0, r, cfg.m, s_start, cfg.eps, rng,
                                         hkz_basis=hkz0, eta_upper=eta0)
            except StartFailure:
                stats.append(GridPointStats(s, s_start, None, (), (), (),
                                            None, note="empty prefix"))
                continue
            out = run_sieve(tower, pool)
            hit = out.shortest_nonzero()
            levels = out.history
            stats.append(GridPointStats(
                s, s_start, pool.start.prefix_rank,
                tuple(st.count for st in levels),
                tuple(st.count - st.nonzero for st in levels),
                tuple(float(st.sum_norm_sq) for st in levels),
                None if hit is None else float(hit[1])))
            if hit is not None:
                row, norm_sq = hit
                coeffs = tuple(int(x) for x in out.coeffs[row])
                if best is None or norm_sq < best[0]:
                    best = (norm_sq, coeffs, s, attempt)
        attempts_stats.append(tuple(stats))
        if best is not None:
            break
    if best is None:
        report = FailureReport(len(attempts_stats), tuple(grid),
                               tuple(attempts_stats))
        raise AllZeroFailure(
            f"all {len(grid)} grid widths produced zero pools in "
            f"{len(attempts_stats)} attempts", report)

    norm_sq, coeffs, s_used, attempt = best
    bound = 100 * math.sqrt(n) * eta_in
    return GsvpResult(
        coeffs=coeffs, vector=basis.apply_coords(coeffs), norm_sq=norm_sq,
        s=s_used, attempt=attempt, eta_upper=eta_in, bound=bound,
        meets_bound=math.sqrt(float(norm_sq)) <= bound * (1 + 1e-12),
        grid=tuple(grid), stats=attempts_stats[-1], config=cfg)


@dataclass(frozen=True)
class ApproxResult:
    """Sieve output judged against an approximation target."""

    vector: tuple
    coeffs: tuple
    norm_sq: Fraction
    gamma: float
    eps: float
    reference: float | None
    ratio: float | None
    gsvp: GsvpResult


# widths of the accuracy parameter below this are pointless on a desk
# run and make the smoothing estimator needlessly expensive
_EPS_CLAMP = 0.25


def _config_with_eps(basis: Basis, eps_raw: float, cfg, seed: int):
    clamped = not 0.0 < eps_raw < _EPS_CLAMP
    eps = _EPS_CLAMP if clamped else eps_raw
    note = (f"clamped to {_EPS_CLAMP} from derived {eps_raw:.4g}"
            if clamped else f"derived {eps_raw:.4g}")
    if cfg is None:
        cfg = SieveConfig.desk(basis.rank, eps=eps, seed=seed)
    return replace(cfg, eps=eps,
                   overrides={**cfg.overrides, "eps": note})


def svp_approx(basis: Basis, gamma: float, cfg: SieveConfig | None = None,
               seed: int = 0, check_optimum: bool | None = None) -> ApproxResult:
    """Approximate shortest vector within factor gamma.

    The accuracy parameter is tied to gamma by eps = 2^(-gamma^2/(100^2 n)).
    When the true first minimum is cheap to certify (small rank) the
    gamma guarantee is verified and its violation raises, rather than
    silently returning a long vector.
    """
    n = basis.rank
    if n == 0:
        raise ParamError("rank must be positive")
    floor = math.sqrt(n * max(math.log2(n), 1.0))
    if gamma <= floor:
        raise ParamError(f"gamma must exceed sqrt(n log n) = {floor:.4g}")
    res = gsvp_solve(basis, _config_with_eps(
        basis, 2.0 ** (-gamma * gamma / (100 ** 2 * n)), cfg, seed))
    if check_optimum is None:
        check_optimum = n <= 12
    reference = ratio = None
    if check_optimum:
        lam_sq = first_minimum_sq(basis)
        reference = math.sqrt(float(lam_sq))
        ratio = math.sqrt(float(res.norm_sq)) / reference
        if res.norm_sq > gamma * gamma * lam_sq * (1 + 1e-9):
            raise SolverFailure(
                f"output at {ratio:.4g} times the first minimum exceeds "
                f"gamma = {gamma:.4g}")
    return ApproxResult(vector=res.vector, coeffs=res.coeffs,
                        norm_sq=res.norm_sq, gamma=gamma,
                        eps=float(res.config.eps), reference=reference,
                        ratio=ratio, gsvp=res)


def hsvp_approx(basis: Basis, gamma: float, cfg: SieveConfig | None = None,
                seed: int = 0) -> ApproxResult:
    """Short vector within gamma times the determinant root.

    Uses eps = 2^(-gamma^2/(10^10 n log^2 n)); the bound against
    det^(1/n) is always checked since the determinant is exact.
    """
    n = basis.rank
    if n == 0:
        raise ParamError("rank must be positive")
    log_n = max(math.log2(n), 1.0)
    floor = math.sqrt(n * log_n ** 3)
    if gamma <= floor:
        raise ParamError(f"gamma must exceed sqrt(n log^3 n) = {floor:.4g}")
    res = gsvp_solve(basis, _config_with_eps(
        basis, 2.0 ** (-gamma * gamma / (1e10 * n * log_n ** 2)), cfg, seed))
    reference = float(basis.det_sq()) ** (1 / (2 * n))
    ratio = math.sqrt(float(res.norm_sq)) / reference
    if ratio > gamma * (1 + 1e-9):
        raise SolverFailure(
            f"output at {ratio:.4g} times the determinant root exceeds "
            f"gamma = {gamma:.4g}")
    return ApproxResult(vector=res.vector, coeffs=res.coeffs,
                        norm_sq=res.norm_sq, gamma=gamma,
                        eps=float(res.config.eps), reference=reference,
                        ratio=ratio, gsvp=res)
