"""Exact lattice bases: integer column matrix with a shared rational scale.

The canonical case is dyadic (scale = 2^-e, exposed as denom_log2) and is what
the file format serializes. A general positive rational scale is supported so
that exact duals exist in-type; such bases refuse to serialize.

File format (one basis per file):
    line 1:  "n m e"   rank, ambient dimension, denominator exponent
    lines 2..n+1:  m integers, one column per line
JSON mirror: {"rank": n, "ambient": m, "denom_log2": e, "columns": [[...], ...]}
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd

from .errors import MembershipError, ParamError, RankError, ScaleError
from .intmath import bareiss_det, fraction_matrix_inverse, mat_vec


def _entry_int(x) -> int:
    v = int(x)
    if v != x:
        raise ParamError(f"basis entry {x!r} is not an integer; fold "
                         "denominators into the scale instead")
    return v


class Basis:
    """Ordered lattice basis. Immutable; all arithmetic on it is exact."""

    __slots__ = ("cols", "scale", "ambient", "rank", "_gram_int", "_det_sq")

    def __init__(self, cols, scale=1, ambient=None, _skip_rank_check=False):
        cols = tuple(tuple(_entry_int(x) for x in col) for col in cols)
        scale = Fraction(scale)
        if scale <= 0:
            raise ScaleError("scale must be positive")
        if cols:
            ambient = len(cols[0])
            if any(len(c) != ambient for c in cols):
                raise ParamError("ragged column lengths")
        elif ambient is None:
            raise ParamError("rank-0 basis needs an explicit ambient dimension")
        if len(cols) > ambient:
            raise RankError("more columns than ambient dimension")
        # canonical form: content-free integer matrix, lowest-terms scale
        g = 0
        for col in cols:
            for x in col:
                g = gcd(g, x)
            if g == 1:
                break
        if g > 1:
            cols = tuple(tuple(x // g for x in col) for col in cols)
            scale *= g
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "rank", len(cols))
        object.__setattr__(self, "_gram_int", None)
        object.__setattr__(self, "_det_sq", None)
        if not _skip_rank_check and self.rank and bareiss_det(self.gram_int()) == 0:
            raise RankError("columns are linearly dependent")

    def __setattr__(self, name, value):
        raise AttributeError("Basis is immutable")

    def __eq__(self, other):
        return (isinstance(other, Basis) and self.cols == other.cols
                and self.scale == other.scale and self.ambient == other.ambient)

    def __hash__(self):
        return hash((self.cols, self.scale, self.ambient))

    def __repr__(self):
        return f"Basis(rank={self.rank}, ambient={self.ambient}, scale={self.scale})"

    # -- representation ------------------------------------------------------

    @classmethod
    def from_int_columns(cls, cols, denom_log2=0, ambient=None):
        if denom_log2 < 0:
            raise ScaleError("denominator exponent must be >= 0")
        return cls(cols, Fraction(1, 2 ** denom_log2), ambient=ambient)

    @classmethod
    def integer_identity(cls, n: int):
        return cls([[int(i == j) for i in range(n)] for j in range(n)])

    @property
    def is_dyadic(self) -> bool:
        q = self.scale.denominator
        return (q & (q - 1)) == 0

    def dyadic_form(self) -> tuple[list[list[int]], int]:
        """Return (integer columns, e) with real basis = columns / 2^e.

        The exponent is minimal: e = 0 or some entry is odd.
        """
        p, q = self.scale.numerator, self.scale.denominator
        if q != 1 and (q & (q - 1)) != 0:
            raise ScaleError(f"basis scale {self.scale} is not dyadic")
        e = q.bit_length() - 1
        cols = [[x * p for x in col] for col in self.cols]
        return cols, e

    @property
    def denom_log2(self) -> int:
        return self.dyadic_form()[1]

    def real_columns(self) -> list[list[Fraction]]:
        s = self.scale
        return [[x * s for x in col] for col in self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        s = self.scale
        return tuple(x * s for x in self.cols[j])

    # -- exact linear algebra ------------------------------------------------

    def gram_int(self) -> list[list[int]]:
        """Gram matrix of the integer columns (scale not applied)."""
        if self._gram_int is None:
            n = self.rank
            g = [[0] * n for _ in range(n)]
            for i in range(n):
                ci = self.cols[i]
                for j in range(i + 1):
                    v = sum(a * b for a, b in zip(ci, self.cols[j]))
                    g[i][j] = v
                    g[j][i] = v
            object.__setattr__(self, "_gram_int", g)
        return [row[:] for row in self._gram_int]

    def gram(self) -> list[list[Fraction]]:
        s2 = self.scale * self.scale
        return [[x * s2 for x in row] for row in self.gram_int()]

    def det_sq(self) -> Fraction:
        """Squared lattice determinant, exact."""
        if self._det_sq is None:
            d = bareiss_det(self.gram_int()) * self.scale ** (2 * self.rank)
            object.__setattr__(self, "_det_sq", Fraction(d))
        return self._det_sq

    def apply_coords(self, coords) -> tuple[Fraction, ...]:
        """Ambient vector of an integer coordinate tuple."""
        s = self.scale
        out = [Fraction(0)] * self.ambient
        for j, z in enumerate(coords):
            if z:
                col = self.cols[j]
                for i in range(self.ambient):
                    out[i] += z * col[i]
        return tuple(x * s for x in out)

    def transform(self, u) -> "Basis":
        """Basis with columns replaced by integer column combinations B @ u."""
        n = self.rank
        new_cols = []
        for j in range(len(u[0])):
            col = [0] * self.ambient
            for t in range(n):
                utj = u[t][j]
                if utj:
                    ct = self.cols[t]
                    for i in range(self.ambient):
                        col[i] += utj * ct[i]
            new_cols.append(col)
        # callers pass unimodular or column-selection transforms, so
        # independence is inherited; skip the determinant check
        return Basis(new_cols, self.scale, _skip_rank_check=True)

    def coordinates_of(self, vector) -> list[Fraction] | None:
        """Exact coordinates of an ambient vector, or None if outside span."""
        if self.rank == 0:
            return [] if all(Fraction(x) == 0 for x in vector) else None
        v = [Fraction(x) / self.scale for x in vector]
        bt_v = [sum(Fraction(c[i]) * v[i] for i in range(self.ambient))
                for c in self.cols]
        ginv = fraction_matrix_inverse(self.gram_int())
        x = mat_vec(ginv, bt_v)
        # verify (handles ambient > rank: solution exists only in-span)
        for i in range(self.ambient):
            if sum(self.cols[j][i] * x[j] for j in range(self.rank)) != v[i]:
                return None
        return x

    def integer_coordinates_of(self, vector) -> list[int]:
        """Coordinates of a lattice vector; MembershipError if not in L(B)."""
        x = self.coordinates_of(vector)
        if x is None:
            raise MembershipError("vector outside the basis span")
        if any(c.denominator != 1 for c in x):
            raise MembershipError("vector is in the span but not in the lattice")
        return [int(c) for c in x]

    def contains(self, vector) -> bool:
        x = self.coordinates_of(vector)
        return x is not None and all(c.denominator == 1 for c in x)

    def contains_basis(self, other: "Basis") -> bool:
        """True iff every column of `other` lies in L(self)."""
        return all(self.contains(other.column(j)) for j in range(other.rank))

    def same_lattice_as(self, other: "Basis") -> bool:
        return (self.rank == other.rank and self.ambient == other.ambient
                and self.contains_basis(other) and other.contains_basis(self))


def dual_reversed(basis: Basis) -> Basis:
    """Reversed dual basis of L(B): dual vectors in reverse column order.

    Exact; the result usually has a non-dyadic scale. Applying the operation
    twice yields a basis of the original lattice.
    """
    if basis.rank == 0:
        return basis
    ginv = fraction_matrix_inverse(basis.gram_int())
    # dual columns = B @ G^-1 (columns indexed like B), then reverse order
    denom = 1
    for row in ginv:
        for x in row:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    cols = []
    for j in range(basis.rank):
        col = [0] * basis.ambient
        for t in range(basis.rank):
            w = int(ginv[t][j] * denom)
            if w:
                ct = basis.cols[t]
                for i in range(basis.ambient):
                    col[i] += w * ct[i]
        cols.append(col)
    cols.reverse()
    return Basis(cols, Fraction(1, denom) / basis.scale)


# -- serialization -----------------------------------------------------------


def basis_to_text(basis: Basis) -> str:
    cols, e = basis.dyadic_form()
    lines = [f"{basis.rank} {basis.ambient} {e}"]
    lines += [" ".join(str(x) for x in col) for col in cols]
    return "\n".join(lines) + "\n"


def basis_from_text(text: str) -> Basis:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ParamError("empty basis file")
    head = lines[0].split()
    if len(head) != 3:
        raise ParamError("header must be 'n m e'")
    try:
        n, m, e = (int(x) for x in head)
    except ValueError as exc:
        raise ParamError(f"bad header: {lines[0]!r}") from exc
    if n < 0 or m <= 0 or e < 0:
        raise ParamError("header values out of range")
    if len(lines) != n + 1:
        raise ParamError(f"expected {n} column lines, found {len(lines) - 1}")
    cols = []
    for ln in lines[1:]:
        try:
            col = [int(x) for x in ln.split()]
        except ValueError as exc:
            raise ParamError(f"bad column line: {ln!r}") from exc
        if len(col) != m:
            raise ParamError(f"column of length {len(col)}, expected {m}")
        cols.append(col)
    return Basis.from_int_columns(cols, e, ambient=m)


def save_basis(basis: Basis, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(basis_to_text(basis))


def load_basis(path) -> Basis:
    with open(path, encoding="ascii") as fh:
        return basis_from_text(fh.read())


def basis_to_json_dict(basis: Basis) -> dict:
    cols, e = basis.dyadic_form()
    return {"rank": basis.rank, "ambient": basis.ambient,
            "denom_log2": e, "columns": cols}


def basis_from_json_dict(data: dict) -> Basis:
    try:
        cols = data["columns"]
        e = data["denom_log2"]
        m = data["ambient"]
        n = data["rank"]
    except (KeyError, TypeError) as exc:
        raise ParamError(f"missing basis field: {exc}") from exc
    if len(cols) != n:
        raise ParamError("column count does not match rank")
    return Basis.from_int_columns(cols, e, ambient=m)


def basis_to_json(basis: Basis) -> str:
    return json.dumps(basis_to_json_dict(basis))


def basis_from_json(text: str) -> Basis:
    return basis_from_json_dict(json.loads(text))
