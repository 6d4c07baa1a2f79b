"""Nested lattice chains built by halving basis columns in cyclic blocks.

A chain L_0 > L_1 > ... > L_t descends from the input lattice L_t by
repeatedly dividing a block of ``alpha`` basis columns by two, wrapping
the column index around cyclically.  Every consecutive quotient
L_i / L_{i+1} is then an elementary abelian 2-group of order 2^alpha,
so two level-i vectors land in the same coset exactly when their basis
coordinates agree mod 2 on the halved positions.  That parity key is
what the pairing stage consumes.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .basis import Basis
from .errors import ParamError


def _halved_basis(basis: Basis, positions) -> Basis:
    """Divide the given columns by two, keeping integer column data.

    Halving column j is the same as doubling every other column and
    halving the global scale, which keeps the stored columns integral.
    """
    pos = set(positions)
    new_cols = [col if j in pos else tuple(2 * x for x in col)
                for j, col in enumerate(basis.cols)]
    return Basis(new_cols, basis.scale / 2, ambient=basis.ambient)


def _scaled(basis: Basis, power: int) -> Basis:
    """The lattice 2^power * L, exact for any integer power."""
    return Basis(list(basis.cols), basis.scale * Fraction(2) ** power,
                 ambient=basis.ambient)


@dataclass(frozen=True)
class Tower:
    """A descending chain of lattices with index 2^alpha per step.

    ``levels[0]`` is the densest lattice and ``levels[-1]`` the input.
    ``halved_sets[i]`` lists the column positions in which ``levels[i]``
    is finer than ``levels[i+1]``; coordinates of a level-i vector are
    in ``levels[i+1]`` iff they are even on those positions.
    """

    levels: tuple
    alpha: int
    halved_sets: tuple = field(default=())

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def rank(self) -> int:
        return self.levels[-1].rank

    def coset_key(self, i: int, coeffs) -> int:
        """Parity pattern of a level-i coordinate vector, packed into an int.

        Bit t of the key is coeffs[j] mod 2 for the t-th smallest halved
        position j between levels i and i+1.  Two level-i vectors sum into
        level i+1 exactly when their keys agree.
        """
        if not 0 <= i < self.depth:
            raise ParamError(f"no halving step at level {i}")
        key = 0
        for t, j in enumerate(sorted(self.halved_sets[i])):
            key |= (int(coeffs[j]) & 1) << t
        return key

    def lift_coords(self, i: int, coeffs) -> list:
        """Convert level-i coordinates to level-(i+1) coordinates.

        Requires the vector to lie in level i+1 (even coordinates on the
        halved positions); raises ParamError otherwise.
        """
        if not 0 <= i < self.depth:
            raise ParamError(f"no halving step at level {i}")
        out = [int(c) for c in coeffs]
        for j in self.halved_sets[i]:
            if out[j] & 1:
                raise ParamError("vector is not in the next tower level")
            out[j] //= 2
        return out


def _check_tower(tower: Tower) -> None:
    """Machine-check the chain invariants; raises ParamError on failure."""
    levels = tower.levels
    alpha = tower.alpha
    ell = tower.depth
    n = tower.rank
    for i in range(1, ell + 1):
        coarse, fine = levels[i], levels[i - 1]
        if not fine.contains_basis(coarse):
            raise ParamError(f"level {i} is not contained in level {i - 1}")
        if fine.same_lattice_as(coarse):
            raise ParamError(f"levels {i - 1} and {i} coincide")
        if not coarse.contains_basis(_scaled(fine, 1)):
            raise ParamError(f"2 * level {i - 1} is not inside level {i}")
        ratio = coarse.det_sq() / fine.det_sq()
        if ratio != Fraction(4) ** alpha:
            raise ParamError(f"index between levels {i - 1} and {i} "
                             f"is not 2^{alpha}")
        if i >= 2 and not levels[i - 2].contains_basis(_scaled(coarse, -1)):
            raise ParamError(f"half of level {i} escapes level {i - 2}")
    for i in range(ell + 1):
        lo_pow = -((-i * alpha) // n)   # ceil(i*alpha/n)
        hi_pow = (i * alpha) // n
        if not levels[i].contains_basis(_scaled(levels[0], lo_pow)):
            raise ParamError(f"level {i} misses its dense sandwich bound")
        if not _scaled(levels[0], hi_pow).contains_basis(levels[i]):
            raise ParamError(f"level {i} escapes its sparse sandwich bound")


def build_tower(basis: Basis, alpha: int, ell: int, check: bool = True) -> Tower:
    """Build the depth-``ell`` halving chain under the given lattice.

    The top level is the input.  Going down, step k halves the alpha
    columns at positions (k-1)*alpha .. k*alpha - 1 taken mod n, so the
    halvings sweep the columns cyclically and every column is halved
    floor/ceil(ell*alpha/n) times overall.
    """
    n = basis.rank
    if n == 0:
        raise ParamError("rank must be positive")
    if 2 * alpha < n or alpha > n:
        raise ParamError(f"alpha must satisfy n/2 <= alpha <= n, "
                         f"got alpha={alpha} at rank {n}")
    if ell < 1:
        raise ParamError("tower depth must be at least 1")
    levels = [basis]
    halved = []
    for k in range(1, ell + 1):
        positions = frozenset(((k - 1) * alpha + t) % n for t in range(alpha))
        levels.append(_halved_basis(levels[-1], positions))
        halved.append(positions)
    levels.reverse()
    halved.reverse()
    tower = Tower(tuple(levels), alpha, tuple(halved))
    if check:
        _check_tower(tower)
    return tower
