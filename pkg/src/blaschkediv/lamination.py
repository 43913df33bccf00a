"""Exact rational angle pairs on the preimage tree of 1.

For a regular boundary divisor ``D = (B, S)`` with ``1`` outside the
support, every point of the tree ``B^{-k}(1)`` carries two angles
``theta_minus <= theta_plus`` (in turns, exact fractions with
denominators dividing powers of ``d``).  The assignment is the unique
one with ``theta(1) = 0`` that is monotone around the circle, pulls
back under ``B`` (multiplication of angles by ``d``), and spends
``nu(q)/d`` of angular mass on each support atom the first time its arc
is crossed.  Leaf pairs with a positive gap are the lamination chords.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Optional

import numpy as np
import numpy.polynomial.polynomial as npoly

from .blaschke import BlaschkeProduct, _polish_roots
from .boundary import BoundaryDivisor
from .divisor import Divisor
from .errors import NumericalError, PreconditionError

#: Two circle points closer than this cannot be ordered reliably.
COLLISION_TOL = 1e-12

__all__ = [
    "AngleEntry",
    "LaminationTable",
    "preimages_of",
    "lamination_table",
    "ray_pairs",
    "table_csv_rows",
]


def preimages_of(B: BlaschkeProduct, w: complex) -> list[complex]:
    """All circle solutions of ``B(z) = w``, sorted counterclockwise.

    Parameters
    ----------
    B : BlaschkeProduct
        Product of degree at least 2.
    w : complex
        A unit-modulus target.

    Returns
    -------
    list of complex
        The ``deg(B)`` solutions, snapped to unit modulus and ordered by
        increasing argument in [0, 2*pi).

    Raises
    ------
    NumericalError
        If the root count is off or a root fails the forward check.
    """
    l = B.degree
    if l < 2:
        raise PreconditionError("preimages need a product of degree >= 2")
    w = complex(w)
    if abs(abs(w) - 1.0) > 1e-9:
        raise PreconditionError("preimage target must be a circle point")
    w /= abs(w)
    # numerator of B(z) - w: n z^m P(z) - w Q(z)
    num = B.normalization * np.concatenate(
        (np.zeros(B.m, dtype=complex), B._p))
    num = num - w * np.concatenate(
        (B._q, np.zeros(len(num) - len(B._q), dtype=complex)))
    roots = _polish_roots(num, npoly.polyroots(num))
    if len(roots) != l:
        raise NumericalError(
            f"expected {l} preimages, root finder returned {len(roots)}")
    out = []
    for z in roots:
        z = complex(z)
        z /= abs(z)
        if abs(B.eval(z) - w) > 1e-9:
            raise NumericalError(
                f"preimage candidate fails the forward check at {z!r}")
        out.append(z)
    out.sort(key=lambda z: cmath.phase(z) % (2.0 * math.pi))
    for a, b in zip(out, out[1:]):
        if abs(a - b) <= COLLISION_TOL:
            raise NumericalError("two preimages collide on the circle")
    return out


class AngleEntry:
    """One tree point with its exact angle pair.

    Attributes
    ----------
    point : complex
        Circle point (floating); the combinatorics below never feed the
        float back into the angles.
    level : int
        Smallest ``k`` with ``B^k(point) = 1``.
    theta_minus, theta_plus : Fraction
        Exact angles in turns, ``0 <= theta_minus <= theta_plus < 1``.
    nu : int
        Multiplicity of the circle part at the point (0 off support).
    parent : AngleEntry
        The entry of ``B(point)`` (the root is its own parent).
    """

    def __init__(self, point: complex, level: int, theta_minus: Fraction,
                 theta_plus: Fraction, nu: int,
                 parent: Optional["AngleEntry"]):
        self.point = point
        self.level = level
        self.theta_minus = theta_minus
        self.theta_plus = theta_plus
        self.nu = nu
        self.parent = parent if parent is not None else self

    @property
    def gap(self) -> Fraction:
        return self.theta_plus - self.theta_minus

    @property
    def turn(self) -> float:
        return (cmath.phase(self.point) / (2.0 * math.pi)) % 1.0

    def __repr__(self) -> str:
        return (f"AngleEntry(level={self.level}, "
                f"theta=[{self.theta_minus}, {self.theta_plus}], "
                f"nu={self.nu})")


class LaminationTable:
    """Counterclockwise-ordered angle entries of the preimage tree."""

    def __init__(self, entries: list[AngleEntry], depth: int,
                 base: BoundaryDivisor):
        self.entries = entries
        self.depth = depth
        self.base = base

    def entry_near(self, point: complex,
                   tol: float = 1e-9) -> Optional[AngleEntry]:
        """The entry whose circle point is within ``tol`` of ``point``."""
        for entry in self.entries:
            if abs(entry.point - point) <= tol:
                return entry
        return None

    def __len__(self) -> int:
        return len(self.entries)


def _support_in_arc(support: list[tuple[float, int, complex]],
                    a: complex, b: complex) -> int:
    """Total multiplicity of support atoms strictly inside the
    counterclockwise open arc from ``a`` to ``b``."""
    ta = (cmath.phase(a) / (2.0 * math.pi)) % 1.0
    tb = (cmath.phase(b) / (2.0 * math.pi)) % 1.0
    span = (tb - ta) % 1.0
    total = 0
    for tq, nu, q in support:
        if abs(q - a) <= COLLISION_TOL or abs(q - b) <= COLLISION_TOL:
            continue
        if 0.0 < (tq - ta) % 1.0 < span:
            total += nu
    return total


def lamination_table(D: BoundaryDivisor, depth: int) -> LaminationTable:
    """Build the exact angle table down to the given tree depth.

    Parameters
    ----------
    D : BoundaryDivisor
        Regular divisor (interior degree >= 2) with 1 outside the
        support of the circle part.
    depth : int
        Number of preimage levels below the root.

    Raises
    ------
    PreconditionError
        Singular divisor, or 1 in the support (the angle recursion has
        no consistent convention there).
    NumericalError
        Preimage collisions or a monotonicity violation, both of which
        mean the float geometry can no longer order the combinatorics.
    """
    if D.l < 2:
        raise PreconditionError("lamination needs a regular divisor (l >= 2)")
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    B = D.interior_part
    d = D.total_degree
    support: list[tuple[float, int, complex]] = []
    for q, nu in D.circle_part.atoms:
        if abs(q - 1.0) <= 1e-9:
            raise PreconditionError(
                "the angle recursion is undefined when 1 lies in supp(S)")
        support.append(((cmath.phase(q) / (2.0 * math.pi)) % 1.0, nu, q))

    def nu_at(z: complex) -> int:
        for _, nu, q in support:
            if abs(q - z) <= COLLISION_TOL:
                return nu
        return 0

    root = AngleEntry(1.0 + 0j, 0, Fraction(0), Fraction(0), 0, None)
    ordered: list[AngleEntry] = [root]

    for level in range(1, depth + 1):
        parents = [e for e in ordered if e.level == level - 1]
        candidates: list[tuple[complex, AngleEntry]] = []
        for parent in parents:
            for z in preimages_of(B, parent.point):
                if any(abs(z - e.point) <= COLLISION_TOL for e in ordered):
                    continue
                candidates.append((z, parent))
        for i in range(len(candidates)):
            for j in range(i + 1, len(candidates)):
                if abs(candidates[i][0] - candidates[j][0]) <= COLLISION_TOL:
                    raise NumericalError(
                        "two preimages collide on the circle")
        slotted: list[tuple[AngleEntry | None, complex, AngleEntry]] = [
            (e, e.point, e.parent) for e in ordered]
        for z, parent in candidates:
            slotted.append((None, z, parent))
        slotted.sort(key=lambda t: (cmath.phase(t[1]) / (2 * math.pi)) % 1.0)
        # the root has turn exactly 0, so it stays first after the sort
        new_ordered: list[AngleEntry] = []
        prev: Optional[AngleEntry] = None
        for entry, z, parent in slotted:
            if entry is None:
                img_gap = (parent.theta_minus - prev.parent.theta_plus) % 1
                if img_gap == 0:
                    img_gap = Fraction(1)
                arc_nu = _support_in_arc(support, prev.point, z)
                tminus = prev.theta_plus + Fraction(img_gap + arc_nu, d)
                gap = Fraction(nu_at(z) + parent.gap, d)
                entry = AngleEntry(z, level, tminus, tminus + gap,
                                   nu_at(z), parent)
                if not (prev.theta_plus < entry.theta_minus
                        and entry.theta_plus < 1):
                    raise NumericalError(
                        "angle monotonicity violated while inserting level "
                        f"{level}")
                dm = (entry.theta_minus * d) % 1
                dp = (entry.theta_plus * d) % 1
                if dm != parent.theta_minus % 1 or dp != parent.theta_plus % 1:
                    raise NumericalError(
                        "pullback consistency violated at level "
                        f"{level}")
            else:
                if prev is not None and not (prev.theta_plus
                                             <= entry.theta_minus):
                    raise NumericalError(
                        "angle monotonicity violated while re-walking level "
                        f"{level}")
            new_ordered.append(entry)
            prev = entry
        ordered = new_ordered
    return LaminationTable(ordered, depth, D)


def ray_pairs(T: LaminationTable) -> list[tuple[Fraction, Fraction]]:
    """Leaf pairs ``(theta_minus, theta_plus)`` of all entries with a
    positive gap, sorted by the lower angle."""
    pairs = [(e.theta_minus, e.theta_plus) for e in T.entries if e.gap > 0]
    pairs.sort()
    return pairs


def table_csv_rows(T: LaminationTable) -> list[list]:
    """Rows for the CSV export, one per entry in circle order:
    ``point_re, point_im, level, theta_minus_num, theta_minus_den,
    theta_plus_num, theta_plus_den, nu``."""
    rows = []
    for e in T.entries:
        rows.append([e.point.real, e.point.imag, e.level,
                     e.theta_minus.numerator, e.theta_minus.denominator,
                     e.theta_plus.numerator, e.theta_plus.denominator,
                     e.nu])
    return rows
