"""Integral divisors on the disk, the circle, and the closed disk.

A divisor is a finite formal sum of points with positive integer
multiplicities.  Divisors are the data model for zero sets, critical
sets, and escaped boundary mass throughout the package; the matching
(bottleneck) distance below metricizes the convergence notion used by
all the limit procedures.
"""

from __future__ import annotations

import json
import math
import cmath
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import AmbiguousModulusError, PreconditionError, SchemaError

#: Two atoms closer than this merge into one atom with summed
#: multiplicity at their multiplicity-weighted centroid.
MERGE_TOL = 1e-10

#: Moduli within this of 1 count as lying on the circle.
CIRCLE_TOL = 1e-12

#: The half-open modulus band [1 - AMBIG_OUTER, 1 - AMBIG_INNER) where
#: interior vs circle classification is refused rather than guessed.
AMBIG_OUTER = 1e-8
AMBIG_INNER = 1e-12

REGION_INTERIOR = "interior"
REGION_CIRCLE = "circle"
REGION_CLOSED = "closed"
_REGIONS = (REGION_INTERIOR, REGION_CIRCLE, REGION_CLOSED)

__all__ = [
    "MERGE_TOL",
    "CIRCLE_TOL",
    "Divisor",
    "degree",
    "is_simple",
    "add",
    "matching_distance",
    "split_boundary",
    "sequence_limit",
    "divisor_to_json",
    "divisor_from_json",
]


def _merge_atoms(atoms: Iterable[tuple[complex, int]]) -> list[tuple[complex, int]]:
    """Cluster atoms at MERGE_TOL and return multiplicity-weighted
    centroids, canonically sorted."""
    items = [(complex(z), int(m)) for z, m in atoms]
    for _, m in items:
        if m <= 0:
            raise PreconditionError("multiplicities must be positive integers")
    n = len(items)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(items[i][0] - items[j][0]) <= MERGE_TOL:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    clusters: dict[int, list[tuple[complex, int]]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(items[i])
    merged = []
    for members in clusters.values():
        total = sum(m for _, m in members)
        centroid = sum(z * m for z, m in members) / total
        merged.append((centroid, total))
    merged.sort(key=lambda t: (t[0].real, t[0].imag))
    return merged


class Divisor:
    """An integral divisor: atoms ``(point, multiplicity)`` over a region.

    Parameters
    ----------
    atoms : iterable of (complex, int)
        Points with positive multiplicities.  Atoms within the merge
        tolerance collapse into one atom with summed multiplicity.
    region : str
        One of ``"interior"`` (all ``|z| < 1``), ``"circle"``
        (all ``||z|-1| <= 1e-12``), or ``"closed"``
        (all ``|z| <= 1 + 1e-12``).

    Notes
    -----
    Divisors are immutable value objects; the empty divisor (degree 0)
    is allowed and behaves as the additive identity.
    """

    def __init__(self, atoms: Iterable[tuple[complex, int]],
                 region: str = REGION_CLOSED):
        if region not in _REGIONS:
            raise PreconditionError(f"unknown region {region!r}")
        merged = _merge_atoms(atoms)
        for z, _ in merged:
            r = abs(z)
            if region == REGION_INTERIOR and r >= 1.0:
                raise PreconditionError(
                    f"interior divisor atom with |z| = {r:.17g} >= 1")
            if region == REGION_CIRCLE and abs(r - 1.0) > CIRCLE_TOL:
                raise PreconditionError(
                    f"circle divisor atom with |z| = {r:.17g} off the circle")
            if region == REGION_CLOSED and r > 1.0 + CIRCLE_TOL:
                raise PreconditionError(
                    f"closed-disk divisor atom with |z| = {r:.17g} > 1")
        self._atoms: tuple[tuple[complex, int], ...] = tuple(merged)
        self._region = region

    @property
    def atoms(self) -> tuple[tuple[complex, int], ...]:
        return self._atoms

    @property
    def region(self) -> str:
        return self._region

    @property
    def degree(self) -> int:
        return sum(m for _, m in self._atoms)

    @property
    def support(self) -> tuple[complex, ...]:
        return tuple(z for z, _ in self._atoms)

    def multiplicity(self, q: complex, tol: float = MERGE_TOL) -> int:
        """Multiplicity of the atom within ``tol`` of ``q`` (0 if none)."""
        for z, m in self._atoms:
            if abs(z - q) <= tol:
                return m
        return 0

    def points(self) -> list[complex]:
        """Multiset expansion: each atom repeated by its multiplicity."""
        out: list[complex] = []
        for z, m in self._atoms:
            out.extend([z] * m)
        return out

    def with_region(self, region: str) -> "Divisor":
        """Same atoms, revalidated under another region tag."""
        return Divisor(self._atoms, region)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Divisor) and self._region == other._region
                and self._atoms == other._atoms)

    def __hash__(self) -> int:
        return hash((self._region, self._atoms))

    def __repr__(self) -> str:
        body = " + ".join(f"{m}*({z.real:.6g}{z.imag:+.6g}j)"
                          for z, m in self._atoms) or "0"
        return f"Divisor({body}, region={self._region})"


def degree(D: Divisor) -> int:
    """Total multiplicity of the divisor."""
    return D.degree


def is_simple(D: Divisor) -> bool:
    """True when every multiplicity equals 1."""
    return all(m == 1 for _, m in D.atoms)


def add(D1: Divisor, D2: Divisor) -> Divisor:
    """Formal sum of two divisors.

    The result region is the common region when both agree and
    ``"closed"`` for mixed inputs; atoms within the merge tolerance
    collapse as usual.
    """
    region = D1.region if D1.region == D2.region else REGION_CLOSED
    return Divisor(list(D1.atoms) + list(D2.atoms), region)


def _bottleneck_feasible(dist: np.ndarray, r: float) -> bool:
    """Perfect bipartite matching using only edges of length <= r."""
    rows, cols = np.nonzero(dist <= r)
    if len(rows) == 0:
        return dist.shape[0] == 0
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)),
                       shape=dist.shape).tocsr()
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def matching_distance(D1: Divisor, D2: Divisor) -> float:
    """Bottleneck matching distance between equal-degree divisors.

    Parameters
    ----------
    D1, D2 : Divisor
        Divisors of the same degree (regions may differ).

    Returns
    -------
    float
        Minimum over bijections of the multiset expansions of the
        maximum pointwise displacement.  Zero exactly when the divisors
        coincide as multisets.

    Raises
    ------
    PreconditionError
        On degree mismatch.
    """
    if D1.degree != D2.degree:
        raise PreconditionError(
            f"matching_distance needs equal degrees "
            f"({D1.degree} vs {D2.degree})")
    a = D1.points()
    b = D2.points()
    n = len(a)
    if n == 0:
        return 0.0
    dist = np.abs(np.subtract.outer(np.asarray(a, dtype=complex),
                                    np.asarray(b, dtype=complex)))
    radii = np.unique(dist)
    lo, hi = 0, len(radii) - 1
    if _bottleneck_feasible(dist, radii[0]):
        return float(radii[0])
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if _bottleneck_feasible(dist, radii[mid]):
            hi = mid
        else:
            lo = mid
    return float(radii[hi])


def split_boundary(D: Divisor) -> tuple[Divisor, Divisor]:
    """Partition a divisor into its interior and circle parts.

    Returns
    -------
    (interior, circle) : tuple of Divisor
        Atoms with ``|z| >= 1 - 1e-12`` go to the circle part, atoms
        with ``|z| < 1 - 1e-8`` to the interior part; degrees add up to
        ``degree(D)`` and points pass through unchanged.

    Raises
    ------
    AmbiguousModulusError
        For any atom with modulus in the band ``[1-1e-8, 1-1e-12)``,
        where the interior/circle split would be a silent guess.
    """
    inner: list[tuple[complex, int]] = []
    outer: list[tuple[complex, int]] = []
    for z, m in D.atoms:
        r = abs(z)
        if r >= 1.0 - AMBIG_INNER:
            outer.append((z, m))
        elif r >= 1.0 - AMBIG_OUTER:
            raise AmbiguousModulusError(
                f"atom at |z| = {r:.17g} falls in the ambiguous modulus band")
        else:
            inner.append((z, m))
    return (Divisor(inner, REGION_INTERIOR), Divisor(outer, REGION_CIRCLE))


def sequence_limit(seq: Sequence[Divisor], tol: float = 1e-6,
                   window: int = 3) -> Optional[Divisor]:
    """Limit of a divisor sequence, if its tail has stabilized.

    Parameters
    ----------
    seq : sequence of Divisor
        Equal-degree divisors.
    tol : float
        Stabilization tolerance in matching distance; atoms of the
        representative within ``tol`` of the circle snap onto it.
    window : int
        Number of trailing terms that must agree pairwise within ``tol``.

    Returns
    -------
    Divisor or None
        The last term, snapped to the closed disk, when the last
        ``window`` terms are pairwise within ``tol``; ``None`` when the
        sequence has not converged.
    """
    if window < 2:
        raise PreconditionError("window must be at least 2")
    if len(seq) < window:
        return None
    degrees = {D.degree for D in seq}
    if len(degrees) > 1:
        raise PreconditionError("sequence_limit needs equal-degree terms")
    tail = seq[-window:]
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            if matching_distance(tail[i], tail[j]) > tol:
                return None
    snapped = []
    for z, m in seq[-1].atoms:
        r = abs(z)
        if r >= 1.0 - tol and r > 0:
            z = z / r
        snapped.append((z, m))
    return Divisor(snapped, REGION_CLOSED)


def divisor_to_json(D: Divisor) -> dict:
    """JSON-ready dict: ``{"region": ..., "atoms": [{"re","im","mult"}]}``."""
    return {
        "region": D.region,
        "atoms": [{"re": z.real, "im": z.imag, "mult": m} for z, m in D.atoms],
    }


def _angle_turns_point(value: object) -> complex:
    """Circle point from an angle in turns: a number or an exact
    ``"num/den"`` string."""
    if isinstance(value, str):
        try:
            theta = float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"invalid angle fraction {value!r}") from exc
    elif isinstance(value, (int, float)):
        theta = float(value)
    else:
        raise SchemaError(f"cannot parse angle {value!r}")
    return cmath.exp(2j * math.pi * theta)


def _atom_from_json(obj: object) -> tuple[complex, int]:
    if isinstance(obj, (int, float)):
        return complex(obj), 1
    if isinstance(obj, str):
        return _angle_turns_point(obj), 1
    if isinstance(obj, list):
        if len(obj) != 2:
            raise SchemaError(f"atom list must be [re, im], got {obj!r}")
        return complex(float(obj[0]), float(obj[1])), 1
    if isinstance(obj, dict):
        mult = obj.get("mult", 1)
        if not isinstance(mult, int) or mult <= 0:
            raise SchemaError(f"atom mult must be a positive integer: {obj!r}")
        if "angle_turns" in obj:
            extra = set(obj) - {"angle_turns", "mult"}
            if extra:
                raise SchemaError(f"unknown atom keys {sorted(extra)}")
            return _angle_turns_point(obj["angle_turns"]), mult
        extra = set(obj) - {"re", "im", "mult"}
        if extra:
            raise SchemaError(f"unknown atom keys {sorted(extra)}")
        if "re" not in obj or "im" not in obj:
            raise SchemaError(f"atom needs re and im (or angle_turns): {obj!r}")
        return complex(float(obj["re"]), float(obj["im"])), mult
    raise SchemaError(f"cannot parse atom {obj!r}")


def divisor_from_json(obj: object, default_region: str = REGION_CLOSED) -> Divisor:
    """Parse the divisor schema.

    Accepts either the full ``{"region": ..., "atoms": [...]}`` object or
    a bare list of atoms (region defaulting to ``default_region``).
    Atoms may be numbers, ``[re, im]`` pairs, ``{"re","im","mult"}``
    objects, or circle atoms given by their angle in turns, either as
    ``{"angle_turns","mult"}`` or as a bare ``"num/den"`` string.
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    if isinstance(obj, list):
        atoms = [_atom_from_json(a) for a in obj]
        try:
            return Divisor(atoms, default_region)
        except PreconditionError as exc:
            raise SchemaError(str(exc)) from exc
    if isinstance(obj, dict):
        extra = set(obj) - {"region", "atoms"}
        if extra:
            raise SchemaError(f"unknown divisor keys {sorted(extra)}")
        region = obj.get("region", default_region)
        if region not in _REGIONS:
            raise SchemaError(f"unknown region {region!r}")
        atoms = [_atom_from_json(a) for a in obj.get("atoms", [])]
        try:
            return Divisor(atoms, region)
        except PreconditionError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"cannot parse divisor {obj!r}")
