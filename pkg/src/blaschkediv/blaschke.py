"""Finite Blaschke products fixing 0 and 1, and the two-way map between
free zero divisors and free critical divisors.

A product here is ``B(z) = z^m * prod_k c_k (z - a_k)/(1 - conj(a_k) z)``
with ``c_k = (1 - conj(a_k))/(1 - a_k)``, so that ``B(0) = 0`` with local
degree at least ``m`` and ``B(1) = 1``.  The free zeros ``a_k`` form an
interior divisor of degree ``e``; the forward map sends it to the degree-e
divisor of free critical points, and the inverse is recovered by homotopy
continuation in coefficient space.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import numpy.polynomial.polynomial as npoly
import mpmath

from .divisor import (CIRCLE_TOL, Divisor, REGION_INTERIOR, matching_distance)
from .errors import ContinuationError, NumericalError, PreconditionError
from .hypgeo import hull_contains

#: A denominator factor smaller than this counts as pole proximity.
POLE_TOL = 1e-14

__all__ = [
    "BlaschkeProduct",
    "RamificationResult",
    "from_zero_divisor",
    "critical_divisor",
    "zeros_from_critical",
    "phi_1m_closed_form",
    "multiplier_at_zero",
    "boundary_orbit",
    "walsh_check",
]


class BlaschkeProduct:
    """A finite Blaschke product determined by its free zero divisor.

    Parameters
    ----------
    free_zeros : Divisor
        Interior divisor of the zeros other than the forced ones at 0;
        degree ``e >= 0`` (a free zero at the origin is allowed and just
        raises the local degree there).
    m : int
        Forced local degree at the origin, ``m >= 1``.

    Attributes
    ----------
    normalization : complex
        The unimodular constant ``prod_k (1-conj(a_k))/(1-a_k)`` making
        ``B(1) = 1``.
    degree : int
        Total degree ``e + m``.
    """

    def __init__(self, free_zeros: Divisor, m: int):
        if not isinstance(m, int) or m < 1:
            raise PreconditionError("m must be a positive integer")
        free_zeros = Divisor(free_zeros.atoms, REGION_INTERIOR)
        self.m = m
        self.free_zeros = free_zeros
        zeros = free_zeros.points()
        self._zeros = zeros
        # P(z) = prod (z - a_k), Q(z) = prod (1 - conj(a_k) z) = rev(conj(P))
        self._p = npoly.polyfromroots(zeros) if zeros else np.array([1.0 + 0j])
        self._q = np.conj(self._p)[::-1].copy()
        p1 = npoly.polyval(1.0, self._p)
        self.normalization = complex(np.conj(p1) / p1)
        # numerator of B'(z)/z^{m-1} up to the normalization:
        # M = (m P + z P') Q - z P Q'
        dp = npoly.polyder(self._p)
        dq = npoly.polyder(self._q)
        zdp = np.concatenate(([0.0 + 0j], dp)) if zeros else np.array([0.0 + 0j])
        zdq = np.concatenate(([0.0 + 0j], dq)) if zeros else np.array([0.0 + 0j])
        self._mnum = (npoly.polymul(m * self._p + zdp, self._q)
                      - npoly.polymul(self._p, zdq))

    @property
    def e(self) -> int:
        return len(self._zeros)

    @property
    def degree(self) -> int:
        return self.e + self.m

    def _check_pole(self, z: complex) -> None:
        for a in self._zeros:
            if abs(1.0 - a.conjugate() * z) < POLE_TOL:
                raise NumericalError(
                    f"evaluation too close to the pole 1/conj({a!r})")

    def eval(self, z: complex) -> complex:
        """Value of the product at ``z`` (disk to disk, circle to circle).

        Raises
        ------
        NumericalError
            If any denominator factor is smaller than ``POLE_TOL``.
        """
        z = complex(z)
        self._check_pole(z)
        w = self.normalization * z ** self.m
        for a in self._zeros:
            w *= (z - a) / (1.0 - a.conjugate() * z)
        return w

    def deriv(self, z: complex) -> complex:
        """Derivative at ``z``, via ``B'(z) = n z^{m-1} M(z)/Q(z)^2`` with
        the precomputed numerator ``M``; exact at zeros of ``B`` where
        logarithmic differentiation breaks down."""
        z = complex(z)
        self._check_pole(z)
        qv = npoly.polyval(z, self._q)
        mv = npoly.polyval(z, self._mnum)
        return self.normalization * z ** (self.m - 1) * mv / (qv * qv)

    def __repr__(self) -> str:
        return (f"BlaschkeProduct(m={self.m}, "
                f"free_zeros={self.free_zeros!r})")


class RamificationResult:
    """Free critical divisor of a product, plus a root-count audit.

    Attributes
    ----------
    free_ram : Divisor
        Interior divisor of the critical points other than the forced
        ``(m-1)``-fold one at the origin; degree exactly ``e``.
    residual_count : int
        Number of critical-numerator roots found outside the closed
        disk (they mirror the interior ones and are discarded).
    """

    def __init__(self, free_ram: Divisor, residual_count: int):
        self.free_ram = free_ram
        self.residual_count = residual_count

    def __repr__(self) -> str:
        return (f"RamificationResult({self.free_ram!r}, "
                f"residual_count={self.residual_count})")


def from_zero_divisor(Z: Divisor, m: int) -> BlaschkeProduct:
    """Construct the unique normalized product with free zero divisor
    ``Z`` and forced local degree ``m`` at the origin."""
    return BlaschkeProduct(Z, m)


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    """Drop trailing coefficients that are exactly or essentially zero."""
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    keep = len(coeffs)
    while keep > 1 and abs(coeffs[keep - 1]) < 1e-300 * scale:
        keep -= 1
    return coeffs[:keep]


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray,
                  steps: int = 2) -> np.ndarray:
    dcoeffs = npoly.polyder(coeffs)
    out = roots.astype(complex)
    for _ in range(steps):
        fv = npoly.polyval(out, coeffs)
        dv = npoly.polyval(out, dcoeffs)
        safe = np.abs(dv) > 1e-280
        out[safe] = out[safe] - fv[safe] / dv[safe]
    return out


def _roots_mpmath(coeffs: np.ndarray) -> np.ndarray:
    """Higher-precision retry for the critical numerator roots."""
    with mpmath.workdps(50):
        desc = [mpmath.mpc(c) for c in coeffs[::-1]]
        rts = mpmath.polyroots(desc, maxsteps=200, extraprec=120)
    return np.array([complex(r) for r in rts])


def critical_divisor(B: BlaschkeProduct) -> RamificationResult:
    """Free critical divisor of ``B`` (the forward divisor map).

    The forced ``(m-1)``-fold critical point at the origin is removed
    analytically; the remaining numerator roots split into exactly
    ``e`` inside the disk (collected, with multiplicity by merging) and
    a mirrored set outside (counted in ``residual_count``).

    Raises
    ------
    PreconditionError
        If ``e == 0`` (no free zeros, hence no free critical points).
    NumericalError
        If the interior root count differs from ``e`` even after the
        higher-precision retry.
    """
    e = B.e
    if e < 1:
        raise PreconditionError("critical_divisor needs at least one free zero")
    coeffs = _trimmed(B._mnum)
    roots = _polish_roots(coeffs, npoly.polyroots(coeffs))
    interior = [complex(z) for z in roots if abs(z) < 1.0]
    if len(interior) != e:
        roots = _polish_roots(coeffs, _roots_mpmath(coeffs), steps=1)
        interior = [complex(z) for z in roots if abs(z) < 1.0]
        if len(interior) != e:
            raise NumericalError(
                f"found {len(interior)} interior critical points, expected {e}")
    free_ram = Divisor([(z, 1) for z in interior], REGION_INTERIOR)
    if free_ram.degree != e:
        raise NumericalError("critical divisor degree lost in merging")
    return RamificationResult(free_ram, len(roots) - len(interior))


def _crit_coeff_vector(zero_coeffs: np.ndarray, m: int) -> Optional[np.ndarray]:
    """Lower coefficients of the monic polynomial whose roots are the
    free critical points of the product with monic zero polynomial
    ``z^e + zero_coeffs``; None when the configuration is invalid."""
    e = len(zero_coeffs)
    p = np.concatenate((zero_coeffs, [1.0 + 0j]))
    roots = _polish_roots(p, npoly.polyroots(p))
    if np.any(np.abs(roots) >= 1.0):
        return None
    try:
        B = BlaschkeProduct(
            Divisor([(complex(z), 1) for z in roots], REGION_INTERIOR), m)
        ram = critical_divisor(B)
    except (PreconditionError, NumericalError):
        return None
    c = npoly.polyfromroots(ram.free_ram.points())
    return c[:e]


def zeros_from_critical(R: Divisor, m: int,
                        newton_tol: float = 1e-12) -> BlaschkeProduct:
    """Invert the divisor map: find ``B`` whose free critical divisor
    is ``R`` (degree ``e >= 1``, interior).

    The solve runs homotopy continuation along the scaled family
    ``t * R`` from ``t = 0``, where the answer is ``B = z^{e+m}``, with
    damped Newton correction in the coefficient space of the monic zero
    polynomial (elementary symmetric functions of the zeros, which
    quotient out their ordering).  Step size halves on Newton failure
    down to a floor of 1e-6.

    Raises
    ------
    ContinuationError
        On step underflow; carries the last parameter value that still
        converged.
    """
    e = R.degree
    if e < 1:
        raise PreconditionError("zeros_from_critical needs degree >= 1")
    R = Divisor(R.atoms, REGION_INTERIOR)
    r_pts = np.asarray(R.points(), dtype=complex)

    def target_coeffs(t: float) -> np.ndarray:
        return npoly.polyfromroots(t * r_pts)[:e]

    def residual(s: np.ndarray, t: float) -> Optional[np.ndarray]:
        c = _crit_coeff_vector(s, m)
        if c is None:
            return None
        return c - target_coeffs(t)

    def newton(s: np.ndarray, t: float) -> Optional[np.ndarray]:
        s = s.copy()
        f = residual(s, t)
        if f is None:
            return None
        for _ in range(40):
            err = float(np.max(np.abs(f)))
            if err < newton_tol:
                return s
            jac = np.empty((2 * e, 2 * e))
            h = 1e-7 * max(1.0, float(np.max(np.abs(s))))
            for k in range(e):
                for part, col in ((1.0, 2 * k), (1j, 2 * k + 1)):
                    sp = s.copy()
                    sp[k] += h * part
                    fp = residual(sp, t)
                    if fp is None:
                        return None
                    df = (fp - f) / h
                    jac[0::2, col] = df.real
                    jac[1::2, col] = df.imag
            rhs = np.empty(2 * e)
            rhs[0::2] = -f.real
            rhs[1::2] = -f.imag
            try:
                delta = np.linalg.solve(jac, rhs)
            except np.linalg.LinAlgError:
                delta, *_ = np.linalg.lstsq(jac, rhs, rcond=None)
            step = delta[0::2] + 1j * delta[1::2]
            lam = 1.0
            improved = None
            for _ in range(10):
                cand = s + lam * step
                fc = residual(cand, t)
                if fc is not None and float(np.max(np.abs(fc))) < err:
                    improved = (cand, fc)
                    break
                lam *= 0.5
            if improved is None:
                return None
            s, f = improved
        return None

    s = np.zeros(e, dtype=complex)  # zeros of z^{e+m}: all at the origin
    t, dt = 0.0, 0.25
    last_good = 0.0
    while t < 1.0:
        t_next = min(1.0, t + dt)
        s_next = newton(s, t_next)
        if s_next is None:
            dt *= 0.5
            if dt < 1e-6:
                raise ContinuationError(
                    f"continuation stalled at t = {last_good:.6g}", last_good)
            continue
        s, t, last_good = s_next, t_next, t_next
        dt = min(dt * 2.0, 0.25)

    p = np.concatenate((s, [1.0 + 0j]))
    roots = _polish_roots(p, npoly.polyroots(p))
    B = BlaschkeProduct(
        Divisor([(complex(z), 1) for z in roots], REGION_INTERIOR), m)
    check = matching_distance(critical_divisor(B).free_ram, R)
    if check > 1e-7:
        raise NumericalError(
            f"inverse verification failed: round trip off by {check:.3g}")
    return B


def phi_1m_closed_form(a: complex, m: int) -> complex:
    """Closed form of the single-zero critical point.

    For ``|a| < 1`` this is the unique free critical point of the
    degree-(m+1) product with free zero ``a``; on ``|a| = 1`` the formula
    degenerates to the identity.
    """
    if not isinstance(m, int) or m < 1:
        raise PreconditionError("m must be a positive integer")
    a = complex(a)
    r2 = abs(a) ** 2
    if r2 > (1.0 + CIRCLE_TOL) ** 2:
        raise PreconditionError("phi_1m_closed_form needs |a| <= 1")
    s = (m - 1) * r2 + (m + 1)
    disc = s * s - 4.0 * m * m * r2
    return 2.0 * a * m / (s + math.sqrt(max(disc, 0.0)))


def multiplier_at_zero(B: BlaschkeProduct) -> complex:
    """``B'(0)``: zero when ``m >= 2``, else the product of the factor
    derivatives ``((1-conj(a_k))/(1-a_k)) * (-a_k)`` over the free zeros."""
    if B.m >= 2:
        return 0j
    return complex(B.normalization * B._p[0])


def boundary_orbit(B: BlaschkeProduct, q: complex, n: int) -> list[complex]:
    """Forward orbit ``[q, B(q), ..., B^n(q)]`` on the unit circle.

    Each iterate is renormalized to unit modulus to stop drift from
    accumulating over long orbits.
    """
    q = complex(q)
    if abs(abs(q) - 1.0) > CIRCLE_TOL:
        raise PreconditionError("boundary_orbit needs a unit-modulus point")
    if n < 0:
        raise PreconditionError("orbit length must be nonnegative")
    orbit = [q / abs(q)]
    for _ in range(n):
        w = B.eval(orbit[-1])
        orbit.append(w / abs(w))
    return orbit


def walsh_check(B: BlaschkeProduct, tol: float = 1e-9) -> bool:
    """Certificate that every free critical point (and the forced one at
    the origin when ``m >= 2``) lies in the hyperbolic convex hull of the
    zeros including the origin."""
    if B.degree < 2:
        raise PreconditionError("walsh_check needs degree >= 2")
    generators = [0j] + B.free_zeros.points()
    targets = [0j] if B.m >= 2 else []
    if B.e >= 1:
        targets.extend(critical_divisor(B).free_ram.points())
    return all(hull_contains(generators, c, tol) for c in targets)
