"""Reproducible numerical experiments on the boundary behavior of the
divisor maps: neighborhood sweeps for the extension's continuity, the
orbit-continuity check through the critical point near an escaped zero,
a solver that prescribes the hyperbolic distance realized along such an
orbit, and the multiplier limit at the origin.

Every procedure is deterministic under a fixed seed and returns
JSON-ready report dicts; thresholds live in the test suite, not here.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .blaschke import (BlaschkeProduct, critical_divisor, from_zero_divisor,
                       multiplier_at_zero)
from .boundary import BoundaryDivisor, extend_phi
from .divisor import (Divisor, REGION_INTERIOR, add, divisor_to_json,
                      is_simple, matching_distance)
from .errors import NumericalError, PreconditionError
from .hypgeo import HypDisk, hyp_dist

__all__ = [
    "SweepConfig",
    "SolveCertificate",
    "sample_neighborhood",
    "verify_extension_convergence",
    "verify_cont_orbit",
    "prescribe_distance",
    "multiplier_limit_check",
]


class SweepConfig:
    """Configuration of a neighborhood sweep.

    Parameters
    ----------
    epsilons : sequence of float
        Strictly decreasing neighborhood radii.
    samples_per_epsilon : int
        Random samples drawn at each radius.
    rng_seed : int
        64-bit seed; identical seeds give bit-identical reports.
    tolerances : dict, optional
        Named tolerance overrides for consumers.
    """

    def __init__(self, epsilons: Sequence[float], samples_per_epsilon: int,
                 rng_seed: int, tolerances: Optional[dict] = None):
        eps = [float(e) for e in epsilons]
        if any(e <= 0 for e in eps):
            raise PreconditionError("epsilons must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise PreconditionError("epsilons must be strictly decreasing")
        if samples_per_epsilon < 1:
            raise PreconditionError("samples_per_epsilon must be positive")
        self.epsilons = eps
        self.samples_per_epsilon = int(samples_per_epsilon)
        self.rng_seed = int(rng_seed)
        self.tolerances = dict(tolerances or {})

    def to_json(self) -> dict:
        return {
            "epsilons": self.epsilons,
            "samples_per_epsilon": self.samples_per_epsilon,
            "rng_seed": self.rng_seed,
            "tolerances": self.tolerances,
        }


class SolveCertificate:
    """Outcome of a prescribed-distance solve.

    Attributes
    ----------
    target_L, achieved, residual : float
        Requested hyperbolic distance, the distance actually realized,
        and ``|achieved - target_L|``.
    result_divisor : Divisor
        The free zero divisor of the solved product (rebuild it with the
        certificate's ``m`` to re-verify).
    iterations : int
        Function evaluations spent by the solver.
    """

    def __init__(self, target_L: float, achieved: float,
                 result_divisor: Divisor, iterations: int, m: int,
                 zero_near_target: complex, orbit_value: complex):
        self.target_L = float(target_L)
        self.achieved = float(achieved)
        self.residual = abs(self.achieved - self.target_L)
        self.result_divisor = result_divisor
        self.iterations = int(iterations)
        self.m = int(m)
        self.zero_near_target = complex(zero_near_target)
        self.orbit_value = complex(orbit_value)

    def to_json(self) -> dict:
        return {
            "target_L": self.target_L,
            "achieved": self.achieved,
            "residual": self.residual,
            "iterations": self.iterations,
            "m": self.m,
            "zero_near_target": [self.zero_near_target.real,
                                 self.zero_near_target.imag],
            "orbit_value": [self.orbit_value.real, self.orbit_value.imag],
            "result_divisor": divisor_to_json(self.result_divisor),
        }

    def __repr__(self) -> str:
        return (f"SolveCertificate(L={self.target_L}, "
                f"achieved={self.achieved:.12g}, "
                f"residual={self.residual:.3g})")


def sample_neighborhood(D: BoundaryDivisor, m: int, eps: float,
                        rng: np.random.Generator) -> Divisor:
    """Random interior divisor with every atom of the expanded
    ``Z_B + S`` moved uniformly within ``eps`` (intersected with the
    open disk).

    ``m`` is carried along for the consumers that rebuild products from
    the sample; the sampling itself does not depend on it.
    """
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if m < 1:
        raise PreconditionError("m must be a positive integer")
    base = (D.interior_part.free_zeros.points()
            + D.circle_part.points())
    atoms = []
    for a in base:
        while True:
            r = eps * math.sqrt(rng.random())
            phi = 2.0 * math.pi * rng.random()
            b = a + r * complex(math.cos(phi), math.sin(phi))
            if abs(b) < 1.0 - 1e-12:
                atoms.append((b, 1))
                break
    return Divisor(atoms, REGION_INTERIOR)


def _projected(D: Divisor, radius: float = 0.9) -> Divisor:
    """Diagnostic projection: atoms beyond ``radius`` move radially onto
    the circle, isolating the angular part of a matching error."""
    atoms = []
    for z, mult in D.atoms:
        if abs(z) >= radius:
            z = z / abs(z)
        atoms.append((z, mult))
    return Divisor(atoms, "closed")


def verify_extension_convergence(D: BoundaryDivisor, m: int,
                                 cfg: SweepConfig) -> dict:
    """Sweep shrinking neighborhoods of ``D`` and measure how far the
    critical divisors of the samples sit from the extended image.

    For each epsilon, draws ``cfg.samples_per_epsilon`` zero divisors
    from the epsilon-neighborhood, maps each through the critical-divisor
    map, and records the bottleneck matching distance to
    ``extend_phi(D, m)`` (raw Euclidean, closed-disk).  The report also
    carries a radially projected variant of the distance as an angular
    diagnostic, and counts solver failures instead of hiding them.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    target = extend_phi(D, m)
    target_projected = _projected(target)
    profile = []
    for eps in cfg.epsilons:
        dists = []
        projected = []
        failures = 0
        for _ in range(cfg.samples_per_epsilon):
            sample = sample_neighborhood(D, m, eps, rng)
            try:
                image = critical_divisor(from_zero_divisor(sample, m)).free_ram
            except NumericalError:
                failures += 1
                continue
            closed = image.with_region("closed")
            dists.append(matching_distance(closed, target))
            projected.append(matching_distance(_projected(closed),
                                               target_projected))
        profile.append({
            "epsilon": eps,
            "max_distance": max(dists) if dists else float("nan"),
            "mean_distance": (sum(dists) / len(dists)) if dists else
                             float("nan"),
            "projected_max": max(projected) if projected else float("nan"),
            "failures": failures,
        })
    return {
        "config": cfg.to_json(),
        "m": m,
        "target": divisor_to_json(target),
        "profile": profile,
    }


def _critical_point_near(B: BlaschkeProduct, q: complex) -> complex:
    """The critical point of ``B`` nearest to ``q``, guarded against
    ambiguity (second-nearest within twice the nearest distance)."""
    pts = critical_divisor(B).free_ram.points()
    dists = sorted((abs(c - q), c) for c in pts)
    if len(dists) >= 2 and dists[1][0] < 2.0 * dists[0][0]:
        raise NumericalError(
            f"critical point near {q!r} is ambiguous: distances "
            f"{dists[0][0]:.3g} and {dists[1][0]:.3g}")
    return dists[0][1]


def _check_orbit_preconditions(D: BoundaryDivisor, q: complex, l: int,
                               tol: float = 1e-9) -> None:
    S = D.circle_part
    if not is_simple(S):
        raise PreconditionError("the circle part must be simple")
    if any(abs(z - 1.0) <= tol for z, _ in S.atoms):
        raise PreconditionError("1 must stay outside supp(S)")
    if S.multiplicity(q, tol=1e-9) == 0:
        raise PreconditionError("q must be a support point")
    w = complex(q)
    for k in range(1, l):
        w = D.interior_part.eval(w)
        w /= abs(w)
        if any(abs(w - z) <= tol for z, _ in S.atoms):
            raise PreconditionError(
                f"intermediate iterate {k} lands on supp(S)")


def _radial_approach(D: BoundaryDivisor, n: int) -> Divisor:
    """Zero divisor of the canonical n-th approximant: free zeros of the
    interior part plus ``(1 - 1/n) q`` for every support atom."""
    atoms = list(D.interior_part.free_zeros.atoms)
    for q, mult in D.circle_part.atoms:
        atoms.append(((1.0 - 1.0 / n) * q, mult))
    return Divisor(atoms, REGION_INTERIOR)


def verify_cont_orbit(D: BoundaryDivisor, q: complex, l: int,
                      n_schedule: Sequence[int]) -> dict:
    """Track ``B_n^l`` at the critical point born near an escaped zero.

    For each ``n`` the approximant ``B_n`` has zeros ``(1 - 1/n) q_j``
    radially inside each support point; the report records the distance
    from ``B_n^l(c_q(B_n))`` to ``B^l(q)`` plus the renormalized
    (angular) discrepancy as a diagnostic.
    """
    l = int(l)
    if l < 1:
        raise PreconditionError("l must be at least 1")
    q = complex(q)
    _check_orbit_preconditions(D, q, l)
    target = complex(q)
    for _ in range(l):
        target = D.interior_part.eval(target)
        target /= abs(target)
    m = D.interior_part.m
    rows = []
    for n in n_schedule:
        if n < 2:
            raise PreconditionError("schedule entries must be at least 2")
        B_n = from_zero_divisor(_radial_approach(D, n), m)
        c = _critical_point_near(B_n, q)
        w = c
        for _ in range(l):
            w = B_n.eval(w)
        rows.append({
            "n": int(n),
            "critical_point": [c.real, c.imag],
            "orbit_value": [w.real, w.imag],
            "distance": abs(w - target),
            "circle_distance": abs(w / abs(w) - target),
        })
    return {
        "q": [q.real, q.imag],
        "l": l,
        "target": [target.real, target.imag],
        "n_schedule": [int(n) for n in n_schedule],
        "profile": rows,
    }


def _winding_number(f, corners: list[complex],
                    samples_per_side: int = 48) -> Optional[float]:
    """Winding of ``f`` along a rectangle boundary, or None when a
    sample point cannot be evaluated."""
    path = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        for k in range(samples_per_side):
            path.append(a + (b - a) * (k / samples_per_side))
    total = 0.0
    prev = None
    first = None
    for zeta in path:
        val = f(zeta)
        if val is None or val == 0:
            return None
        ang = math.atan2(val.imag, val.real)
        if prev is not None:
            dd = ang - prev
            while dd > math.pi:
                dd -= 2.0 * math.pi
            while dd < -math.pi:
                dd += 2.0 * math.pi
            total += dd
        else:
            first = ang
        prev = ang
    dd = first - prev
    while dd > math.pi:
        dd -= 2.0 * math.pi
    while dd < -math.pi:
        dd += 2.0 * math.pi
    total += dd
    return total / (2.0 * math.pi)


def prescribe_distance(D: BoundaryDivisor, q: complex, l: int, L: float,
                       eps: float, tau: float = 1e-3,
                       max_attempts: int = 8) -> SolveCertificate:
    """Solve for a product near ``D`` whose orbit through the critical
    point near ``q`` lands at hyperbolic distance ``L`` from the zero
    near ``q' = B^l(q)``.

    A free zero ``zeta`` roams a disk around ``q`` while the other
    support points get fixed placements ``(1 - tau) p``; damped 2-D
    Newton drives ``h(zeta) = B^l(c_q)`` to the inward point of the
    target hyperbolic circle, with a winding-number quadtree bisection
    as the fallback (the solution exists precisely because that winding
    is 1).  The certificate's residual is ``|achieved - L|``.
    """
    q = complex(q)
    l = int(l)
    if L < 0:
        raise PreconditionError("L must be nonnegative")
    if l < 1:
        raise PreconditionError("l must be at least 1")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    _check_orbit_preconditions(D, q, l)
    B = D.interior_part
    qp = complex(q)
    for _ in range(l):
        qp = B.eval(qp)
        qp /= abs(qp)
    if D.circle_part.multiplicity(qp, tol=1e-9) == 0:
        raise PreconditionError("B^l(q) must be a support point")
    if abs(qp - q) <= 1e-9:
        raise PreconditionError(
            "B^l(q) must be a support point different from q")
    placements = []
    x_target = None
    for p, _ in D.circle_part.atoms:
        if abs(p - q) <= 1e-9:
            continue
        x = (1.0 - tau) * p
        placements.append(x)
        if abs(p - qp) <= 1e-9:
            x_target = x
    assert x_target is not None
    circle = HypDisk(x_target, L)
    u = x_target / abs(x_target)
    xi = circle.euclid_center - circle.euclid_radius * u
    m = B.m
    base_atoms = list(B.free_zeros.atoms) + [(x, 1) for x in placements]
    evals = 0

    def h(zeta: complex) -> Optional[complex]:
        nonlocal evals
        evals += 1
        if abs(zeta) >= 1.0 - 1e-9 or abs(zeta - q) > eps:
            return None
        try:
            Bh = from_zero_divisor(
                Divisor(base_atoms + [(zeta, 1)], REGION_INTERIOR), m)
            w = _critical_point_near(Bh, q)
            for _ in range(l):
                w = Bh.eval(w)
            return w
        except (PreconditionError, NumericalError):
            return None

    def newton(z0: complex) -> Optional[complex]:
        z = z0
        f = h(z)
        if f is None:
            return None
        f -= xi
        for _ in range(80):
            err = abs(f)
            if err < 1e-11:
                return z
            step_h = 1e-8 * max(1e-3, abs(z - q))
            fx = h(z + step_h)
            fy = h(z + 1j * step_h)
            if fx is None or fy is None:
                return None
            jac = np.array(
                [[((fx - xi) - f).real, ((fy - xi) - f).real],
                 [((fx - xi) - f).imag, ((fy - xi) - f).imag]]) / step_h
            try:
                delta = np.linalg.solve(jac, [-f.real, -f.imag])
            except np.linalg.LinAlgError:
                return None
            step = complex(delta[0], delta[1])
            lam = 1.0
            improved = None
            for _ in range(12):
                cand = z + lam * step
                fc = h(cand)
                if fc is not None and abs(fc - xi) < err:
                    improved = (cand, fc - xi)
                    break
                lam *= 0.5
            if improved is None:
                return None
            z, f = improved
        return None

    delta = min(eps, 0.05)
    best: Optional[complex] = None
    for _ in range(max_attempts):
        starts = [(1.0 - s * delta) * q
                  for s in (0.3, 0.1, 0.03, 0.01, 0.003)]
        ranked = []
        for z0 in starts:
            val = h(z0)
            if val is not None:
                ranked.append((abs(val - xi), z0))
        for _, z0 in sorted(ranked, key=lambda t: t[0]):
            best = newton(z0)
            if best is not None:
                break
        if best is not None:
            break
        best = _winding_search(h, xi, q, delta)
        if best is not None:
            break
        delta *= 0.5
    if best is None:
        raise NumericalError(
            f"prescribed-distance solve failed for L={L} after {evals} "
            f"evaluations (Newton and winding search both exhausted)")
    w = h(best)
    achieved = hyp_dist(x_target, w)
    result = Divisor(base_atoms + [(best, 1)], REGION_INTERIOR)
    return SolveCertificate(L, achieved, result, evals, m, x_target, w)


def _winding_search(h, xi: complex, q: complex,
                    delta: float) -> Optional[complex]:
    """Quadtree bisection of the search square guided by the winding
    number of ``h - xi`` on cell boundaries."""

    def f(zeta: complex) -> Optional[complex]:
        r = abs(zeta)
        if r >= 1.0 - 1e-9:
            zeta = zeta * (1.0 - 1e-9) / r
        val = h(zeta)
        if val is None:
            return None
        return val - xi

    half = delta / math.sqrt(2.0)
    cell = (q.real - half, q.real + half, q.imag - half, q.imag + half)
    for _ in range(60):
        x0, x1, y0, y1 = cell
        if max(x1 - x0, y1 - y0) < 1e-10:
            return complex((x0 + x1) / 2, (y0 + y1) / 2)
        xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
        subcells = [(x0, xm, y0, ym), (xm, x1, y0, ym),
                    (x0, xm, ym, y1), (xm, x1, ym, y1)]
        advanced = False
        for sub in subcells:
            corners = [complex(sub[0], sub[2]), complex(sub[1], sub[2]),
                       complex(sub[1], sub[3]), complex(sub[0], sub[3])]
            w = _winding_number(f, corners)
            if w is not None and abs(w) > 0.5:
                cell = sub
                advanced = True
                break
        if not advanced:
            return None
    return None


def multiplier_limit_check(D: BoundaryDivisor,
                           n_schedule: Sequence[int]) -> dict:
    """Profile of ``|B_n'(0) - 1|`` along the radial approach to a
    singular divisor (identity interior part, 1 outside the support)."""
    if D.l != 1 or D.interior_part.e != 0:
        raise PreconditionError(
            "the multiplier limit needs a singular divisor (identity part)")
    if any(abs(z - 1.0) <= 1e-9 for z, _ in D.circle_part.atoms):
        raise PreconditionError("1 must stay outside supp(S)")
    rows = []
    for n in n_schedule:
        if n < 2:
            raise PreconditionError("schedule entries must be at least 2")
        B_n = from_zero_divisor(_radial_approach(D, n), 1)
        mult = multiplier_at_zero(B_n)
        rows.append({
            "n": int(n),
            "multiplier": [mult.real, mult.imag],
            "deviation": abs(mult - 1.0),
        })
    return {
        "n_schedule": [int(n) for n in n_schedule],
        "profile": rows,
    }
