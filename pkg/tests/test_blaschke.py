"""Tests for Blaschke products: construction, evaluation, derivative
against a finite-difference oracle, the critical-divisor map and its
continuation inverse, the closed form for one free zero, multipliers,
boundary orbits, and the hull certificate."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from blaschkediv import (BlaschkeProduct, Divisor, NumericalError,
                         PreconditionError, boundary_orbit, critical_divisor,
                         from_zero_divisor, matching_distance,
                         multiplier_at_zero, phi_1m_closed_form, walsh_check,
                         zeros_from_critical)


def interior_divisor(points) -> Divisor:
    return Divisor([(complex(z), 1) for z in points], "interior")


def random_zeros(rng: np.random.Generator, e: int, rmax: float) -> Divisor:
    atoms = []
    for _ in range(e):
        r = rmax * math.sqrt(rng.random())
        phi = 2.0 * math.pi * rng.random()
        atoms.append((r * cmath.exp(1j * phi), 1))
    return Divisor(atoms, "interior")


def test_power_map_construction():
    B = from_zero_divisor(Divisor([], "interior"), 2)
    assert B.degree == 2
    assert B.e == 0
    assert B.eval(1j) == pytest.approx(-1.0 + 0j, abs=1e-15)
    assert B.eval(1.0 + 0j) == pytest.approx(1.0 + 0j, abs=1e-15)


def test_real_zero_product_formula():
    B = from_zero_divisor(interior_divisor([0.6]), 1)
    assert B.normalization == pytest.approx(1.0 + 0j, abs=1e-15)
    for z in (0.2 + 0.1j, -0.5j, 0.9 + 0j):
        want = z * (z - 0.6) / (1.0 - 0.6 * z)
        assert B.eval(z) == pytest.approx(want, abs=1e-14)
    assert B.eval(0.6 + 0j) == pytest.approx(0j, abs=1e-15)


def test_normalization_fixes_one():
    B = from_zero_divisor(interior_divisor([0.3j]), 1)
    assert abs(B.eval(1.0 + 0j) - 1.0) <= 1e-14
    assert abs(abs(B.normalization) - 1.0) <= 1e-15


def test_construction_rejects_bad_inputs():
    with pytest.raises(PreconditionError):
        from_zero_divisor(interior_divisor([0.5]), 0)
    with pytest.raises(PreconditionError):
        Divisor([(1.0 + 0j, 1)], "interior")


def test_eval_maps_circle_to_circle():
    rng = np.random.default_rng(301)
    for _ in range(10):
        B = from_zero_divisor(random_zeros(rng, 3, 0.8),
                              int(rng.integers(1, 4)))
        for k in range(16):
            q = cmath.exp(2j * math.pi * k / 16.0)
            assert abs(abs(B.eval(q)) - 1.0) <= 1e-10


def test_eval_pole_proximity_error():
    B = from_zero_divisor(interior_divisor([0.5]), 1)
    with pytest.raises(NumericalError):
        B.eval(2.0 + 0j)  # the pole 1/conj(0.5)


def test_deriv_power_map():
    B = from_zero_divisor(Divisor([], "interior"), 2)
    assert B.deriv(0.5 + 0j) == pytest.approx(1.0 + 0j, abs=1e-14)


def test_deriv_vanishes_at_critical_point():
    B = from_zero_divisor(interior_divisor([0.6]), 1)
    assert abs(B.deriv(1.0 / 3.0 + 0j)) <= 1e-14


def test_deriv_finite_difference_oracle():
    rng = np.random.default_rng(302)
    h = 1e-6
    for _ in range(25):
        B = from_zero_divisor(random_zeros(rng, int(rng.integers(1, 5)), 0.8),
                              int(rng.integers(1, 4)))
        r = 0.7 * math.sqrt(rng.random())
        z = r * cmath.exp(2j * math.pi * rng.random())
        fd = (B.eval(z + h) - B.eval(z - h)) / (2.0 * h)
        exact = B.deriv(z)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))


def test_critical_divisor_closed_form_spot_value():
    B = from_zero_divisor(interior_divisor([0.6]), 1)
    result = critical_divisor(B)
    assert result.free_ram.degree == 1
    assert result.free_ram.atoms[0][0] == pytest.approx(
        1.0 / 3.0 + 0j, abs=1e-12)


def test_critical_divisor_free_zero_at_origin():
    # A free zero at 0 makes the product a pure power with its free
    # critical point also at 0.
    B = from_zero_divisor(Divisor([(0j, 1)], "interior"), 2)
    result = critical_divisor(B)
    assert result.free_ram.degree == 1
    assert abs(result.free_ram.atoms[0][0]) <= 1e-12


def test_critical_divisor_symmetric_pair():
    B = from_zero_divisor(interior_divisor([0.5, -0.5]), 1)
    pts = sorted(critical_divisor(B).free_ram.points(), key=lambda z: z.real)
    assert len(pts) == 2
    for c in pts:
        assert abs(c.imag) <= 1e-12
        assert -0.5 <= c.real <= 0.5
    assert pts[0] == pytest.approx(-pts[1], abs=1e-12)


def test_critical_divisor_needs_free_zeros():
    B = from_zero_divisor(Divisor([], "interior"), 3)
    with pytest.raises(PreconditionError):
        critical_divisor(B)


def test_degree_conservation():
    rng = np.random.default_rng(303)
    for _ in range(20):
        e = int(rng.integers(1, 7))
        B = from_zero_divisor(random_zeros(rng, e, 0.9),
                              int(rng.integers(1, 4)))
        assert critical_divisor(B).free_ram.degree == e


def test_closed_form_grid_agreement():
    rng = np.random.default_rng(304)
    for m in (1, 2, 3):
        for _ in range(20):
            r = 0.99 * math.sqrt(rng.random())
            a = r * cmath.exp(2j * math.pi * rng.random())
            B = from_zero_divisor(Divisor([(a, 1)], "interior"), m)
            got = critical_divisor(B).free_ram.atoms[0][0]
            assert abs(got - phi_1m_closed_form(a, m)) <= 1e-10


def test_phi_1m_trivial_values():
    assert phi_1m_closed_form(0.6 + 0j, 1) == pytest.approx(
        1.0 / 3.0 + 0j, abs=1e-15)
    for m in (1, 2, 5):
        assert phi_1m_closed_form(0j, m) == 0j
    q = cmath.exp(0.7j)
    assert phi_1m_closed_form(q, 3) == pytest.approx(q, abs=1e-12)
    with pytest.raises(PreconditionError):
        phi_1m_closed_form(1.5 + 0j, 1)
    with pytest.raises(PreconditionError):
        phi_1m_closed_form(0.5 + 0j, 0)


def test_zeros_from_critical_inverts_spot_value():
    R = Divisor([(1.0 / 3.0 + 0j, 1)], "interior")
    B = zeros_from_critical(R, 1)
    assert B.free_zeros.degree == 1
    assert B.free_zeros.atoms[0][0] == pytest.approx(0.6 + 0j, abs=1e-9)


def test_zeros_from_critical_fixed_point_of_the_map():
    R = Divisor([(0j, 3)], "interior")
    B = zeros_from_critical(R, 1)
    assert B.free_zeros.degree == 3
    assert matching_distance(B.free_zeros, R) <= 1e-8


def test_zeros_from_critical_needs_degree():
    with pytest.raises(PreconditionError):
        zeros_from_critical(Divisor([], "interior"), 1)


def test_round_trip_zeros_to_critical_and_back():
    rng = np.random.default_rng(305)
    for _ in range(10):
        e = int(rng.integers(1, 6))
        Z = random_zeros(rng, e, 0.9)
        m = int(rng.integers(1, 4))
        R = critical_divisor(from_zero_divisor(Z, m)).free_ram
        Z_back = zeros_from_critical(R, m).free_zeros
        assert matching_distance(Z_back, Z) <= 1e-8


def test_multiplier_examples():
    assert multiplier_at_zero(from_zero_divisor(Divisor([], "interior"),
                                                2)) == 0j
    B = from_zero_divisor(interior_divisor([0.5]), 1)
    assert multiplier_at_zero(B) == pytest.approx(-0.5 + 0j, abs=1e-15)
    B = from_zero_divisor(interior_divisor([0.5, -0.3, 0.2]), 1)
    assert multiplier_at_zero(B) == pytest.approx(
        (-0.5) * 0.3 * (-0.2) + 0j, abs=1e-14)


def test_multiplier_schwarz_bound():
    rng = np.random.default_rng(306)
    for _ in range(20):
        Z = random_zeros(rng, int(rng.integers(1, 6)), 0.9)
        B = from_zero_divisor(Z, 1)
        mult = multiplier_at_zero(B)
        product = math.prod(abs(z) for z in Z.points())
        assert abs(mult) == pytest.approx(product, abs=1e-12)
        assert abs(mult) < 1.0


def test_boundary_orbit_angle_doubling():
    B = from_zero_divisor(Divisor([], "interior"), 2)
    q = cmath.exp(2j * math.pi / 3.0)
    orbit = boundary_orbit(B, q, 1)
    assert orbit[0] == pytest.approx(q, abs=1e-15)
    assert orbit[1] == pytest.approx(cmath.exp(4j * math.pi / 3.0), abs=1e-14)


def test_boundary_orbit_fixed_point():
    B = from_zero_divisor(interior_divisor([0.4 + 0.1j]), 1)
    orbit = boundary_orbit(B, 1.0 + 0j, 5)
    assert all(abs(w - 1.0) <= 1e-12 for w in orbit)


def test_boundary_orbit_stays_on_circle():
    rng = np.random.default_rng(307)
    B = from_zero_divisor(random_zeros(rng, 3, 0.8), 1)
    q = cmath.exp(2j * math.pi * rng.random())
    orbit = boundary_orbit(B, q, 20)
    assert len(orbit) == 21
    for prev, cur in zip(orbit, orbit[1:]):
        assert abs(abs(cur) - 1.0) <= 1e-15
        w = B.eval(prev)
        assert abs(cur - w / abs(w)) <= 1e-12


def test_boundary_orbit_rejects_interior_point():
    B = from_zero_divisor(Divisor([], "interior"), 2)
    with pytest.raises(PreconditionError):
        boundary_orbit(B, 0.5 + 0j, 3)


def test_walsh_spot_and_power_cases():
    assert walsh_check(from_zero_divisor(interior_divisor([0.6]), 1))
    assert walsh_check(from_zero_divisor(Divisor([], "interior"), 4))
    with pytest.raises(PreconditionError):
        walsh_check(from_zero_divisor(Divisor([], "interior"), 1))


def test_walsh_randomized_property():
    rng = np.random.default_rng(308)
    for _ in range(50):
        e = int(rng.integers(0, 9))
        m = int(rng.integers(1, 4))
        if e + m < 2:
            continue
        B = from_zero_divisor(random_zeros(rng, e, 0.95), m)
        assert walsh_check(B, tol=1e-9)
