"""Tests for the deterministic experiment harness: neighborhood sweeps,
orbit continuity through the critical point near an escaped zero, the
prescribed-distance solver with an independent re-measurement, and the
multiplier limit along the radial approach."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from blaschkediv import (BoundaryDivisor, Divisor, NumericalError,
                         PreconditionError, SweepConfig, critical_divisor,
                         divisor_to_json, extend_phi, from_zero_divisor,
                         hyp_dist, multiplier_limit_check, prescribe_distance,
                         sample_neighborhood, verify_cont_orbit,
                         verify_extension_convergence)


def turn(t: float) -> complex:
    return cmath.exp(2j * math.pi * t)


def make_boundary(zeros, m, support) -> BoundaryDivisor:
    Z = Divisor([(complex(z), 1) for z in zeros], "interior")
    S = Divisor([(turn(t), nu) for t, nu in support], "circle")
    return BoundaryDivisor(from_zero_divisor(Z, m), S)


# ---------------------------------------------------------------------------
# sweep configuration


def test_sweep_config_rejects_bad_epsilons():
    with pytest.raises(PreconditionError):
        SweepConfig([1e-2, 0.0], 8, 1)
    with pytest.raises(PreconditionError):
        SweepConfig([1e-2, 1e-2], 8, 1)
    with pytest.raises(PreconditionError):
        SweepConfig([1e-3, 1e-2], 8, 1)


def test_sweep_config_rejects_bad_sample_count():
    with pytest.raises(PreconditionError):
        SweepConfig([1e-2], 0, 1)


def test_sweep_config_to_json():
    cfg = SweepConfig([1e-2, 1e-3], 16, 42, tolerances={"match": 1e-6})
    assert cfg.to_json() == {
        "epsilons": [1e-2, 1e-3],
        "samples_per_epsilon": 16,
        "rng_seed": 42,
        "tolerances": {"match": 1e-6},
    }


# ---------------------------------------------------------------------------
# neighborhood sampling


def test_sample_neighborhood_stays_within_eps():
    D = make_boundary([0.6], 1, [(0.25, 1)])
    rng = np.random.default_rng(11)
    eps = 0.05
    for _ in range(200):
        sample = sample_neighborhood(D, 1, eps, rng)
        assert sample.degree == 2
        # atoms are kept in sorted order, so pair each base point with
        # its displaced copy by proximity
        for base in (0.6 + 0j, 1j):
            near = [z for z in sample.points()
                    if abs(z - base) <= eps * (1.0 + 1e-12)]
            assert len(near) == 1
            assert abs(near[0]) < 1.0


def test_sample_neighborhood_expands_multiplicity():
    D = make_boundary([], 1, [(0.25, 2)])
    rng = np.random.default_rng(3)
    sample = sample_neighborhood(D, 1, 0.01, rng)
    assert sample.degree == 2
    assert all(abs(z - 1j) <= 0.01 * (1.0 + 1e-12)
               for z in sample.points())


def test_sample_neighborhood_deterministic():
    D = make_boundary([0.6], 1, [(0.25, 1)])
    first = sample_neighborhood(D, 1, 0.02, np.random.default_rng(7))
    second = sample_neighborhood(D, 1, 0.02, np.random.default_rng(7))
    assert first.atoms == second.atoms


def test_sample_neighborhood_rejections():
    D = make_boundary([0.6], 1, [(0.25, 1)])
    rng = np.random.default_rng(0)
    with pytest.raises(PreconditionError):
        sample_neighborhood(D, 1, 0.0, rng)
    with pytest.raises(PreconditionError):
        sample_neighborhood(D, 0, 0.02, rng)


# ---------------------------------------------------------------------------
# extension convergence sweep


def test_extension_sweep_report_structure():
    D = make_boundary([0.6], 1, [(0.25, 1)])
    cfg = SweepConfig([1e-2, 1e-3], 16, 20260822)
    report = verify_extension_convergence(D, 1, cfg)
    assert report["m"] == 1
    assert report["config"] == cfg.to_json()
    assert report["target"] == divisor_to_json(extend_phi(D, 1))
    assert [row["epsilon"] for row in report["profile"]] == [1e-2, 1e-3]
    for row in report["profile"]:
        assert row["failures"] == 0
        assert 0.0 <= row["mean_distance"] <= row["max_distance"]
        assert row["projected_max"] >= 0.0


def test_extension_sweep_deterministic():
    D = make_boundary([0.6], 1, [(0.25, 1)])
    cfg = SweepConfig([1e-2, 1e-3], 8, 5)
    assert (verify_extension_convergence(D, 1, cfg)
            == verify_extension_convergence(D, 1, cfg))


def test_extension_sweep_interior_control():
    # with no circle part the map is continuous, so the sweep must track
    # the radius down
    Z = Divisor([(0.5 + 0j, 1), (-0.3j, 1)], "interior")
    D = BoundaryDivisor(from_zero_divisor(Z, 1), Divisor([], "circle"))
    cfg = SweepConfig([1e-2, 1e-3], 32, 20260822)
    report = verify_extension_convergence(D, 1, cfg)
    rows = report["profile"]
    for row in rows:
        assert row["failures"] == 0
        assert row["max_distance"] <= 10.0 * row["epsilon"]
    assert rows[1]["max_distance"] < rows[0]["max_distance"]


# ---------------------------------------------------------------------------
# orbit continuity through the newborn critical point


def orbit_reference() -> BoundaryDivisor:
    return make_boundary([], 2, [(1.0 / 3.0, 1), (2.0 / 3.0, 1)])


def test_orbit_reference_profile():
    report = verify_cont_orbit(orbit_reference(), turn(1.0 / 3.0), 1,
                               [100, 1000])
    assert report["l"] == 1
    assert report["n_schedule"] == [100, 1000]
    tx, ty = report["target"]
    assert complex(tx, ty) == pytest.approx(turn(2.0 / 3.0), abs=1e-12)
    rows = report["profile"]
    assert [row["n"] for row in rows] == [100, 1000]
    for row in rows:
        c = complex(*row["critical_point"])
        assert abs(c) < 1.0
        assert abs(c - turn(1.0 / 3.0)) < 0.2
        assert row["distance"] >= 0.0
        assert row["circle_distance"] >= 0.0
    assert rows[1]["distance"] < rows[0]["distance"]


def test_orbit_fixed_point_needs_single_application():
    # -1 is fixed under cubing, so the one-application relation holds
    D = make_boundary([], 3, [(0.5, 1), (0.25, 1)])
    report = verify_cont_orbit(D, -1.0 + 0j, 1, [100, 1000])
    tx, ty = report["target"]
    assert complex(tx, ty) == pytest.approx(-1.0 + 0j, abs=1e-12)
    rows = report["profile"]
    assert rows[1]["distance"] < rows[0]["distance"]


def test_orbit_fixed_point_rejects_longer_relation():
    # intermediate iterates of a fixed point sit on the support, so only
    # the single-application form of the relation is checkable
    D = make_boundary([], 3, [(0.5, 1), (0.25, 1)])
    with pytest.raises(PreconditionError):
        verify_cont_orbit(D, -1.0 + 0j, 3, [100])


def test_orbit_rejects_intermediate_support_hit():
    with pytest.raises(PreconditionError):
        verify_cont_orbit(orbit_reference(), turn(1.0 / 3.0), 2, [100])


def test_orbit_precondition_errors():
    D = orbit_reference()
    with pytest.raises(PreconditionError):
        verify_cont_orbit(D, turn(1.0 / 3.0), 0, [100])
    with pytest.raises(PreconditionError):
        verify_cont_orbit(D, turn(0.1), 1, [100])
    with pytest.raises(PreconditionError):
        verify_cont_orbit(D, turn(1.0 / 3.0), 1, [1])
    doubled = make_boundary([], 2, [(1.0 / 3.0, 2), (2.0 / 3.0, 1)])
    with pytest.raises(PreconditionError):
        verify_cont_orbit(doubled, turn(1.0 / 3.0), 1, [100])
    with_one = make_boundary([], 2, [(0.0, 1), (1.0 / 3.0, 1)])
    with pytest.raises(PreconditionError):
        verify_cont_orbit(with_one, turn(1.0 / 3.0), 1, [100])


# ---------------------------------------------------------------------------
# prescribed hyperbolic distance


def nearest_critical_point(B, q: complex) -> complex:
    """Independent re-measurement helper: nearest free critical point,
    refusing ambiguous configurations."""
    pts = critical_divisor(B).free_ram.points()
    ranked = sorted(pts, key=lambda c: abs(c - q))
    if len(ranked) >= 2:
        assert abs(ranked[1] - q) >= 2.0 * abs(ranked[0] - q)
    return ranked[0]


@pytest.mark.parametrize("L", [0.0, 1.0])
def test_prescribe_reference_and_reverify(L):
    D = orbit_reference()
    q = turn(1.0 / 3.0)
    cert = prescribe_distance(D, q, 1, L, eps=0.2)
    assert cert.target_L == L
    assert cert.residual == abs(cert.achieved - L)
    assert cert.residual <= 1e-6
    assert cert.iterations > 0
    # re-measure from scratch: rebuild the product, relocate the
    # critical point, run the orbit, take the hyperbolic distance
    rebuilt = from_zero_divisor(cert.result_divisor, cert.m)
    c = nearest_critical_point(rebuilt, q)
    w = rebuilt.eval(c)
    assert abs(w - cert.orbit_value) <= 1e-12
    assert hyp_dist(cert.zero_near_target, w) == pytest.approx(
        cert.achieved, abs=1e-12)
    payload = cert.to_json()
    assert payload["target_L"] == L
    assert payload["m"] == 2
    assert payload["result_divisor"] == divisor_to_json(cert.result_divisor)


def test_prescribe_rejects_fixed_point_target():
    D = make_boundary([], 3, [(0.5, 1), (0.25, 1)])
    with pytest.raises(PreconditionError):
        prescribe_distance(D, -1.0 + 0j, 1, 1.0, eps=0.2)


def test_prescribe_rejects_image_off_support():
    D = make_boundary([], 2, [(1.0 / 3.0, 1), (0.9, 1)])
    with pytest.raises(PreconditionError):
        prescribe_distance(D, turn(1.0 / 3.0), 1, 1.0, eps=0.2)


def test_prescribe_rejects_bad_scalars():
    D = orbit_reference()
    q = turn(1.0 / 3.0)
    with pytest.raises(PreconditionError):
        prescribe_distance(D, q, 1, -1.0, eps=0.2)
    with pytest.raises(PreconditionError):
        prescribe_distance(D, q, 0, 1.0, eps=0.2)
    with pytest.raises(PreconditionError):
        prescribe_distance(D, q, 1, 1.0, eps=0.0)


def test_prescribe_unreachable_distance_fails_honestly():
    D = orbit_reference()
    with pytest.raises(NumericalError):
        prescribe_distance(D, turn(1.0 / 3.0), 1, 50.0, eps=0.1,
                           max_attempts=1)


# ---------------------------------------------------------------------------
# multiplier limit


def test_multiplier_profile_matches_closed_form():
    D = make_boundary([], 1, [(0.25, 1), (0.75, 1)])
    report = multiplier_limit_check(D, [10, 100, 1000])
    rows = report["profile"]
    assert report["n_schedule"] == [10, 100, 1000]
    for row in rows:
        n = row["n"]
        r = 1.0 - 1.0 / n
        # zeros at +- i r multiply to a real derivative r^2 at the origin
        assert row["deviation"] == pytest.approx(1.0 - r * r, abs=1e-12)
        mult = complex(*row["multiplier"])
        assert mult == pytest.approx(r * r + 0j, abs=1e-12)
    assert rows[0]["deviation"] > rows[1]["deviation"] > rows[2]["deviation"]


def test_multiplier_rejections():
    regular = make_boundary([], 2, [(0.25, 1)])
    with pytest.raises(PreconditionError):
        multiplier_limit_check(regular, [10])
    with_one = make_boundary([], 1, [(0.0, 1)])
    with pytest.raises(PreconditionError):
        multiplier_limit_check(with_one, [10])
    D = make_boundary([], 1, [(0.25, 1), (0.75, 1)])
    with pytest.raises(PreconditionError):
        multiplier_limit_check(D, [1])
