import math

import numpy as np
import pytest

from leggett_lab import (
    MAX_VIOLATION,
    THETA_STAR_MINUS,
    THETA_STAR_PLUS,
    grid_scan,
    maximize_violation,
    optimal_locus,
    peak_profile,
    surface,
    tripartite_ghz_closed,
)

TWO_PI = 2.0 * math.pi


def test_surface_matches_closed_form(rng):
    theta = rng.uniform(0.0, math.pi, size=7)
    phi = rng.uniform(0.0, TWO_PI, size=7)
    psi = rng.uniform(0.0, TWO_PI, size=7)
    plus, minus = surface(theta, phi, psi)
    for i in range(7):
        ev = tripartite_ghz_closed(theta[i], phi[i], psi[i])
        assert abs(plus[i] - ev.lhs_plus) < 1e-13
        assert abs(minus[i] - ev.lhs_minus) < 1e-13


def test_surface_broadcasts():
    theta = np.linspace(0.0, math.pi, 4)[:, None, None]
    phi = np.linspace(0.0, TWO_PI, 5)[None, :, None]
    psi = np.linspace(0.0, TWO_PI, 6)[None, None, :]
    plus, minus = surface(theta, phi, psi)
    assert plus.shape == (4, 5, 6)
    assert minus.shape == (4, 5, 6)
    assert plus.max() <= MAX_VIOLATION + 1e-12
    assert minus.max() <= MAX_VIOLATION + 1e-12


def test_grid_scan_best_points():
    grid = grid_scan(n_theta=41, n_phi=24, n_psi=24)
    assert grid.n_points == 41 * 24 * 24
    value_plus, at_plus = grid.best_plus
    value_minus, at_minus = grid.best_minus
    # the coarse grid already lands near the true optimum
    assert value_plus == pytest.approx(MAX_VIOLATION, abs=0.05)
    assert value_minus == pytest.approx(MAX_VIOLATION, abs=0.05)
    assert abs(at_plus.theta - THETA_STAR_PLUS) < 0.1
    assert abs(at_minus.theta - THETA_STAR_MINUS) < 0.1
    # stored surfaces agree with direct evaluation at the reported point
    ev = tripartite_ghz_closed(at_plus.theta, at_plus.phi, at_plus.psi)
    assert ev.lhs_plus == pytest.approx(value_plus, abs=1e-12)


def test_optimal_locus_frozen_values():
    plus = optimal_locus(1.0, "plus")
    minus = optimal_locus(1.0, "minus")
    assert plus.theta == THETA_STAR_PLUS
    assert minus.theta == THETA_STAR_MINUS
    assert plus.psi == pytest.approx(4.355890089177974, abs=1e-12)
    assert minus.psi == pytest.approx(3.0688878715914054, abs=1e-12)


def test_optimal_locus_sits_on_ridge(rng):
    for phi in rng.uniform(0.0, TWO_PI, size=25):
        for branch in ("plus", "minus"):
            angles = optimal_locus(phi, branch)
            # the first closed-form term is pushed to its extreme value
            residual = 1.0 - abs(
                math.cos((angles.theta + angles.phi + angles.psi) / 2.0)
            )
            assert residual < 1e-12
            assert 0.0 <= angles.psi < TWO_PI


def test_peak_profile_bounds_surface(rng):
    for _ in range(50):
        t = rng.uniform(0.0, math.pi)
        f, p = rng.uniform(0.0, TWO_PI, size=2)
        ev = tripartite_ghz_closed(t, f, p)
        assert ev.lhs_plus <= peak_profile(t, "plus") + 1e-12
        assert ev.lhs_minus <= peak_profile(t, "minus") + 1e-12


@pytest.mark.parametrize("branch,theta_star", [
    ("plus", THETA_STAR_PLUS),
    ("minus", THETA_STAR_MINUS),
])
def test_maximize_violation(branch, theta_star):
    report = maximize_violation(branch)
    assert report.converged
    assert abs(report.deviation) <= 1e-9
    assert abs(report.value - MAX_VIOLATION) <= 1e-9
    assert abs(report.theta - theta_star) <= 1e-6
    assert report.locus_residual <= 1e-9
    assert report.cross_check_gap <= 1e-9
    assert report.branch == branch
    d = report.as_dict()
    assert d["value"] == report.value
    assert d["branch"] == branch


def test_maximize_violation_rejects_unknown_branch():
    with pytest.raises(ValueError):
        maximize_violation("both")
