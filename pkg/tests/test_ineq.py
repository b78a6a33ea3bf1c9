import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leggett_lab import (
    BOUND,
    MAX_VIOLATION,
    THETA0,
    THETA_STAR_MINUS,
    THETA_STAR_PLUS,
    CorrelatorContractError,
    TightPreconditionError,
    bipartite_average,
    bipartite_settings,
    evaluate_general,
    evaluate_tight,
    fig1_settings,
    general_bounds,
    ghz_correlator,
    make_rng,
    minform_lhs,
    peak_profile,
    random_rotation,
    shared_settings_form,
    tripartite_ghz_closed,
    xy_plane_settings,
)
from leggett_lab.ineq import compute_terms

CORR3 = ghz_correlator(3)

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@given(alpha=finite, beta=finite)
@settings(max_examples=300, deadline=None)
def test_minform_identity(alpha, beta):
    # min(|a-b|, |a+b|) = ||a| - |b|| pointwise
    direct = min(abs(alpha - beta), abs(alpha + beta))
    folded = abs(abs(alpha) - abs(beta))
    assert abs(direct - folded) < 1e-14
    assert abs(minform_lhs([alpha], [beta]) - direct) < 1e-14


def test_minform_lhs_sums_componentwise():
    assert minform_lhs([1.0, -1.0, 0.5], [0.25, 0.25, 0.25]) == pytest.approx(
        0.75 + 0.75 + 0.25, abs=1e-15
    )


def test_headline_constants():
    assert MAX_VIOLATION == pytest.approx(2.0 * (math.sqrt(5.0) + 1.0), abs=0)
    assert MAX_VIOLATION == pytest.approx(6.47213595499958, abs=1e-13)
    assert THETA_STAR_PLUS == pytest.approx(math.pi - 2.0 * math.atan(2.0), abs=0)
    assert THETA_STAR_MINUS == pytest.approx(2.0 * math.atan(2.0), abs=0)
    assert THETA_STAR_PLUS == pytest.approx(0.9272952180016122, abs=1e-15)
    assert THETA_STAR_MINUS == pytest.approx(2.214297435588181, abs=1e-15)


def test_general_bounds_endpoints():
    assert general_bounds(0.0) == (4.0, 6.0)
    plus, minus = general_bounds(math.pi)
    assert plus == pytest.approx(6.0, abs=1e-15)
    assert minus == pytest.approx(4.0, abs=1e-15)


def test_closed_form_at_origin():
    ev = tripartite_ghz_closed(0.0, 0.0, 0.0)
    assert np.allclose(ev.beta, [2.0, -2.0, 0.0], atol=1e-15)
    assert ev.lhs_plus == pytest.approx(6.0, abs=1e-15)
    assert ev.lhs_minus == pytest.approx(4.0, abs=1e-15)
    assert ev.margin_plus == pytest.approx(0.0, abs=1e-15)
    assert ev.bound == BOUND


def test_closed_form_accepts_triple():
    a = tripartite_ghz_closed((0.9, 1.0, 2.0))
    b = tripartite_ghz_closed(0.9, 1.0, 2.0)
    assert a.lhs_plus == b.lhs_plus and a.lhs_minus == b.lhs_minus
    with pytest.raises(TypeError):
        tripartite_ghz_closed(0.9, 1.0)


def test_closed_form_amplitude_identities(rng):
    # lhs minus the first term collapses to a single sinusoid in theta
    amp = 2.0 * math.sqrt(5.0)
    for _ in range(200):
        t = rng.uniform(0.0, math.pi)
        f, p = rng.uniform(0.0, 2.0 * math.pi, size=2)
        ev = tripartite_ghz_closed(t, f, p)
        first = 2.0 * abs(math.cos((t + f + p) / 2.0))
        assert ev.lhs_plus - first == pytest.approx(
            amp * math.sin(THETA0 + t / 2.0), abs=1e-12
        )
        assert ev.lhs_minus - first == pytest.approx(
            amp * math.cos(THETA0 - t / 2.0), abs=1e-12
        )


def test_peak_profile_matches_scan():
    psi = np.linspace(0.0, 2.0 * math.pi, 20001)
    for theta, phi in ((0.3, 0.7), (THETA_STAR_PLUS, 2.2), (2.6, 5.0)):
        best = max(tripartite_ghz_closed(theta, phi, p).lhs_plus for p in psi)
        assert best <= peak_profile(theta, "plus") + 1e-12
        assert best >= peak_profile(theta, "plus") - 1e-6  # grid resolution
    with pytest.raises(ValueError):
        peak_profile(0.5, "sideways")


def test_peak_profile_max_is_headline_value():
    assert peak_profile(THETA_STAR_PLUS, "plus") == pytest.approx(
        MAX_VIOLATION, abs=1e-12
    )
    assert peak_profile(THETA_STAR_MINUS, "minus") == pytest.approx(
        MAX_VIOLATION, abs=1e-12
    )


def test_tight_matches_closed(rng):
    for _ in range(60):
        t = rng.uniform(0.0, math.pi)
        f, p = rng.uniform(0.0, 2.0 * math.pi, size=2)
        tight = evaluate_tight(fig1_settings(t, f, p), CORR3)
        closed = tripartite_ghz_closed(t, f, p)
        assert abs(tight.lhs_plus - closed.lhs_plus) < 1e-12
        assert abs(tight.lhs_minus - closed.lhs_minus) < 1e-12


def test_general_reduces_to_tight_when_alpha_vanishes():
    s = fig1_settings(1.1, 0.4, 3.9)
    tight = evaluate_tight(s, CORR3)
    general = evaluate_general(s, CORR3)
    assert tight.alpha_max < 1e-12
    # with alpha = 0 the min-form equals the absolute-sum form up to
    # moving the pair terms to the other side
    assert general.lhs_plus == pytest.approx(
        tight.lhs_plus - 2.0 * abs(math.cos(0.55)), abs=1e-12
    )
    assert general.margin_plus == pytest.approx(tight.margin_plus, abs=1e-12)
    assert general.margin_minus == pytest.approx(tight.margin_minus, abs=1e-12)


def test_tight_rejects_nonvanishing_alpha(rng):
    # rotating the arrangement off the xy plane makes the two-party
    # rest correlators nonzero, so the two-term form must refuse
    rot = random_rotation(make_rng(77))
    s = fig1_settings(0.9, 1.0, 2.0).rotated(rot)
    with pytest.raises(TightPreconditionError):
        evaluate_tight(s, CORR3)
    general = evaluate_general(s, CORR3)  # still well defined
    assert general.lhs_plus >= 0.0


def test_correlator_contract_is_enforced():
    s = fig1_settings(0.9, 1.0, 2.0)
    with pytest.raises(CorrelatorContractError):
        evaluate_general(s, lambda dirs: 1.5)
    with pytest.raises(CorrelatorContractError):
        evaluate_general(s, lambda dirs: float("nan"))


def test_compute_terms_structure():
    s = fig1_settings(0.9, 1.0, 2.0)
    terms = compute_terms(s, CORR3)
    assert terms.full.shape == (3, 2)
    assert terms.beta == pytest.approx(list(terms.full[:, 0] + terms.full[:, 1]))
    assert terms.alpha_plus == pytest.approx(list(terms.rest[:, 0] + terms.rest[:, 1]))


def test_violation_exists_at_optimum():
    psi_plus = (-THETA_STAR_PLUS - 1.0) % (2.0 * math.pi)
    ev = tripartite_ghz_closed(THETA_STAR_PLUS, 1.0, psi_plus)
    assert ev.lhs_plus == pytest.approx(MAX_VIOLATION, abs=1e-12)
    assert ev.margin_plus > 0.47


def test_bipartite_violation_margin():
    theta = math.pi / 2.0
    s = bipartite_settings(theta, 2.0 * math.pi - theta)
    ev = bipartite_average(s, ghz_correlator(2))
    assert ev.lhs == pytest.approx((2.0 + 2.0 * math.sqrt(2.0)) / 3.0, abs=1e-12)
    # minus-family margin is exactly sqrt(2) - 4/3
    assert ev.margin_minus == pytest.approx(math.sqrt(2.0) - 4.0 / 3.0, abs=1e-12)
    assert ev.margin_minus == pytest.approx(0.0808802290397618, abs=1e-12)
    assert ev.violated


def test_bipartite_needs_two_parties():
    with pytest.raises(ValueError):
        bipartite_average(fig1_settings(0.9, 1.0, 2.0), CORR3)


def test_shared_settings_form_matches_general():
    az = [[0.7, 2.1, 0.3], [1.9, 0.2, 4.4]]
    s = xy_plane_settings(3, 1, 1.2, az, az)  # primed others reuse unprimed
    shared = shared_settings_form(s, CORR3)
    general = evaluate_general(s, CORR3)
    # alpha_minus vanishes structurally, so the minus margins agree
    assert general.terms.alpha_minus == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
    assert shared.margin == pytest.approx(general.margin_minus, abs=1e-12)
    assert not shared.violated


def test_shared_settings_form_rejects_mismatch():
    s = fig1_settings(0.9, 1.0, 2.0)  # primed azimuths differ from unprimed
    with pytest.raises(ValueError):
        shared_settings_form(s, CORR3)
