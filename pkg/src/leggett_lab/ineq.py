"""Inequality evaluation for paired-settings ensembles.

Correlation functions enter through a single callable mapping a list of unit
directions (one per participating party) to a correlator in [-1, 1]. The
callable is asked for full-arity correlations and for reduced correlations of
the non-designated parties, so quantum predictions and hidden-variable models
feed identical arithmetic.

Notation, for settings tuple k with designated pair (n_k, n_k'):

    beta_k        = E(tuple_k) + E(tuple_k')          full correlators
    alpha_plus_k  = R(others_k) + R(others_k')        reduced correlators
    alpha_minus_k = R(others_k) - R(others_k')

The general bounds are

    sum_k min(|alpha_k - beta_k|, |alpha_k + beta_k|) <= 6 - 2|cos(theta/2)|

for the plus family and the same with sin(theta/2) for the minus family.
When every reduced correlator vanishes the left side collapses to
sum_k |beta_k| and the pair term moves across, giving the two-term form

    sum_k |beta_k| + 2|cos(theta/2)| <= 6      (plus)
    sum_k |beta_k| + 2|sin(theta/2)| <= 6      (minus)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .geometry import SettingsEnsemble

# arctan(2): the mixing angle of 4 cos(x) + 2 sin(x) = 2 sqrt(5) sin(x + THETA0).
THETA0 = math.atan(2.0)

#: Largest value of the two-term left side reachable by the tripartite
#: correlations evaluated here, 2 (sqrt(5) + 1).
MAX_VIOLATION = 2.0 * (math.sqrt(5.0) + 1.0)

#: Pair angles where MAX_VIOLATION is attained.
THETA_STAR_PLUS = math.pi - 2.0 * THETA0
THETA_STAR_MINUS = 2.0 * THETA0

BOUND = 6.0
CONTRACT_TOL = 1e-9
ALPHA_TOL = 1e-9

Correlator = Callable[[Sequence[np.ndarray]], float]


class CorrelatorContractError(ValueError):
    """A correlator callable returned something outside [-1, 1] or non-real."""


class TightPreconditionError(ValueError):
    """Reduced correlations are too large for the two-term form."""


class InequalityAngles(NamedTuple):
    """Free angles of the explicit tripartite arrangement."""

    theta: float
    phi: float
    psi: float


def _checked(correlator: Correlator, directions, tol: float) -> float:
    value = correlator(directions)
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise CorrelatorContractError(
            f"correlator returned {value!r}, expected a real number"
        ) from exc
    if not math.isfinite(out) or abs(out) > 1.0 + tol:
        raise CorrelatorContractError(
            f"correlator returned {out!r}, expected a value in [-1, 1]"
        )
    return out


@dataclass
class InequalityTerms:
    """Correlators of one ensemble, tuple-indexed.

    full[k] and rest[k] hold the (unprimed, primed) values for tuple k.
    """

    full: np.ndarray
    rest: np.ndarray
    beta: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray

    @property
    def alpha_max(self) -> float:
        return float(
            max(np.max(np.abs(self.alpha_plus)), np.max(np.abs(self.alpha_minus)))
        )


def compute_terms(
    ensemble: SettingsEnsemble, correlator: Correlator, tol: float = CONTRACT_TOL
) -> InequalityTerms:
    full = np.empty((3, 2))
    rest = np.empty((3, 2))
    for k in range(3):
        for col, primed in enumerate((False, True)):
            tup = ensemble.settings_primed[k] if primed else ensemble.settings[k]
            full[k, col] = _checked(correlator, list(tup), tol)
            rest[k, col] = _checked(correlator, ensemble.others(k, primed=primed), tol)
    return InequalityTerms(
        full=full,
        rest=rest,
        beta=full[:, 0] + full[:, 1],
        alpha_plus=rest[:, 0] + rest[:, 1],
        alpha_minus=rest[:, 0] - rest[:, 1],
    )


def minform_lhs(alpha, beta) -> float:
    """sum_k min(|alpha_k - beta_k|, |alpha_k + beta_k|).

    Identically sum_k ||alpha_k| - |beta_k||; both forms are kept in the
    tests, only this one is used for evaluation.
    """
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    return float(np.sum(np.minimum(np.abs(a - b), np.abs(a + b))))


def general_bounds(theta) -> tuple[float, float]:
    """(plus, minus) right sides of the general inequality at pair angle theta."""
    t = float(theta)
    return (
        BOUND - 2.0 * abs(math.cos(t / 2.0)),
        BOUND - 2.0 * abs(math.sin(t / 2.0)),
    )


@dataclass
class GeneralEvaluation:
    theta: float
    terms: InequalityTerms
    lhs_plus: float
    bound_plus: float
    margin_plus: float
    lhs_minus: float
    bound_minus: float
    margin_minus: float

    @property
    def violated_plus(self) -> bool:
        return self.margin_plus > 0.0

    @property
    def violated_minus(self) -> bool:
        return self.margin_minus > 0.0

    @property
    def max_margin(self) -> float:
        return max(self.margin_plus, self.margin_minus)


def evaluate_general(
    ensemble: SettingsEnsemble, correlator: Correlator, tol: float = CONTRACT_TOL
) -> GeneralEvaluation:
    """Evaluate both families of the general inequality on one ensemble.

    margin = lhs - bound, so positive margins are violations.
    """
    terms = compute_terms(ensemble, correlator, tol=tol)
    bound_plus, bound_minus = general_bounds(ensemble.theta)
    lhs_plus = minform_lhs(terms.alpha_plus, terms.beta)
    lhs_minus = minform_lhs(terms.alpha_minus, terms.beta)
    return GeneralEvaluation(
        theta=float(ensemble.theta),
        terms=terms,
        lhs_plus=lhs_plus,
        bound_plus=bound_plus,
        margin_plus=lhs_plus - bound_plus,
        lhs_minus=lhs_minus,
        bound_minus=bound_minus,
        margin_minus=lhs_minus - bound_minus,
    )


@dataclass
class TightEvaluation:
    theta: float
    terms: InequalityTerms
    alpha_max: float
    lhs_plus: float
    lhs_minus: float
    bound: float
    margin_plus: float
    margin_minus: float

    @property
    def violated_plus(self) -> bool:
        return self.margin_plus > 0.0

    @property
    def violated_minus(self) -> bool:
        return self.margin_minus > 0.0

    @property
    def max_margin(self) -> float:
        return max(self.margin_plus, self.margin_minus)


def evaluate_tight(
    ensemble: SettingsEnsemble,
    correlator: Correlator,
    alpha_tol: float = ALPHA_TOL,
    tol: float = CONTRACT_TOL,
) -> TightEvaluation:
    """Evaluate the two-term form; requires vanishing reduced correlators.

    Raises TightPreconditionError when any |alpha| exceeds alpha_tol, since
    the two-term left side is only equivalent to the general one at alpha = 0.
    """
    terms = compute_terms(ensemble, correlator, tol=tol)
    alpha_max = terms.alpha_max
    if alpha_max > alpha_tol:
        raise TightPreconditionError(
            f"reduced correlations do not vanish (max |alpha| = {alpha_max:.3e}); "
            "use evaluate_general"
        )
    t = float(ensemble.theta)
    beta_sum = float(np.sum(np.abs(terms.beta)))
    lhs_plus = beta_sum + 2.0 * abs(math.cos(t / 2.0))
    lhs_minus = beta_sum + 2.0 * abs(math.sin(t / 2.0))
    return TightEvaluation(
        theta=t,
        terms=terms,
        alpha_max=alpha_max,
        lhs_plus=lhs_plus,
        lhs_minus=lhs_minus,
        bound=BOUND,
        margin_plus=lhs_plus - BOUND,
        margin_minus=lhs_minus - BOUND,
    )


def _unpack_angles(theta, phi, psi) -> tuple[float, float, float]:
    if phi is None and psi is None:
        t, f, p = theta
        return float(t), float(f), float(p)
    if phi is None or psi is None:
        raise TypeError("pass a single angle triple or all three angles")
    return float(theta), float(phi), float(psi)


@dataclass
class ClosedFormEvaluation:
    angles: InequalityAngles
    beta: np.ndarray
    lhs_plus: float
    lhs_minus: float
    bound: float
    margin_plus: float
    margin_minus: float

    @property
    def max_margin(self) -> float:
        return max(self.margin_plus, self.margin_minus)


def tripartite_ghz_closed(theta, phi=None, psi=None) -> ClosedFormEvaluation:
    """Closed form of the two-term left sides for the explicit tripartite
    arrangement evaluated on the three-party maximally entangled state.

    beta_1 = 2 cos((theta + phi + psi) / 2)
    beta_2 = -2 cos(theta / 2)
    beta_3 = 2 sin(theta / 2)

    Equivalently, with the pair terms folded in,

    lhs_plus  = 2 sqrt(5) sin(THETA0 + theta / 2) + |beta_1|   (theta in [0, pi])
    lhs_minus = 2 sqrt(5) cos(THETA0 - theta / 2) + |beta_1|
    """
    t, f, p = _unpack_angles(theta, phi, psi)
    half = t / 2.0
    beta = np.array(
        [2.0 * math.cos((t + f + p) / 2.0), -2.0 * math.cos(half), 2.0 * math.sin(half)]
    )
    beta_sum = abs(beta[0]) + abs(beta[1]) + abs(beta[2])
    lhs_plus = beta_sum + 2.0 * abs(math.cos(half))
    lhs_minus = beta_sum + 2.0 * abs(math.sin(half))
    return ClosedFormEvaluation(
        angles=InequalityAngles(t, f, p),
        beta=beta,
        lhs_plus=lhs_plus,
        lhs_minus=lhs_minus,
        bound=BOUND,
        margin_plus=lhs_plus - BOUND,
        margin_minus=lhs_minus - BOUND,
    )


def peak_profile(theta, branch: str = "plus") -> float:
    """Maximum of the closed-form left side over (phi, psi) at fixed theta.

    The first term contributes |beta_1| <= 2 with equality on a line of
    (phi, psi), leaving 2 + 2 sqrt(5) sin(THETA0 + theta / 2) for the plus
    family and 2 + 2 sqrt(5) cos(THETA0 - theta / 2) for the minus family.
    """
    half = float(theta) / 2.0
    amp = 2.0 * math.sqrt(5.0)
    if branch == "plus":
        return 2.0 + amp * math.sin(THETA0 + half)
    if branch == "minus":
        return 2.0 + amp * math.cos(THETA0 - half)
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


@dataclass
class BipartiteEvaluation:
    theta: float
    terms: InequalityTerms
    lhs: float
    bound_plus: float
    bound_minus: float
    margin_plus: float
    margin_minus: float

    @property
    def violated(self) -> bool:
        return max(self.margin_plus, self.margin_minus) > 0.0


def bipartite_average(
    ensemble: SettingsEnsemble,
    correlator: Correlator,
    alpha_tol: float = ALPHA_TOL,
    tol: float = CONTRACT_TOL,
) -> BipartiteEvaluation:
    """Two-party form: (1/3) sum_k |beta_k| against 2 - (2/3) |cos(theta/2)|
    and 2 - (2/3) |sin(theta/2)|.

    This is the two-term form divided by three, so the same vanishing-alpha
    precondition applies (here alpha is built from single-party averages).
    """
    if ensemble.n_parties != 2:
        raise ValueError(f"need a two-party ensemble, got {ensemble.n_parties} parties")
    tight = evaluate_tight(ensemble, correlator, alpha_tol=alpha_tol, tol=tol)
    t = tight.theta
    lhs = float(np.sum(np.abs(tight.terms.beta))) / 3.0
    bound_plus = 2.0 - (2.0 / 3.0) * abs(math.cos(t / 2.0))
    bound_minus = 2.0 - (2.0 / 3.0) * abs(math.sin(t / 2.0))
    return BipartiteEvaluation(
        theta=t,
        terms=tight.terms,
        lhs=lhs,
        bound_plus=bound_plus,
        bound_minus=bound_minus,
        margin_plus=lhs - bound_plus,
        margin_minus=lhs - bound_minus,
    )


@dataclass
class SharedSettingsEvaluation:
    theta: float
    terms: InequalityTerms
    lhs: float
    bound: float
    margin: float

    @property
    def violated(self) -> bool:
        return self.margin > 0.0


def shared_settings_form(
    ensemble: SettingsEnsemble,
    correlator: Correlator,
    settings_tol: float = 1e-10,
    tol: float = CONTRACT_TOL,
) -> SharedSettingsEvaluation:
    """Minus-family two-term form for ensembles whose non-designated parties
    reuse their unprimed directions in the primed tuples.

    Equal directions force the minus-family alphas to vanish identically,
    so sum_k |beta_k| + 2 |sin(theta/2)| <= 6 holds for hidden-variable
    models with no condition on the reduced correlations. The plus-family
    alphas do not vanish, so only the minus form is returned.
    """
    j = ensemble.designated - 1
    worst = 0.0
    for k in range(3):
        for idx in range(ensemble.n_parties):
            if idx == j:
                continue
            gap = float(
                np.linalg.norm(
                    np.asarray(ensemble.settings[k][idx])
                    - np.asarray(ensemble.settings_primed[k][idx])
                )
            )
            worst = max(worst, gap)
    if worst > settings_tol:
        raise ValueError(
            "primed directions of the non-designated parties must match the "
            f"unprimed ones (max gap {worst:.3e})"
        )
    terms = compute_terms(ensemble, correlator, tol=tol)
    t = float(ensemble.theta)
    lhs = float(np.sum(np.abs(terms.beta))) + 2.0 * abs(math.sin(t / 2.0))
    return SharedSettingsEvaluation(
        theta=t,
        terms=terms,
        lhs=lhs,
        bound=BOUND,
        margin=lhs - BOUND,
    )
