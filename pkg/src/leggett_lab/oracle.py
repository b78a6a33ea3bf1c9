"""Hidden-variable models with definite single-party polarizations.

A model state is a product of unit polarizations (u_1, ..., u_N). Given one
measurement direction per party it fixes every single-party correlator to
u_j . n_j and leaves the joint coefficients free, subject only to the
constraint that all 2^N outcome probabilities stay nonnegative.

Correlator sets are stored coefficient-indexed: coeffs[m] is the correlator
of the parties whose bits are set in m (bit j-1 <=> party j), coeffs[0] = 1.
Outcome b encodes x_j = (-1)^(bit j-1 of b), so

    P[b] = 2^-N sum_m (-1)^popcount(b & m) coeffs[m],

a Walsh-Hadamard transform pair: probabilities = WHT(coeffs) / 2^N and
coeffs = WHT(probabilities).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .geometry import SettingsEnsemble
from .ineq import minform_lhs
from .qcore import check_unit
from .rng import sphere_points

MAX_PARTIES = 12
CHAIN_TOL = 1e-12
MODEL_TOL = 1e-10
SINGLETON_MATCH_TOL = 1e-9


def walsh_hadamard(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    Sylvester ordering: result[b] = sum_m (-1)^popcount(b & m) values[m].
    Batched over leading axes; applying it twice multiplies by the length.
    """
    a = np.array(values, dtype=float)
    size = a.shape[-1]
    if size == 0 or size & (size - 1):
        raise ValueError(f"last axis must have power-of-two length, got {size}")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        blocks = a.reshape(*lead, size // (2 * h), 2, h)
        top = blocks[..., 0, :] + blocks[..., 1, :]
        bottom = blocks[..., 0, :] - blocks[..., 1, :]
        a = np.concatenate((top, bottom), axis=-1).reshape(*lead, size)
        h *= 2
    return a


@lru_cache(maxsize=None)
def hadamard_matrix(n_parties: int) -> np.ndarray:
    """Dense 2^N x 2^N transform matrix, H[b, m] = (-1)^popcount(b & m)."""
    if not 1 <= n_parties <= MAX_PARTIES:
        raise ValueError(f"n_parties must be in [1, {MAX_PARTIES}], got {n_parties}")
    h2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    h = np.array([[1.0]])
    for _ in range(n_parties):
        # party bits grow from the low end, matching the coefficient indexing
        h = np.kron(h2, h)
    return h


@lru_cache(maxsize=None)
def _joint_mask(n_parties: int) -> np.ndarray:
    """Boolean mask over coefficient indices with two or more parties."""
    return np.array(
        [bin(m).count("1") >= 2 for m in range(2**n_parties)], dtype=bool
    )


@dataclass
class CorrelatorSet:
    """All 2^N correlators of one N-party outcome distribution."""

    n_parties: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        n = int(self.n_parties)
        if not 1 <= n <= MAX_PARTIES:
            raise ValueError(f"n_parties must be in [1, {MAX_PARTIES}], got {n}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (2**n,):
            raise ValueError(f"expected {2**n} coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if abs(c[0] - 1.0) > 1e-12:
            raise ValueError(f"empty-set coefficient must be 1, got {c[0]!r}")
        self.n_parties = n
        self.coeffs = c

    @property
    def size(self) -> int:
        return self.coeffs.size

    @property
    def full(self) -> float:
        return float(self.coeffs[-1])

    def singleton(self, party: int) -> float:
        return self.subset((party,))

    def subset(self, parties: Sequence[int]) -> float:
        mask = 0
        for p in parties:
            bit = 1 << (int(p) - 1)
            if not 1 <= int(p) <= self.n_parties:
                raise ValueError(f"party {p} out of range for {self.n_parties} parties")
            if mask & bit:
                raise ValueError(f"party {p} listed twice")
            mask |= bit
        return float(self.coeffs[mask])

    def rest(self, designated: int) -> float:
        """Joint correlator of every party except the designated one."""
        if not 1 <= designated <= self.n_parties:
            raise ValueError(
                f"designated party must be in [1, {self.n_parties}], got {designated}"
            )
        return float(self.coeffs[(self.size - 1) ^ (1 << (designated - 1))])

    def probabilities(self) -> np.ndarray:
        return walsh_hadamard(self.coeffs) / self.size

    def min_probability(self) -> float:
        return float(self.probabilities().min())

    def is_admissible(self, tol: float = 0.0) -> bool:
        return self.min_probability() >= -tol

    @classmethod
    def from_probabilities(cls, probabilities) -> "CorrelatorSet":
        p = np.asarray(probabilities, dtype=float)
        n = p.size.bit_length() - 1
        if p.size != 2**n:
            raise ValueError(f"need a power-of-two probability vector, got {p.size}")
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        return cls(n, walsh_hadamard(p))


def product_correlators(singletons) -> CorrelatorSet:
    """The unique uncorrelated set with the given single-party values."""
    d = np.asarray(singletons, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("singletons must be a nonempty vector")
    if np.any(np.abs(d) > 1.0 + 1e-12):
        raise ValueError("single-party correlators must lie in [-1, 1]")
    coeffs = np.array([1.0])
    for value in d:
        coeffs = np.concatenate((coeffs, coeffs * value))
    return CorrelatorSet(d.size, coeffs)


def sample_admissible(
    rng: np.random.Generator,
    n_parties: int,
    singletons,
    delta: float = 0.2,
    attempts: int = 100,
) -> CorrelatorSet:
    """Random admissible set with pinned single-party values.

    Every joint coefficient of the product set gets a uniform(-delta, delta)
    perturbation; the first of `attempts` candidates with nonnegative outcome
    probabilities wins. Falls back to the product set itself, which is always
    admissible, so the draw count per call is fixed and the stream position
    stays deterministic.
    """
    base = product_correlators(singletons)
    if base.n_parties != n_parties:
        raise ValueError(f"expected {n_parties} singletons, got {base.n_parties}")
    mask = _joint_mask(n_parties)
    noise = rng.uniform(-delta, delta, size=(attempts, int(mask.sum())))
    candidates = np.tile(base.coeffs, (attempts, 1))
    candidates[:, mask] += noise
    probabilities = walsh_hadamard(candidates) / candidates.shape[-1]
    good = np.flatnonzero(probabilities.min(axis=-1) >= 0.0)
    if good.size:
        return CorrelatorSet(n_parties, candidates[good[0]])
    return base


@dataclass
class IdentityReport:
    max_parties: int
    assignments: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def identity_check(max_parties: int = 8) -> IdentityReport:
    """Exhaustive check of |x + y| - x y = 1 and |x - y| + x y = 1 on {-1, +1}.

    x is one party's outcome, y the product of all the others; every outcome
    assignment for 2..max_parties parties is enumerated in exact integer
    arithmetic. These two identities are what the correlator constraints
    integrate to.
    """
    failures = []
    assignments = 0
    for n in range(2, int(max_parties) + 1):
        for bits in range(2**n):
            assignments += 1
            outcomes = [1 - 2 * ((bits >> j) & 1) for j in range(n)]
            product = 1
            for x in outcomes:
                product *= x
            for i, x in enumerate(outcomes):
                y = product * x
                if abs(x + y) - x * y != 1 or abs(x - y) + x * y != 1:
                    failures.append((n, bits, i + 1))
    return IdentityReport(int(max_parties), assignments, failures)


@dataclass
class ChainReport:
    designated: int
    slack_plus: float
    slack_minus: float
    tol: float = CHAIN_TOL

    @property
    def max_slack(self) -> float:
        return max(self.slack_plus, self.slack_minus)

    @property
    def ok(self) -> bool:
        return self.max_slack <= self.tol

    def as_array(self) -> np.ndarray:
        return np.array([self.slack_plus, self.slack_minus])


def verify_constraint_chain(
    cset: CorrelatorSet, designated: int, tol: float = CHAIN_TOL
) -> ChainReport:
    """Slacks of |C_i + C_rest| <= 1 + C_full and |C_i - C_rest| <= 1 - C_full.

    slack = left - right, so admissible sets give slacks <= 0. Inadmissible
    sets can poke through, which is what makes the check informative.
    """
    ci = cset.singleton(designated)
    cr = cset.rest(designated)
    cf = cset.full
    return ChainReport(
        designated=designated,
        slack_plus=abs(ci + cr) - (1.0 + cf),
        slack_minus=abs(ci - cr) - (1.0 - cf),
        tol=tol,
    )


def inadmissible_counterexample(n_parties: int = 3) -> CorrelatorSet:
    """A correlator set that breaks the constraint chain.

    Party 1 reads +1 with certainty while the joint of the others reads -1,
    yet the full product claims +1: |C_1 - C_rest| = 2 > 1 - C_full = 0.
    Some outcome probability is forced negative, so no model state produces
    this set; the chain check flags it with slack 2.
    """
    n = int(n_parties)
    if n < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    coeffs = np.zeros(2**n)
    coeffs[0] = 1.0
    coeffs[1] = 1.0
    for j in range(1, n):
        coeffs[1 << j] = -1.0
    coeffs[(2**n - 1) ^ 1] = -1.0
    coeffs[-1] = 1.0
    return CorrelatorSet(n, coeffs)


@dataclass
class LeggettHiddenVariable:
    """One model state: a unit polarization per party."""

    polarizations: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.polarizations, dtype=float)
        if u.ndim != 2 or u.shape[1] != 3 or u.shape[0] < 1:
            raise ValueError(f"polarizations must have shape (N, 3), got {u.shape}")
        for row in u:
            check_unit(row)
        self.polarizations = u

    @property
    def n_parties(self) -> int:
        return self.polarizations.shape[0]

    def malus_singletons(self, directions) -> np.ndarray:
        """u_j . n_j for one measurement direction per party."""
        n = np.asarray(directions, dtype=float)
        if n.shape != self.polarizations.shape:
            raise ValueError(
                f"expected {self.polarizations.shape[0]} directions, got shape {n.shape}"
            )
        return np.einsum("jc,jc->j", self.polarizations, n)

    @classmethod
    def random(cls, rng: np.random.Generator, n_parties: int) -> "LeggettHiddenVariable":
        return cls(sphere_points(rng, (int(n_parties),)))


@dataclass
class HiddenVariableEnsemble:
    """Weighted mixture of model states."""

    polarizations: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.polarizations, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if u.ndim != 3 or u.shape[2] != 3 or u.shape[0] < 1:
            raise ValueError(f"polarizations must have shape (A, N, 3), got {u.shape}")
        if w.shape != (u.shape[0],):
            raise ValueError(f"need one weight per state, got shape {w.shape}")
        if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must be nonnegative and sum to 1")
        norms = np.linalg.norm(u, axis=2)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("polarizations must be unit vectors")
        self.polarizations = u
        self.weights = w

    @property
    def n_atoms(self) -> int:
        return self.polarizations.shape[0]

    @property
    def n_parties(self) -> int:
        return self.polarizations.shape[1]

    def atom(self, index: int) -> LeggettHiddenVariable:
        return LeggettHiddenVariable(self.polarizations[index])


def random_ensemble(
    rng: np.random.Generator,
    n_parties: int,
    n_atoms: int | None = None,
    weighting: str = "dirichlet",
) -> HiddenVariableEnsemble:
    if n_atoms is None:
        n_atoms = int(rng.integers(1, 5))
    a = int(n_atoms)
    u = sphere_points(rng, (a, int(n_parties)))
    if weighting == "dirichlet":
        w = rng.dirichlet(np.ones(a))
    elif weighting == "equal":
        w = np.full(a, 1.0 / a)
    else:
        raise ValueError(f"weighting must be 'dirichlet' or 'equal', got {weighting!r}")
    return HiddenVariableEnsemble(u, w)


@dataclass
class GammaReport:
    """Mixture averages of |u . (n_k +/- n_k')| at the designated party."""

    gamma_plus: np.ndarray
    gamma_minus: np.ndarray
    frame_margin_plus: float
    frame_margin_minus: float


def model_gamma(
    settings: SettingsEnsemble, model: HiddenVariableEnsemble
) -> GammaReport:
    """The pair-direction averages and their lower-bound margins.

    sum_k gamma_plus_k >= 2 |cos(theta/2)| and sum_k gamma_minus_k >=
    2 |sin(theta/2)| because each unit polarization projects onto an
    orthonormal frame with |projections| summing to at least 1.
    """
    j = settings.designated - 1
    u = model.polarizations[:, j, :]
    w = model.weights
    gamma_plus = np.empty(3)
    gamma_minus = np.empty(3)
    for k in range(3):
        n, n_primed = settings.pair(k)
        gamma_plus[k] = float(w @ np.abs(u @ (np.asarray(n) + np.asarray(n_primed))))
        gamma_minus[k] = float(w @ np.abs(u @ (np.asarray(n) - np.asarray(n_primed))))
    t = float(settings.theta)
    return GammaReport(
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        frame_margin_plus=float(gamma_plus.sum()) - 2.0 * abs(math.cos(t / 2.0)),
        frame_margin_minus=float(gamma_minus.sum()) - 2.0 * abs(math.sin(t / 2.0)),
    )


class ModelSoundnessError(RuntimeError):
    """A hidden-variable run broke an inequality it was expected to satisfy."""

    def __init__(self, message: str, report: "ModelCheckReport"):
        super().__init__(message)
        self.report = report


@dataclass
class ModelCheckReport:
    n_parties: int
    n_atoms: int
    theta: float
    beta: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray
    gamma_plus: np.ndarray
    gamma_minus: np.ndarray
    intermediate_margin_plus: np.ndarray
    intermediate_margin_minus: np.ndarray
    final_margin_plus: float
    final_margin_minus: float
    frame_margin_plus: float
    frame_margin_minus: float
    chain_max_slack: float
    pair_max_slack: float
    tol: float = MODEL_TOL
    chain_tol: float = CHAIN_TOL

    @property
    def max_intermediate_margin(self) -> float:
        return float(
            max(self.intermediate_margin_plus.max(), self.intermediate_margin_minus.max())
        )

    @property
    def max_final_margin(self) -> float:
        return max(self.final_margin_plus, self.final_margin_minus)

    @property
    def chains_ok(self) -> bool:
        return (
            self.chain_max_slack <= self.chain_tol
            and self.pair_max_slack <= self.chain_tol
        )

    @property
    def ok(self) -> bool:
        return (
            self.chains_ok
            and self.max_intermediate_margin <= self.tol
            and self.max_final_margin <= self.tol
            and self.frame_margin_plus >= -self.tol
            and self.frame_margin_minus >= -self.tol
        )


Sampler = Callable[[np.random.Generator, int, np.ndarray], CorrelatorSet]


def ensemble_inequality_check(
    model: HiddenVariableEnsemble,
    settings: SettingsEnsemble,
    rng: np.random.Generator,
    *,
    delta: float = 0.2,
    attempts: int = 100,
    tol: float = MODEL_TOL,
    chain_tol: float = CHAIN_TOL,
    raise_on_violation: bool = True,
    sampler: Sampler | None = None,
) -> ModelCheckReport:
    """Drive one hidden-variable mixture through the full derivation.

    For every (state, tuple, primed-or-not) a random admissible correlator
    set is drawn with its single-party values pinned by the polarizations.
    Writing g_k = u . (n_k +/- n_k') for the designated polarization of one
    state, the run is checked against

      per state:  |C_i + C_rest| <= 1 + C_full,  |C_i - C_rest| <= 1 - C_full
                  |g_k + alpha_k| <= 2 + beta_k, |g_k - alpha_k| <= 2 - beta_k
      per tuple:  min(|a_k - b_k|, |a_k + b_k|) <= 2 - |avg of g_k|
      summed:     sum_k min(...) <= 6 - 2 |cos(theta/2)|   (plus family)
                  sum_k min(...) <= 6 - 2 |sin(theta/2)|   (minus family)

    The per-state and per-tuple lines follow from admissibility alone, for
    any mixture.  The summed bounds do not: they also need the drawn sets to
    be uncorrelated with the settings, so they are checked rather than
    assumed, and a conspiring `sampler` is expected to trip them.

    A custom `sampler` may replace the admissible draw; it must still return
    admissible sets with the pinned single-party values, which is enforced.
    Positive-beyond-tol margins raise ModelSoundnessError carrying the
    report (set raise_on_violation=False to just get the report).
    """
    if model.n_parties != settings.n_parties:
        raise ValueError(
            f"model has {model.n_parties} parties, settings {settings.n_parties}"
        )
    n = model.n_parties
    designated = settings.designated

    def default_sampler(r, parties, singles):
        return sample_admissible(r, parties, singles, delta=delta, attempts=attempts)

    draw = sampler if sampler is not None else default_sampler

    full = np.zeros((3, 2))
    rest = np.zeros((3, 2))
    g_plus = np.zeros(3)
    g_minus = np.zeros(3)
    chain_max = -math.inf
    pair_max = -math.inf
    for a in range(model.n_atoms):
        atom = model.polarizations[a]
        weight = model.weights[a]
        u = atom[designated - 1]
        for k in range(3):
            atom_full = np.empty(2)
            atom_rest = np.empty(2)
            for col, primed in enumerate((False, True)):
                tup = settings.settings_primed[k] if primed else settings.settings[k]
                singles = np.einsum("jc,jc->j", atom, np.asarray(tup, dtype=float))
                cset = draw(rng, n, singles)
                if cset.n_parties != n:
                    raise ValueError(
                        f"sampler returned a {cset.n_parties}-party set, expected {n}"
                    )
                pinned = np.array([cset.singleton(j + 1) for j in range(n)])
                if np.max(np.abs(pinned - singles)) > SINGLETON_MATCH_TOL:
                    raise ValueError(
                        "sampler changed the pinned single-party correlators"
                    )
                if not cset.is_admissible(tol=1e-12):
                    raise ValueError(
                        f"sampler returned an inadmissible set "
                        f"(min probability {cset.min_probability():.3e})"
                    )
                chain = verify_constraint_chain(cset, designated, tol=chain_tol)
                chain_max = max(chain_max, chain.max_slack)
                atom_full[col] = cset.full
                atom_rest[col] = cset.rest(designated)

            n_k, n_k_primed = settings.pair(k)
            gp = float(u @ (np.asarray(n_k) + np.asarray(n_k_primed)))
            gm = float(u @ (np.asarray(n_k) - np.asarray(n_k_primed)))
            ab = atom_full[0] + atom_full[1]
            ap = atom_rest[0] + atom_rest[1]
            am = atom_rest[0] - atom_rest[1]
            for g, alpha in ((gp, ap), (gm, am)):
                pair_max = max(
                    pair_max,
                    abs(g + alpha) - (2.0 + ab),
                    abs(g - alpha) - (2.0 - ab),
                )
            full[k] += weight * atom_full
            rest[k] += weight * atom_rest
            g_plus[k] += weight * gp
            g_minus[k] += weight * gm

    beta = full[:, 0] + full[:, 1]
    alpha_plus = rest[:, 0] + rest[:, 1]
    alpha_minus = rest[:, 0] - rest[:, 1]
    gamma = model_gamma(settings, model)

    per_k_plus = np.minimum(np.abs(alpha_plus - beta), np.abs(alpha_plus + beta))
    per_k_minus = np.minimum(np.abs(alpha_minus - beta), np.abs(alpha_minus + beta))
    t = float(settings.theta)
    report = ModelCheckReport(
        n_parties=n,
        n_atoms=model.n_atoms,
        theta=t,
        beta=beta,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        g_plus=g_plus,
        g_minus=g_minus,
        gamma_plus=gamma.gamma_plus,
        gamma_minus=gamma.gamma_minus,
        intermediate_margin_plus=per_k_plus - (2.0 - np.abs(g_plus)),
        intermediate_margin_minus=per_k_minus - (2.0 - np.abs(g_minus)),
        final_margin_plus=minform_lhs(alpha_plus, beta)
        - (6.0 - 2.0 * abs(math.cos(t / 2.0))),
        final_margin_minus=minform_lhs(alpha_minus, beta)
        - (6.0 - 2.0 * abs(math.sin(t / 2.0))),
        frame_margin_plus=gamma.frame_margin_plus,
        frame_margin_minus=gamma.frame_margin_minus,
        chain_max_slack=chain_max,
        pair_max_slack=pair_max,
        tol=tol,
        chain_tol=chain_tol,
    )
    if raise_on_violation and not report.ok:
        raise ModelSoundnessError(
            "hidden-variable mixture broke the inequality chain: "
            f"max intermediate margin {report.max_intermediate_margin:.3e}, "
            f"max final margin {report.max_final_margin:.3e}, "
            f"chain slack {report.chain_max_slack:.3e}, "
            f"pair slack {report.pair_max_slack:.3e}",
            report,
        )
    return report
