"""Closed-form GHZ correlation functions.

Parity matters throughout: odd party counts keep only the coherence term
cos(sum of azimuths) times the product of polar sines, while even counts add
the product of polar cosines coming from the diagonal corners of the state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .qcore import as_direction


def _angle_pairs(angles, expected: int):
    pairs = [(float(p), float(a)) for p, a in angles]
    if len(pairs) != expected:
        raise ValueError(f"need {expected} (polar, azimuth) pairs, got {len(pairs)}")
    return pairs


def ghz_correlation_closed(n_parties: int, angles) -> float:
    """Full N-party GHZ correlator from (polar, azimuth) pairs, one per party."""
    n = int(n_parties)
    if n < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    pairs = _angle_pairs(angles, expected=n)
    azimuth_sum = sum(a for _, a in pairs)
    value = math.cos(azimuth_sum) * math.prod(math.sin(p) for p, _ in pairs)
    if n % 2 == 0:
        value += math.prod(math.cos(p) for p, _ in pairs)
    return value


def ghz_correlation_vectors(directions) -> float:
    """Same correlator from Cartesian directions.

    Re prod_j (x_j + i y_j), plus prod_j z_j when the party count is even.
    """
    dirs = [as_direction(d) for d in directions]
    if len(dirs) < 2:
        raise ValueError(f"need at least 2 directions, got {len(dirs)}")
    w = complex(1.0, 0.0)
    for d in dirs:
        w *= complex(d[0], d[1])
    value = w.real
    if len(dirs) % 2 == 0:
        value += math.prod(float(d[2]) for d in dirs)
    return value


def ghz_correlation_xy(n_parties: int, azimuths) -> float:
    """Correlator when every party measures in the x-y plane."""
    az = [float(a) for a in azimuths]
    if len(az) != int(n_parties):
        raise ValueError(f"need {n_parties} azimuths, got {len(az)}")
    return math.cos(sum(az))


def ghz_reduced_correlation(n_parties: int, directions) -> float:
    """Correlator of the state left after tracing out one party of GHZ(N).

    The reduced state is the same whichever party is dropped, so only the
    remaining N-1 directions matter. Even N gives exactly zero; odd N gives
    the product of the z-components.
    """
    n = int(n_parties)
    dirs = [as_direction(d) for d in directions]
    if len(dirs) != n - 1:
        raise ValueError(f"need {n - 1} directions for the reduced state, got {len(dirs)}")
    if n % 2 == 0:
        return 0.0
    return math.prod(float(d[2]) for d in dirs)


def ghz_correlator(n_parties: int) -> Callable[[Sequence], float]:
    """Correlator callable for inequality evaluation.

    Dispatches on arity: N directions means the full correlator, N-1 means
    the correlator of the reduced state left after dropping one party.
    """
    n = int(n_parties)

    def correlator(directions) -> float:
        dirs = list(directions)
        if len(dirs) == n:
            return ghz_correlation_vectors(dirs)
        if len(dirs) == n - 1:
            return ghz_reduced_correlation(n, dirs)
        raise ValueError(f"expected {n} or {n - 1} directions, got {len(dirs)}")

    return correlator


@dataclass
class CorrelationReport:
    """A correlator value together with the formula branch that produced it."""

    value: float
    n_parties: int
    parity: str
    branch: str


def ghz_correlation_report(n_parties: int, angles) -> CorrelationReport:
    value = ghz_correlation_closed(n_parties, angles)
    odd = int(n_parties) % 2 == 1
    return CorrelationReport(
        value=value,
        n_parties=int(n_parties),
        parity="odd" if odd else "even",
        branch="coherence" if odd else "diagonal+coherence",
    )


class TripartiteCorrelators(NamedTuple):
    c1: float
    c2: float
    c3: float
    c1_primed: float
    c2_primed: float
    c3_primed: float


def tripartite_correlators(theta, phi_sums, phi_sums_primed) -> TripartiteCorrelators:
    """Six GHZ(3) correlators on the standard designated-party triple.

    phi_sums[k] is the sum over the two non-designated parties of the doubled
    azimuths in the k-th unprimed tuple; phi_sums_primed likewise for the
    primed tuple. The designated party contributes the pair angle theta.
    """
    t = float(theta)
    p1, p2, p3 = (float(x) for x in phi_sums)
    q1, q2, q3 = (float(x) for x in phi_sums_primed)
    cos_half = math.cos(t / 2.0)
    sin_half = math.sin(t / 2.0)
    return TripartiteCorrelators(
        c1=math.cos((t + p1) / 2.0),
        c2=-cos_half * math.sin(p2 / 2.0),
        c3=sin_half * math.cos(p3 / 2.0),
        c1_primed=math.cos((t - q1) / 2.0),
        c2_primed=-cos_half * math.sin(q2 / 2.0),
        c3_primed=-sin_half * math.cos(q3 / 2.0),
    )
