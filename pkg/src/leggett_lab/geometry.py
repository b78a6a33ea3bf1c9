"""Measurement-setting ensembles.

An ensemble is three 2N-tuples of unit directions sharing a pair angle theta
at one designated party. The sums and differences of the designated pairs
define two orthonormal frames, and every inequality in the package is stated
relative to those frames. For the standard triple used here the frames are
constant (x, y, z) and (y, z, x), which keeps the theta -> 0 and theta -> pi
degeneracies harmless: the frames stay defined even where they can no longer
be recovered by dividing the pair sums or differences.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import check_unit

PAIR_TOL = 1e-10
SETTINGS_FORMAT = "leggett-lab settings v1"

# Frames of the standard designated triple; independent of theta.
FRAME = np.eye(3)
FRAME_PRIMED = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


class SphericalAngles(NamedTuple):
    polar: float
    azimuth: float


def from_spherical(polar, azimuth) -> np.ndarray:
    p, a = float(polar), float(azimuth)
    sp = math.sin(p)
    return np.array([sp * math.cos(a), sp * math.sin(a), math.cos(p)])


def to_spherical(vector) -> SphericalAngles:
    v = check_unit(vector)
    polar = math.acos(max(-1.0, min(1.0, float(v[2]))))
    return SphericalAngles(polar, math.atan2(float(v[1]), float(v[0])))


def designated_triple(theta):
    """The standard pair triple (a_k, a_k') with pair angle theta.

    a1 = {pi/2, theta/2}        a1' = {pi/2, -theta/2}
    a2 = {(pi-theta)/2, pi/2}   a2' = {(pi+theta)/2, pi/2}
    a3 = {theta/2, 0}           a3' = {theta/2, pi}

    For every k, a_k + a_k' = 2 cos(theta/2) e_k and
    a_k - a_k' = 2 sin(theta/2) e_k' with e = (x, y, z), e' = (y, z, x).
    """
    t = float(theta)
    half_pi = math.pi / 2.0
    a = [
        from_spherical(half_pi, t / 2.0),
        from_spherical((math.pi - t) / 2.0, half_pi),
        from_spherical(t / 2.0, 0.0),
    ]
    a_primed = [
        from_spherical(half_pi, -t / 2.0),
        from_spherical((math.pi + t) / 2.0, half_pi),
        from_spherical(t / 2.0, math.pi),
    ]
    return a, a_primed


@dataclass
class SettingsEnsemble:
    """Three 2N-tuples with paired directions at the designated party.

    settings[k][j] is the unit direction of party j+1 in the k-th unprimed
    tuple; settings_primed mirrors it. frames rows are e_k, frames_primed
    rows are e_k'.
    """

    n_parties: int
    designated: int
    theta: float
    settings: list
    settings_primed: list
    frames: np.ndarray
    frames_primed: np.ndarray

    def pair(self, k: int):
        """Designated party's (unprimed, primed) directions in tuple k."""
        j = self.designated - 1
        return self.settings[k][j], self.settings_primed[k][j]

    def others(self, k: int, primed: bool = False):
        """Directions of the non-designated parties in tuple k, party order."""
        src = self.settings_primed[k] if primed else self.settings[k]
        j = self.designated - 1
        return [v for idx, v in enumerate(src) if idx != j]

    def rotated(self, rotation) -> "SettingsEnsemble":
        """Copy with every direction and both frames rotated rigidly.

        The pair structure is rotation covariant, so the copy validates
        whenever the original does.
        """
        r = np.asarray(rotation, dtype=float)
        if r.shape != (3, 3):
            raise ValueError(f"rotation must be a 3x3 matrix, got shape {r.shape}")
        return SettingsEnsemble(
            n_parties=self.n_parties,
            designated=self.designated,
            theta=self.theta,
            settings=[[r @ np.asarray(v) for v in tup] for tup in self.settings],
            settings_primed=[
                [r @ np.asarray(v) for v in tup] for tup in self.settings_primed
            ],
            frames=np.asarray(self.frames) @ r.T,
            frames_primed=np.asarray(self.frames_primed) @ r.T,
        )

    def to_json(self) -> str:
        doc = {
            "format": SETTINGS_FORMAT,
            "n_parties": self.n_parties,
            "designated": self.designated,
            "theta": self.theta,
            "settings": [[[float(x) for x in v] for v in tup] for tup in self.settings],
            "settings_primed": [
                [[float(x) for x in v] for v in tup] for tup in self.settings_primed
            ],
            "frames": [[float(x) for x in row] for row in self.frames],
            "frames_primed": [[float(x) for x in row] for row in self.frames_primed],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SettingsEnsemble":
        doc = json.loads(text)
        if doc.get("format") != SETTINGS_FORMAT:
            raise ValueError(f"unsupported settings document format {doc.get('format')!r}")
        return cls(
            n_parties=int(doc["n_parties"]),
            designated=int(doc["designated"]),
            theta=float(doc["theta"]),
            settings=[[np.array(v, dtype=float) for v in tup] for tup in doc["settings"]],
            settings_primed=[
                [np.array(v, dtype=float) for v in tup] for tup in doc["settings_primed"]
            ],
            frames=np.array(doc["frames"], dtype=float),
            frames_primed=np.array(doc["frames_primed"], dtype=float),
        )


def _azimuth_table(table, n_parties: int, name: str):
    rows = [[float(x) for x in row] for row in table]
    if len(rows) != n_parties - 1 or any(len(row) != 3 for row in rows):
        raise ValueError(f"{name} must have shape ({n_parties - 1}, 3)")
    return rows


def xy_plane_settings(
    n_parties: int,
    designated: int,
    theta,
    azimuths,
    azimuths_primed=None,
) -> SettingsEnsemble:
    """Ensemble with the standard triple at the designated party and x-y
    plane directions everywhere else.

    azimuths[m][k] is the azimuth of the m-th non-designated party (in
    increasing party order) for tuple k; azimuths_primed defaults to the
    same table, which makes the primed tuples reuse the unprimed partner
    directions.
    """
    n = int(n_parties)
    i = int(designated)
    if n < 2:
        raise ValueError(f"need at least 2 parties, got {n_parties}")
    if not 1 <= i <= n:
        raise ValueError(f"designated party must be in [1, {n}], got {designated}")
    t = float(theta)
    if not -PAIR_TOL <= t <= math.pi + PAIR_TOL:
        raise ValueError(f"pair angle must lie in [0, pi], got {theta!r}")
    az = _azimuth_table(azimuths, n, "azimuths")
    azp = az if azimuths_primed is None else _azimuth_table(azimuths_primed, n, "azimuths_primed")
    a, a_primed = designated_triple(t)
    half_pi = math.pi / 2.0
    settings, settings_primed = [], []
    for k in range(3):
        tup, tup_primed = [], []
        m = 0
        for j in range(n):
            if j == i - 1:
                tup.append(a[k])
                tup_primed.append(a_primed[k])
            else:
                tup.append(from_spherical(half_pi, az[m][k]))
                tup_primed.append(from_spherical(half_pi, azp[m][k]))
                m += 1
        settings.append(tup)
        settings_primed.append(tup_primed)
    return SettingsEnsemble(
        n_parties=n,
        designated=i,
        theta=t,
        settings=settings,
        settings_primed=settings_primed,
        frames=FRAME.copy(),
        frames_primed=FRAME_PRIMED.copy(),
    )


def fig1_settings(theta, phi, psi) -> SettingsEnsemble:
    """The explicit tripartite arrangement with free angles (theta, phi, psi).

    Party 1 carries the standard triple. Parties 2 and 3 sit in the x-y
    plane with azimuth tables (phi/2, 0, 0) and (psi/2, pi/2, 0); their
    primed tables are (-phi/2, 0, 0) and (-psi/2, pi/2, pi).
    """
    f, p = float(phi), float(psi)
    half_pi = math.pi / 2.0
    table = [[f / 2.0, 0.0, 0.0], [p / 2.0, half_pi, 0.0]]
    table_primed = [[-f / 2.0, 0.0, 0.0], [-p / 2.0, half_pi, math.pi]]
    return xy_plane_settings(3, 1, theta, table, table_primed)


def bipartite_settings(theta, phi) -> SettingsEnsemble:
    """Two-party arrangement mirroring the tripartite one.

    Party 1 carries the standard triple; party 2 uses azimuths
    (phi/2, pi/2, 0) unprimed and (-phi/2, pi/2, pi) primed.
    """
    f = float(phi)
    half_pi = math.pi / 2.0
    return xy_plane_settings(
        2, 1, theta, [[f / 2.0, half_pi, 0.0]], [[-f / 2.0, half_pi, math.pi]]
    )


def random_xy_settings(
    rng: np.random.Generator, n_parties: int, designated: int | None = None
) -> SettingsEnsemble:
    """Random valid ensemble: random theta, designated party, azimuth tables."""
    n = int(n_parties)
    i = int(designated) if designated is not None else int(rng.integers(1, n + 1))
    theta = float(rng.uniform(0.0, math.pi))
    az = rng.uniform(0.0, 2.0 * math.pi, size=(n - 1, 3))
    azp = rng.uniform(0.0, 2.0 * math.pi, size=(n - 1, 3))
    return xy_plane_settings(n, i, theta, az, azp)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random rotation from the QR factor of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 2] *= -1.0
    return q


@dataclass
class CheckResult:
    name: str
    residual: float
    passed: bool


@dataclass
class ValidationReport:
    checks: list
    degenerate: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def max_residual(self) -> float:
        return max(c.residual for c in self.checks)


def validate_ensemble(s: SettingsEnsemble, tol: float = PAIR_TOL) -> ValidationReport:
    """Check every geometric invariant of an ensemble.

    Structural problems (wrong list lengths, bad indices) raise ValueError;
    numerical problems come back as failed checks with named residuals.
    """
    n = s.n_parties
    if not 1 <= s.designated <= n:
        raise ValueError(f"designated party must be in [1, {n}], got {s.designated}")
    for block, label in ((s.settings, "settings"), (s.settings_primed, "settings_primed")):
        if len(block) != 3 or any(len(tup) != n for tup in block):
            raise ValueError(f"{label} must hold 3 tuples of {n} directions")
    if np.asarray(s.frames).shape != (3, 3) or np.asarray(s.frames_primed).shape != (3, 3):
        raise ValueError("frames must be 3x3 arrays")

    checks: list[CheckResult] = []
    degenerate: list[str] = []

    def add(name: str, residual: float) -> None:
        checks.append(CheckResult(name, float(residual), float(residual) <= tol))

    t = s.theta
    cos_half = math.cos(t / 2.0)
    sin_half = math.sin(t / 2.0)
    if abs(sin_half) <= tol:
        degenerate.append("sin(theta/2) ~ 0: primed frame not recoverable from pair differences")
    if abs(cos_half) <= tol:
        degenerate.append("cos(theta/2) ~ 0: frame not recoverable from pair sums")

    for k in range(3):
        worst_norm = 0.0
        for tup in (s.settings[k], s.settings_primed[k]):
            for v in tup:
                worst_norm = max(worst_norm, abs(float(np.linalg.norm(v)) - 1.0))
        add(f"unit_norms[k={k + 1}]", worst_norm)
        u, u_primed = s.pair(k)
        add(f"pair_angle[k={k + 1}]", abs(float(u @ u_primed) - math.cos(t)))
        add(
            f"pair_sum[k={k + 1}]",
            float(np.linalg.norm(u + u_primed - 2.0 * cos_half * np.asarray(s.frames)[k])),
        )
        add(
            f"pair_diff[k={k + 1}]",
            float(np.linalg.norm(u - u_primed - 2.0 * sin_half * np.asarray(s.frames_primed)[k])),
        )

    f = np.asarray(s.frames, dtype=float)
    fp = np.asarray(s.frames_primed, dtype=float)
    add("frame_orthonormal", float(np.max(np.abs(f @ f.T - np.eye(3)))))
    add("frame_primed_orthonormal", float(np.max(np.abs(fp @ fp.T - np.eye(3)))))
    return ValidationReport(checks=checks, degenerate=degenerate)


def frame_bound_margin(u, frames=FRAME) -> np.ndarray | float:
    """sum_k |u . e_k| - 1, nonnegative for unit u and an orthonormal frame.

    Accepts a single vector or a batch with vectors on the last axis.
    """
    arr = np.asarray(u, dtype=float)
    margin = np.abs(arr @ np.asarray(frames, dtype=float).T).sum(axis=-1) - 1.0
    if margin.ndim == 0:
        return float(margin)
    return margin
