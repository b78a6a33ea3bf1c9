"""Seed handling and counter-based random streams.

Every random draw in the package flows through a Philox generator keyed by
(seed, stream). Philox is counter-based, so streams derived from the same
seed are independent by construction and results never depend on how work
is split across worker processes.
"""
from __future__ import annotations

import os

import numpy as np

DEFAULT_SEED = 0xC0FFEE
SEED_ENV_VAR = "LEGGETT_LAB_SEED"
_MASK64 = (1 << 64) - 1


def resolve_seed(explicit: int | None = None) -> int:
    """Explicit seed if given, else the environment override, else the default."""
    if explicit is not None:
        return int(explicit)
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is not None:
        try:
            return int(raw, 0)
        except ValueError as exc:
            raise ValueError(f"cannot parse {SEED_ENV_VAR}={raw!r} as an integer") from exc
    return DEFAULT_SEED


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator keyed by (seed, stream); distinct streams never overlap."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sphere_points(rng: np.random.Generator, shape=()) -> np.ndarray:
    """Uniform unit vectors from two uniform deviates per point.

    Returns an array of shape ``shape + (3,)``.
    """
    if isinstance(shape, int):
        shape = (shape,)
    z = rng.uniform(-1.0, 1.0, size=shape)
    azimuth = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([s * np.cos(azimuth), s * np.sin(azimuth), z], axis=-1)
