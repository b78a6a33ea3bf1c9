import numpy as np
import pytest

from leggett_lab import make_rng


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def rng2():
    # independent stream for tests that need two generators
    return make_rng(1234, stream=1)


def assert_unit_rows(arr, tol=1e-12):
    norms = np.linalg.norm(np.asarray(arr, dtype=float), axis=-1)
    assert np.max(np.abs(norms - 1.0)) <= tol
