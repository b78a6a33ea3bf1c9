import math

import numpy as np
import pytest

from leggett_lab import (
    correlation_bruteforce,
    from_spherical,
    ghz_correlation_closed,
    ghz_correlation_vectors,
    ghz_correlator,
    ghz_density,
    ghz_reduced_correlation,
    partial_trace,
    sphere_points,
)
from leggett_lab.ghzform import ghz_correlation_xy, tripartite_correlators


def random_angles(rng, n):
    polar = rng.uniform(0.0, math.pi, size=n)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.stack([polar, azimuth], axis=1)


def dirs_from(angles):
    return [from_spherical(p, a) for p, a in angles]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_closed_equals_vectors(n, rng):
    for _ in range(40):
        angles = random_angles(rng, n)
        closed = ghz_correlation_closed(n, angles)
        vectors = ghz_correlation_vectors(dirs_from(angles))
        assert abs(closed - vectors) < 1e-13


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_equals_bruteforce(n, rng):
    rho = ghz_density(n)
    for _ in range(25):
        angles = random_angles(rng, n)
        closed = ghz_correlation_closed(n, angles)
        brute = correlation_bruteforce(rho, dirs_from(angles))
        assert abs(closed - brute) < 1e-12


def test_xy_route_is_cosine_of_azimuth_sum(rng):
    for n in (2, 3, 4):
        az = rng.uniform(0.0, 2.0 * math.pi, size=n)
        angles = np.stack([np.full(n, math.pi / 2.0), az], axis=1)
        assert abs(ghz_correlation_xy(n, az) - math.cos(az.sum())) < 1e-14
        assert abs(ghz_correlation_closed(n, angles) - math.cos(az.sum())) < 1e-13


def test_even_n_has_z_product_term():
    # all parties along z: even N gives +1, odd N gives 0
    z = [0.0, 0.0, 1.0]
    assert abs(ghz_correlation_vectors([z, z]) - 1.0) < 1e-15
    assert abs(ghz_correlation_vectors([z, z, z])) < 1e-15
    assert abs(ghz_correlation_vectors([z, z, z, z]) - 1.0) < 1e-15


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reduced_closed_equals_partial_trace(n, rng):
    red = partial_trace(ghz_density(n), n)
    for _ in range(25):
        dirs = sphere_points(rng, (n - 1,))
        closed = ghz_reduced_correlation(n, dirs)
        brute = correlation_bruteforce(red, dirs)
        assert abs(closed - brute) < 1e-12


def test_reduced_parity_structure(rng):
    dirs = sphere_points(rng, (3,))
    # even total party count: reduced correlator vanishes identically
    assert ghz_reduced_correlation(4, dirs) == 0.0
    # odd: product of z components survives the dephasing
    got = ghz_reduced_correlation(5, sphere_points(rng, (4,)))
    assert -1.0 <= got <= 1.0


def test_reduced_direction_count():
    with pytest.raises(ValueError):
        ghz_reduced_correlation(3, [[0, 0, 1], [0, 0, 1], [0, 0, 1]])


def test_correlator_factory_dispatch(rng):
    corr = ghz_correlator(3)
    full_dirs = sphere_points(rng, (3,))
    rest_dirs = full_dirs[:2]
    assert abs(corr(full_dirs) - ghz_correlation_vectors(full_dirs)) == 0.0
    assert abs(corr(rest_dirs) - ghz_reduced_correlation(3, rest_dirs)) == 0.0
    with pytest.raises(ValueError):
        corr(sphere_points(rng, (5,)))


def test_tripartite_correlators_match_vectors():
    theta, s1, s2 = 0.7, 1.3, -0.4
    got = tripartite_correlators(theta, (s1, 0.2, s2), (s1 + 0.1, 0.2, s2))
    # first unprimed tuple: designated xy azimuth theta/2, other azimuths
    # adding up to s1/2 (s1 is the sum of the doubled azimuths)
    d1 = from_spherical(math.pi / 2.0, theta / 2.0)
    o1 = from_spherical(math.pi / 2.0, s1 / 2.0)
    o2 = from_spherical(math.pi / 2.0, 0.0)
    direct = ghz_correlation_vectors([d1, o1, o2])
    assert abs(got.c1 - direct) < 1e-13
    # third tuple: designated direction tilted off the plane by theta/2
    d3 = from_spherical(theta / 2.0, 0.0)
    o3 = from_spherical(math.pi / 2.0, s2 / 2.0)
    direct3 = ghz_correlation_vectors([d3, o3, o2])
    assert abs(got.c3 - direct3) < 1e-13
