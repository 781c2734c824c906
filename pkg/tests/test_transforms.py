import math

import numpy as np
import pytest

from treeharmonic.errors import Undersampled
from treeharmonic.spectral import gamma, phi_closed
from treeharmonic.transforms import (
    CoefficientSequence,
    TorusSamples,
    abel_coefficients,
    fourier_coefficients,
    lambda_seminorm,
    reconstruct,
    sample_torus,
    schwartz_seminorm,
    spherical_ft,
    strip_seminorm,
    torus_nodes,
)
from treeharmonic.tree_core import RadialProfile, TreeParams, embed_radial, sphere_size


def _delta0(P, R=0):
    v = np.zeros(R + 1)
    v[0] = 1
    return RadialProfile(P, v)


def _sphere1(P):
    return RadialProfile(P, [0.0, 1.0])


def test_torus_nodes(q2):
    s = torus_nodes(q2, 8)
    assert s[0] == pytest.approx(-q2.tau / 2)
    assert np.allclose(np.diff(s), q2.tau / 8)
    with pytest.raises(ValueError):
        torus_nodes(q2, 0)


def test_spherical_ft_examples(q2):
    assert spherical_ft(_delta0(q2), 0.77 + 0.1j) == pytest.approx(1.0)
    assert spherical_ft(_sphere1(q2), 0) == pytest.approx(2 * math.sqrt(2), abs=1e-14)


def test_fourier_coefficients_examples(q2):
    g = sample_torus(q2, lambda s: 2 ** (1j * s) + 2 ** (-1j * s), 8)
    F = fourier_coefficients(g, 3)
    expected = {-1: 1.0, 1: 1.0}
    for n in range(-3, 4):
        assert abs(F[n] - expected.get(n, 0.0)) < 1e-13
    ones = fourier_coefficients(TorusSamples(q2, np.ones(5)), 2)
    assert ones[0] == pytest.approx(1.0) and max(abs(ones[n]) for n in (-2, -1, 1, 2)) < 1e-15
    with pytest.raises(Undersampled):
        fourier_coefficients(g, 4)


def test_fourier_coefficients_brute_force(q2, rng):
    # direct quadrature sum as the oracle for the FFT path
    N, n_max = 11, 5
    vals = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    g = TorusSamples(q2, vals)
    F = fourier_coefficients(g, n_max)
    s = g.nodes
    for n in range(-n_max, n_max + 1):
        direct = np.mean(vals * np.exp(-1j * n * s * q2.log_q))
        assert abs(F[n] - direct) < 1e-13
    assert F.slack is None
    assert fourier_coefficients(TorusSamples(q2, np.ones(12)), 5).slack == pytest.approx(0)


def test_abel_examples(q2, q3):
    F = abel_coefficients(_delta0(q2))
    assert F[0] == pytest.approx(1.0) and F.n_max == 0
    for P in (q2, q3):
        F = abel_coefficients(_sphere1(P))
        assert F[1] == pytest.approx(math.sqrt(P.q), abs=1e-13)
        assert F[-1] == pytest.approx(math.sqrt(P.q), abs=1e-13)
        assert abs(F[0]) < 1e-13
    with pytest.raises(ValueError):
        abel_coefficients(RadialProfile(q2, [1.0, 2.0, 3.0]), 1)


@pytest.mark.parametrize("R", [3, 10, 12])
def test_abel_reconstruction_evenness_support(q2, rng, R):
    f = RadialProfile(q2, rng.standard_normal(R + 1) + 1j * rng.standard_normal(R + 1))
    F = abel_coefficients(f)
    assert F.n_max == R
    assert np.max(np.abs(F.coeffs - F.coeffs[::-1])) < 1e-12 * max(1, np.max(np.abs(F.coeffs)))
    assert abs(F.slack) < 1e-10 * np.max(np.abs(F.coeffs))
    zs = np.concatenate([np.linspace(-4, 4, 17), np.linspace(-4, 4, 9) + 0.3j])
    direct = np.array([spherical_ft(f, z) for z in zs])
    assert np.max(np.abs(reconstruct(q2, F, zs) - direct)) < 1e-10 * np.max(np.abs(direct))


def test_abel_oversampled_support(q2, rng):
    R = 12
    f = RadialProfile(q2, rng.standard_normal(R + 1))
    g = sample_torus(q2, lambda s: spherical_ft(f, s), 4 * R + 4)
    F = fourier_coefficients(g, 2 * R)
    outside = [abs(F[n]) for n in range(-2 * R, 2 * R + 1) if abs(n) > R]
    assert max(outside) < 1e-10 * np.max(np.abs(F.coeffs))


def test_coefficient_sequence():
    F = CoefficientSequence(np.array([1.0, 2.0, 3.0]))
    assert F.n_max == 1 and F[5] == 0 and F[-1] == 1
    with pytest.raises(ValueError):
        CoefficientSequence(np.ones(4))


def test_schwartz_seminorm_examples(q2):
    assert schwartz_seminorm(_delta0(q2, 4), 3, 1.5) == pytest.approx(1.0)
    f = RadialProfile(q2, 2.0 ** -np.arange(11))
    assert schwartz_seminorm(f, 0, 2) == pytest.approx(1.0)
    # ball and profile give the same max
    assert schwartz_seminorm(embed_radial(f), 2, 1.5) == pytest.approx(schwartz_seminorm(f, 2, 1.5))


def test_lambda_seminorm_examples(q2):
    F = CoefficientSequence(np.array([0.0, 1.0, 0.0]))
    for m in range(4):
        assert lambda_seminorm(q2, F, m, 1.5) == pytest.approx(1.0)
    G = CoefficientSequence(np.array([math.sqrt(2), 0.0, math.sqrt(2)]))
    assert lambda_seminorm(q2, G, 1, 2) == pytest.approx(2 * math.sqrt(2))


def test_strip_seminorm_examples(q2):
    one = lambda z: 1.0
    assert strip_seminorm(q2, one, 0, 1.5) == pytest.approx(1.0)
    assert strip_seminorm(q2, one, 2, 1.5) < 1e-12
    g = lambda z: complex(gamma(q2, z))
    assert strip_seminorm(q2, g, 0, 2) == pytest.approx(1 + q2.b, abs=1e-14)
    fhat = lambda z: spherical_ft(_delta0(q2), z)
    assert strip_seminorm(q2, fhat, 1, 1.5) < 1e-12
    with pytest.raises(ValueError):
        strip_seminorm(q2, one, 0, 1.5, grid=32)


def test_strip_seminorm_derivative(q2):
    # d/dz gamma = b log q sin(z log q); on Im z = +-delta the max is b log q cosh(delta log q)
    g = lambda z: complex(gamma(q2, z))
    d = 1 / 6
    est = strip_seminorm(q2, g, 1, 1.5, grid=256)
    exact = q2.b * q2.log_q * math.cosh(d * q2.log_q)
    assert est == pytest.approx(exact, rel=1e-3)


def test_sphere_sizes_enter_ft(q3):
    f = RadialProfile(q3, [0.0, 0.0, 1.0])
    z = 0.5
    assert spherical_ft(f, z) == pytest.approx(sphere_size(q3, 2) * phi_closed(q3, z, 2))
