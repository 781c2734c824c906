import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeharmonic.errors import DegenerateAxis, NearPole, NoSolution
from treeharmonic.operators import laplacian, laplacian_radial
from treeharmonic.spectral import (
    c_func,
    canonical_z,
    conjugate_exponent,
    delta,
    ellipse_residual,
    find_unimodular_pair,
    gamma,
    gamma_printed,
    phi_closed,
    phi_profile,
    phi_recur,
    reduce_z,
    spectrum_membership,
)
from treeharmonic.tree_core import TreeParams, embed_radial


def test_delta_and_conjugate():
    assert delta(2) == 0
    assert delta(1) == 0.5
    assert delta(math.inf) == -0.5
    assert delta(1.5) == pytest.approx(1 / 6)
    assert conjugate_exponent(1.5) == pytest.approx(3.0)
    assert conjugate_exponent(1) == math.inf
    assert conjugate_exponent(math.inf) == 1
    assert delta(conjugate_exponent(1.5)) == pytest.approx(-delta(1.5))


def test_gamma_examples(q2):
    assert complex(gamma(q2, 0)) == pytest.approx(1 - 2 * math.sqrt(2) / 3, abs=1e-15)
    assert complex(gamma(q2, q2.tau / 2)) == pytest.approx(1 + 2 * math.sqrt(2) / 3, abs=1e-14)
    assert complex(gamma(q2, 0.5j)) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 6),
    st.floats(-20, 20),
    st.floats(-1, 1),
)
def test_gamma_forms_agree_and_periodic(q, s, t):
    P = TreeParams(q)
    z = complex(s, t)
    g = complex(gamma(P, z))
    assert abs(g - complex(gamma_printed(P, z))) < 1e-12
    assert abs(g - complex(gamma(P, z + P.tau))) < 1e-11
    assert abs(g - complex(gamma(P, -z))) < 1e-12


def test_reduce_and_canonical(q2):
    tau = q2.tau
    z = reduce_z(q2, 3.3 * tau + 0.2j)
    assert -tau / 2 < z.real <= tau / 2
    c = canonical_z(q2, -0.4 - 0.1j)
    assert c.real >= 0
    assert complex(gamma(q2, c)) == pytest.approx(complex(gamma(q2, -0.4 - 0.1j)))


def test_c_function_pole(q2):
    with pytest.raises(NearPole):
        c_func(q2, 0)
    with pytest.raises(NearPole):
        c_func(q2, q2.tau / 2)
    # c(z) + c(-z) = 1 recovers phi(0) = 1
    z = 0.37 + 0.11j
    assert c_func(q2, z) + c_func(q2, -z) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("z", [0.3, 0.3 + 0.2j, 0.5j, 1.7 - 0.4j, 0.0, None, 2e-5, 1e-10])
def test_phi_closed_matches_recurrence(q, z):
    P = TreeParams(q)
    if z is None:
        z = P.tau / 2
    n = np.arange(41)
    closed = phi_closed(P, z, n)
    rec = phi_recur(P, z, 40).values
    scale = np.maximum(1.0, np.abs(rec))
    assert np.max(np.abs(closed - rec) / scale) < 1e-10


def test_phi_examples(q2):
    assert phi_closed(q2, 0.7, 0) == pytest.approx(1.0, abs=1e-15)
    assert phi_closed(q2, 0.5j, 1) == pytest.approx(1.0)  # gamma = 0 gives constant 1
    assert phi_closed(q2, 0.5j, 7) == pytest.approx(1.0)
    # degenerate branch at z = 0
    assert phi_closed(q2, 0, 4) == pytest.approx((1 / 3 * 4 + 1) * 2 ** -2)
    # tau/2 branch alternates
    assert phi_closed(q2, q2.tau / 2, 3) == pytest.approx(-(1 / 3 * 3 + 1) * 2 ** -1.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 10), st.floats(-0.6, 0.6))
def test_phi_is_eigenfunction(s, t):
    P = TreeParams(2)
    z = complex(s, t)
    g = complex(gamma(P, z))
    prof = phi_profile(P, z, 10)
    res = laplacian_radial(prof).values - g * prof.values[:-1]
    assert np.max(np.abs(res)) < 1e-9 * max(1.0, np.max(np.abs(prof.values)))


def test_phi_radial_embedding_is_ball_eigenfunction(q3):
    z = 0.4 + 0.1j
    f = embed_radial(phi_profile(q3, z, 6))
    Lf = laplacian(f)
    assert np.max(np.abs(Lf.values - complex(gamma(q3, z)) * f.values[: Lf.values.size])) < 1e-13


def test_phi_symmetries(q2):
    for z in (0.3 + 0.1j, 1.1 - 0.3j):
        a = phi_closed(q2, z, np.arange(12))
        assert np.allclose(a, phi_closed(q2, -z, np.arange(12)), atol=1e-13)
        assert np.allclose(a, phi_closed(q2, z + q2.tau, np.arange(12)), atol=1e-12)


def test_ellipse_examples(q2):
    p = 1.5
    d = delta(p)
    L = q2.log_q
    right = 1 + q2.b * math.cosh(d * L)
    top = 1 + 1j * q2.b * math.sinh(d * L)
    assert abs(float(ellipse_residual(q2, right, p))) < 1e-14
    assert abs(float(ellipse_residual(q2, top, p))) < 1e-14
    assert spectrum_membership(q2, 1.0, p)[0]
    assert not spectrum_membership(q2, 3.0, p)[0]
    with pytest.raises(DegenerateAxis):
        ellipse_residual(q2, 1.0, 2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 9.1), st.sampled_from([1.0, 1.25, 1.5, 3.0, math.inf]))
def test_strip_boundary_maps_to_ellipse(s, p):
    P = TreeParams(2)
    d = delta(p)
    w = complex(gamma(P, complex(s, d)))
    assert abs(float(ellipse_residual(P, w, p))) < 1e-10


def test_segment_at_p2(q2):
    assert spectrum_membership(q2, 1 - q2.b, 2)[0]
    assert spectrum_membership(q2, 1 + q2.b, 2)[0]
    assert not spectrum_membership(q2, 1 + q2.b + 1e-6, 2)[0]
    assert not spectrum_membership(q2, 1 + 1e-6j, 2)[0]


def test_unimodular_pair_unit_modulus(q2):
    z1, z2 = find_unimodular_pair(q2, 1.0, 1.0)
    g1, g2 = complex(gamma(q2, z1.z)), complex(gamma(q2, z2.z))
    assert abs(abs(g1) - 1) < 1e-12 and abs(abs(g2) - 1) < 1e-12
    assert abs(g1 - g2) > 1e-3
    for zz in (z1.z, z2.z):
        assert 0 <= zz.imag <= 0.5 + 1e-15


@pytest.mark.parametrize("modulus", [0.5, 0.9, 1.2, 1.5])
def test_unimodular_pair_annulus(q2, modulus):
    z1, z2 = find_unimodular_pair(q2, modulus, 1.5)
    for zz in (z1.z, z2.z):
        assert abs(abs(complex(gamma(q2, zz))) - modulus) < 1e-12
        assert zz.imag <= abs(delta(3.0)) + 1e-15


def test_unimodular_pair_failures(q2):
    with pytest.raises(NoSolution):
        find_unimodular_pair(q2, 1.0, 2)
    with pytest.raises(NoSolution):
        find_unimodular_pair(q2, 5.0, 1.5)
    with pytest.raises(NoSolution):
        find_unimodular_pair(q2, 0.0, 1.5)


def test_phi_first_shell(q2):
    z = 0.6 + 0.2j
    assert phi_closed(q2, z, 1) == pytest.approx(1 - complex(gamma(q2, z)))
    assert cmath.isfinite(phi_closed(q2, z, 200))


def test_quarter_period_values(q2):
    z = q2.tau / 4
    assert complex(gamma(q2, z)) == pytest.approx(1.0, abs=1e-15)
    assert complex(gamma_printed(q2, z)) == pytest.approx(1.0, abs=1e-15)
    assert c_func(q2, z) == pytest.approx(0.5, abs=1e-15)
    c8 = c_func(q2, q2.tau / 8)
    assert c_func(q2, -q2.tau / 8) == pytest.approx(c8.conjugate(), abs=1e-15)


def test_branch_examples(q2):
    assert phi_closed(q2, 0, 1) == pytest.approx(4 / 3 * 2**-0.5, abs=1e-15)
    assert phi_closed(q2, q2.tau / 2, 2) == pytest.approx(5 / 6, abs=1e-15)
    assert phi_recur(q2, 0, 1).values[1] == pytest.approx(q2.b, abs=1e-15)
    assert phi_recur(q2, q2.tau / 2, 2).values[2] == pytest.approx(5 / 6, abs=1e-15)


def test_unimodular_pair_anchored_at_quarter_period(q2):
    z1, z2 = find_unimodular_pair(q2, 1.0, 1.0)
    assert z1.z == pytest.approx(q2.tau / 4, abs=1e-12)
    assert z2.z.imag == 0.25
    assert complex(gamma(q2, z2.z)) != pytest.approx(1.0, abs=1e-6)


def test_unimodular_pair_annulus_boundary(q2):
    lower = complex(gamma(q2, 1j * abs(delta(3.0)))).real
    with pytest.raises(NoSolution):
        find_unimodular_pair(q2, lower, 1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 9.1), st.floats(-0.5, 0.5), st.integers(0, 60))
def test_phi_bounded_on_closed_strip(s, t, n):
    P = TreeParams(2)
    assert abs(phi_closed(P, complex(s, t), n)) <= 1 + 1e-10
