from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeharmonic.errors import PrefixTooShort
from treeharmonic.tree_core import (
    BallFunction,
    RadialProfile,
    TreeParams,
    ball_size,
    cylinder_measure,
    cylinder_measure_exact,
    distance,
    embed_radial,
    enumerate_ball,
    enumerate_sphere,
    height,
    radialize,
    sphere_size,
    validate_word,
    vertex_index,
)

from conftest import ExplicitBall, word_graph


def test_params_constants(q2):
    assert q2.tau == pytest.approx(2 * np.pi / np.log(2))
    assert q2.b == pytest.approx(2 * np.sqrt(2) / 3)
    assert 0 < q2.b < 1
    with pytest.raises(ValueError):
        TreeParams(1)


@pytest.mark.parametrize("q,n,expected", [(2, 0, 1), (2, 3, 12), (3, 2, 12)])
def test_sphere_size_examples(q, n, expected):
    assert sphere_size(TreeParams(q), n) == expected
    ball = ExplicitBall(q, max(n, 1))
    assert sum(1 for d in ball.depth.values() if d == n) == expected


@pytest.mark.parametrize("q,R,expected", [(2, 0, 1), (2, 2, 10), (2, 14, 49150)])
def test_ball_size_examples(q, R, expected):
    P = TreeParams(q)
    assert ball_size(P, R) == expected
    assert ball_size(P, R) == sum(sphere_size(P, n) for n in range(R + 1))


def test_ball_size_enumeration_oracle():
    for q in (2, 3, 4):
        for R in range(5):
            assert ball_size(TreeParams(q), R) == len(ExplicitBall(q, R).depth)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_sphere_growth(q):
    P = TreeParams(q)
    for n in range(1, 12):
        assert sphere_size(P, n + 1) == q * sphere_size(P, n)


def test_enumeration_is_canonical(q2):
    words = enumerate_ball(q2, 4)
    assert words[0] == ()
    assert len(words) == len(set(words)) == ball_size(q2, 4)
    assert [len(w) for w in words] == sorted(len(w) for w in words)
    for n in range(1, 5):
        sphere = enumerate_sphere(q2, n)
        assert sphere == sorted(sphere)
    for i, w in enumerate(words):
        assert vertex_index(q2, w) == i


def test_validate_word(q2):
    assert validate_word(q2, [2, 1, 0]) == (2, 1, 0)
    with pytest.raises(ValueError):
        validate_word(q2, [0, 2])
    with pytest.raises(ValueError):
        validate_word(q2, [3])


def test_distance_examples(q2):
    assert distance((), ()) == 0
    assert distance((1, 0, 1), ()) == 3
    assert distance((0, 1), (0, 0, 1)) == 3


def test_distance_matches_bfs(q2):
    words, index, adj = word_graph(q2, 4)
    from collections import deque

    for src in [(), (0,), (2, 1), (1, 0, 1)]:
        s = index[src]
        dist = {s: 0}
        dq = deque([s])
        while dq:
            v = dq.popleft()
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    dq.append(w)
        for w, i in index.items():
            assert distance(src, w) == dist[i]


def _limit_height(x, omega, n):
    # n - d(x, omega_n) with omega_n the depth-n vertex on the ray
    return n - distance(x, omega[:n])


def test_height_examples(q2):
    omega = (0, 1, 1, 0, 1, 0, 0, 1, 1, 0)
    assert height((), omega) == 0
    assert height(omega[:3], omega) == 3
    assert _limit_height(omega[:3], omega, 10) == 3
    x = (0, 0, 1)  # confluence depth 1 with omega
    assert height(x, omega) == -1
    assert _limit_height(x, omega, 10) == -1
    with pytest.raises(PrefixTooShort):
        height((0, 1, 1), (0, 1))


def test_height_telescoping(q2):
    # neighbours of x: toward omega +1, every other neighbour -1
    words, index, adj = word_graph(q2, 7)
    rays = [(a,) + tuple(rest) for a in range(3) for rest in np.ndindex(*(2,) * 7)]
    for x in enumerate_ball(q2, 6):
        for omega in rays[::7]:
            h = height(x, omega)
            toward = omega[: len(x) + 1] if omega[: len(x)] == x else x[:-1]
            for j in adj[index[x]]:
                y = words[j]
                expected = h + 1 if y == toward else h - 1
                assert height(y, omega) == expected


def test_cylinder_measure(q2):
    assert cylinder_measure(q2, ()) == 1.0
    assert cylinder_measure_exact(q2, (0,)) == Fraction(1, 3)
    assert cylinder_measure_exact(q2, (0, 1)) == Fraction(1, 6)
    kids = [cylinder_measure_exact(q2, (1, j)) for j in range(2)]
    assert sum(kids) == cylinder_measure_exact(q2, (1,))


@pytest.mark.parametrize("q", [2, 3])
def test_cylinder_partition_sums_to_one(q):
    P = TreeParams(q)
    for D in range(0, 6):
        assert sum(cylinder_measure_exact(P, w) for w in enumerate_sphere(P, D)) == 1


def test_radialize_examples(q2, rng):
    prof = RadialProfile(q2, rng.standard_normal(5))
    assert np.allclose(radialize(embed_radial(prof)).values, prof.values)

    vals = np.zeros(ball_size(q2, 3))
    vals[vertex_index(q2, (2, 1))] = 1.0
    out = radialize(BallFunction(q2, 3, vals)).values
    assert out[2] == pytest.approx(1 / 6)
    assert np.all(np.delete(out, 2) == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_radialize_projection_linear_contractive(R, seed):
    P = TreeParams(2)
    r = np.random.default_rng(seed)
    n = ball_size(P, R)
    f = BallFunction(P, R, r.standard_normal(n) + 1j * r.standard_normal(n))
    g = BallFunction(P, R, r.standard_normal(n))
    rf = radialize(f)
    assert np.allclose(radialize(embed_radial(rf)).values, rf.values, atol=1e-14)
    lin = radialize(f * 2.0 + g * (-3.0)).values
    assert np.allclose(lin, 2 * rf.values - 3 * radialize(g).values, atol=1e-12)
    assert np.max(np.abs(rf.values)) <= np.max(np.abs(f.values)) + 1e-14


def test_ball_function_validation(q2):
    with pytest.raises(ValueError):
        BallFunction(q2, 2, np.zeros(5))
    f = BallFunction(q2, 2, np.arange(10.0))
    assert f[(1, 0)] == vertex_index(q2, (1, 0))
    assert f.sphere(1).tolist() == [1, 2, 3]
