"""Combinatorial geometry of the homogeneous tree of degree q+1.

Vertices are addressed by non-backtracking words: the first letter takes one
of q+1 values, every later letter one of q values, and the empty word is the
root o. A word of length n is also used as a *ray prefix*: the cylinder of
boundary rays passing through that vertex.

Functions on a ball B_R are stored as flat arrays in canonical order: the
root, then each sphere in increasing radius, lexicographic within a sphere.
With this order the children of the i-th vertex of sphere n (n >= 1) are
the consecutive slots ``q*i .. q*i + q - 1`` of sphere n+1, so most
operations reduce to reshapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .errors import PrefixTooShort

Word = tuple[int, ...]

__all__ = [
    "TreeParams",
    "BallFunction",
    "RadialProfile",
    "sphere_size",
    "ball_size",
    "sphere_offsets",
    "validate_word",
    "enumerate_sphere",
    "enumerate_ball",
    "vertex_index",
    "distance",
    "common_prefix_length",
    "height",
    "cylinder_measure",
    "cylinder_measure_exact",
    "radialize",
    "embed_radial",
]


@dataclass(frozen=True)
class TreeParams:
    """Branching parameter of the tree; every vertex has q+1 neighbours."""

    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    @property
    def tau(self) -> float:
        """Spectral period 2*pi/log q."""
        return 2.0 * math.pi / math.log(self.q)

    @property
    def b(self) -> float:
        return 2.0 * math.sqrt(self.q) / (self.q + 1)


def sphere_size(params: TreeParams, n: int) -> int:
    if n < 0:
        raise ValueError("radius must be non-negative")
    if n == 0:
        return 1
    return (params.q + 1) * params.q ** (n - 1)


def ball_size(params: TreeParams, R: int) -> int:
    if R < 0:
        raise ValueError("radius must be non-negative")
    q = params.q
    return 1 + (q + 1) * (q**R - 1) // (q - 1)


def sphere_offsets(params: TreeParams, R: int) -> np.ndarray:
    """Start index of each sphere 0..R in canonical order, plus the total."""
    sizes = [sphere_size(params, n) for n in range(R + 1)]
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def validate_word(params: TreeParams, word: Sequence[int]) -> Word:
    word = tuple(int(a) for a in word)
    for i, a in enumerate(word):
        hi = params.q if i == 0 else params.q - 1
        if not 0 <= a <= hi:
            raise ValueError(f"letter {a} at position {i} out of range 0..{hi}")
    return word


def enumerate_sphere(params: TreeParams, n: int) -> list[Word]:
    if n == 0:
        return [()]
    return [
        (a,) + rest
        for a in range(params.q + 1)
        for rest in product(range(params.q), repeat=n - 1)
    ]


def enumerate_ball(params: TreeParams, R: int) -> list[Word]:
    words: list[Word] = []
    for n in range(R + 1):
        words.extend(enumerate_sphere(params, n))
    return words


def vertex_index(params: TreeParams, word: Sequence[int]) -> int:
    """Position of ``word`` in the canonical order of any ball containing it."""
    n = len(word)
    if n == 0:
        return 0
    idx = 0
    for a in word:
        idx = idx * params.q + a
    # first letter has weight q**(n-1), which the Horner loop already gives
    return ball_size(params, n - 1) + idx


def common_prefix_length(x: Sequence[int], y: Sequence[int]) -> int:
    c = 0
    for a, b in zip(x, y):
        if a != b:
            break
        c += 1
    return c


def distance(x: Sequence[int], y: Sequence[int]) -> int:
    return len(x) + len(y) - 2 * common_prefix_length(x, y)


def height(x: Sequence[int], omega: Sequence[int]) -> int:
    """Horocycle index of ``x`` relative to the ray through prefix ``omega``."""
    if len(omega) < len(x):
        raise PrefixTooShort(
            f"prefix depth {len(omega)} is shorter than |x| = {len(x)}"
        )
    return 2 * common_prefix_length(x, omega) - len(x)


def cylinder_measure_exact(params: TreeParams, omega: Sequence[int]) -> Fraction:
    n = len(omega)
    if n == 0:
        return Fraction(1)
    return Fraction(1, (params.q + 1) * params.q ** (n - 1))


def cylinder_measure(params: TreeParams, omega: Sequence[int]) -> float:
    return float(cylinder_measure_exact(params, omega))


@dataclass(frozen=True, eq=False)
class BallFunction:
    """Complex function on the ball B_radius, one value per vertex."""

    params: TreeParams
    radius: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.size != ball_size(self.params, self.radius):
            raise ValueError(
                f"expected {ball_size(self.params, self.radius)} values, got {vals.size}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, params: TreeParams, radius: int, fn) -> "BallFunction":
        """Sample ``fn(word)`` at every vertex of the ball."""
        vals = [fn(w) for w in enumerate_ball(params, radius)]
        return cls(params, radius, np.array(vals, dtype=complex))

    def sphere(self, n: int) -> np.ndarray:
        off = sphere_offsets(self.params, self.radius)
        return self.values[off[n] : off[n + 1]]

    def __getitem__(self, word: Sequence[int]) -> complex:
        return complex(self.values[vertex_index(self.params, word)])

    def restrict(self, radius: int) -> "BallFunction":
        if radius > self.radius:
            raise ValueError("cannot restrict to a larger ball")
        return BallFunction(
            self.params, radius, self.values[: ball_size(self.params, radius)]
        )

    def __add__(self, other: "BallFunction") -> "BallFunction":
        return BallFunction(self.params, self.radius, self.values + other.values)

    def __sub__(self, other: "BallFunction") -> "BallFunction":
        return BallFunction(self.params, self.radius, self.values - other.values)

    def __mul__(self, c) -> "BallFunction":
        return BallFunction(self.params, self.radius, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function f(x) = values[|x|] for |x| <= len(values) - 1."""

    params: TreeParams
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.size == 0:
            raise ValueError("radial profile needs at least one value")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def radius(self) -> int:
        return self.values.size - 1

    def multiplicities(self) -> np.ndarray:
        """Sphere cardinalities as floats (safe for radii in the hundreds)."""
        q = float(self.params.q)
        n = np.arange(self.values.size, dtype=float)
        m = (q + 1.0) * q ** (n - 1.0)
        m[0] = 1.0
        return m

    def restrict(self, radius: int) -> "RadialProfile":
        return RadialProfile(self.params, self.values[: radius + 1])

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        return RadialProfile(self.params, self.values + other.values)

    def __sub__(self, other: "RadialProfile") -> "RadialProfile":
        return RadialProfile(self.params, self.values - other.values)

    def __mul__(self, c) -> "RadialProfile":
        return RadialProfile(self.params, self.values * c)

    __rmul__ = __mul__


@lru_cache(maxsize=64)
def _sphere_counts(q: int, R: int) -> tuple[int, ...]:
    return tuple(sphere_size(TreeParams(q), n) for n in range(R + 1))


def radialize(f: BallFunction) -> RadialProfile:
    """Average of f over each sphere centred at the root."""
    counts = _sphere_counts(f.params.q, f.radius)
    out = np.add.reduceat(f.values, sphere_offsets(f.params, f.radius)[:-1])
    return RadialProfile(f.params, out / np.asarray(counts, dtype=float))


def embed_radial(profile: RadialProfile, radius: int | None = None) -> BallFunction:
    """Materialize a radial profile on B_radius (default: its full radius)."""
    R = profile.radius if radius is None else radius
    if R > profile.radius:
        raise ValueError("profile too short for requested radius")
    counts = _sphere_counts(profile.params.q, R)
    return BallFunction(profile.params, R, np.repeat(profile.values[: R + 1], counts))
