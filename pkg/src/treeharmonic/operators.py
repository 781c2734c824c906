"""Laplacians (ball, radial, lattice) and the Poisson transform.

Boundary data are piecewise constant on the depth-D cylinders, so the
Poisson integral is an exact finite sum whenever D >= |x|.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DepthTooShallow, EmptyInterior
from .tree_core import (
    BallFunction,
    RadialProfile,
    TreeParams,
    ball_size,
    common_prefix_length,
    cylinder_measure_exact,
    enumerate_sphere,
    sphere_offsets,
    sphere_size,
)

__all__ = [
    "BoundaryData",
    "LatticeFunction",
    "laplacian",
    "laplacian_radial",
    "laplacian_iter",
    "refine",
    "random_boundary_data",
    "poisson",
    "poisson_field",
    "laplacian_lattice",
]


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Function on the boundary, constant on each depth-D cylinder."""

    params: TreeParams
    depth: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("boundary depth must be >= 1")
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        expected = sphere_size(self.params, self.depth)
        if vals.size != expected:
            raise ValueError(f"expected {expected} cylinder values, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, params: TreeParams, depth: int, value: complex = 1.0):
        return cls(params, depth, np.full(sphere_size(params, depth), value, dtype=complex))

    @classmethod
    def indicator(cls, params: TreeParams, prefix: Sequence[int], depth: int | None = None):
        """Indicator of the cylinder through ``prefix``, stored at ``depth``."""
        D = len(prefix) if depth is None else depth
        if D < len(prefix):
            raise ValueError("depth must be at least the prefix length")
        words = enumerate_sphere(params, D)
        prefix = tuple(prefix)
        vals = [1.0 if w[: len(prefix)] == prefix else 0.0 for w in words]
        return cls(params, D, np.array(vals, dtype=complex))


def refine(eta: BoundaryData, depth: int) -> BoundaryData:
    """Copy each cylinder value onto its descendants at ``depth``."""
    if depth < eta.depth:
        raise ValueError("refinement cannot reduce depth")
    reps = eta.params.q ** (depth - eta.depth)
    return BoundaryData(eta.params, depth, np.repeat(eta.values, reps))


def random_boundary_data(params: TreeParams, depth: int, rng: np.random.Generator) -> BoundaryData:
    """Values uniform on the complex unit disk."""
    n = sphere_size(params, depth)
    r = np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return BoundaryData(params, depth, r * np.exp(1j * theta))


def laplacian(f: BallFunction) -> BallFunction:
    """Lf(x) = f(x) - mean of f over the q+1 neighbours, on B_{R-1}."""
    R = f.radius
    if R < 1:
        raise EmptyInterior("ball of radius 0 has no interior")
    q = f.params.q
    off = sphere_offsets(f.params, R)
    out = np.empty(ball_size(f.params, R - 1), dtype=complex)
    v = f.values
    out[0] = v[0] - v[off[1] : off[2]].sum() / (q + 1)
    for n in range(1, R):
        cur = v[off[n] : off[n + 1]]
        parents = v[off[n - 1] : off[n]]
        if n == 1:
            parent_vals = np.repeat(parents, q + 1)
        else:
            parent_vals = np.repeat(parents, q)
        child_sums = v[off[n + 1] : off[n + 2]].reshape(cur.size, q).sum(axis=1)
        out[off[n] : off[n + 1]] = cur - (parent_vals + child_sums) / (q + 1)
    return BallFunction(f.params, R - 1, out)


def laplacian_radial(f: RadialProfile) -> RadialProfile:
    """Laplacian restricted to radial functions: one parent, q children."""
    v = f.values
    if v.size < 2:
        raise EmptyInterior("radial profile needs at least two radii")
    q = f.params.q
    out = np.empty(v.size - 1, dtype=complex)
    out[0] = v[0] - v[1]
    out[1:] = v[1:-1] - (v[:-2] + q * v[2:]) / (q + 1)
    return RadialProfile(f.params, out)


Radialish = Union[BallFunction, RadialProfile]


def laplacian_iter(f: Radialish, k: int) -> Radialish:
    if k < 0:
        raise ValueError("k must be non-negative")
    if f.radius < k:
        raise EmptyInterior(f"radius {f.radius} too small for {k} applications")
    step = laplacian if isinstance(f, BallFunction) else laplacian_radial
    for _ in range(k):
        f = step(f)
    return f


def _kernel(params: TreeParams, z: complex, h) -> np.ndarray:
    return np.exp((0.5 + 1j * complex(z)) * params.log_q * np.asarray(h, dtype=float))


def poisson(
    params: TreeParams,
    z: complex,
    eta: BoundaryData,
    x: Sequence[int],
    auto_refine: bool = True,
) -> complex:
    """Poisson transform of eta at vertex x, summed cylinder by cylinder."""
    x = tuple(x)
    if eta.depth < len(x):
        if not auto_refine:
            raise DepthTooShallow(f"boundary depth {eta.depth} < |x| = {len(x)}")
        eta = refine(eta, len(x))
    words = enumerate_sphere(params, eta.depth)
    nu = float(cylinder_measure_exact(params, words[0]))
    h = np.array([2 * common_prefix_length(x, w) - len(x) for w in words])
    terms = _kernel(params, z, h) * eta.values * nu
    total = 0j
    for t in terms:
        total += t
    return complex(total)


def _cylinder_masses(eta: BoundaryData, R: int) -> list[np.ndarray]:
    """Integral of eta over the cylinder of every vertex on spheres 0..R."""
    q = eta.params.q
    D = eta.depth
    nu = float(cylinder_measure_exact(eta.params, (0,) * D))
    masses = [None] * (D + 1)
    masses[D] = eta.values * nu
    for n in range(D - 1, 0, -1):
        masses[n] = masses[n + 1].reshape(-1, q).sum(axis=1)
    masses[0] = masses[1].sum(keepdims=True)
    return masses[: R + 1]


def poisson_field(
    params: TreeParams,
    z: complex,
    eta: BoundaryData,
    R: int,
    auto_refine: bool = True,
) -> BallFunction:
    """Poisson transform of eta on the whole ball B_R.

    Cylinders under the ancestor x_c of x but not under x_{c+1} meet x at
    confluence depth c, so P(x) = sum_c k(2c - n) [M(x_c) - M(x_{c+1})]
    where M is the cylinder mass. This is the same finite sum as
    :func:`poisson`, grouped by confluence depth.
    """
    if eta.depth < R:
        if not auto_refine:
            raise DepthTooShallow(f"boundary depth {eta.depth} < R = {R}")
        eta = refine(eta, R)
    q = params.q
    masses = _cylinder_masses(eta, R)
    out = [masses[0].astype(complex) * 1.0]
    for n in range(1, R + 1):
        size = masses[n].size
        idx = np.arange(size)
        acc = np.zeros(size, dtype=complex)
        prev_mass = None
        # walk ancestors from x itself (c = n) down to the root (c = 0)
        for c in range(n, -1, -1):
            if c == n:
                anc = idx
            elif c == 0:
                anc = np.zeros(size, dtype=np.int64)
            else:
                anc = idx // q ** (n - c)
            m = masses[c][anc]
            shell = m if prev_mass is None else m - prev_mass
            acc += _kernel(params, z, 2 * c - n) * shell
            prev_mass = m
        out.append(acc)
    return BallFunction(params, R, np.concatenate(out))


@dataclass(frozen=True, eq=False)
class LatticeFunction:
    """Values on the box prod_i [lo_i, lo_i + shape_i - 1] of Z^d."""

    lo: tuple[int, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != len(self.lo):
            raise ValueError("dimension of lo and values disagree")
        if vals.size == 0:
            raise ValueError("window must be nonempty")
        object.__setattr__(self, "lo", tuple(int(a) for a in self.lo))
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def hi(self) -> tuple[int, ...]:
        return tuple(a + s - 1 for a, s in zip(self.lo, self.values.shape))

    @classmethod
    def from_callable(cls, lo: Sequence[int], hi: Sequence[int], fn) -> "LatticeFunction":
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        grids = np.meshgrid(*axes, indexing="ij")
        return cls(tuple(lo), np.asarray(fn(*grids), dtype=complex))

    def points(self) -> list[np.ndarray]:
        axes = [np.arange(a, b + 1) for a, b in zip(self.lo, self.hi)]
        return np.meshgrid(*axes, indexing="ij")


def laplacian_lattice(d: int, f: LatticeFunction) -> LatticeFunction:
    """Lf(m) = f(m) - (1/2d) sum over the 2d lattice neighbours."""
    if d != f.dim:
        raise ValueError(f"dimension {d} does not match function on Z^{f.dim}")
    if any(s < 3 for s in f.values.shape):
        raise EmptyInterior("window too small to shrink by one on each side")
    v = f.values
    inner = tuple(slice(1, -1) for _ in range(d))
    acc = np.zeros_like(v[inner])
    for axis in range(d):
        for shift in (0, 2):
            sl = list(inner)
            sl[axis] = slice(shift, v.shape[axis] - 2 + shift)
            acc += v[tuple(sl)]
    return LatticeFunction(tuple(a + 1 for a in f.lo), v[inner] - acc / (2 * d))
