"""Spherical Fourier transform, torus quadrature and the Abel coefficients.

For a radial f supported in B_R the transform z -> f^(z) is a trigonometric
polynomial in q^{iz} of degree R, so its torus Fourier coefficients (the
Abel coefficients) are recovered exactly from 2R+2 equispaced samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import Undersampled
from .spectral import delta, phi_closed
from .tree_core import BallFunction, RadialProfile, TreeParams, sphere_size

__all__ = [
    "TorusSamples",
    "CoefficientSequence",
    "torus_nodes",
    "sample_torus",
    "spherical_ft",
    "fourier_coefficients",
    "abel_coefficients",
    "reconstruct",
    "schwartz_seminorm",
    "lambda_seminorm",
    "strip_seminorm",
]


def torus_nodes(params: TreeParams, N: int) -> np.ndarray:
    """s_j = -tau/2 + j tau/N, j = 0..N-1 (half-open grid)."""
    if N < 1:
        raise ValueError("need at least one sample")
    return -params.tau / 2 + np.arange(N) * params.tau / N


@dataclass(frozen=True, eq=False)
class TorusSamples:
    params: TreeParams
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.size < 1:
            raise ValueError("need at least one sample")
        object.__setattr__(self, "values", vals)

    @property
    def N(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        return torus_nodes(self.params, self.N)


def sample_torus(params: TreeParams, g: Callable, N: int) -> TorusSamples:
    s = torus_nodes(params, N)
    return TorusSamples(params, np.asarray([g(x) for x in s], dtype=complex))


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Coefficients F(n) for -n_max <= n <= n_max.

    ``slack`` is the aliased coefficient at |n| = n_max + 1 when the sampling
    grid has room for it (None otherwise); it must vanish for a transform
    whose support radius really is n_max.
    """

    coeffs: np.ndarray = field(repr=False)
    slack: complex | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.size % 2 != 1:
            raise ValueError("coefficient array must have odd length")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0j
        return complex(self.coeffs[n + self.n_max])


Radial = Union[RadialProfile, BallFunction]


def spherical_ft(f: RadialProfile, z) -> complex:
    """sum_x f(x) phi_z(x) = sum_n f(n) |S_n| phi_z(n)."""
    n = np.arange(f.values.size)
    counts = np.array([sphere_size(f.params, k) for k in n], dtype=float)
    return complex(np.sum(f.values * counts * phi_closed(f.params, z, n)))


def fourier_coefficients(g: TorusSamples, n_max: int) -> CoefficientSequence:
    """F(n) = (1/N) sum_j g(s_j) q^{-i n s_j}, exact for degree <= n_max."""
    N = g.N
    if N < 2 * n_max + 1:
        raise Undersampled(f"N = {N} < 2*{n_max}+1")
    # s_j log q = -pi + 2 pi j/N, so the sum is a DFT up to the sign (-1)^n
    spec = np.fft.fft(g.values) / N
    n = np.arange(-n_max, n_max + 1)
    coeffs = spec[n % N] * np.where(n % 2 == 0, 1.0, -1.0)
    slack = None
    if N >= 2 * n_max + 2:
        m = n_max + 1
        slack = complex(spec[m % N] * (-1.0) ** m)
    return CoefficientSequence(coeffs, slack)


def abel_coefficients(f: RadialProfile, R: int | None = None) -> CoefficientSequence:
    """Coefficients Af(n) with f^(z) = sum_n Af(n) q^{inz}, |n| <= R."""
    R = f.radius if R is None else R
    if np.any(np.abs(f.values[R + 1 :]) > 0):
        raise ValueError(f"profile is not supported in n <= {R}")
    f = f.restrict(R) if f.radius > R else f
    samples = sample_torus(f.params, lambda s: spherical_ft(f, s), 2 * R + 2)
    return fourier_coefficients(samples, R)


def reconstruct(params: TreeParams, F: CoefficientSequence, z) -> np.ndarray:
    """Evaluate sum_n F(n) q^{inz} at z (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    n = F.indices
    return np.exp(1j * params.log_q * np.multiply.outer(z, n)) @ F.coeffs


def _radii_and_values(f: Radial) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(f, BallFunction):
        radii = np.concatenate(
            [np.full(sphere_size(f.params, n), n) for n in range(f.radius + 1)]
        )
        return radii, f.values
    return np.arange(f.values.size), f.values


def schwartz_seminorm(f: Radial, m: int, p: float) -> float:
    """max over the support of (1+|x|)^m q^{|x|/p} |f(x)|."""
    radii, vals = _radii_and_values(f)
    q = f.params.q
    w = (1.0 + radii) ** m * np.power(float(q), radii / p)
    return float(np.max(w * np.abs(vals)))


def lambda_seminorm(params: TreeParams, F: CoefficientSequence, m: int, p: float) -> float:
    """max_n (1+|n|)^m q^{delta_p |n|} |F(n)|."""
    n = np.abs(F.indices)
    w = (1.0 + n) ** m * np.power(float(params.q), delta(p) * n)
    return float(np.max(w * np.abs(F.coeffs)))


def _cauchy_derivative(g: Callable, z0: np.ndarray, m: int, r: float, nodes: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    pts = np.add.outer(z0, r * np.exp(1j * theta))
    vals = np.vectorize(g, otypes=[complex])(pts)
    return math.factorial(m) / r**m * np.mean(vals * np.exp(-1j * m * theta), axis=-1)


def strip_seminorm(
    params: TreeParams,
    g: Callable,
    m: int,
    p: float,
    grid: int = 64,
    nodes: int = 64,
) -> float:
    """Estimate sup over S_p of |g^(m)| from the two boundary lines.

    This is an estimator, not a bound: the maximum is taken over a uniform
    grid of one period on Im z = +-delta_p, and derivatives come from the
    trapezoidal rule on Cauchy circles of radius min(|delta_p|/2, tau/grid).
    """
    if grid < 64:
        raise ValueError("grid resolution must be at least 64")
    d = abs(delta(p))
    s = torus_nodes(params, grid)
    lines = [0.0] if d == 0 else [d, -d]
    z0 = np.concatenate([s + 1j * t for t in lines])
    if m == 0:
        vals = np.vectorize(g, otypes=[complex])(z0)
    else:
        r = params.tau / grid if d == 0 else min(d / 2, params.tau / grid)
        vals = _cauchy_derivative(g, z0, m, r, nodes)
    return float(np.max(np.abs(vals)))
