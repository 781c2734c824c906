"""Spectral parameter calculus: gamma, the c-function and spherical functions.

The spectral parameter z lives on the strip |Im z| <= 1/2 modulo the period
tau = 2*pi/log q. Everything here is even and tau-periodic in z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxis, NearPole, NoSolution
from .tree_core import RadialProfile, TreeParams

__all__ = [
    "EPS_BRANCH",
    "RECUR_ZONE",
    "SpectralPoint",
    "Strip",
    "delta",
    "reduce_z",
    "canonical_z",
    "degenerate_distance",
    "gamma",
    "gamma_printed",
    "c_func",
    "phi_closed",
    "phi_recur",
    "phi_profile",
    "ellipse_residual",
    "spectrum_membership",
    "find_unimodular_pair",
]

EPS_BRANCH = 1e-9
# inside this distance of (tau/2)Z the c-function cancels badly; use the recurrence
RECUR_ZONE = 1e-4


def delta(p: float) -> float:
    """delta_p = 1/p - 1/2, with delta_1 = 1/2 and delta_inf = -1/2."""
    if p == math.inf:
        return -0.5
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return 1.0 / p - 0.5


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class Strip:
    p: float

    @property
    def delta_p(self) -> float:
        return delta(self.p)

    @property
    def half_width(self) -> float:
        return abs(self.delta_p)

    def contains(self, z: complex, tol: float = 1e-12) -> bool:
        return abs(complex(z).imag) <= self.half_width + tol


def reduce_z(params: TreeParams, z: complex) -> complex:
    """Representative of z mod tau with Re z in [-tau/2, tau/2)."""
    z = complex(z)
    tau = params.tau
    re = (z.real + tau / 2) % tau - tau / 2
    return complex(re, z.imag)


def canonical_z(params: TreeParams, z: complex) -> complex:
    """Reduce mod tau, then use evenness to land in Re z in [0, tau/2]."""
    z = reduce_z(params, z)
    if z.real < 0:
        z = -z
    return z


@dataclass(frozen=True)
class SpectralPoint:
    params: TreeParams
    z: complex

    @property
    def reduced(self) -> complex:
        return reduce_z(self.params, self.z)

    @property
    def canonical(self) -> complex:
        return canonical_z(self.params, self.z)

    def __complex__(self) -> complex:
        return complex(self.z)


def _as_z(z) -> complex:
    return complex(z)


def degenerate_distance(params: TreeParams, z: complex) -> tuple[float, int]:
    """Distance from z to the lattice (tau/2)Z and the index k of the nearest point."""
    z = _as_z(z)
    half = params.tau / 2
    k = round(z.real / half)
    return abs(z - k * half), int(k)


def gamma(params: TreeParams, z):
    """Eigenvalue 1 - b cos(z log q) attached to the spectral parameter z."""
    return 1.0 - params.b * np.cos(np.asarray(z, dtype=complex) * params.log_q)


def gamma_printed(params: TreeParams, z):
    """1 - (q^(1/2+iz) + q^(1/2-iz))/(q+1), evaluated with complex powers."""
    q = params.q
    z = np.asarray(z, dtype=complex)
    return 1.0 - (q ** (0.5 + 1j * z) + q ** (0.5 - 1j * z)) / (q + 1)


def c_func(params: TreeParams, z) -> complex:
    z = reduce_z(params, _as_z(z))
    dist, _ = degenerate_distance(params, z)
    if dist < EPS_BRANCH:
        raise NearPole(f"z = {z} lies within {EPS_BRANCH} of a pole")
    q = params.q
    num = q ** (0.5 + 1j * z) - q ** (-0.5 - 1j * z)
    den = q ** (1j * z) - q ** (-1j * z)
    return complex(math.sqrt(q) / (q + 1) * num / den)


def phi_recur(params: TreeParams, z, n_max: int) -> RadialProfile:
    """Spherical function from the radial eigen-recurrence, radii 0..n_max."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    q = params.q
    a = 1.0 - complex(gamma(params, canonical_z(params, _as_z(z))))
    out = np.empty(n_max + 1, dtype=complex)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = a
    for n in range(1, n_max):
        out[n + 1] = ((q + 1) * a * out[n] - out[n - 1]) / q
    return RadialProfile(params, out)


def phi_closed(params: TreeParams, z, n):
    """Closed-form spherical function phi_z at radius n (int or array)."""
    z = canonical_z(params, _as_z(z))
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("radius must be non-negative")
    nf = n_arr.astype(float)
    q = params.q
    dist, k = degenerate_distance(params, z)
    if dist <= EPS_BRANCH:
        out = ((q - 1) / (q + 1) * nf + 1.0) * q ** (-nf / 2)
        if k % 2:
            out = out * (-1.0) ** n_arr
        out = out.astype(complex)
    elif dist < RECUR_ZONE:
        prof = phi_recur(params, z, int(n_arr.max(initial=0)))
        out = prof.values[n_arr]
    else:
        c_plus = c_func(params, z)
        c_minus = c_func(params, -z)
        out = c_plus * q ** ((1j * z - 0.5) * nf) + c_minus * q ** ((-1j * z - 0.5) * nf)
    if np.ndim(n) == 0:
        return complex(out)
    return out


def phi_profile(params: TreeParams, z, R: int) -> RadialProfile:
    return RadialProfile(params, phi_closed(params, z, np.arange(R + 1)))


def ellipse_residual(params: TreeParams, w, p: float):
    """E(w) - 1 for the L^p spectrum ellipse; negative inside."""
    d = delta(p)
    if d == 0:
        raise DegenerateAxis("p = 2 collapses the ellipse to a segment")
    w = np.asarray(w, dtype=complex)
    L = params.log_q
    a = params.b * math.cosh(d * L)
    c = params.b * math.sinh(d * L)
    return ((1.0 - w.real) / a) ** 2 + (w.imag / c) ** 2 - 1.0


def spectrum_membership(
    params: TreeParams, w: complex, p: float, tol: float = 1e-12
) -> tuple[bool, float]:
    """Is w in the L^p spectrum of the Laplacian? Returns (member, residual).

    For p != 2 the residual is E(w) - 1. For p = 2 the spectrum is the segment
    [1-b, 1+b] and the residual is max(|Im w|, |1 - Re w| - b).
    """
    w = complex(w)
    if delta(p) == 0:
        res = max(abs(w.imag), abs(1.0 - w.real) - params.b)
    else:
        res = float(ellipse_residual(params, w, p))
    return res <= tol, res


def _modulus_on_line(params: TreeParams, s: float, t: float) -> float:
    return abs(complex(gamma(params, complex(s, t))))


def _bisect_line(params: TreeParams, modulus: float, t: float, tol: float) -> float:
    # |gamma(s + it)| increases strictly in s on [0, tau/2]
    lo, hi = 0.0, params.tau / 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _modulus_on_line(params, mid, t) < modulus:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _line_range(params: TreeParams, t: float) -> tuple[float, float]:
    ch = math.cosh(t * params.log_q)
    return abs(1.0 - params.b * ch), 1.0 + params.b * ch


def find_unimodular_pair(
    params: TreeParams,
    modulus: float,
    p: float,
    lines: tuple[float, ...] | None = None,
    tol: float = 1e-13,
) -> tuple[SpectralPoint, SpectralPoint]:
    """Two points of S_p with |gamma| = modulus but different gamma values.

    Each point is found by bisection along a horizontal line Im z = t with
    0 <= t <= |delta_p|. The default lines are t = 0 and t = |delta_p|/2,
    followed by further lines toward the strip edge when the modulus is not
    reachable on the first ones.
    """
    width = abs(delta(conjugate_exponent(p)))
    if width == 0:
        raise NoSolution("the strip S_2 is the real line; |gamma| determines gamma there")
    lower = complex(gamma(params, 1j * width)).real
    upper = complex(gamma(params, params.tau / 2 + 1j * width)).real
    if not lower < modulus < upper:
        raise NoSolution(
            f"modulus {modulus} outside the open annulus ({lower}, {upper})"
        )
    if lines is None:
        lines = (0.0, width / 2) + tuple(width * k / 8 for k in (5, 6, 7, 8))
    found: list[SpectralPoint] = []
    for t in lines:
        if not 0 <= t <= width + 1e-15:
            raise ValueError(f"line Im z = {t} lies outside the strip")
        lo, hi = _line_range(params, t)
        if not lo < modulus < hi:
            continue
        s = _bisect_line(params, modulus, t, tol)
        found.append(SpectralPoint(params, complex(s, t)))
        if len(found) == 2:
            break
    if len(found) < 2:
        raise NoSolution(f"could not place two points with |gamma| = {modulus}")
    z1, z2 = found
    g1, g2 = gamma(params, z1.z), gamma(params, z2.z)
    if abs(g1 - g2) < 1e-9:
        raise NoSolution("search lines produced coincident gamma values")
    return z1, z2
