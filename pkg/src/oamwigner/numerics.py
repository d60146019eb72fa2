"""Special functions and quadrature on the circle.

All angular integrals in the package are evaluated on a uniform periodic
grid.  Integrands are trigonometric polynomials of known bandwidth, so the
rectangle rule is exact up to round-off and nothing adaptive is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conventions import TWO_PI
from .errors import AliasRisk, NonconvergentTheta

# 2*pi split for Cody-Waite reduction; the high part has 33 significant bits
# so k * _TWO_PI_HI is exact for |k| < 2**20.
_TWO_PI_HI = math.ldexp(math.floor(math.ldexp(TWO_PI, 30)), -30)
_TWO_PI_LO = 2.4492935982947064e-16 + (TWO_PI - _TWO_PI_HI)

THETA_MAX_TERMS = 64
THETA_RTOL = 1e-15


def reduce_angle(phi):
    """Reduce ``phi`` into ``[0, 2pi)``.

    Uses a two-part representation of 2pi, so inputs up to about 1e6 rad
    keep full double precision.
    """
    phi = np.asarray(phi, dtype=float)
    k = np.floor(phi / TWO_PI)
    r = (phi - k * _TWO_PI_HI) - k * _TWO_PI_LO
    # correct the rare off-by-one from the floor estimate
    r = np.where(r < 0.0, r + TWO_PI, r)
    r = np.where(r >= TWO_PI, r - TWO_PI, r)
    return r if r.ndim else float(r)


def angles_close(a, b, atol=1e-12):
    """2pi-periodic equality of angles within ``atol``."""
    d = reduce_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return np.minimum(d, TWO_PI - d) <= atol


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid ``phi_j = 2 pi j / n_points`` on the circle."""

    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise ValueError(f"n_points must be a positive integer, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def points(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_points) / self.n_points

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n_points

    def supports(self, l_max: int) -> bool:
        """True if the grid resolves spectra of width ``2 * l_max``."""
        return self.n_points >= 4 * l_max + 2

    def require(self, l_max: int) -> None:
        if not self.supports(l_max):
            raise ValueError(
                f"grid of {self.n_points} points is too coarse for l_max={l_max}; "
                f"need at least {4 * l_max + 2}"
            )

    def __len__(self):
        return self.n_points


def theta3(z, q):
    """Jacobi theta function ``sum_n q**(n**2) exp(2 i n z)``.

    Parameters
    ----------
    z : complex or array_like
    q : float
        Nome, ``0 < q < 1``.

    The series is summed in symmetric pairs ``n, -n`` until the pair is past
    its peak and below ``1e-15`` of the running scale.  A vanishing partial
    sum (near a zero of the function) falls back on the largest term seen as
    the scale.

    Raises
    ------
    NonconvergentTheta
        If 64 pairs are not enough.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"nome must lie in (0, 1), got {q!r}")
    z = np.asarray(z, dtype=complex)
    logq = math.log(q)
    total = np.ones_like(z)
    peak = np.ones(z.shape)
    prev = np.full(z.shape, np.inf)
    for n in range(1, THETA_MAX_TERMS + 1):
        w = np.exp(2j * n * z)
        pair = math.exp(n * n * logq) * (w + 1.0 / w)
        mag = math.exp(n * n * logq) * np.maximum(np.abs(w), 1.0 / np.abs(w))
        total = total + pair
        peak = np.maximum(peak, mag)
        scale = np.maximum(np.abs(total), peak)
        if np.all((mag < THETA_RTOL * scale) & (mag < prev)):
            return total if total.ndim else complex(total)
        prev = mag
    raise NonconvergentTheta(
        f"theta3 series did not converge in {THETA_MAX_TERMS} terms (q={q})"
    )


def dirichlet_delta(phi, l_max: int):
    """Truncated periodic delta ``(1/2pi) sum_{|n| <= l_max} exp(i n phi)``."""
    phi = np.asarray(phi, dtype=float)
    half = 0.5 * reduce_angle(phi)
    s = np.sin(half)
    small = np.abs(s) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sin((2 * l_max + 1) * half) / (TWO_PI * np.where(small, 1.0, s))
    # 2*half lies in [0, 2pi) so sin(half) vanishes only at phi = 0
    val = np.where(small, (2 * l_max + 1) / TWO_PI, val)
    return val if val.ndim else float(val)


def circle_integrate(samples, axis=-1):
    """Rectangle rule ``(2pi/N) sum_j f(phi_j)`` along ``axis``."""
    samples = np.asarray(samples)
    n = samples.shape[axis]
    return samples.sum(axis=axis) * (TWO_PI / n)


def fourier_coefficient(samples, n: int, axis=-1):
    """``(1/2pi) int f(phi) exp(-i n phi) dphi`` from grid samples.

    Raises
    ------
    AliasRisk
        If ``|n| >= N/2``.
    """
    samples = np.asarray(samples)
    npts = samples.shape[axis]
    if 2 * abs(n) >= npts:
        raise AliasRisk(f"mode {n} is not resolved by a {npts}-point grid")
    phi = PeriodicGrid(npts).points
    shape = [1] * samples.ndim
    shape[axis] = npts
    phase = np.exp(-1j * n * phi).reshape(shape)
    return circle_integrate(samples * phase, axis=axis) / TWO_PI


def window_integral(x):
    """``int_{-pi}^{pi} exp(i x phi) dphi`` for real ``x``."""
    x = np.asarray(x, dtype=float)
    zero = x == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 * np.sin(np.pi * x) / np.where(zero, 1.0, x)
    return np.where(zero, TWO_PI, val)


def window_weights(n_points: int, shift):
    """Weights for ``int_{-pi}^{pi} f(phi) exp(i shift phi) dphi``.

    ``f`` is any trigonometric polynomial with bandwidth below ``n_points/2``
    sampled on :class:`PeriodicGrid`.  ``shift`` may be fractional (the
    integrand then is not periodic and the plain rectangle rule would be
    wrong); for integer ``shift`` the weights reduce to the rectangle rule
    times ``exp(i shift phi_j)``.  Returns an array of shape
    ``shape(shift) + (n_points,)``.
    """
    shift = np.asarray(shift, dtype=float)
    kmax = (n_points - 1) // 2
    k = np.arange(-kmax, kmax + 1)
    phi = PeriodicGrid(n_points).points
    J = window_integral(shift[..., None] + k)
    return (J @ np.exp(-1j * np.outer(k, phi))) / n_points


def window_integrate(samples, shift=0.0):
    """Apply :func:`window_weights` along the last axis of ``samples``."""
    samples = np.asarray(samples)
    w = window_weights(samples.shape[-1], shift)
    return np.sum(samples * w, axis=-1)
