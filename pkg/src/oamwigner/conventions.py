"""Sign and phase conventions used throughout the package.

Every other module imports from here instead of restating a convention.

Angle representation
    ``<phi|l> = exp(+i l phi) / sqrt(2 pi)``, so the OAM operator acts as
    ``-i d/dphi`` on angular wavefunctions.  The angle-shift operator
    ``E = exp(-i phi_hat)`` lowers OAM, ``E|l> = |l-1>``.

OAM indexing
    A truncated state lives on ``l = -L..L``; array index ``i = l + L``.

Displacement operator
    ``D(l, phi) = exp(i alpha(l, phi)) E^{-l} exp(-i phi L)``, i.e. the
    matrix element ``<m|D|n> = exp(i alpha) exp(-i phi n) delta_{m, n+l}``.
    Two gauges are available:

    * ``ZERO``:      ``alpha = 0``
    * ``SYMMETRIC``: ``alpha = -l phi / 2``; then
      ``<m|D|n> = exp(-i phi (m+n)/2) delta_{m,n+l}`` (Weyl ordering) and
      ``D(l, phi)^dagger = D(-l, -phi)``.

    ``alpha`` is evaluated at the angle value passed in, never at a reduced
    representative; the symmetric gauge is 2pi-antiperiodic for odd ``l``.

Wigner kernel
    The phase-point operator is the Weyl-ordered one,
    ``<m|w(l,phi)|n> = exp(-i(m-n)phi) c(m+n-2l)`` with ``c(0) = 1/2pi``,
    ``c(even != 0) = 0`` and ``c(s odd) = (-1)^((s-1)/2) / (pi^2 s)``.  It is
    the double Fourier transform of the symmetric-gauge displacement with the
    angle integral taken over the window ``[-pi, pi)``.  The Wigner function
    itself is therefore gauge independent; only the coefficient maps
    ``rho_alpha(l, phi) = Tr[rho D_alpha(l, phi)^dagger] / 2pi`` carry the gauge,
    through the factor ``exp(-i alpha)``.

Free evolution and tomograms
    ``U_t = exp(-i t L^2 / 2)``.  A tomogram at time ``t`` is the angular
    density of the forward-evolved state ``U_t rho U_t^dagger``:
    ``omega(phi, t) = (1/2pi) sum rho_mn exp(i t (n^2 - m^2)/2) exp(i (m-n) phi)``.
    The coefficient row ``l != 0`` at angle ``phi`` is read from the tomogram at
    ``t = TIME_SIGN * phi / l`` with ``TIME_SIGN = -1``: its ``l``-th Fourier
    component equals the symmetric-gauge coefficient ``rho_sym(l, phi)``
    exactly.  Negative times are physical: ``U_{t + 4 pi} = U_t``.
"""
from __future__ import annotations

import enum

import numpy as np

TWO_PI = 2.0 * np.pi

#: Sign ``s`` in the tomogram schedule ``t = s * phi / l``.
TIME_SIGN = -1


class AlphaConvention(enum.Enum):
    """Gauge choice for the phase of the displacement operator."""

    ZERO = "zero"
    SYMMETRIC = "symmetric"

    def alpha(self, l, phi):
        """Gauge phase alpha(l, phi); broadcasts over array arguments."""
        l = np.asarray(l, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if self is AlphaConvention.ZERO:
            return np.zeros(np.broadcast(l, phi).shape)
        return -0.5 * l * phi

    def unitarity_defect(self, l, phi):
        """Residual of alpha(l,phi) + alpha(-l,-phi) + l*phi.

        Vanishes exactly when ``D(l,phi)^dagger == D(-l,-phi)``.
        """
        l = np.asarray(l, dtype=float)
        phi = np.asarray(phi, dtype=float)
        return self.alpha(l, phi) + self.alpha(-l, -phi) + l * phi

    @classmethod
    def parse(cls, value) -> "AlphaConvention":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def oam_index(l, l_max):
    """Array index of OAM value ``l`` in a ``[-l_max, l_max]`` truncation."""
    return l + l_max


def oam_values(l_max):
    return np.arange(-l_max, l_max + 1)


def angle_ket_overlap(l, phi):
    """``<phi|l>`` for broadcastable ``l`` and ``phi``."""
    return np.exp(1j * np.multiply.outer(phi, l)) / np.sqrt(TWO_PI)
