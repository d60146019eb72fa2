"""Displacement operators, the Wigner kernel and Wigner maps on S^1 x Z."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .conventions import TWO_PI, AlphaConvention, oam_values
from .errors import ImaginaryResidue
from .numerics import PeriodicGrid, circle_integrate, window_weights
from .states import as_density_matrix

IMAG_TOL = 1e-12
_BLOCK = 64  # grid columns per evaluation block; fixed so output never depends on workers


def displacement_matrix(l: int, phi: float, l_max: int, conv=AlphaConvention.ZERO) -> np.ndarray:
    """Truncated matrix of ``D(l, phi)`` in the OAM basis.

    ``<m|D|n> = exp(i alpha(l,phi)) exp(-i phi n) delta_{m, n+l}``; columns
    whose image leaves ``[-l_max, l_max]`` are dropped.
    """
    if abs(l) > 2 * l_max:
        raise ValueError(f"shift {l} exceeds 2*l_max={2 * l_max}")
    conv = AlphaConvention.parse(conv)
    n = oam_values(l_max)
    phase = np.exp(1j * conv.alpha(l, phi)) * np.exp(-1j * phi * n)
    # k=-l puts (n+l, n) entries on the subdiagonal for l > 0
    return np.diag(phase[: len(n) - abs(l)] if l >= 0 else phase[abs(l):], k=-l)


def kernel_profile(s):
    """Coefficient ``c(s)`` of the Wigner kernel, ``s = m + n - 2l``.

    ``1/2pi`` at ``s = 0``, zero for other even ``s`` and
    ``(-1)^((s-1)/2) / (pi^2 s)`` for odd ``s``.
    """
    s = np.asarray(s)
    odd = (s % 2) != 0
    sign = np.where(((s - 1) // 2) % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore"):
        val = np.where(odd, sign / (np.pi**2 * np.where(odd, s, 1)), 0.0)
    return np.where(s == 0, 1.0 / TWO_PI, val)


def kernel_matrix(l: int, phi: float, l_max: int) -> np.ndarray:
    """Phase-point operator ``w(l, phi)`` as a matrix on ``[-l_max, l_max]``."""
    if abs(l) > l_max:
        raise ValueError(f"|l|={abs(l)} exceeds l_max={l_max}")
    m = oam_values(l_max)
    return np.exp(-1j * np.subtract.outer(m, m) * phi) * kernel_profile(np.add.outer(m, m) - 2 * l)


@dataclass(frozen=True, eq=False)
class WignerMap:
    """Real ``W(l, phi_j)`` on rows ``l = -l_max..l_max``.

    ``outer`` holds, per grid angle, the summed value of all rows with
    ``|l| > l_max``, so that angle marginals are exact.  ``edge_rows`` lists
    rows whose diagonal entry sits on the truncation boundary.
    """

    l_max: int
    grid: PeriodicGrid
    values: np.ndarray
    convention: AlphaConvention = AlphaConvention.SYMMETRIC
    outer: np.ndarray | None = None
    imag_residue: float = 0.0
    edge_rows: tuple = field(default=())

    def __post_init__(self):
        if not self.edge_rows:
            object.__setattr__(self, "edge_rows", (-self.l_max, self.l_max))

    @property
    def l_values(self) -> np.ndarray:
        return oam_values(self.l_max)

    def row(self, l: int) -> np.ndarray:
        return self.values[l + self.l_max]

    def total_mass(self) -> float:
        return float(circle_integrate(self.values).sum())

    def most_negative(self):
        """``(value, l, phi)`` of the smallest entry."""
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.values[i, j]), int(i - self.l_max), float(self.grid.points[j])

    def to_json(self) -> dict:
        return {
            "l_range": [-self.l_max, self.l_max],
            "grid": self.grid.n_points,
            "phi": self.grid.points.tolist(),
            "values": self.values.tolist(),
            "convention": self.convention.value,
            "outer": None if self.outer is None else self.outer.tolist(),
            "edge_rows": list(self.edge_rows),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l"] + [f"{p:.17g}" for p in self.grid.points])
        for l, row in zip(self.l_values, self.values):
            w.writerow([int(l)] + [f"{v:.17g}" for v in row])
        return buf.getvalue()

    @classmethod
    def from_json(cls, obj) -> "WignerMap":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        lo, hi = obj["l_range"]
        outer = obj.get("outer")
        return cls(
            l_max=int(hi),
            grid=PeriodicGrid(int(obj["grid"])),
            values=np.asarray(obj["values"], dtype=float),
            convention=AlphaConvention.parse(obj.get("convention", "symmetric")),
            outer=None if outer is None else np.asarray(outer, dtype=float),
        )


@dataclass(frozen=True, eq=False)
class CoefficientMap:
    """Complex ``rho(l, phi_j) = Tr[rho D(l,phi_j)^dagger] / 2pi``.

    Rows run over ``l = -2 l_max..2 l_max``, the full band of a state
    truncated to ``[-l_max, l_max]``.
    """

    l_max: int
    grid: PeriodicGrid
    values: np.ndarray
    convention: AlphaConvention

    @property
    def l_values(self) -> np.ndarray:
        return np.arange(-2 * self.l_max, 2 * self.l_max + 1)

    def row(self, l: int) -> np.ndarray:
        return self.values[l + 2 * self.l_max]

    def gauge_free(self) -> np.ndarray:
        """Coefficients multiplied by ``exp(i alpha)``: the ZERO-gauge samples."""
        phi = self.grid.points
        return self.values * np.exp(1j * self.convention.alpha(self.l_values[:, None], phi[None, :]))


def _diagonal_sums(mat: np.ndarray) -> np.ndarray:
    """``out[d + 2L, n + L] = mat[n + d, n]`` (zero outside the matrix)."""
    dim = mat.shape[0]
    L = (dim - 1) // 2
    out = np.zeros((2 * dim - 1, dim), dtype=complex)
    for d in range(-2 * L, 2 * L + 1):
        diag = np.diagonal(mat, offset=-d)
        if d >= 0:
            out[d + 2 * L, : len(diag)] = diag
        else:
            out[d + 2 * L, -d : -d + len(diag)] = diag
    return out


def _kernel_amplitudes(rho: np.ndarray):
    """Per-row Fourier amplitudes ``A[l, d]`` with ``W(l,phi) = sum_d A e^{i d phi}``.

    Also returns the amplitudes of the summed rows ``|l| > L``.
    """
    dim = rho.shape[0]
    L = (dim - 1) // 2
    m = oam_values(L)
    s = np.add.outer(m, m)
    C = kernel_profile(s[None, :, :] - 2 * m[:, None, None])
    # all rows l in Z together sum to 1/2pi for every s (Leibniz series)
    tail = 1.0 / TWO_PI - C.sum(axis=0)
    A = np.stack([_diagonal_sums(rho * c).sum(axis=1) for c in C])
    return A, _diagonal_sums(rho * tail).sum(axis=1)


def _synthesize(amps: np.ndarray, phi: np.ndarray, workers) -> np.ndarray:
    """``amps @ exp(i d phi)`` evaluated in fixed column blocks."""
    nd = amps.shape[-1]
    d = np.arange(nd) - (nd - 1) // 2
    blocks = [phi[i : i + _BLOCK] for i in range(0, len(phi), _BLOCK)]

    def run(p):
        return amps @ np.exp(1j * np.outer(d, p))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, blocks))
    else:
        parts = [run(p) for p in blocks]
    return np.concatenate(parts, axis=-1)


def _realize(values: np.ndarray, imag_tol):
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if imag_tol is not None and residue >= imag_tol:
        raise ImaginaryResidue(f"Wigner values carry imaginary residue {residue:.3g}")
    return values.real.copy(), residue


def wigner_map(rho, grid: PeriodicGrid, workers: int | None = None) -> WignerMap:
    """``W(l, phi_j) = Tr[rho w(l, phi_j)]`` on the full grid.

    Grid columns are independent; ``workers`` spreads them over threads
    without changing the result.

    Raises
    ------
    ImaginaryResidue
        If any trace has an imaginary part of ``1e-12`` or more.
    """
    rho = as_density_matrix(rho)
    grid.require(rho.l_max)
    A, tail = _kernel_amplitudes(rho.entries)
    vals, residue = _realize(_synthesize(A, grid.points, workers), IMAG_TOL)
    outer, _ = _realize(_synthesize(tail, grid.points, workers), IMAG_TOL)
    return WignerMap(rho.l_max, grid, vals, AlphaConvention.SYMMETRIC, outer, residue)


def coefficient_map(rho, grid: PeriodicGrid, conv=AlphaConvention.ZERO) -> CoefficientMap:
    """Expansion coefficients of ``rho`` in the displacement basis."""
    rho = as_density_matrix(rho)
    grid.require(rho.l_max)
    conv = AlphaConvention.parse(conv)
    L = rho.l_max
    M = _diagonal_sums(rho.entries)
    phi = grid.points
    n = oam_values(L)
    Z = M @ np.exp(1j * np.outer(n, phi)) / TWO_PI
    l = np.arange(-2 * L, 2 * L + 1)
    vals = Z * np.exp(-1j * conv.alpha(l[:, None], phi[None, :]))
    return CoefficientMap(L, grid, vals, conv)


def coefficient_at(rho, l: int, phi: float, conv=AlphaConvention.ZERO) -> complex:
    """Single coefficient ``Tr[rho D(l,phi)^dagger] / 2pi`` at any angle."""
    rho = as_density_matrix(rho)
    D = displacement_matrix(l, phi, rho.l_max, conv)
    return complex(np.trace(rho.entries @ D.conj().T)) / TWO_PI


def wigner_from_coefficients(coeffs: CoefficientMap, imag_tol=IMAG_TOL) -> WignerMap:
    """Wigner map synthesized from displacement-basis coefficients.

    ``W(l,phi) = (1/2pi) sum_l' int dphi' rho(l',phi') exp(i(l' phi - l phi'))``
    with the angle integral over ``[-pi, pi)`` and the coefficients taken in
    the symmetric gauge.  Coefficients in any other gauge are first converted
    with the gauge factor, so every convention yields the same map.  Pass
    ``imag_tol=None`` for noisy coefficients; the residue is then only
    recorded.
    """
    L = coeffs.l_max
    grid = coeffs.grid
    grid.require(L)
    Z = coeffs.gauge_free()
    lp = coeffs.l_values
    rows = oam_values(L)
    sym = AlphaConvention.SYMMETRIC
    # rho_sym = Z * exp(-i alpha_sym) = Z * exp(i l' phi'/2)
    shift = -sym.alpha(lp[None, :], 1.0) - rows[:, None]
    weights = window_weights(grid.n_points, shift)
    A = np.einsum("lpj,pj->lp", weights, Z) / TWO_PI
    vals, residue = _realize(_synthesize(A, grid.points, None), imag_tol)
    full = _synthesize(Z[:, 0], grid.points, None)
    outer = full.real - vals.sum(axis=0)
    return WignerMap(L, grid, vals, coeffs.convention, outer, residue)


def marginals(wmap: WignerMap):
    """``(oam_distribution, angle_distribution)`` of a Wigner map.

    The OAM marginal integrates each row over the circle; the angle marginal
    sums all rows, including the ``outer`` rows beyond the stored window.
    """
    oam = circle_integrate(wmap.values)
    angle = wmap.values.sum(axis=0)
    if wmap.outer is not None:
        angle = angle + wmap.outer
    return oam, angle


def shift_map(wmap: WignerMap, dl: int, dj: int) -> np.ndarray:
    """Values of ``W(l - dl, phi - phi_dj)`` on the stored rows (NaN where unknown)."""
    out = np.full_like(wmap.values, np.nan)
    src = np.roll(wmap.values, dj, axis=1)
    if dl >= 0:
        out[dl:] = src[: src.shape[0] - dl]
    else:
        out[:dl] = src[-dl:]
    return out
