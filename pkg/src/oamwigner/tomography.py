"""Free-rotor tomography: simulated angular measurements and linear inversion.

A tomogram is the angular density of the state after free evolution for a
time ``t``.  Row ``l != 0`` of the coefficient map at angle ``phi_j`` is the
``l``-th Fourier component of the tomogram taken at ``t = TIME_SIGN *
phi_j / l``; row ``l = 0`` comes from a separate OAM-basis histogram, which
angular data cannot supply.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conventions import TIME_SIGN, TWO_PI, AlphaConvention, oam_values
from .errors import MissingTomogram, NegativeDensity
from .numerics import PeriodicGrid, circle_integrate, fourier_coefficient
from .phase_space import (
    IMAG_TOL,
    CoefficientMap,
    WignerMap,
    _diagonal_sums,
    wigner_from_coefficients,
)
from .states import TruncatedDensityMatrix, as_density_matrix

NEGATIVE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Tomogram:
    """Angular density ``omega(phi_j, t)``.

    ``cycles`` is the exact time in units of ``2 pi``.  With ``shots`` the
    density holds empirical bin frequencies divided by the bin width.
    """

    cycles: Fraction
    grid: PeriodicGrid
    density: np.ndarray
    shots: int | None = None

    @property
    def time(self) -> float:
        return TWO_PI * float(self.cycles)

    def sigma(self) -> np.ndarray | None:
        """Per-bin standard error of the density (None for ideal data)."""
        if self.shots is None:
            return None
        h = self.grid.spacing
        p = self.density * h
        return np.sqrt(p * (1.0 - p) / self.shots) / h


@dataclass(eq=False)
class TomogramSet:
    l_max: int
    grid: PeriodicGrid
    tomograms: dict = field(default_factory=dict)
    band: tuple = ()
    seed: int | None = None
    shots: int | None = None
    wedge_width: float | None = None

    def __len__(self):
        return len(self.tomograms)

    def lookup(self, l: int, j: int) -> Tomogram:
        key = schedule_key(l, j, self.grid.n_points)
        try:
            return self.tomograms[key]
        except KeyError:
            raise MissingTomogram(
                f"no tomogram for cell l={l}, phi={self.grid.points[j]:.17g} (t={TWO_PI * float(key):.17g})"
            ) from None

    def to_json(self) -> dict:
        return {
            "provenance": {"seed": self.seed, "shots": self.shots, "wedge_width": self.wedge_width},
            "l_max": self.l_max,
            "grid": self.grid.n_points,
            "band": list(self.band),
            "tomograms": [
                {
                    "time": tomo.time,
                    "cycle_fraction": f"{key.numerator}/{key.denominator}",
                    "density": tomo.density.tolist(),
                }
                for key, tomo in sorted(self.tomograms.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "TomogramSet":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        prov = obj.get("provenance", {})
        grid = PeriodicGrid(int(obj["grid"]))
        shots = prov.get("shots")
        tomos = {}
        for item in obj["tomograms"]:
            key = Fraction(item["cycle_fraction"])
            tomos[key] = Tomogram(key, grid, np.asarray(item["density"], dtype=float), shots)
        return cls(
            int(obj["l_max"]), grid, tomos, tuple(obj.get("band", ())),
            prov.get("seed"), shots, prov.get("wedge_width"),
        )


@dataclass(frozen=True, eq=False)
class OamHistogram:
    probabilities: np.ndarray
    shots: int | None = None

    @property
    def l_max(self) -> int:
        return (len(self.probabilities) - 1) // 2

    def sigma(self) -> np.ndarray | None:
        if self.shots is None:
            return None
        p = self.probabilities
        return np.sqrt(p * (1.0 - p) / self.shots)

    def to_json(self) -> dict:
        return {"probabilities": self.probabilities.tolist(), "shots": self.shots}

    @classmethod
    def from_json(cls, obj) -> "OamHistogram":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        return cls(np.asarray(obj["probabilities"], dtype=float), obj.get("shots"))


def free_evolve(rho, t: float) -> TruncatedDensityMatrix:
    """``U_t rho U_t^dagger`` with ``U_t = exp(-i t L^2 / 2)``."""
    rho = as_density_matrix(rho)
    l = oam_values(rho.l_max)
    e = l.astype(float) ** 2
    phase = np.exp(-0.5j * t * np.subtract.outer(e, e))
    return TruncatedDensityMatrix(rho.l_max, rho.entries * phase)


def _spectra(rho: TruncatedDensityMatrix, times) -> np.ndarray:
    """Fourier amplitudes ``a[k, d]`` with ``omega(phi, t_k) = sum_d a e^{i d phi}``."""
    L = rho.l_max
    n = oam_values(L).astype(float)
    M = _diagonal_sums(rho.entries)  # M[d, n] = rho[n+d, n]
    d = np.arange(-2 * L, 2 * L + 1).astype(float)
    # e^{i t (n^2 - m^2)/2} with m = n + d
    expo = -0.5 * (2.0 * np.outer(d, n) + (d**2)[:, None])
    times = np.asarray(times, dtype=float)
    ph = np.exp(1j * times[:, None, None] * expo[None, :, :])
    return np.einsum("kdn,dn->kd", ph, M) / TWO_PI


def _densities(amps: np.ndarray, grid: PeriodicGrid, binned: bool) -> np.ndarray:
    nd = amps.shape[-1]
    d = np.arange(nd) - (nd - 1) // 2
    if binned:
        amps = amps * np.sinc(d * grid.spacing / TWO_PI)
    vals = amps @ np.exp(1j * np.outer(d, grid.points))
    return vals.real


def _floor(density: np.ndarray) -> np.ndarray:
    worst = float(density.min()) if density.size else 0.0
    if worst < -NEGATIVE_TOL:
        raise NegativeDensity(f"angular density reaches {worst:.3g}")
    return np.maximum(density, 0.0)


def angular_distribution(rho, t: float, grid: PeriodicGrid) -> Tomogram:
    """Ideal tomogram ``omega(phi_j, t)``.

    Raises
    ------
    NegativeDensity
        If any sample is below ``-1e-8``.
    """
    rho = as_density_matrix(rho)
    grid.require(rho.l_max)
    amps = _spectra(rho, [t])
    density = _floor(_densities(amps, grid, binned=False)[0])
    cycles = Fraction(t / TWO_PI)
    return Tomogram(cycles, grid, density)


def schedule_key(l: int, j: int, n_points: int) -> Fraction:
    """Exact time (in cycles of 2pi) of the setting read by cell ``(l, phi_j)``."""
    return Fraction(TIME_SIGN * j, l * n_points)


def schedule(band, grid: PeriodicGrid) -> dict:
    """Map each distinct setting time to the cells ``(l, j)`` that use it."""
    cells = {}
    for l in band:
        for j in range(grid.n_points):
            cells.setdefault(schedule_key(l, j, grid.n_points), []).append((l, j))
    return cells


def default_band(l_max: int) -> tuple:
    return tuple(l for l in range(-2 * l_max, 2 * l_max + 1) if l != 0)


def simulate_tomogram_set(rho, grid: PeriodicGrid, l_band=None, shots: int | None = None, seed=None) -> TomogramSet:
    """Tomograms for every time needed by the inversion.

    Without ``shots`` the densities are exact point samples.  With ``shots``
    each setting is a multinomial draw over the grid bins (bin width = grid
    spacing, centred on the grid points); the generator for each setting is
    spawned from ``seed`` in sorted time order.
    """
    rho = as_density_matrix(rho)
    grid.require(rho.l_max)
    band = default_band(rho.l_max) if l_band is None else tuple(l_band)
    if shots is not None and seed is None:
        raise ValueError("a seed is required when shots are given")
    keys = sorted(schedule(band, grid))
    amps = _spectra(rho, [TWO_PI * float(k) for k in keys])
    binned = shots is not None
    dens = _densities(amps, grid, binned)
    tomos = {}
    if not binned:
        for key, row in zip(keys, dens):
            tomos[key] = Tomogram(key, grid, _floor(row))
    else:
        h = grid.spacing
        children = np.random.SeedSequence([int(seed), 0]).spawn(len(keys))
        for key, row, ss in zip(keys, dens, children):
            p = _floor(row) * h
            counts = np.random.default_rng(ss).multinomial(shots, p / p.sum())
            tomos[key] = Tomogram(key, grid, counts / (shots * h), shots)
    return TomogramSet(rho.l_max, grid, tomos, band, seed, shots, grid.spacing if binned else None)


def simulate_oam_histogram(rho, shots: int | None = None, seed=None) -> OamHistogram:
    """OAM-basis populations, exact or as multinomial frequencies."""
    rho = as_density_matrix(rho)
    p = np.clip(rho.populations(), 0.0, None)
    p = p / p.sum()
    if shots is None:
        return OamHistogram(p)
    if seed is None:
        raise ValueError("a seed is required when shots are given")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    return OamHistogram(rng.multinomial(shots, p) / shots, shots)


def reconstruct_coefficients(tset: TomogramSet, oam: OamHistogram, conv=AlphaConvention.ZERO) -> CoefficientMap:
    """Linear inversion of tomograms to displacement-basis coefficients.

    Row ``l = 0`` is ``(1/2pi) sum_l p_l exp(i l phi)`` from the histogram.
    Row ``l != 0`` is the ``l``-th Fourier component of the tomogram at
    ``t = TIME_SIGN * phi / l`` times ``exp(-i (alpha + l phi / 2))``; binned
    data is first divided by the bin response ``sinc(l h / 2)``.

    Raises
    ------
    MissingTomogram
        If a required setting is absent.
    """
    conv = AlphaConvention.parse(conv)
    if not tset.tomograms:
        raise MissingTomogram("tomogram set is empty")
    L = tset.l_max
    grid = tset.grid
    if oam.l_max != L:
        raise ValueError(f"histogram covers l_max={oam.l_max}, tomograms l_max={L}")
    phi = grid.points
    rows = np.arange(-2 * L, 2 * L + 1)
    vals = np.zeros((len(rows), grid.n_points), dtype=complex)
    vals[2 * L] = oam.probabilities @ np.exp(1j * np.outer(oam_values(L), phi)) / TWO_PI
    sym = AlphaConvention.SYMMETRIC
    for l in rows:
        if l == 0:
            continue
        dens = np.stack([tset.lookup(int(l), j).density for j in range(grid.n_points)])
        F = fourier_coefficient(dens, int(l))
        if tset.wedge_width is not None:
            F = F / np.sinc(l * tset.wedge_width / TWO_PI)
        # F is the symmetric-gauge coefficient; move it to the requested gauge
        vals[l + 2 * L] = F * np.exp(1j * (sym.alpha(l, phi) - conv.alpha(l, phi)))
    return CoefficientMap(L, grid, vals, conv)


def reconstruct_wigner(tset: TomogramSet, oam: OamHistogram, conv=AlphaConvention.ZERO, grid: PeriodicGrid | None = None) -> WignerMap:
    """Wigner map from tomograms via the coefficient map of gauge ``conv``."""
    if grid is not None and grid != tset.grid:
        raise ValueError("reconstruction grid must match the tomogram grid")
    coeffs = reconstruct_coefficients(tset, oam, conv)
    return wigner_from_coefficients(coeffs, imag_tol=IMAG_TOL if tset.shots is None else None)


def populations_from_coefficients(coeffs: CoefficientMap) -> np.ndarray:
    """OAM populations ``p_l = 2pi * FourierCoefficient(rho(0, .), l)``."""
    row = coeffs.row(0)
    return np.array(
        [TWO_PI * fourier_coefficient(row, int(l)).real for l in oam_values(coeffs.l_max)]
    )
