"""Truncated quantum states in the OAM basis ``l = -L..L``."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .conventions import TWO_PI, angle_ket_overlap, oam_index, oam_values
from .errors import ExcessLeakage, OutOfTruncation, UnresolvableWedge
from .numerics import reduce_angle, theta3

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGEN_TOL = 1e-10
NORM_TOL = 1e-10
COHERENT_LEAKAGE_TOL = 1e-8
COHERENT_MARGIN = 6

#: theta3(0, 1/e); normalization of the cylinder coherent states.
THETA3_0_INV_E = theta3(0.0, math.exp(-1.0)).real


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitudes ``c_l`` on ``l = -l_max..l_max``.

    ``leakage`` is the probability the untruncated state carries outside the
    window; the stored amplitudes are renormalized.
    """

    l_max: int
    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.shape != (2 * self.l_max + 1,):
            raise ValueError(
                f"expected {2 * self.l_max + 1} amplitudes for l_max={self.l_max}, got {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def amplitude(self, l: int) -> complex:
        if abs(l) > self.l_max:
            return 0j
        return complex(self.amplitudes[oam_index(l, self.l_max)])

    def density_matrix(self) -> "TruncatedDensityMatrix":
        c = self.amplitudes
        return TruncatedDensityMatrix(self.l_max, np.outer(c, c.conj()))

    def angular_wavefunction(self, phi):
        """``<phi|psi>`` by Fourier synthesis of the amplitudes."""
        return angle_ket_overlap(oam_values(self.l_max), phi) @ self.amplitudes

    def to_json(self) -> dict:
        return {
            "kind": "pure",
            "l_max": self.l_max,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
            "leakage": float(self.leakage),
        }


@dataclass(frozen=True, eq=False)
class TruncatedDensityMatrix:
    """Density matrix with entries ``rho[m + L, n + L] = <m|rho|n>``."""

    l_max: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex).copy()
        d = 2 * self.l_max + 1
        if rho.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix for l_max={self.l_max}, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return 2 * self.l_max + 1

    def element(self, m: int, n: int) -> complex:
        L = self.l_max
        if abs(m) > L or abs(n) > L:
            return 0j
        return complex(self.entries[m + L, n + L])

    def populations(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def to_json(self) -> dict:
        return {
            "kind": "density",
            "l_max": self.l_max,
            "entries": [[float(a.real), float(a.imag)] for a in self.entries.ravel()],
        }


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = (
            self.hermiticity_defect < HERMITICITY_TOL
            and self.trace_defect <= TRACE_TOL
            and self.min_eigenvalue >= -EIGEN_TOL
        )
        object.__setattr__(self, "passed", bool(ok))


def validate(rho: TruncatedDensityMatrix) -> ValidationReport:
    """Check Hermiticity, unit trace and positivity of ``rho``."""
    m = rho.entries
    herm = float(np.max(np.abs(m - m.conj().T)))
    trace = abs(complex(np.trace(m)) - 1.0)
    eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    return ValidationReport(herm, trace, eig)


def _check_window(l0: int, l_max: int) -> None:
    if abs(l0) > l_max:
        raise OutOfTruncation(f"l0={l0} lies outside the truncation [-{l_max}, {l_max}]")


def _normalized(l_max: int, amps: np.ndarray, full_mass: float) -> PureState:
    kept = float(np.sum(np.abs(amps) ** 2))
    leakage = max(full_mass - kept, 0.0)
    return PureState(l_max, amps / math.sqrt(kept), leakage)


def oam_eigenstate(l0: int, l_max: int) -> PureState:
    _check_window(l0, l_max)
    amps = np.zeros(2 * l_max + 1, dtype=complex)
    amps[oam_index(l0, l_max)] = 1.0
    return PureState(l_max, amps)


def coherent_state(l0: int, phi0: float, l_max: int) -> PureState:
    """Cylinder coherent state ``|l0, phi0>``.

    ``<l|l0,phi0> = exp(-i l phi0) exp(-(l-l0)^2/2) / sqrt(theta3(0, 1/e))``.

    Raises
    ------
    OutOfTruncation
        If ``|l0| > l_max - 6``.
    ExcessLeakage
        If the Gaussian tail outside the window reaches ``1e-8``.
    """
    if abs(l0) > l_max - COHERENT_MARGIN:
        raise OutOfTruncation(
            f"coherent state at l0={l0} needs l_max >= {abs(l0) + COHERENT_MARGIN}, got {l_max}"
        )
    l = oam_values(l_max)
    amps = np.exp(-1j * l * phi0 - 0.5 * (l - l0) ** 2) / math.sqrt(THETA3_0_INV_E)
    state = _normalized(l_max, amps, 1.0)
    if state.leakage >= COHERENT_LEAKAGE_TOL:
        raise ExcessLeakage(f"coherent state leaks {state.leakage:.3g} outside the window")
    return state


def superposition_state(l0: int, phi0: float, l_max: int) -> PureState:
    """``(|l0> + exp(i phi0) |-l0>) / sqrt(2)``."""
    if l0 <= 0:
        raise ValueError(f"l0 must be positive, got {l0}")
    _check_window(l0, l_max)
    amps = np.zeros(2 * l_max + 1, dtype=complex)
    amps[oam_index(l0, l_max)] = 1 / math.sqrt(2)
    amps[oam_index(-l0, l_max)] = np.exp(1j * phi0) / math.sqrt(2)
    return PureState(l_max, amps)


def wedge_state(phi0: float, width: float, l_max: int) -> PureState:
    """Top-hat angular wavefunction of ``width`` centred on ``phi0``.

    ``c_l = exp(-i l phi0) * width * sinc(l width / 2) / sqrt(2 pi width)``;
    the hard edges make the truncation leakage of order ``1 / l_max``.
    """
    if not 0.0 < width <= TWO_PI:
        raise ValueError(f"wedge width must lie in (0, 2pi], got {width!r}")
    if width < TWO_PI / (2 * l_max + 1):
        raise UnresolvableWedge(
            f"width {width:.4g} is below the resolution 2pi/{2 * l_max + 1} of l_max={l_max}"
        )
    l = oam_values(l_max)
    # np.sinc is the normalized sinc, sin(pi x)/(pi x)
    amps = np.exp(-1j * l * phi0) * width * np.sinc(l * width / TWO_PI) / math.sqrt(TWO_PI * width)
    return _normalized(l_max, amps, 1.0)


def random_pure_state(l_max: int, support: int, seed) -> PureState:
    """Haar-like random state with amplitudes only on ``|l| <= support``."""
    _check_window(support, l_max)
    rng = np.random.default_rng(seed)
    amps = np.zeros(2 * l_max + 1, dtype=complex)
    z = rng.normal(size=2 * support + 1) + 1j * rng.normal(size=2 * support + 1)
    amps[l_max - support : l_max + support + 1] = z / np.linalg.norm(z)
    return PureState(l_max, amps)


def random_density_matrix(l_max: int, support: int, seed, rank: int | None = None) -> TruncatedDensityMatrix:
    """Random mixed state of the given rank supported on ``|l| <= support``."""
    _check_window(support, l_max)
    rng = np.random.default_rng(seed)
    d = 2 * support + 1
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    block = g @ g.conj().T
    block /= np.trace(block).real
    rho = np.zeros((2 * l_max + 1,) * 2, dtype=complex)
    rho[l_max - support : l_max + support + 1, l_max - support : l_max + support + 1] = block
    return TruncatedDensityMatrix(l_max, rho)


def as_density_matrix(state) -> TruncatedDensityMatrix:
    if isinstance(state, TruncatedDensityMatrix):
        return state
    return state.density_matrix()


def coherent_angular_wavefunction(phi, l0: int, phi0: float):
    """Closed theta-function form of ``<phi|l0,phi0>`` (no truncation).

    ``exp(i l0 (phi - phi0)) theta3((phi - phi0)/2, e^{-1/2})
    / sqrt(2 pi theta3(0, 1/e))``.
    """
    phi = np.asarray(phi, dtype=float)
    th = theta3(0.5 * (phi - phi0), math.exp(-0.5))
    return np.exp(1j * l0 * (phi - phi0)) * th / math.sqrt(TWO_PI * THETA3_0_INV_E)


def _pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("complex values must be given as [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def state_from_json(obj) -> PureState | TruncatedDensityMatrix:
    """Inverse of ``to_json`` for either state type.

    Objects with ``amplitudes`` are pure states; objects with ``entries`` are
    row-major density matrices.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "l_max" not in obj:
        raise ValueError("state object must contain 'l_max'")
    l_max = int(obj["l_max"])
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    if "amplitudes" in obj:
        return PureState(l_max, _pairs_to_complex(obj["amplitudes"]), float(obj.get("leakage", 0.0)))
    if "entries" in obj:
        d = 2 * l_max + 1
        flat = _pairs_to_complex(obj["entries"])
        if flat.size != d * d:
            raise ValueError(f"expected {d * d} entries, got {flat.size}")
        return TruncatedDensityMatrix(l_max, flat.reshape(d, d))
    raise ValueError("state object needs 'amplitudes' or 'entries'")
