import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oamwigner.errors import ExcessLeakage, OutOfTruncation, UnresolvableWedge
from oamwigner.numerics import PeriodicGrid
from oamwigner.states import (
    PureState,
    TruncatedDensityMatrix,
    coherent_angular_wavefunction,
    coherent_state,
    oam_eigenstate,
    random_density_matrix,
    random_pure_state,
    state_from_json,
    superposition_state,
    validate,
    wedge_state,
)

# 1/theta3(0, 1/e) and e^{-1}/theta3(0, 1/e), 40-digit mpmath
C0_SQ = 0.5641312262188420746098899648910056755003
C1_SQ = 0.2075322802487481331822545072628402934113
# wedge overlaps for width pi at phi0 = 0 (mpmath quadrature of the top-hat)
WEDGE_C0 = 0.7071067811865475244008443621048490392848
WEDGE_C1 = 0.4501581580785530347775995955033702913323


def test_oam_eigenstate_index():
    s = oam_eigenstate(0, 4)
    assert s.amplitudes[4] == 1 and np.count_nonzero(s.amplitudes) == 1
    s = oam_eigenstate(3, 4)
    assert s.amplitude(3) == 1 and s.amplitudes[7] == 1


def test_oam_eigenstate_out_of_truncation():
    with pytest.raises(OutOfTruncation):
        oam_eigenstate(5, 4)


def test_coherent_state_populations():
    s = coherent_state(0, 0.0, 8)
    assert abs(abs(s.amplitude(0)) ** 2 - C0_SQ) < 1e-12
    assert abs(abs(s.amplitude(1)) ** 2 - C1_SQ) < 1e-12
    assert abs(abs(s.amplitude(-1)) ** 2 - C1_SQ) < 1e-12
    assert s.leakage < 1e-8


def test_coherent_state_phase_only_in_phi0():
    a = coherent_state(0, 0.0, 8)
    b = coherent_state(0, np.pi / 2, 8)
    np.testing.assert_allclose(np.abs(a.amplitudes), np.abs(b.amplitudes), atol=1e-15)


@pytest.mark.parametrize("l0", [-2, 0, 1, 2])
def test_coherent_marginal_gaussian(l0):
    s = coherent_state(l0, 0.4, 8)
    theta = 1 / C0_SQ
    for l in range(-6, 7):
        assert abs(abs(s.amplitude(l)) ** 2 - math.exp(-((l - l0) ** 2)) / theta) < 1e-8


def test_coherent_state_margin():
    with pytest.raises(OutOfTruncation):
        coherent_state(3, 0.0, 8)


def test_coherent_state_leakage_error(monkeypatch):
    import oamwigner.states as st_mod

    monkeypatch.setattr(st_mod, "COHERENT_MARGIN", 2)
    with pytest.raises(ExcessLeakage):
        st_mod.coherent_state(0, 0.0, 2)


@pytest.mark.parametrize("l0,phi0", [(0, 0.0), (1, 0.7), (-2, 2.0)])
def test_coherent_angle_wavefunction_theta_form(l0, phi0):
    g = PeriodicGrid(256)
    s = coherent_state(l0, phi0, 10)
    synth = s.angular_wavefunction(g.points)
    closed = coherent_angular_wavefunction(g.points, l0, phi0)
    assert np.max(np.abs(np.abs(synth) - np.abs(closed))) < 1e-6
    # with theta read as phi0 the phases agree as well
    assert np.max(np.abs(synth - closed)) < 1e-6


def test_superposition_fig2_parameters():
    s = superposition_state(3, np.pi, 4)
    assert s.amplitude(3) == pytest.approx(1 / math.sqrt(2))
    assert s.amplitude(-3) == pytest.approx(-1 / math.sqrt(2), abs=1e-15)


def test_superposition_equal_weights():
    s = superposition_state(1, 0.0, 4)
    assert s.amplitude(1) == pytest.approx(1 / math.sqrt(2))
    assert s.amplitude(-1) == pytest.approx(1 / math.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(l0=st.integers(1, 6), phi0=st.floats(-10, 10))
def test_superposition_structure(l0, phi0):
    s = superposition_state(l0, phi0, 6)
    assert s.norm == pytest.approx(1.0, abs=1e-14)
    nz = np.flatnonzero(s.amplitudes)
    assert len(nz) == 2
    np.testing.assert_allclose(np.abs(s.amplitudes[nz]) ** 2, 0.5, atol=1e-15)


def test_superposition_out_of_truncation():
    with pytest.raises(OutOfTruncation):
        superposition_state(5, 0.0, 4)


def test_wedge_full_circle_is_flat_state():
    for L in (1, 4, 7):
        s = wedge_state(0.0, 2 * np.pi, L)
        np.testing.assert_allclose(s.amplitudes, oam_eigenstate(0, L).amplitudes, atol=1e-15)


def test_wedge_overlaps_before_renormalization():
    s = wedge_state(0.0, np.pi, 8)
    kept = 1.0 - s.leakage
    raw = s.amplitudes * math.sqrt(kept)
    assert abs(raw[8] - WEDGE_C0) < 1e-12
    assert abs(raw[9] - WEDGE_C1) < 1e-12
    assert abs(raw[10]) < 1e-15


@pytest.mark.parametrize("L", [4, 8])
@pytest.mark.parametrize("factor", [1.0, 1.5, 2.0])
def test_wedge_density_peaks_at_centre(L, factor):
    # holds for wedges up to twice the resolution limit; wider hard-edged
    # wedges ring (Gibbs) and peak near their edges
    g = PeriodicGrid(256)
    phi0 = g.points[40]
    s = wedge_state(phi0, factor * 2 * np.pi / (2 * L + 1), L)
    dens = np.abs(s.angular_wavefunction(g.points)) ** 2
    assert np.argmax(dens) == 40


def test_wedge_unresolvable():
    with pytest.raises(UnresolvableWedge):
        wedge_state(0.0, 0.5, 4)


def test_validate_pure_state_passes():
    rep = validate(coherent_state(1, 0.3, 8).density_matrix())
    assert rep.passed


def test_validate_trace_defect():
    rho = TruncatedDensityMatrix(2, np.diag([0.5, 0, 0, 0, 0]))
    rep = validate(rho)
    assert not rep.passed
    assert rep.trace_defect == pytest.approx(0.5)


def test_validate_maximally_mixed():
    rep = validate(TruncatedDensityMatrix(2, np.eye(5) / 5))
    assert rep.passed and rep.min_eigenvalue == pytest.approx(0.2)


def test_validate_flags_nonhermitian_and_negative():
    m = np.eye(3) / 3
    m[0, 1] = 0.1
    assert not validate(TruncatedDensityMatrix(1, m)).passed
    assert not validate(TruncatedDensityMatrix(1, np.diag([1.2, -0.2, 0.0]))).passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), support=st.integers(0, 4))
def test_random_states_are_valid(seed, support):
    assert validate(random_pure_state(4, support, seed).density_matrix()).passed
    assert validate(random_density_matrix(4, support, seed)).passed


def test_json_roundtrip():
    s = coherent_state(1, 0.3, 8)
    back = state_from_json(s.to_json())
    assert isinstance(back, PureState)
    np.testing.assert_array_equal(back.amplitudes, s.amplitudes)
    rho = random_density_matrix(3, 2, 5)
    back = state_from_json(rho.to_json())
    assert isinstance(back, TruncatedDensityMatrix)
    np.testing.assert_array_equal(back.entries, rho.entries)


def test_json_malformed():
    with pytest.raises(ValueError):
        state_from_json({"l_max": 2})
    with pytest.raises(ValueError):
        state_from_json({"l_max": 1, "amplitudes": [[1, 0]]})
