"""Exit criteria of the build; each test records one PASS/FAIL line."""
import math
import time

import mpmath
import numpy as np

from oamwigner.conventions import AlphaConvention
from oamwigner.numerics import PeriodicGrid, theta3
from oamwigner.phase_space import (
    coefficient_map,
    displacement_matrix,
    kernel_matrix,
    marginals,
    shift_map,
    wigner_map,
)
from oamwigner.states import (
    TruncatedDensityMatrix,
    coherent_state,
    oam_eigenstate,
    random_density_matrix,
    random_pure_state,
    superposition_state,
)
from oamwigner.tomography import (
    populations_from_coefficients,
    reconstruct_coefficients,
    reconstruct_wigner,
    simulate_oam_histogram,
    simulate_tomogram_set,
)
from oracles import angle_density_oracle, kernel_by_double_fourier, theta3_series

ZERO, SYM = AlphaConvention.ZERO, AlphaConvention.SYMMETRIC


def test_01_kernel_equivalence(criterion):
    L = 6
    start = time.perf_counter()
    worst = 0.0
    for l, phi in [(0, 0.0), (1, 0.9), (-3, 2.6), (6, 4.4), (-6, 0.1)]:
        diff = kernel_matrix(l, phi, L) - kernel_by_double_fourier(l, phi, L, n_nodes=512)
        worst = max(worst, float(np.max(np.abs(diff))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 30
    criterion(1, "closed-form kernel vs double Fourier transform", ok, f"max diff {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_02_oam_eigenstate(criterion):
    L = 6
    g = PeriodicGrid(64)
    worst = 0.0
    for l0 in (-3, 0, 3):
        W = wigner_map(oam_eigenstate(l0, L), g)
        expect = np.zeros_like(W.values)
        expect[l0 + L] = 1 / (2 * np.pi)
        worst = max(worst, float(np.max(np.abs(W.values - expect))))
    ok = worst < 1e-12
    criterion(2, "OAM eigenstate W = delta/2pi", ok, f"max diff {worst:.2e}")
    assert ok


def test_03_marginals(criterion):
    L = 4
    g = PeriodicGrid(64)
    w_oam = w_ang = 0.0
    for seed in range(50):
        rho = random_density_matrix(L, 2, seed)
        oam, ang = marginals(wigner_map(rho, g))
        w_oam = max(w_oam, float(np.max(np.abs(oam - rho.populations()))))
        w_ang = max(w_ang, float(np.max(np.abs(ang - angle_density_oracle(rho.entries, g.points)))))
    ok = w_oam < 1e-10 and w_ang < 1e-8
    criterion(3, "marginals", ok, f"oam {w_oam:.2e}, angle {w_ang:.2e}")
    assert ok


def test_04_covariance(criterion):
    L = 6
    g = PeriodicGrid(64)
    rng = np.random.default_rng(404)
    worst = 0.0
    for seed in range(20):
        rho = random_density_matrix(L, 2, seed)
        dl = int(rng.integers(-3, 4))
        dj = int(rng.integers(0, g.n_points))
        D = displacement_matrix(dl, g.points[dj], L, SYM)
        W2 = wigner_map(TruncatedDensityMatrix(L, D @ rho.entries @ D.conj().T), g)
        shifted = shift_map(wigner_map(rho, g), dl, dj)
        inner = slice(abs(dl), 2 * L + 1 - abs(dl))
        worst = max(worst, float(np.max(np.abs(W2.values[inner] - shifted[inner]))))
    ok = worst < 1e-8
    criterion(4, "covariance under displacement", ok, f"max diff {worst:.2e}")
    assert ok


def test_05_coherent_structure(criterion):
    L = 8
    g = PeriodicGrid(256)
    W = wigner_map(coherent_state(0, 0.0, L), g)
    i, j = np.unravel_index(np.argmax(W.values), W.values.shape)
    at_origin = (int(i) - L, int(j)) == (0, 0)
    oam, _ = marginals(W)
    l = np.arange(-L, L + 1)
    th = float(mpmath.nsum(lambda n: mpmath.e ** (-n * n), [-mpmath.inf, mpmath.inf]))
    marg = float(np.max(np.abs(oam - np.exp(-(l**2)) / th)))
    near_pi = np.abs(g.points - np.pi) < np.pi / 4
    neg = [float(W.row(r)[near_pi].min()) for r in (1, -1)]
    ok = at_origin and marg < 1e-8 and all(v < 0 for v in neg)
    criterion(5, "coherent state (0,0) structure", ok,
              f"max at origin {at_origin}, marginal {marg:.2e}, min rows +-1 near pi {neg[0]:.3e}")
    assert ok


def test_06_superposition_structure(criterion):
    L, l0, phi0 = 4, 3, np.pi
    g = PeriodicGrid(64)
    W = wigner_map(superposition_state(l0, phi0, L), g)
    flat = max(float(np.max(np.abs(W.row(r) - 1 / (4 * np.pi)))) for r in (l0, -l0))
    others = [r for r in range(-L, L + 1) if r not in (0, l0, -l0)]
    zero = max(float(np.max(np.abs(W.row(r)))) for r in others)

    def fit(freq):
        X = np.column_stack([np.cos(freq * g.points), np.sin(freq * g.points)])
        coef, *_ = np.linalg.lstsq(X, W.row(0), rcond=None)
        return float(np.hypot(*coef)), float(np.max(np.abs(X @ coef - W.row(0))))

    amp6, res6 = fit(2 * l0)
    _, res8 = fit(8)
    ok = flat < 1e-10 and zero < 1e-10 and res6 < 1e-8 and abs(amp6 - 1 / (2 * np.pi)) < 1e-10
    criterion(6, "superposition structure", ok,
              f"frequency 2*l0=6 fits with residual {res6:.1e}, amplitude {amp6:.6f}; "
              f"printed frequency 8 leaves residual {res8:.2f}")
    assert ok and res8 > 0.1


def test_07_noiseless_roundtrip(criterion):
    L = 4
    g = PeriodicGrid(256)
    start = time.perf_counter()
    c_err = w_err = 0.0
    for seed in range(20):
        s = random_pure_state(L, 4, seed)
        tset = simulate_tomogram_set(s, g)
        hist = simulate_oam_histogram(s)
        C = reconstruct_coefficients(tset, hist, ZERO)
        c_err = max(c_err, float(np.max(np.abs(C.values - coefficient_map(s, g, ZERO).values))))
        W = reconstruct_wigner(tset, hist, ZERO)
        w_err = max(w_err, float(np.max(np.abs(W.values - wigner_map(s, g).values))))
    flat = 0.0
    for l0 in (-4, 0, 2):
        for tomo in simulate_tomogram_set(oam_eigenstate(l0, L), g).tomograms.values():
            flat = max(flat, float(np.max(np.abs(tomo.density - 1 / (2 * np.pi)))))
    elapsed = time.perf_counter() - start
    ok = c_err < 1e-8 and w_err < 1e-6 and flat < 1e-12 and elapsed < 60
    criterion(7, "noiseless tomographic round trip", ok,
              f"coeff {c_err:.2e}, wigner {w_err:.2e}, flat {flat:.1e}, {elapsed:.1f} s")
    assert ok


def test_08_noisy_roundtrip(criterion):
    L = 3
    g = PeriodicGrid(16)
    within = 0
    errors = {10**4: [], 10**5: [], 10**6: []}
    for seed in range(100):
        s = random_pure_state(L, 2, 1000 + seed)
        truth = s.density_matrix().populations()
        direct = wigner_map(s, g).values
        for shots in errors:
            tset = simulate_tomogram_set(s, g, shots=shots, seed=seed)
            hist = simulate_oam_histogram(s, shots, seed)
            C = reconstruct_coefficients(tset, hist, ZERO)
            W = reconstruct_wigner(tset, hist, ZERO)
            errors[shots].append(float(np.max(np.abs(W.values - direct))))
            if shots == 10**6:
                pops = populations_from_coefficients(C)
                sigma = np.sqrt(truth * (1 - truth) / shots)
                within += bool(np.all(np.abs(pops - truth) <= 5 * sigma + 1e-15))
    means = [float(np.mean(errors[k])) for k in sorted(errors)]
    monotone = means[0] > means[1] > means[2]
    ok = within >= 99 and monotone
    criterion(8, "noisy round trip", ok,
              f"{within}/100 runs within 5 sigma; mean errors " + " > ".join(f"{m:.2e}" for m in means))
    assert ok


def test_09_theta3(criterion):
    got = theta3(0.0, math.exp(-1)).real
    ref = theta3_series(0.0, mpmath.e ** -1, dps=50).real
    diff = abs(got - ref)
    ok = diff < 1e-13 and f"{got:.10f}".startswith("1.7726372048")
    criterion(9, "theta3(0, 1/e)", ok, f"{got:.16f}, diff {diff:.1e}")
    assert ok


def test_10_gauge_independence(criterion):
    L = 4
    g = PeriodicGrid(64)
    agree = worst_direct = 0.0
    for seed in range(5):
        rho = random_density_matrix(L, 4, 500 + seed)
        tset = simulate_tomogram_set(rho, g)
        hist = simulate_oam_histogram(rho)
        Wz = reconstruct_wigner(tset, hist, ZERO)
        Ws = reconstruct_wigner(tset, hist, SYM)
        agree = max(agree, float(np.max(np.abs(Wz.values - Ws.values))))
        direct = wigner_map(rho, g).values
        worst_direct = max(worst_direct, float(np.max(np.abs(Wz.values - direct))), float(np.max(np.abs(Ws.values - direct))))
    ok = agree < 1e-8 and worst_direct < 1e-8
    criterion(10, "gauge independence of reconstruction", ok, f"zero vs symmetric {agree:.2e}, vs direct {worst_direct:.2e}")
    assert ok
