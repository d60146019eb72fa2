"""Command-line front end.

    oamwigner state coherent --l0 0 --phi0 0 --lmax 8 -o coh.json
    oamwigner wigner coh.json --grid 256 -o coh_wigner.json
    oamwigner tomo coh.json --grid 64 --shots 1000000 --seed 7 -o run/
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .conventions import AlphaConvention, oam_values
from .errors import CylinderError
from .numerics import PeriodicGrid
from .phase_space import coefficient_map, marginals, wigner_map
from .states import (
    as_density_matrix,
    coherent_state,
    oam_eigenstate,
    random_density_matrix,
    random_pure_state,
    state_from_json,
    superposition_state,
    validate,
    wedge_state,
)
from .tomography import (
    populations_from_coefficients,
    reconstruct_coefficients,
    simulate_oam_histogram,
    simulate_tomogram_set,
    wigner_from_coefficients,
)


class InvariantViolation(RuntimeError):
    pass


@dataclass
class RunConfig:
    l_max: int | None = None
    grid_points: int | None = None
    convention: str = "zero"
    seed: int | None = None
    shots: int | None = None
    format: str = "json"
    output: str | None = None

    def resolve_grid(self, l_max: int) -> PeriodicGrid:
        n = self.grid_points
        if n is None:
            n = 64
            while n < 4 * l_max + 2:
                n *= 2
        grid = PeriodicGrid(n)
        grid.require(l_max)
        return grid

    def check(self) -> None:
        if self.shots is not None and self.seed is None:
            raise ValueError("--seed is mandatory when --shots is given")
        if self.shots is not None and self.shots < 1:
            raise ValueError("--shots must be positive")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.format!r}")
        AlphaConvention.parse(self.convention)
        if self.l_max is not None and self.grid_points is not None:
            PeriodicGrid(self.grid_points).require(self.l_max)


def _config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = RunConfig(**data)
    for name in ("l_max", "grid_points", "convention", "seed", "shots", "format", "output"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    cfg.check()
    return cfg


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True) + "\n")


def _load_state(path):
    try:
        obj = json.loads(Path(path).read_text())
        state = state_from_json(obj)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        raise ValueError(f"cannot read state file {path}: {exc}") from exc
    rho = as_density_matrix(state)
    report = validate(rho)
    if not report.passed:
        raise InvariantViolation(
            f"state fails validation: hermiticity {report.hermiticity_defect:.3g}, "
            f"trace {report.trace_defect:.3g}, min eigenvalue {report.min_eigenvalue:.3g}"
        )
    return state, rho


def cmd_state(args) -> int:
    cfg = _config(args)
    L = cfg.l_max
    if L is None:
        raise ValueError("--lmax is required")
    kind = args.kind
    if kind == "oam":
        state = oam_eigenstate(args.l0, L)
    elif kind == "coherent":
        state = coherent_state(args.l0, args.phi0, L)
    elif kind == "superposition":
        state = superposition_state(args.l0, args.phi0, L)
    elif kind == "wedge":
        if args.width is None:
            raise ValueError("--width is required for wedge states")
        state = wedge_state(args.phi0, args.width, L)
    elif kind == "random":
        seed = 0 if cfg.seed is None else cfg.seed
        support = L if args.support is None else args.support
        if args.mixed:
            state = random_density_matrix(L, support, seed)
        else:
            state = random_pure_state(L, support, seed)
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    out = Path(cfg.output or f"{kind}_state.json")
    _dump(state.to_json(), out)
    rho = as_density_matrix(state)
    norm = float(np.trace(rho.entries).real)
    leakage = getattr(state, "leakage", 0.0)
    print(f"wrote {out}")
    print(f"norm {norm:.17g}")
    print(f"leakage {leakage:.3e}")
    return 0


def _write_map(wmap, stem: Path, fmt: str) -> list:
    stem.parent.mkdir(parents=True, exist_ok=True)
    oam, angle = marginals(wmap)
    if fmt == "csv":
        paths = [stem.with_suffix(".csv"), Path(f"{stem}_oam_marginal.csv"), Path(f"{stem}_angle_marginal.csv")]
        paths[0].write_text(wmap.to_csv())
        paths[1].write_text("l,probability\n" + "".join(f"{l},{p:.17g}\n" for l, p in zip(wmap.l_values, oam)))
        paths[2].write_text("phi,density\n" + "".join(f"{x:.17g},{v:.17g}\n" for x, v in zip(wmap.grid.points, angle)))
    else:
        paths = [stem.with_suffix(".json"), Path(f"{stem}_marginals.json")]
        _dump(wmap.to_json(), paths[0])
        _dump(
            {"l": wmap.l_values.tolist(), "oam": oam.tolist(),
             "phi": wmap.grid.points.tolist(), "angle": angle.tolist()},
            paths[1],
        )
    return paths


def _stem(path: str | None, default: str) -> Path:
    p = Path(path or default)
    return p.with_suffix("") if p.suffix in (".json", ".csv") else p


def cmd_wigner(args) -> int:
    cfg = _config(args)
    state, rho = _load_state(args.state)
    grid = cfg.resolve_grid(rho.l_max)
    wmap = wigner_map(rho, grid)
    oam, angle = marginals(wmap)
    mass = wmap.total_mass()
    if abs(mass - 1.0) > 1e-8:
        raise InvariantViolation(f"Wigner map integrates to {mass:.17g}")
    paths = _write_map(wmap, _stem(cfg.output, Path(args.state).stem + "_wigner"), cfg.format)
    val, l, phi = wmap.most_negative()
    print("wrote " + ", ".join(str(p) for p in paths))
    print(f"total mass {mass:.17g}")
    print(f"most negative {val:.6e} at l={l}, phi={phi:.6f}")
    print("oam marginal " + " ".join(f"{int(k)}:{p:.6g}" for k, p in zip(wmap.l_values, oam)))
    print(f"angle marginal min {angle.min():.6g} max {angle.max():.6g}")
    return 0


def cmd_tomo(args) -> int:
    cfg = _config(args)
    state, rho = _load_state(args.state)
    grid = cfg.resolve_grid(rho.l_max)
    conv = AlphaConvention.parse(cfg.convention)
    tset = simulate_tomogram_set(rho, grid, shots=cfg.shots, seed=cfg.seed)
    hist = simulate_oam_histogram(rho, shots=cfg.shots, seed=cfg.seed)
    coeffs = reconstruct_coefficients(tset, hist, conv)
    noisy = cfg.shots is not None
    recon = wigner_from_coefficients(coeffs, imag_tol=None if noisy else 1e-12)
    direct = wigner_map(rho, grid)
    truth = coefficient_map(rho, grid, conv)
    pops = populations_from_coefficients(coeffs)
    report = {
        "l_max": rho.l_max,
        "grid": grid.n_points,
        "convention": conv.value,
        "settings": len(tset),
        "shots": cfg.shots,
        "seed": cfg.seed,
        "max_abs_wigner_error": float(np.max(np.abs(recon.values - direct.values))),
        "max_abs_coefficient_error": float(np.max(np.abs(coeffs.values - truth.values))),
        "imag_residue": recon.imag_residue,
        "populations": pops.tolist(),
    }
    if noisy:
        sig = np.concatenate([t.sigma() for t in tset.tomograms.values()])
        report["bin_sigma_mean"] = float(sig.mean())
        report["bin_sigma_max"] = float(sig.max())
        report["population_sigma"] = hist.sigma().tolist()
    out = Path(cfg.output or Path(args.state).stem + "_tomo")
    out.mkdir(parents=True, exist_ok=True)
    _dump(tset.to_json(), out / "tomograms.json")
    _dump(hist.to_json(), out / "oam_histogram.json")
    _write_map(recon, out / "wigner_reconstructed", cfg.format)
    _dump(report, out / "report.json")
    print(f"wrote {out}/")
    print(f"settings {len(tset)}")
    print(f"max abs Wigner error {report['max_abs_wigner_error']:.3e}")
    print(f"max abs coefficient error {report['max_abs_coefficient_error']:.3e}")
    if noisy:
        print(f"bin sigma mean {report['bin_sigma_mean']:.3e} max {report['bin_sigma_max']:.3e}")
    print("populations " + " ".join(f"{int(l)}:{p:.6g}" for l, p in zip(oam_values(rho.l_max), pops)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oamwigner", description="Wigner functions and tomography on the discrete cylinder")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON RunConfig; explicit flags take precedence")
        sp.add_argument("-o", "--output", help="output path")
        sp.add_argument("--format", choices=("json", "csv"))

    s = sub.add_parser("state", help="generate a state file")
    s.add_argument("kind", choices=("oam", "coherent", "superposition", "wedge", "random"))
    s.add_argument("--l0", type=int, default=0)
    s.add_argument("--phi0", type=float, default=0.0)
    s.add_argument("--width", type=float)
    s.add_argument("--lmax", dest="l_max", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--support", type=int, help="random states: populated |l| range")
    s.add_argument("--mixed", action="store_true", help="random states: full-rank density matrix")
    common(s)
    s.set_defaults(func=cmd_state)

    w = sub.add_parser("wigner", help="compute a Wigner map and its marginals")
    w.add_argument("state")
    w.add_argument("--grid", dest="grid_points", type=int)
    common(w)
    w.set_defaults(func=cmd_wigner)

    t = sub.add_parser("tomo", help="simulate tomography and reconstruct")
    t.add_argument("state")
    t.add_argument("--grid", dest="grid_points", type=int)
    t.add_argument("--conv", dest="convention", choices=[c.value for c in AlphaConvention])
    t.add_argument("--shots", type=int)
    t.add_argument("--seed", type=int)
    common(t)
    t.set_defaults(func=cmd_tomo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CylinderError, InvariantViolation, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
