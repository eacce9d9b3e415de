"""Command-line entry point.

Runs one or more configured simulations and writes plain-text artifacts:
``series.csv`` (per-sample observables), ``spectral_density.csv`` (final-time
spectra where applicable), ``wigner_*.txt`` (phase-space grids), ``units.txt``
(unit-conversion table) and ``metadata.json`` (the fully resolved
configuration plus run diagnostics).  Floats are written with repr-exact
``%.17g`` formatting so that fixed-step runs reproduce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time as _time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .fock import WignerGrid, wigner_single_mode
from .integrate import IntegratorOptions
from .multimode import (
    asymptotic_r_multimode,
    initial_multimode_state,
    integrate_gif_multimode,
    make_gaussian_pump,
    manley_rowe,
    pump_photon_number,
    signal_spectral_density,
)
from .observables import (
    apply_discrete_loss,
    gaussian_squeezing_report,
    hybrid_supermode_state,
    signal_pump_entropy,
    signal_purity,
    squeezing_report,
    supermode_wigner,
    variance_to_db,
)
from .oracle import oracle_evolve
from .single_mode import (
    SingleModeParams,
    asymptotic_r_single,
    evolve_gif_full,
    evolve_lab_full,
    initial_lab_state,
    reconstruct_lab_moments,
    two_mode_layout,
)
from .supermodes import decompose_supermodes, evolve_nongaussian
from .units import PhysicalParams, loss_over_length, nonlinear_length, summary_table


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_wigner(path: Path, grid: WignerGrid) -> None:
    lines = [
        f"# frame: {grid.frame}",
        "# xs: " + " ".join(_fmt(v) for v in grid.xs),
        "# ps: " + " ".join(_fmt(v) for v in grid.ps),
        "# values: one row per p, one column per x",
    ]
    lines += [" ".join(_fmt(v) for v in row) for row in grid.values]
    path.write_text("\n".join(lines) + "\n")


def write_metadata(path: Path, cfg: RunConfig, diagnostics: dict,
                   elapsed: float) -> None:
    import scipy

    meta = {
        "package_version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "python_version": sys.version.split()[0],
        "config": cfg.resolved(),
        "diagnostics": diagnostics,
        "elapsed_seconds": round(elapsed, 3),
    }
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _tight_gaussian_options(options: IntegratorOptions) -> IntegratorOptions:
    """Options for cheap Gaussian comparison runs: keep fixed-step mode for
    determinism, otherwise tighten so the symplectic monitors stay far below
    their thresholds regardless of the configured state-evolution tolerance."""
    if options.fixed_step is not None:
        return options
    return IntegratorOptions(rtol=min(options.rtol, 1e-11),
                             atol=min(options.atol, 1e-13))


def run_single(cfg: RunConfig, out: Path) -> dict:
    sc = cfg["single"]
    beta0 = complex(sc["beta0_re"], sc["beta0_im"])
    params = SingleModeParams(delta=sc["delta"], beta0=beta0,
                              t_final=cfg["run"]["t_final"],
                              sample_times=cfg.sample_times())
    options = cfg.integrator_options()

    lab_states = evolve_lab_full(params, tuple(sc["lab_cutoffs"]), options)
    gif_traj = evolve_gif_full(params, tuple(sc["gif_cutoffs"]), options)

    layout = two_mode_layout(*sc["lab_cutoffs"])
    from .fock import build_mode_operators

    _, b = build_mode_operators(layout, force_sparse=True)
    n_b = (b.conj().T @ b).tocsr()
    n_pump0 = float(initial_lab_state(layout, beta0).expectation(n_b).real)

    header = ["time", "r_full", "r_gif", "r_undepleted_implied", "r_asymptote",
              "n_signal_full", "n_signal_gif", "x2_signal_gif", "p2_signal_gif",
              "leakage_full", "leakage_gif"]
    rows = [[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0]]
    max_leak_full = max_leak_gif = max_defect = 0.0
    for lab, (gif, psi) in zip(lab_states, gif_traj):
        mom_full = _lab_signal_moments(lab, params.delta)
        mom = reconstruct_lab_moments(gif, psi, params.delta)
        r_full = 1.0 - mom_full["n_pump"] / n_pump0
        r_gif = 1.0 - mom["n_pump"] / abs(beta0) ** 2
        r_un = abs(gif.s) ** 2 / (2.0 * abs(beta0) ** 2)
        max_leak_full = max(max_leak_full, lab.top_level_population())
        max_leak_gif = max(max_leak_gif, psi.top_level_population())
        max_defect = max(max_defect, gif.bogoliubov_defect())
        rows.append([lab.time, r_full, r_gif, r_un,
                     asymptotic_r_single(lab.time),
                     mom_full["n_signal"], mom["n_signal"],
                     mom["x2_signal"], mom["p2_signal"],
                     lab.top_level_population(), psi.top_level_population()])
    write_csv(out / "series.csv", header, rows)
    return {"max_leakage_full": max_leak_full,
            "max_leakage_gif": max_leak_gif,
            "max_bogoliubov_defect": max_defect}


def _lab_signal_moments(state, delta: float) -> dict:
    """Signal/pump moments of a direct two-mode lab state."""
    from .fock import build_mode_operators

    a, b = build_mode_operators(state.layout, force_sparse=True)
    av = a @ state.amplitudes
    bv = b @ state.amplitudes
    n_a = float(np.real(np.vdot(av, av)))
    n_b = float(np.real(np.vdot(bv, bv)))
    a2 = complex(np.vdot(state.amplitudes, a @ av))
    return {
        "n_signal": n_a,
        "n_pump": n_b,
        "x2_signal": np.real(a2) + n_a + 0.5,
        "p2_signal": -np.real(a2) + n_a + 0.5,
    }


def run_multimode_gif(cfg: RunConfig, out: Path) -> dict:
    grid = cfg.wavegrid()
    pump = make_gaussian_pump(grid, cfg["pump"]["n_sh0"],
                              cfg["pump"]["min_coverage"])
    n0 = pump.n_sh0
    ts = cfg.sample_times()
    # pure-Gaussian runs are cheap; integrate at least at the tight tolerance
    # so the symplectic invariants stay far below their abort thresholds
    options = _tight_gaussian_options(cfg.integrator_options())
    dep = integrate_gif_multimode(grid, pump, "depleted",
                                  cfg["run"]["t_final"], ts, options)
    undep = integrate_gif_multimode(grid, pump, "undepleted",
                                    cfg["run"]["t_final"], ts, options)

    header = ["time", "r_gif", "r_undepleted_implied", "r_asymptote",
              "n_signal_gif", "sd_peak_gif", "sd_peak_undepleted",
              "constraint_defect"]
    rows = [[0.0] * len(header)]
    max_defect = 0.0
    for d, u in zip(dep, undep):
        sd_d = signal_spectral_density(d, ds=grid.ds)
        sd_u = signal_spectral_density(u, ds=grid.ds)
        max_defect = max(max_defect, d.bogoliubov_defect())
        rows.append([d.time,
                     1.0 - d.pump_photon_number_gaussian() / n0,
                     u.signal_photon_number_gaussian() / (2.0 * n0),
                     asymptotic_r_multimode(d.time),
                     d.signal_photon_number_gaussian(),
                     sd_d.max(), sd_u.max(), d.bogoliubov_defect()])
    write_csv(out / "series.csv", header, rows)

    sd_d = signal_spectral_density(dep[-1], ds=grid.ds)
    sd_u = signal_spectral_density(undep[-1], ds=grid.ds)
    write_csv(out / "spectral_density.csv", ["s", "sd_gif", "sd_undepleted"],
              [[s, a, b] for s, a, b in zip(grid.signal_grid, sd_d, sd_u)])
    return {"max_constraint_defect": max_defect}


def run_nongaussian(cfg: RunConfig, out: Path) -> dict:
    grid = cfg.wavegrid()
    pump = make_gaussian_pump(grid, cfg["pump"]["n_sh0"],
                              cfg["pump"]["min_coverage"])
    n0 = pump.n_sh0
    ts = cfg.sample_times()
    t_final = cfg["run"]["t_final"]
    trunc = cfg.truncation()
    options = cfg.integrator_options()
    gauss_options = _tight_gaussian_options(options)
    eta = cfg["loss"]["transmissivity"]

    dep = integrate_gif_multimode(grid, pump, "depleted", t_final, ts,
                                  gauss_options)
    undep = integrate_gif_multimode(grid, pump, "undepleted", t_final, ts,
                                    gauss_options)
    samples = evolve_nongaussian(grid, pump, t_final, ts, trunc, options)

    m_fh = trunc.m_fh
    header = (["time", "r_undepleted_implied", "r_gif", "r_nongaussian",
               "r_asymptote", "sd_peak_undepleted", "sd_peak_gif",
               "sd_peak_nongaussian"]
              + [f"lambda_{m}" for m in range(m_fh)]
              + ["x2_db_gif", "p2_db_gif", "x2_db_nongaussian",
                 "p2_db_nongaussian"]
              + (["p2_db_gif_lossy", "p2_db_nongaussian_lossy"] if eta < 1 else [])
              + ["purity_signal", "entropy_signal_pump", "manley_rowe_drift",
                 "leakage", "constraint_defect"])
    row0 = [0.0] * 8 + [0.0] * m_fh + [0.0, 0.0, 0.0, 0.0]
    if eta < 1:
        row0 += [0.0, 0.0]
    row0 += [1.0, 0.0, 0.0, 0.0, 0.0]
    rows = [row0]

    gauss_basis = decompose_supermodes(initial_multimode_state(grid, pump),
                                       m_fh, grid)
    mr0 = 2.0 * n0
    max_leak = max_defect = max_mr = 0.0
    for d, u, smp in zip(dep, undep, samples):
        gauss_basis = decompose_supermodes(d, m_fh, grid, prev=gauss_basis)
        rep_g = gaussian_squeezing_report(gauss_basis, d.time)
        rep = squeezing_report(smp, grid)

        sd_u = signal_spectral_density(u, ds=grid.ds)
        sd_g = signal_spectral_density(d, ds=grid.ds)
        sd_n = signal_spectral_density(smp.gif, smp.basis, smp.state, grid.ds)
        r_n = 1.0 - pump_photon_number(smp.gif, smp.state, smp.basis,
                                       grid.delta_pump) / n0
        mr = manley_rowe(smp.gif, smp.state, smp.basis, grid.delta_pump)
        mr_drift = mr / mr0 - 1.0
        leak = smp.state.top_level_population()
        defect = smp.gif.bogoliubov_defect()
        max_leak = max(max_leak, leak)
        max_defect = max(max_defect, defect)
        max_mr = max(max_mr, abs(mr_drift))

        row = [d.time,
               u.signal_photon_number_gaussian() / (2.0 * n0),
               1.0 - d.pump_photon_number_gaussian() / n0,
               r_n,
               asymptotic_r_multimode(d.time),
               sd_u.max(), sd_g.max(), sd_n.max()]
        row += list(rep.lambdas)
        row += [variance_to_db(rep_g.x2_lab[0]), variance_to_db(rep_g.p2_lab[0]),
                variance_to_db(rep.x2_lab[0]), variance_to_db(rep.p2_lab[0])]
        if eta < 1:
            row += [variance_to_db(apply_discrete_loss(rep_g.p2_lab[0], eta)),
                    variance_to_db(apply_discrete_loss(rep.p2_lab[0], eta))]
        row += [signal_purity(smp), signal_pump_entropy(smp), mr_drift, leak,
                defect]
        rows.append(row)
    write_csv(out / "series.csv", header, rows)

    sd_u = signal_spectral_density(undep[-1], ds=grid.ds)
    sd_g = signal_spectral_density(dep[-1], ds=grid.ds)
    last = samples[-1]
    sd_n = signal_spectral_density(last.gif, last.basis, last.state, grid.ds)
    write_csv(out / "spectral_density.csv",
              ["s", "sd_undepleted", "sd_gif", "sd_nongaussian"],
              [[s, a, b, c] for s, a, b, c
               in zip(grid.signal_grid, sd_u, sd_g, sd_n)])

    wc = cfg["wigner"]
    if wc["enabled"]:
        axes = np.linspace(-wc["extent"], wc["extent"], wc["points"])
        g = supermode_wigner(last, wc["mode"], axes, axes, frame=wc["frame"])
        write_wigner(out / f"wigner_mode{wc['mode']}_{wc['frame']}.txt", g)
        if wc["hybrid"]:
            rho = hybrid_supermode_state(last, wc["hybrid_phi"],
                                         wc["hybrid_theta"])
            gh = wigner_single_mode(rho, axes, axes, frame="gif")
            write_wigner(out / "wigner_hybrid_gif.txt", gh)

    return {"max_leakage": max_leak, "max_constraint_defect": max_defect,
            "max_manley_rowe_drift": max_mr}


def run_oracle(cfg: RunConfig, out: Path) -> dict:
    grid = cfg.wavegrid()
    pump = make_gaussian_pump(grid, cfg["pump"]["n_sh0"],
                              cfg["pump"]["min_coverage"])
    ts = cfg.sample_times()
    samples = oracle_evolve(grid, pump, cfg["run"]["t_final"], ts,
                            tuple(cfg["oracle"]["signal_cutoffs"]),
                            tuple(cfg["oracle"]["pump_cutoffs"]),
                            cfg.integrator_options())
    n0 = pump.n_sh0
    header = ["time", "r_oracle", "n_signal", "n_pump", "leakage"]
    rows = [[0.0, 0.0, 0.0, n0, 0.0]]
    max_leak = 0.0
    for s in samples:
        max_leak = max(max_leak, s.leakage)
        rows.append([s.time, 1.0 - s.n_pump / n0, s.n_signal, s.n_pump,
                     s.leakage])
    write_csv(out / "series.csv", header, rows)
    write_csv(out / "spectral_density.csv", ["s", "sd_oracle"],
              [[s, v] for s, v in zip(grid.signal_grid,
                                      samples[-1].spectral_density)])
    return {"max_leakage": max_leak}


def run_units(cfg: RunConfig, out: Path) -> dict:
    uc = cfg["units"]
    params = PhysicalParams.from_lab_units(uc["lambda_sh_nm"], uc["eta_w_cm2"],
                                           uc["k2_fs2_mm"], uc["r"],
                                           uc["l_loss_m"])
    table = summary_table(params)
    print(table)
    (out / "units.txt").write_text(table + "\n")
    l_chi2, l_eff = nonlinear_length(params)
    return {"l_chi2_m": l_chi2, "l_eff_m": l_eff,
            "loss_over_l_eff": loss_over_length(params, l_eff)}


_RUNNERS = {
    "single": run_single,
    "multimode-gif": run_multimode_gif,
    "nongaussian": run_nongaussian,
    "oracle": run_oracle,
    "units": run_units,
}


def _preset_path(name: str) -> Path:
    folder = resources.files("gifsqueeze") / "presets"
    ref = folder / f"{name}.ini"
    if not ref.is_file():
        available = sorted(p.name[:-4] for p in folder.iterdir()
                           if p.name.endswith(".ini"))
        raise ConfigError(f"unknown preset {name!r}; available: {available}")
    return Path(str(ref))


def _load(spec: dict) -> RunConfig:
    path = spec["config"]
    if spec["preset"] is not None:
        path = str(_preset_path(spec["preset"]))
    overrides = list(spec["overrides"])
    if spec["fixed_step"] is not None:
        overrides.append(f"run.fixed_step={spec['fixed_step']}")
    return load_config(path, overrides)


def _execute(spec: dict) -> str:
    """Run one configured simulation; returns the run label."""
    cfg = _load(spec)
    out = Path(spec["out"])
    out.mkdir(parents=True, exist_ok=True)
    start = _time.perf_counter()
    diagnostics = _RUNNERS[cfg.kind](cfg, out)
    write_metadata(out / "metadata.json", cfg, diagnostics,
                   _time.perf_counter() - start)
    return cfg["run"]["label"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gifsqueeze",
        description="Multimode squeezing dynamics in a Gaussian interaction "
                    "frame: Gaussian, non-Gaussian, and brute-force models.")
    parser.add_argument("subcommand", nargs="?", choices=["units"],
                        help="shortcut: 'units' prints the unit-conversion "
                             "table (same as --set run.kind=units)")
    parser.add_argument("--config", action="append", default=[],
                        metavar="PATH", help="INI config file (repeatable)")
    parser.add_argument("--preset", action="append", default=[],
                        metavar="NAME",
                        help="bundled preset name (repeatable)")
    parser.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: ./out); multiple "
                             "runs are placed in per-label subdirectories")
    parser.add_argument("--set", action="append", default=[], dest="overrides",
                        metavar="SECTION.KEY=VALUE",
                        help="override a config value (repeatable)")
    parser.add_argument("--fixed-step", type=float, default=None, metavar="DT",
                        help="deterministic fixed-step RK4 with this step")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel worker processes for multiple runs")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sources: list[tuple[str | None, str | None]] = \
            [(c, None) for c in args.config] + [(None, p) for p in args.preset]
        overrides = list(args.overrides)
        if args.subcommand == "units":
            overrides.append("run.kind=units")
        if not sources:
            sources = [(None, None)]
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")

        specs = []
        labels = set()
        for config, preset in sources:
            spec = {"config": config, "preset": preset, "overrides": overrides,
                    "fixed_step": args.fixed_step, "out": args.out}
            label = _load(spec)["run"]["label"]  # validate early
            if len(sources) > 1:
                if label in labels:
                    raise ConfigError(
                        f"duplicate run label {label!r}; set run.label to "
                        "give each run its own output subdirectory")
                labels.add(label)
                spec["out"] = str(Path(args.out) / label)
            specs.append(spec)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.jobs > 1 and len(specs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                for label in pool.map(_execute, specs):
                    print(f"completed: {label}")
        else:
            for spec in specs:
                print(f"completed: {_execute(spec)}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
