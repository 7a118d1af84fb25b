"""Command-line entry point.

Every command writes its dataset as CSV into ``--out`` together with a JSON
manifest. The manifest echoes the fully resolved config (flags applied), so
``sectormusic <command> --config <manifest>`` replays the run exactly.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""
import argparse
import dataclasses
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .array_model import BEAMWIDTH_CONSTANT, beamwidth_deg
from .beamspace import array_gain, build_weighting
from .config import ConfigError, RunConfig, emit_csv, emit_manifest, load_config
from .dpss import compute_bank
from .errors import NumericalError
from .harness import (
    DEFAULT_B,
    DEFAULT_DIM,
    REFERENCE_THRESHOLDS,
    build_figure_sweep,
    build_table,
    find_empirical_threshold,
    reference_rows,
    theoretical_threshold,
)
from .music import angle_grid, eig_hermitian, evaluate_grid, find_peaks, resolved
from .signal_sim import beamspace_covariance, generate_snapshots, sample_covariance

TABLE_COLUMNS = ["N", "n", "B", "alpha_d_deg", "K", "tau_theory_db", "tau_sim_db",
                 "gain_db", "delta"]


def _resolve_config(args, required=True):
    if args.config is None:
        if required:
            raise ConfigError(f"'{args.command}' needs --config")
        cfg = RunConfig(N=8)
    else:
        cfg = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.space is not None:
        updates["space"] = args.space
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("invalid flag '--trials': trials >= 1 required")
        updates["trials"] = args.trials
    if args.snr_step_db is not None:
        if not args.snr_step_db > 0:
            raise ConfigError("invalid flag '--snr-step-db': snr_step_db > 0 required")
        updates["snr_step_db"] = args.snr_step_db
    return dataclasses.replace(cfg, **updates)


def _weighting(cfg):
    bank = compute_bank(cfg.N, cfg.B, cfg.n)
    return build_weighting(cfg.geom, bank, np.deg2rad(cfg.center_deg))


def cmd_dpss(cfg, out):
    bank = compute_bank(cfg.N, cfg.B, cfg.n)
    columns = ["l"] + [f"v{k}" for k in range(bank.count)]
    rows = [{"l": "concentration", **{f"v{k}": lam for k, lam in enumerate(bank.concentrations)}}]
    for l in range(cfg.N):
        rows.append({"l": l, **{f"v{k}": bank.sequences[l, k] for k in range(bank.count)}})
    print("concentrations: " + ", ".join(f"{c:.8f}" for c in bank.concentrations))
    return [emit_csv(out / "dpss.csv", rows, columns)]


def cmd_gain(cfg, out):
    W = _weighting(cfg)
    rows = []
    for a in np.arange(-89.0, 89.0 + 1e-9, 0.5):
        lin, db = array_gain(W, cfg.geom, np.deg2rad(a))
        rows.append({"alpha_deg": a, "gain_linear": lin, "gain_db": db})
    lin, db = array_gain(W, cfg.geom)
    print(f"gain at sector center {cfg.center_deg:g} deg: {lin:.6g} ({db:.4g} dB)")
    return [emit_csv(out / "gain.csv", rows, ["alpha_deg", "gain_linear", "gain_db"])]


def cmd_spectrum(cfg, out):
    scenario = cfg.scenario()
    X = generate_snapshots(scenario)
    cov = sample_covariance(X)
    W = None
    if cfg.space == "beamspace":
        W = _weighting(cfg)
        cov = beamspace_covariance(cov, W)
    bw = beamwidth_deg(cfg.geom, cfg.bw_constant)
    step = cfg.grid_step_deg or bw / 200.0
    angles = angle_grid(cfg.center_deg, cfg.grid_half_span_bw * bw, step)
    grid = evaluate_grid(eig_hermitian(cov), cfg.geom, len(cfg.alphas), angles, W)
    peaks = find_peaks(grid)
    print("peaks (deg): " + ", ".join(f"{a:.4f}" for a, _ in peaks[:len(cfg.alphas) + 2]))
    if len(cfg.alphas) == 2:
        a1, a2 = np.deg2rad(cfg.alphas)
        print(f"resolved: {resolved(peaks, a1, a2, cfg.geom, cfg.bw_constant)}")
    rows = [{"angle_deg": a, "null_value": d, "spectrum_value": p}
            for a, d, p in zip(grid.angles, grid.null_values, grid.spectrum_values)]
    return [emit_csv(out / "spectrum.csv", rows, ["angle_deg", "null_value", "spectrum_value"])]


def cmd_threshold(cfg, out):
    th = theoretical_threshold(cfg.mc_config())
    label = "tau_n" if cfg.space == "beamspace" else "tau"
    print(f"{label} = {th['tau']:.6g} ({th['tau_db']:.4f} dB)")
    print(f"A_g = {th['gain']:.6g} ({th['gain_db']:.4f} dB)")
    print(f"delta = {th['delta']:.6g}")
    print(f"within expansion validity: {th['within_validity']}")
    row = {"tau_linear": th["tau"], "tau_db": th["tau_db"], "gain_linear": th["gain"],
           "gain_db": th["gain_db"], "delta": th["delta"],
           "within_validity": th["within_validity"]}
    return [emit_csv(out / "threshold.csv", [row], list(row))]


def cmd_sweep(cfg, out):
    rows = build_figure_sweep(cfg.N, [cfg.n], cfg.B, [cfg.K], cfg.alpha_d_grid,
                              cfg.d_over_lambda)
    return [emit_csv(out / "sweep.csv", rows, ["alpha_d_deg", "tau_n_db"])]


def cmd_montecarlo(cfg, out):
    res = find_empirical_threshold(cfg.mc_config())
    crossing = "n/a" if res.crossing50_db is None else f"{res.crossing50_db:.2f} dB"
    measured = "n/a" if res.empirical_threshold_db is None else f"{res.empirical_threshold_db:g} dB"
    print(f"theoretical threshold: {res.theoretical_threshold_db:.2f} dB")
    print(f"empirical threshold: {measured} ({res.status}); 50% crossing: {crossing}")
    curve = [{"asnr_db": s, "probability": p}
             for s, p in zip(res.snr_grid_db, res.probabilities)]
    trials = [{"asnr_db": r["asnr_db"], "trial": r["trial"], "resolved": r["resolved"],
               "peaks_deg": " ".join(f"{a:.6f}" for a in r["peaks_deg"])}
              for r in res.trial_log]
    summary = [{"tau_theory_db": res.theoretical_threshold_db,
                "tau_sim_db": res.empirical_threshold_db, "status": res.status,
                "crossing50_db": res.crossing50_db}]
    return [
        emit_csv(out / "montecarlo.csv", curve, ["asnr_db", "probability"]),
        emit_csv(out / "montecarlo_trials.csv", trials,
                 ["asnr_db", "trial", "resolved", "peaks_deg"]),
        emit_csv(out / "montecarlo_summary.csv", summary, list(summary[0])),
    ]


def cmd_tables(cfg, out, simulate=False, max_k=None, workers=1):
    rows = [r for r in reference_rows() if max_k is None or r[4] <= max_k]
    table = build_table(rows, simulate=simulate, workers=workers, space=cfg.space,
                        trials=cfg.trials, snr_step_db=cfg.snr_step_db,
                        base_seed=cfg.seed, gain_mode=cfg.gain_mode)
    for entry in table:
        entry["tau_reference_db"], entry["sim_reference_db"] = \
            REFERENCE_THRESHOLDS[(entry["N"], entry["alpha_d_deg"])][entry["K"]]
    columns = TABLE_COLUMNS + ["tau_reference_db", "sim_reference_db", "within_validity"]
    if simulate:
        columns += ["sim_status", "crossing50_db"]
    for e in table:
        sim = "" if e["tau_sim_db"] is None else f"  sim {e['tau_sim_db']:g}"
        print(f"N={e['N']:2d} alpha_d={e['alpha_d_deg']:5g} K={e['K']:5d}  "
              f"theory {e['tau_theory_db']:7.2f} dB{sim}")
    return [emit_csv(out / "tables.csv", table, columns)]


def cmd_figures(cfg, out):
    rows = []
    for N in (8, 16):
        rows += build_figure_sweep(N, cfg.dims, cfg.B, cfg.snapshot_counts, cfg.alpha_d_grid,
                                   cfg.d_over_lambda)
    return [emit_csv(out / "figures.csv", rows, ["curve_id", "alpha_d_deg", "tau_n_db"])]


COMMANDS = {
    "dpss": (cmd_dpss, True, "DPSS bank as CSV with concentrations"),
    "gain": (cmd_gain, True, "prefilter array gain over angle"),
    "spectrum": (cmd_spectrum, True, "MUSIC null spectrum for one simulated scenario"),
    "threshold": (cmd_threshold, True, "theoretical resolution threshold"),
    "sweep": (cmd_sweep, True, "threshold versus separation"),
    "montecarlo": (cmd_montecarlo, True, "resolution probability versus SNR"),
    "tables": (cmd_tables, False, "threshold tables for the 24 reference settings"),
    "figures": (cmd_figures, False, "threshold curves for N = 8 and 16"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sectormusic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config or a previous run manifest")
    common.add_argument("--seed", type=int, help="base seed (overrides the config)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--space", choices=["element", "beamspace"])
    common.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    common.add_argument("--snr-step-db", type=float, help="SNR grid step in dB")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "tables":
            p.add_argument("--simulate", action="store_true",
                           help="also run the Monte Carlo column (slow)")
            p.add_argument("--max-k", type=int, help="skip rows with more snapshots")
            p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    func, needs_config, _ = COMMANDS[args.command]
    started = time.time()
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("invalid flag '--seed': 0 <= seed < 2**64 required")
        cfg = _resolve_config(args, required=needs_config)
        kwargs = {}
        if args.command == "tables":
            kwargs = {"simulate": args.simulate, "max_k": args.max_k, "workers": args.workers}
        outputs = func(cfg, args.out, **kwargs)
        extra = {"options": kwargs} if kwargs else None
        manifest = emit_manifest(args.out / f"{args.command}_manifest.json", args.command,
                                 cfg, outputs, started, extra)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in outputs:
        print(f"wrote {path}")
    print(f"wrote {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
