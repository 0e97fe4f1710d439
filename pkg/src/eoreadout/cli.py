"""Batch command-line interface.

Subcommands
-----------
simulate   averaged readout traces for both qubit states of one scheme
shots      full single-shot pipeline: scenario -> shots -> scores -> fits
budget     thermal / coherence / efficiency sweeps as CSV tables
replay     re-run a saved manifest (byte-identical data outputs)

Exit codes: 0 success, 2 usage, 3 config, 4 numeric failure, 5 I/O.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import budget as budget_mod
from . import detection
from .errors import (ConfigError, DegenerateWeightError, FitError, GridError,
                     NonFiniteError, SchemeError, SingularSystemError,
                     StepSizeError)
from .params import QubitState, load_config
from .scenarios import default_readout_pulse, readout_scenario
from .storage import (Manifest, write_histogram_csv, write_report,
                      write_rows_csv, write_shots_npz, write_trace_csv,
                      write_trajectory_csv, write_trajectory_npz)
from .system import SCHEMES

EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4
EXIT_IO = 5

_NUMERIC_ERRORS = (DegenerateWeightError, FitError, NonFiniteError,
                   SingularSystemError, StepSizeError, GridError,
                   np.linalg.LinAlgError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eoreadout",
        description="Electro-optic qubit-readout simulator and analysis toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="device TOML file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "bin"), default="csv")

    p_sim = sub.add_parser("simulate", help="averaged readout traces")
    common(p_sim)
    p_sim.add_argument("--scheme", required=True, choices=SCHEMES)
    p_sim.add_argument("--state", choices=("g", "e"),
                       help="restrict to one prepared state (default: both)")

    p_shots = sub.add_parser("shots", help="single-shot pipeline and reports")
    common(p_shots)
    p_shots.add_argument("--scheme", required=True, choices=SCHEMES)
    p_shots.add_argument("--shots", type=int, default=15000,
                         help="shots per prepared state")
    p_shots.add_argument("--snr", type=float,
                         help="override the preset score separation / sigma_det")
    p_shots.add_argument("--qnd-gap", type=float,
                         help="also simulate a second measurement after this "
                              "many seconds and report the QND metric")

    p_budget = sub.add_parser("budget", help="coherence/thermal/efficiency sweeps")
    common(p_budget)
    p_budget.add_argument("--sweep", required=True,
                          help="var:start:stop:steps with var in "
                               "{rep_rate, power, temperature, cooperativity}")

    p_replay = sub.add_parser("replay", help="re-run a saved manifest")
    p_replay.add_argument("--manifest", required=True)
    p_replay.add_argument("--out", help="override the output directory")
    return parser


def _parse_sweep(spec: str):
    try:
        var, start, stop, steps = spec.split(":")
        start, stop, steps = float(start), float(stop), int(steps)
    except ValueError:
        raise UsageError(f"bad sweep spec {spec!r}; expected var:start:stop:steps")
    if var not in ("rep_rate", "power", "temperature", "cooperativity"):
        raise UsageError(f"unknown sweep variable {var!r}")
    if steps < 1:
        raise UsageError("sweep grid is empty")
    return var, np.linspace(start, stop, steps)


class UsageError(Exception):
    pass


def _run_scenarios(params, scheme):
    return {label: readout_scenario(scheme, params, QubitState(label))
            for label in ("g", "e")}


def cmd_simulate(args) -> int:
    params = load_config(args.config)
    manifest = Manifest(subcommand="simulate", config_path=str(args.config),
                        config_hash=params.config_hash, seed=args.seed,
                        scheme=args.scheme, out_dir=str(args.out),
                        flags={"state": args.state, "format": args.format})
    os.makedirs(args.out, exist_ok=True)

    states = (args.state,) if args.state else ("g", "e")
    for label in states:
        res = readout_scenario(args.scheme, params, QubitState(label),
                               keep_trajectory=True)
        write_trace_csv(os.path.join(args.out, f"trace_{label}.csv"),
                        res, manifest)
        if args.format == "bin":
            write_trajectory_npz(os.path.join(args.out, f"trajectory_{label}.npz"),
                                 res.trajectory, manifest)
        else:
            write_trajectory_csv(os.path.join(args.out, f"trajectory_{label}.csv"),
                                 res.trajectory, manifest)
    manifest.save(os.path.join(args.out, "manifest.json"))
    return 0


def cmd_shots(args) -> int:
    if args.shots < 2:
        raise UsageError("--shots must be >= 2 (need both prepared states)")
    params = load_config(args.config)
    manifest = Manifest(subcommand="shots", config_path=str(args.config),
                        config_hash=params.config_hash, seed=args.seed,
                        scheme=args.scheme, out_dir=str(args.out),
                        flags={"shots": args.shots, "snr": args.snr,
                               "qnd_gap": args.qnd_gap, "format": args.format})
    os.makedirs(args.out, exist_ok=True)

    scen = _run_scenarios(params, args.scheme)
    point = detection.REFERENCE_OPERATING_POINTS[args.scheme]
    if args.snr is not None:
        from dataclasses import replace
        point = replace(point, snr=args.snr)

    pulse = default_readout_pulse()
    sel = ((scen["g"].t >= pulse.start)
           & (scen["g"].t < pulse.start + point.integration_time))
    avg_g = scen["g"].envelope[sel]
    avg_e = scen["e"].envelope[sel]
    dt = scen["g"].dt

    cfg = detection.calibrate_shot_config(point, avg_g, avg_e, dt)
    shots = detection.simulate_shots(
        avg_g, avg_e, dt, cfg.sigma_det, 2 * args.shots, seed=args.seed,
        t1=cfg.t1, thermal_excitation=cfg.thermal_excitation,
        induced_ge=cfg.induced_ge, induced_eg=cfg.induced_eg,
        weight=cfg.weight, config_hash=params.config_hash)
    scores = shots.scores()
    scores_g, scores_e = shots.class_scores()

    if scores.size >= 100:
        fit = detection.fit_double_gaussian(scores, labels=shots.prepared)
        fit_note = ("ok" if scores.size >= 1000 else
                    "small ensemble; statistics are not meaningful")
        eff = detection.quantum_efficiency(fit, point.n_meas_sqrt)
    else:
        fit = None
        fit_note = "insufficient data for a mixture fit (need >= 100 scores)"
        eff = None
    report = detection.assignment_fidelity(
        scores_g, scores_e, threshold=cfg.threshold_clean,
        integration_time=point.integration_time, fit=fit)

    rows = {
        "scheme": args.scheme,
        "n_shots_per_state": args.shots,
        "snr": point.snr,
        "sigma_det_score_units": cfg.sigma_det,
        "fidelity": report.fidelity,
        "p_e_given_g": report.p_e_given_g,
        "p_g_given_e": report.p_g_given_e,
        "eps_overlap_analytic": report.eps_overlap,
        "threshold": report.threshold,
        "integration_time_s": point.integration_time,
        "fit_quality": fit_note,
    }
    if fit is not None:
        rows.update({
            "fit_mu_g": fit.mu_g, "fit_mu_e": fit.mu_e,
            "fit_sigma_g": fit.sigma_g, "fit_sigma_e": fit.sigma_e,
            "fit_w_g": fit.w_g, "fit_w_e": fit.w_e,
            "fit_converged": fit.converged,
            "eta_det": eff.eta_det,
            "sigma_det_scaled": eff.sigma_det,
        })

    if args.qnd_gap is not None:
        mu_g = float(np.mean(scores_g))
        mu_e = float(np.mean(scores_e))
        _, _, qnd = detection.simulate_qnd_experiment(
            mu_g, mu_e, cfg.sigma_det, 2 * args.shots, args.qnd_gap,
            cfg.t1, cfg.thermal_excitation, seed=args.seed + 1)
        rows.update({"qnd_q": qnd.q, "qnd_p_gg": qnd.p_gg,
                     "qnd_p_ee": qnd.p_ee, "qnd_gap_s": args.qnd_gap})

    write_report(os.path.join(args.out, "report.txt"), rows, manifest)
    if fit is not None:
        write_histogram_csv(os.path.join(args.out, "histogram.csv"),
                            scores_g, scores_e, fit, manifest)
    write_shots_npz(os.path.join(args.out, "shots.npz"), shots, scores,
                    manifest, include_iq=(args.format == "bin"))
    manifest.save(os.path.join(args.out, "manifest.json"))
    return 0


def cmd_budget(args) -> int:
    params = load_config(args.config)
    var, grid = _parse_sweep(args.sweep)
    manifest = Manifest(subcommand="budget", config_path=str(args.config),
                        config_hash=params.config_hash, seed=args.seed,
                        scheme=None, out_dir=str(args.out),
                        flags={"sweep": args.sweep, "format": args.format})
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, f"budget_{var}.csv")

    if var in ("rep_rate", "power"):
        if np.any(grid < 0):
            raise UsageError(f"{var} sweep requires values >= 0")
        pulse_energy = 0.14 * 2e-6
        names = ["rep_rate_hz", "p_avg_w", "t_mxc_k", "t_eo_k", "t_cavity_k",
                 "t_qubit_k", "gamma_qp", "gamma_purcell", "gamma_rad",
                 "t1_s", "gamma_phi", "t2_limit_s", "thermal_excitation",
                 "fidelity", "qnd"]
        t1_model = budget_mod.T1Model.calibrated(params)

        def row(value):
            rate = value if var == "rep_rate" else value / pulse_energy
            pt = budget_mod.predict_fidelity_vs_power(
                [rate], params, t1_model=t1_model)[0]
            return [pt.rep_rate, pt.p_avg, pt.thermal.t_mxc, pt.thermal.t_eo,
                    pt.thermal.t_cavity, pt.thermal.t_qubit,
                    pt.budget.gamma_qp, pt.budget.gamma_purcell,
                    pt.budget.gamma_rad, pt.budget.t1, pt.budget.gamma_phi,
                    pt.budget.t2_limit, pt.thermal_excitation, pt.fidelity,
                    pt.qnd]
    elif var == "temperature":
        if np.any(grid <= 0):
            raise UsageError("temperature sweep requires T > 0")
        model = budget_mod.T1Model.calibrated(params)
        names = ["temperature_k", "n_th_cavity", "n_th_qubit", "x_qp",
                 "gamma_qp", "gamma_purcell", "gamma_rad", "t1_s",
                 "gamma_phi", "t2_limit_s"]

        def row(temp):
            cb = budget_mod.coherence_budget(params, temp, temp, model=model)
            return [temp, budget_mod.bose_occupation(temp, params.omega_c),
                    budget_mod.bose_occupation(temp, params.omega_q),
                    budget_mod.qp_density_equilibrium(temp, params.gap),
                    cb.gamma_qp, cb.gamma_purcell, cb.gamma_rad, cb.t1,
                    cb.gamma_phi, cb.t2_limit]
    else:  # cooperativity
        if np.any(grid < 0):
            raise UsageError("cooperativity sweep requires C >= 0")
        names = ["cooperativity", "g_hz", "eta_eo"]

        def row(c):
            g = budget_mod.cooperativity_to_g(c, params)
            return [c, g / (2 * np.pi),
                    budget_mod.conversion_efficiency(c, params.eta_e,
                                                     params.eta_o)]

    # fan out over a bounded pool; executor.map keeps input order, so the
    # table is written in grid order regardless of completion order
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        rows = list(pool.map(row, grid))

    write_rows_csv(out_path, names, rows, manifest)
    if args.format == "bin":
        np.savez_compressed(out_path.replace(".csv", ".npz"),
                            columns=np.array(names),
                            table=np.asarray(rows, dtype=float))
    manifest.save(os.path.join(args.out, "manifest.json"))
    return 0


def cmd_replay(args) -> int:
    manifest = Manifest.load(args.manifest)
    params = load_config(manifest.config_path)
    if params.config_hash != manifest.config_hash:
        raise ConfigError("config file changed since the manifest was written; "
                          f"hash {params.config_hash} != {manifest.config_hash}")
    argv = [manifest.subcommand, "--config", manifest.config_path,
            "--out", args.out or manifest.out_dir,
            "--seed", str(manifest.seed)]
    if manifest.scheme:
        argv += ["--scheme", manifest.scheme]
    for key, value in manifest.flags.items():
        if value is not None:
            argv += ["--" + key.replace("_", "-"), str(value)]
    return main(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"simulate": cmd_simulate, "shots": cmd_shots,
               "budget": cmd_budget, "replay": cmd_replay}[args.subcommand]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
