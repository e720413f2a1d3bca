"""Batch command-line interface.

Subcommands: modes, evolve, kaon, scan, converge. Every command prints CSV
or JSON rows to stdout, or writes them to --out with a RunManifest beside
the file as `<out>.manifest.json`.

Exit codes: 0 ok, 2 invalid arguments or spec, 3 numeric-domain error
(branch cut, singular or degenerate map), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import DOMAIN_ERRORS, USAGE_ERRORS, InvalidInput
from .evolution import ChrononParams, TwoState, UnitSystem, evolve, symmetric_hamiltonian
from .kaon import (epsilon_mixing, kaon_trajectory, three_pion_intensity,
                   two_pion_intensity, width_shift)
from .runner import (CONVERGENCE_COLUMNS, ScanSpec, convergence_study, emit,
                     emit_with_manifest, kaon_from_config, load_kaon_config,
                     parse_complex_pair, run_scan, scan_columns)
from .spectrum import CONVENTIONS, decay_reading, efold_direction, imag_real_ratio, mode_report
from .errors import UndefinedRatio

MODES_COLUMNS = ["mode", "h", "lambda_re", "lambda_im", "heff_re", "heff_im",
                 "hfirst_re", "hfirst_im", "step_mag", "efold_time",
                 "direction", "reading", "ratio_exact", "ratio_first",
                 "nu_nonhermitian"]

EVOLVE_COLUMNS = ["t", "a0_re", "a0_im", "a1_re", "a1_im", "norm2"]


def _add_output_args(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output path (writes a manifest too)")


def _add_chronon_args(sub):
    sub.add_argument("--energy", type=float, required=True)
    sub.add_argument("--n", type=int, default=1)
    sub.add_argument("--tau-scale", type=float, default=1.0)
    sub.add_argument("--hbar", type=float, default=1.0)


def _cmd_modes(args):
    p = ChrononParams(energy=args.energy, n=args.n, tau_scale=args.tau_scale)
    units = UnitSystem(hbar=args.hbar)
    spec = mode_report(symmetric_hamiltonian(args.energy), p, units, args.convention)
    rows = []
    for rec in spec.modes:
        row = {
            "mode": rec.mode_index,
            "h": rec.h_continuous,
            "lambda_re": rec.lambda_step.real,
            "lambda_im": rec.lambda_step.imag,
            "heff_re": rec.h_eff_exact.real,
            "heff_im": rec.h_eff_exact.imag,
            "hfirst_re": rec.h_first_order.real,
            "hfirst_im": rec.h_first_order.imag,
            "step_mag": rec.step_magnitude,
            "efold_time": rec.efold_time,
            "direction": efold_direction(rec.lambda_step),
            "reading": decay_reading(rec.h_eff_exact, spec.convention),
            "nu_nonhermitian": spec.nu_nonhermitian,
        }
        for which, col in (("exact", "ratio_exact"), ("first_order", "ratio_first")):
            try:
                row[col] = imag_real_ratio(rec, which)
            except UndefinedRatio:
                row[col] = None
        rows.append(row)
    params = {"command": "modes", "energy": args.energy, "n": args.n,
              "tau_scale": args.tau_scale, "hbar": args.hbar,
              "convention": args.convention}
    return rows, MODES_COLUMNS, params


def _cmd_evolve(args):
    p = ChrononParams(energy=args.energy, n=args.n, tau_scale=args.tau_scale)
    units = UnitSystem(hbar=args.hbar)
    psi0 = TwoState(parse_complex_pair(args.psi0))
    traj = evolve(symmetric_hamiltonian(args.energy), psi0, args.engine,
                  args.t_max, args.steps, p, units)
    norms = traj.norm_sq()
    rows = [{"t": float(t), "a0_re": s[0].real, "a0_im": s[0].imag,
             "a1_re": s[1].real, "a1_im": s[1].imag, "norm2": float(n2)}
            for t, s, n2 in zip(traj.times, traj.states, norms)]
    params = {"command": "evolve", "engine": args.engine, "energy": args.energy,
              "n": args.n, "tau_scale": args.tau_scale, "hbar": args.hbar,
              "t_max": args.t_max, "steps": args.steps, "psi0": args.psi0}
    return rows, EVOLVE_COLUMNS, params


def _cmd_kaon(args):
    cfg = load_kaon_config(args.config)
    model, p = kaon_from_config(cfg)
    params = {"command": "kaon", "config": str(args.config),
              "observable": args.observable, "engine": args.engine, **cfg}

    if args.observable in ("2pi", "3pi"):
        t_max = cfg.get("t_max")
        if t_max is None:
            raise InvalidInput("config must set t_max for trajectory observables")
        steps = cfg.get("steps")
        if steps is None:
            if args.engine == "discrete":
                steps = max(1, round(t_max / p.step(model.units)))
            else:
                raise InvalidInput("config must set steps for continuous trajectories")
        traj = kaon_trajectory(model, args.engine, t_max, steps, p, cfg["psi0"])
        series = (two_pion_intensity if args.observable == "2pi"
                  else three_pion_intensity)(traj, model)
        rows = [{"t": t, "rate": v} for t, v in series]
        return rows, ["t", "rate"], params

    if args.observable == "epsilon":
        eps = epsilon_mixing(model, p, args.engine)
        rows = [{"engine": args.engine, "epsilon_re": eps.real,
                 "epsilon_im": eps.imag, "epsilon_abs": abs(eps)}]
        return rows, ["engine", "epsilon_re", "epsilon_im", "epsilon_abs"], params

    # width-shift (engine-independent)
    fast, slow = width_shift(model, p)
    row = {}
    for lbl, rec in (("fast", fast), ("slow", slow)):
        row[f"{lbl}_h_re"] = rec.h_generator.real
        row[f"{lbl}_h_im"] = rec.h_generator.imag
        row[f"{lbl}_lambda_re"] = rec.lambda_step.real
        row[f"{lbl}_lambda_im"] = rec.lambda_step.imag
        row[f"{lbl}_lambda_abs"] = abs(rec.lambda_step)
        row[f"{lbl}_gamma_continuous"] = rec.gamma_continuous
        row[f"{lbl}_gamma_effective"] = rec.gamma_effective
    return [row], list(row.keys()), params


def _cmd_scan(args):
    spec = ScanSpec.from_json_file(args.spec)
    rows = run_scan(spec, workers=args.workers)
    params = {"command": "scan", "workers": args.workers, "spec": spec.to_dict()}
    return rows, scan_columns(spec), params


def _cmd_converge(args):
    try:
        m_list = [int(tok) for tok in args.m_list.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInput(f"bad --m-list: {exc}") from exc
    rows = convergence_study(args.energy, args.t_max, m_list, hbar=args.hbar)
    params = {"command": "converge", "energy": args.energy, "t_max": args.t_max,
              "m_list": m_list, "hbar": args.hbar}
    return rows, CONVERGENCE_COLUMNS, params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronon-lab",
        description="Quantized-time two-state evolution laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("modes", help="effective-energy report for the symmetric H")
    _add_chronon_args(sub)
    sub.add_argument("--convention", choices=CONVENTIONS, default="paper")
    _add_output_args(sub)
    sub.set_defaults(handler=_cmd_modes)

    sub = subs.add_parser("evolve", help="generate a trajectory")
    sub.add_argument("--engine", choices=("continuous", "discrete"), required=True)
    _add_chronon_args(sub)
    sub.add_argument("--t-max", type=float, required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--psi0", default="1,0", help="two complex amplitudes, e.g. '1,0'")
    _add_output_args(sub)
    sub.set_defaults(handler=_cmd_evolve)

    sub = subs.add_parser("kaon", help="kaon-model observables from a config file")
    sub.add_argument("--config", required=True)
    sub.add_argument("--observable", choices=("2pi", "3pi", "epsilon", "width-shift"),
                     required=True)
    sub.add_argument("--engine", choices=("continuous", "discrete"),
                     default="continuous")
    _add_output_args(sub)
    sub.set_defaults(handler=_cmd_kaon)

    sub = subs.add_parser("scan", help="run a parameter scan from a JSON spec")
    sub.add_argument("--spec", required=True)
    sub.add_argument("--workers", type=int, default=1)
    _add_output_args(sub)
    sub.set_defaults(handler=_cmd_scan)

    sub = subs.add_parser("converge", help="integrator convergence study")
    sub.add_argument("--energy", type=float, required=True)
    sub.add_argument("--t-max", type=float, required=True)
    sub.add_argument("--m-list", required=True, help="comma-separated step counts")
    sub.add_argument("--hbar", type=float, default=1.0)
    _add_output_args(sub)
    sub.set_defaults(handler=_cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, columns, params = args.handler(args)
        if args.out:
            emit_with_manifest(rows, args.format, args.out, params, columns)
        else:
            emit(rows, args.format, None, columns)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"numeric-domain error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
