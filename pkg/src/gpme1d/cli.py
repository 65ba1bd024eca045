"""Command-line driver.

    gpme1d run --config run.cfg --out results/
    gpme1d convergence --config run.cfg --dx-list 0.04,0.02,0.01 --out results/
    gpme1d validate [--only 5,6]

Exit codes: 0 success, 1 usage/config error, 2 invariant or acceptance failure,
3 I/O error. Runs are deterministic: the same config yields bit-identical output
files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .convergence import MIN_CADENCE, fit_rates, measure_errors, oracle_for
from .mesh import CflMode
from .runner import RunResult, cadence_times, run_single_patch, run_two_patch


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep 1 for usage errors
        raise UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if c is None else _fmt(c) for c in row) + "\n")


def _snapshot_label(t: float) -> str:
    return f"{t:g}"


def write_run_outputs(result: RunResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    tr = result.trace
    if result.problem == "two_patch":
        inner = len(tr["zeta_hat_r"])
        rows = (
            (
                tr["t"][i],
                tr["zeta_l"][i],
                tr["zeta_r"][i],
                tr["zeta_hat_r"][i] if i < inner else None,
                tr["zeta_check_l"][i] if i < inner else None,
            )
            for i in range(len(tr["t"]))
        )
        _write_csv(out_dir / "interfaces.csv", ["t", "zeta_l", "zeta_r", "zeta_hat_r", "zeta_check_l"], rows)
    else:
        rows = ((tr["t"][i], tr["zeta_l"][i], tr["zeta_r"][i]) for i in range(len(tr["t"])))
        _write_csv(out_dir / "interfaces.csv", ["t", "zeta_l", "zeta_r"], rows)

    x = result.nodes()
    actual_to_req = {act: req for req, act in result.snapshot_map.items()}
    for t, v in result.snapshots:
        label = _snapshot_label(actual_to_req.get(t, t))
        _write_csv(out_dir / f"snapshot_{label}.csv", ["x", "v"], zip(x, v))

    mesh = result.mesh
    payload = {
        "problem": result.problem,
        "nonlinearity": result.nl_name,
        "stepper": result.stepper,
        "backend": result.backend,
        "mesh": {
            "dx": mesh.dx,
            "dt": mesh.dt,
            "beta": mesh.beta,
            "eps": mesh.eps,
            "x_min": mesh.x_min,
            "x_max": mesh.x_max,
            "n_nodes": mesh.n_nodes,
            "cfl_mode": mesh.mode.value,
            "M": mesh.m_bound,
            "gamma0": mesh.gamma0,
            "certified": mesh.certified,
        },
        "T_star_h": result.T_star_h,
        "x_star_h": result.x_star_h,
        "snapshots": {_snapshot_label(req): act for req, act in sorted(result.snapshot_map.items())},
        "margins": result.margins,
        "diagnostics": [r.to_dict() for r in result.diagnostics],
        "aborted": result.aborted,
    }
    with open(out_dir / "run.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _execute(cfg: RunConfig) -> RunResult:
    snaps = list(cfg.snapshot_times)
    if cfg.snapshot_cadence:
        snaps = sorted(set(snaps) | set(cadence_times(cfg.horizon, cfg.snapshot_cadence)))
    kwargs = dict(
        dx=cfg.dx, T=cfg.horizon, mode=cfg.mode, stepper=cfg.stepper,
        snapshot_times=snaps, beta_impl=cfg.beta_impl,
        dt_override=cfg.dt_override, eps_override=cfg.eps_override,
    )
    if cfg.problem == "single_patch":
        return run_single_patch(cfg.nl, cfg.patches[0], **kwargs)
    return run_two_patch(cfg.nl, cfg.patches[0], cfg.patches[1], **kwargs)


def _apply_flag_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "cfl", None):
        cfg = dataclasses.replace(cfg, mode=CflMode(args.cfl))
    if getattr(args, "stepper", None):
        cfg = dataclasses.replace(cfg, stepper=args.stepper)
    if getattr(args, "dx", None):
        cfg = dataclasses.replace(cfg, dx=args.dx)
    return cfg


def cmd_run(args) -> int:
    cfg = _apply_flag_overrides(load_config(args.config), args)
    result = _execute(cfg)
    write_run_outputs(result, Path(args.out))
    if result.aborted is not None:
        print(f"run aborted: {result.aborted}", file=sys.stderr)
        return 2
    failed = [r for r in result.diagnostics if not r.passed]
    for r in failed:
        print(f"diagnostic failed: {r.check} margin={r.worst_margin:g}", file=sys.stderr)
    summary = f"wrote {args.out} (backend={result.backend}, n_nodes={result.mesh.n_nodes}, dt={result.mesh.dt:g})"
    if result.T_star_h is not None:
        summary += f"; T_star_h={result.T_star_h:.6g} x_star_h={result.x_star_h:.6g}"
    print(summary)
    return 2 if failed else 0


def cmd_convergence(args) -> int:
    cfg = _apply_flag_overrides(load_config(args.config), args)
    try:
        dx_list = [float(p) for p in args.dx_list.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"bad --dx-list {args.dx_list!r}")
    if len(dx_list) < 3:
        raise UsageError("--dx-list needs at least 3 mesh levels")
    cadence = cfg.snapshot_cadence or MIN_CADENCE
    if cadence < MIN_CADENCE:
        raise UsageError(f"convergence runs need snapshot_cadence >= {MIN_CADENCE}")
    cfg = dataclasses.replace(cfg, snapshot_cadence=cadence)

    records = []
    for dx in dx_list:
        result = _execute(dataclasses.replace(cfg, dx=dx))
        if result.aborted is not None:
            print(f"run at dx={dx} aborted: {result.aborted}", file=sys.stderr)
            return 2
        try:
            oracle = oracle_for(result)
        except ValueError as err:
            raise UsageError(str(err))
        records.append(measure_errors(result, oracle=oracle))
        print(f"dx={dx:g}: E_v={records[-1].E_v:.6e} E_zeta={records[-1].E_zeta:.6e}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "errors.csv",
        ["dx", "E_v", "E_zeta", "E_x", "E_t"],
        ((r.dx, r.E_v, r.E_zeta, r.E_x, r.E_t) for r in records),
    )
    rates = fit_rates(records)
    payload = {
        name: {"alpha": fit.alpha, "intercept": fit.intercept, "n_points": fit.n_points}
        for name, fit in rates.items()
    }
    with open(out_dir / "rates.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, fit in sorted(rates.items()):
        print(f"{name}: alpha={fit.alpha:.3f} over {fit.n_points} levels")
    return 0


def cmd_validate(args) -> int:
    from .acceptance import run_criteria

    only = None
    if args.only:
        try:
            only = [int(p) for p in args.only.split(",") if p.strip()]
        except ValueError:
            raise UsageError(f"bad --only {args.only!r}")
    try:
        results = run_criteria(only=only)
    except ValueError as err:
        raise UsageError(str(err))
    ok = all(r.passed for r in results)
    return 0 if ok else 2


def main(argv=None) -> int:
    parser = _Parser(prog="gpme1d", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration and write outputs")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--cfl", choices=["strict", "relaxed"])
    p_run.add_argument("--stepper", choices=["explicit", "implicit"])
    p_run.add_argument("--dx", type=float)
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("convergence", help="refinement series with error norms and rates")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--dx-list", required=True)
    p_conv.add_argument("--out", required=True)
    p_conv.add_argument("--cfl", choices=["strict", "relaxed"])
    p_conv.add_argument("--stepper", choices=["explicit", "implicit"])
    p_conv.set_defaults(func=cmd_convergence)

    p_val = sub.add_parser("validate", help="run the acceptance criteria")
    p_val.add_argument("--only", help="comma-separated criterion numbers, e.g. 5,6")
    p_val.set_defaults(func=cmd_validate)

    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
