"""Command-line front end: case-study presets, parameter sweeps, bound
tables, value-table dumps, simulation runs, and the equilibrium audit.

Exit codes: 0 success, 1 validation/config error, 2 runtime error.
CSV output uses ',' delimiters, '.' decimal points, a header row, and LF
line endings; floats are emitted with repr so re-parsing round-trips
bit-for-bit.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import analytics, bounds, mc, values
from .model import (
    AttackParams,
    ConfigError,
    DomainError,
    MinerPopulation,
    ValidationError,
    parse_config,
)

# Preset metadata. btc_per_block is presentation-layer only (the 6.25 BTC
# block subsidy at the time the case studies were framed) and never enters
# any computation in units of R.
PRESETS = {
    "bitcoin-a": {
        "T": 2500, "l0": 150, "gamma": 0.05, "g_def": 0.4, "phi": 158000.0,
        "btc_per_block": 6.25,
    },
    "bitcoin-b": {
        "T": 400, "l0": 150, "gamma": 0.03, "g_def": 0.2, "phi": 158000.0,
        "btc_per_block": 6.25,
    },
}

# Figure-style sweep baseline: vary T against these fixed values
SWEEP_BASELINE = {"T": 2500, "l0": 150, "gamma": 0.05, "g_def": 0.4, "phi": 158000.0}


def _preset_params(name: str) -> AttackParams:
    if name not in PRESETS:
        raise ValidationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        )
    p = PRESETS[name]
    return AttackParams(
        horizon_T=p["T"], initial_gap_l0=p["l0"], gamma=p["gamma"],
        g_def=p["g_def"], phi=p["phi"],
    )


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit_rows(rows: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    if rows:
        writer.writerow(list(rows[0].keys()))
        for row in rows:
            writer.writerow([_fmt(v) for v in row.values()])


def _emit_kv(pairs: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        json.dump(pairs, out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        _emit_rows([pairs], "csv", out)
    else:
        width = max(len(k) for k in pairs)
        for k, v in pairs.items():
            out.write(f"{k:<{width}}  {_fmt(v)}\n")


def case_study_report(name: str) -> dict:
    params = _preset_params(name)
    btc = PRESETS[name]["btc_per_block"]
    table = values.build_value_table(params)
    fm = analytics.forward_mass(params)
    exp = analytics.expected_cost(params, table)
    worst = analytics.worst_case_cost(params, table)
    best = analytics.best_case_cost(params, table)
    pooled = analytics.pooled_smoothing_cost(params, exp)
    hoeff = bounds.success_lower_bound(params)
    thm4 = bounds.thm4_worst_case_bound(params)
    thm5 = bounds.thm5_expected_cost_bound(params)
    report = {
        "preset": name,
        "T": params.horizon_T,
        "l0": params.initial_gap_l0,
        "gamma": params.gamma,
        "g_def": params.g_def,
        "phi": params.phi,
        "supercritical": params.supercritical,
        "success_probability": fm.success,
        "failure_probability": fm.failure,
        "expected_duration_blocks": analytics.expected_duration(params),
        "expected_per_block_cost_R": exp.per_block_component,
        "expected_corruption_cost_R": exp.corruption_component,
        "expected_total_cost_R": exp.total,
        "pooled_smoothing_total_R": pooled.total,
        "worst_case_corruption_R": worst.corruption_component,
        "worst_case_total_R": worst.total,
        "best_case_total_R": best.total,
        "budish_cost_R": bounds.budish_total_cost(params.horizon_T, params.phi),
        "hoeffding_success_lower_bound": hoeff.value if hoeff.valid else None,
        "thm4_worst_case_bound_R": thm4.value if thm4.valid else None,
        "thm5_expected_cost_bound_R": thm5.value if thm5.valid else None,
        "stopping_time_bound_blocks": (
            bounds.expected_stopping_time_bound(params.initial_gap_l0, params.g_def)
            if params.g_def < 0.5 else None
        ),
        "btc_per_block": btc,
        "expected_total_cost_BTC": exp.total * btc,
        "worst_case_total_BTC": worst.total * btc,
        "budish_cost_BTC": bounds.budish_total_cost(params.horizon_T, params.phi) * btc,
    }
    return report


def sweep_rows(vary: str, grid, baseline: dict) -> list[dict]:
    if vary not in ("T", "l0", "gamma", "g_def", "phi"):
        raise ValidationError(f"cannot sweep parameter {vary!r}")
    rows = []
    for v in grid:
        point = dict(baseline)
        point[vary] = v
        row = {vary: v, "params_valid": True}
        try:
            params = AttackParams(
                horizon_T=int(point["T"]), initial_gap_l0=int(point["l0"]),
                gamma=float(point["gamma"]), g_def=float(point["g_def"]),
                phi=float(point["phi"]),
            )
        except ValidationError:
            row.update(
                params_valid=False, supercritical=False,
                success_probability=None, expected_corruption_cost=None,
                expected_total_cost=None, worst_case_cost=None,
                thm4_bound=None, thm4_valid=False, thm5_bound=None,
                thm5_valid=False, budish_cost=None,
                hoeffding_success_bound=None, hoeffding_valid=False,
            )
            rows.append(row)
            continue
        table = values.build_value_table(params)
        exp = analytics.expected_cost(params, table)
        worst = analytics.worst_case_cost(params, table)
        thm4 = bounds.thm4_worst_case_bound(params)
        thm5 = bounds.thm5_expected_cost_bound(params)
        hoeff = bounds.success_lower_bound(params)
        row.update(
            supercritical=params.supercritical,
            success_probability=exp.success_probability,
            expected_corruption_cost=exp.corruption_component,
            expected_total_cost=exp.total,
            worst_case_cost=worst.total,
            thm4_bound=thm4.value if thm4.valid else None,
            thm4_valid=thm4.valid,
            thm5_bound=thm5.value if thm5.valid else None,
            thm5_valid=thm5.valid,
            budish_cost=bounds.budish_total_cost(params.horizon_T, params.phi),
            hoeffding_success_bound=hoeff.value if hoeff.valid else None,
            hoeffding_valid=hoeff.valid,
        )
        rows.append(row)
    return rows


def _sweep_svg(rows: list[dict], vary: str, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ok = [r for r in rows if r["params_valid"]]
    x = [r[vary] for r in ok]
    succ = [r["success_probability"] for r in ok]
    cost = [r["expected_corruption_cost"] for r in ok]
    fig, ax1 = plt.subplots(figsize=(8, 5))
    ax1.plot(x, succ, "C0-", label="success probability")
    ax1.set_xlabel(vary)
    ax1.set_ylabel("success probability", color="C0")
    ax2 = ax1.twinx()
    ax2.plot(x, cost, "C1-", label="expected corruption cost")
    ax2.set_yscale("log")
    ax2.set_ylabel("expected corruption cost (R)", color="C1")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def value_table_rows(params: AttackParams) -> list[dict]:
    table = values.build_value_table(params)
    scale = params.phi_gamma_R
    T = params.horizon_T
    rows = []
    for t in range(T + 1):
        for l in range(table.width + 1):
            payout = ""
            if t < T and l >= 1:
                payout = float(table.payouts[t, l]) / scale
            rows.append(
                {
                    "t": t,
                    "l": l,
                    "wmax_over_phi_gamma_R": float(table.wmax[t, l]) / scale,
                    "payout_over_phi_gamma_R": payout,
                }
            )
    return rows


def simulate_rows(params, population, n_trials, seed, threads=None) -> list[dict]:
    table = values.build_value_table(params)
    strategies = [mc.HonestAlways()] * len(population.honest_powers) + [
        mc.EquilibriumAttack()
    ] * len(population.noncommitted_powers)
    report = mc.run_trials(
        params, population, table, strategies, master_seed=seed, n_trials=n_trials,
        threads=threads,
    )
    per_block = report.per_block
    totals = report.totals
    return [
        {
            "trial": i,
            "outcome": "success" if report.outcomes[i] else "failure",
            "duration": int(report.durations[i]),
            "attack_blocks": int(report.attack_blocks[i]),
            "per_block_cost": float(per_block[i]),
            "corruption_cost": float(report.corruption[i]),
            "total_cost": float(totals[i]),
        }
        for i in range(report.n_trials)
    ]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bribelab")
    ap.add_argument("--config", help="path to a JSON config document")
    ap.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("case-study", help="run a named case-study preset")
    p.add_argument("name")

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    p.add_argument("--vary", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out-csv")
    p.add_argument("--out-svg")

    sub.add_parser("bounds", help="print all closed-form bounds for the config")
    p = sub.add_parser("value-table", help="dump the value table as CSV")
    p.add_argument("--out")
    p = sub.add_parser("simulate", help="run seeded Monte Carlo trials")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    sub.add_parser("equilibrium", help="audit the participation equilibrium")
    return ap


def _load(args):
    if not args.config:
        raise ConfigError(f"subcommand {args.command!r} requires --config")
    return parse_config(args.config)


def _run(args) -> None:
    fmt = args.format
    if args.command == "case-study":
        _emit_kv(case_study_report(args.name), "text" if fmt == "text" else fmt)

    elif args.command == "sweep":
        if args.config:
            cfg = parse_config(args.config)
            baseline = {
                "T": cfg.params.horizon_T, "l0": cfg.params.initial_gap_l0,
                "gamma": cfg.params.gamma, "g_def": cfg.params.g_def,
                "phi": cfg.params.phi,
            }
        else:
            baseline = dict(SWEEP_BASELINE)
        if args.step <= 0:
            raise ValidationError("sweep --step must be positive")
        n = int(np.floor((args.stop - args.start) / args.step + 1e-9)) + 1
        grid = [args.start + i * args.step for i in range(max(n, 0))]
        if args.vary in ("T", "l0"):
            grid = [int(round(v)) for v in grid]
        rows = sweep_rows(args.vary, grid, baseline)
        if args.out_csv:
            with open(args.out_csv, "w", encoding="utf-8", newline="") as fh:
                _emit_rows(rows, "csv", fh)
        else:
            _emit_rows(rows, "json" if fmt == "json" else "csv")
        if args.out_svg:
            _sweep_svg(rows, args.vary, args.out_svg)

    elif args.command == "bounds":
        cfg = _load(args)
        params = cfg.params
        hoeff = bounds.success_lower_bound(params)
        thm4 = bounds.thm4_worst_case_bound(params)
        thm5 = bounds.thm5_expected_cost_bound(params)
        pairs = {
            "supercritical": params.supercritical,
            "budish_cost_R": bounds.budish_total_cost(params.horizon_T, params.phi, params.reward_R),
            "hoeffding_success_lower_bound": hoeff.value if hoeff.valid else None,
            "hoeffding_valid": hoeff.valid,
            "thm4_worst_case_bound_R": thm4.value if thm4.valid else None,
            "thm4_valid": thm4.valid,
            "thm5_expected_cost_bound_R": thm5.value if thm5.valid else None,
            "thm5_valid": thm5.valid,
            "stopping_time_bound_blocks": (
                bounds.expected_stopping_time_bound(params.initial_gap_l0, params.g_def)
                if params.g_def < 0.5 else None
            ),
        }
        _emit_kv(pairs, fmt)

    elif args.command == "value-table":
        cfg = _load(args)
        rows = value_table_rows(cfg.params)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                _emit_rows(rows, "csv", fh)
        else:
            _emit_rows(rows, "json" if fmt == "json" else "csv")

    elif args.command == "simulate":
        cfg = _load(args)
        seed = cfg.seed if args.seed is None else args.seed
        rows = simulate_rows(cfg.params, cfg.population, args.trials, seed)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                _emit_rows(rows, "csv", fh)
        else:
            _emit_rows(rows, "json" if fmt == "json" else "csv")

    elif args.command == "equilibrium":
        cfg = _load(args)
        table = values.build_value_table(cfg.params)
        grid = sorted(set(cfg.population.noncommitted_powers) | {cfg.params.gamma})
        audit = values.audit_equilibrium(table, grid)
        pairs = {
            "result": "PASS" if audit.passed else "FAIL",
            "max_violation": audit.max_violation,
            "max_gamma_slack": audit.max_gamma_slack,
            "tolerance": audit.tolerance,
            "pivotal_check": audit.pivotal_ok,
            "power_grid": list(audit.power_grid),
        }
        _emit_kv(pairs, fmt)


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        _run(args)
    except (ConfigError, ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # runtime failures (I/O, etc.)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
