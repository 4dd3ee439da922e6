"""Command line front end: one INI file in, deterministic files out.

Five subcommands cover the workflows: analyze (spectrum and rate
quantities), construct (mappings, their exact divergences, and both
bounds), oracle (exhaustive small-instance minima), rdp (distortion
thresholds and rate floors), and sweep (rates across blocklengths).

Every output is reproducible byte for byte in exact mode: JSON is dumped
with sorted keys, exact masses appear as num/den strings, CSV rows come
out in generation order, and nothing stamps time or machine state into a
file.  The construct command exits nonzero when any computed divergence
escapes its proved bracket, which makes it usable as a self-check.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from .config import COMMANDS, RunConfig, load_config
from .construction import (
    achievability_bound,
    apply_mapping,
    baseline_collapse_mapping,
    build_mapping,
    build_smooth_entropy_mapping,
    converse_bound,
    entropy_mapping_bound,
    trace_to_jsonable,
)
from .divergence import check_conditions, divergence, f_inverse
from .errors import SrnglabError
from .oracle import min_fdiv_bruteforce, min_fdiv_bruteforce_full
from .probability import IID, Markov, Mass, expand
from .rdp import d_threshold, mapping_distortion, rd_function_iid, rdp_lower_bound
from .spectrum import (
    k_f_rate,
    rate_convergence_sweep,
    smooth_max_entropy,
    spectrum_cdf,
    sup_entropy_quantile,
)

__all__ = ["main"]

_LN2 = math.log(2.0)


def _num(value: Mass | float, units: str) -> Any:
    """Serialize one numeric value; exact fractions survive only in nats."""
    if units == "bits":
        return float(value) / _LN2
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return value
    return float(value)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _conditions_payload(cfg: RunConfig) -> dict:
    out = {}
    for curve in cfg.curves():
        report = check_conditions(curve)
        out[curve.name] = {
            "nonincreasing": report.nonincreasing,
            "subexponential_near_zero": report.subexponential_near_zero,
            "zero_slope_at_infinity": report.zero_slope_at_infinity,
        }
    return out


def _run_analyze(cfg: RunConfig) -> int:
    dist = expand(cfg.source(), cfg.cap)
    summary = spectrum_cdf(dist)
    units = cfg.units
    payload: dict = {
        "command": "analyze",
        "mode": cfg.mode,
        "units": units,
        "n": cfg.n,
        "spectrum": [
            {"value": _num(v, units), "mass": _num(m, units="nats")} for v, m in summary.points
        ],
        "conditions": _conditions_payload(cfg),
        "rates": [],
        "quantiles": [],
    }
    for eps in cfg.eps:
        report = sup_entropy_quantile(summary, eps)
        payload["quantiles"].append(
            {"eps": _num(eps, "nats"), "value": _num(report.value, units)}
        )
    for curve in cfg.curves():
        if not check_conditions(curve).nonincreasing:
            payload["rates"].append(
                {"curve": curve.name, "skipped": "curve is not nonincreasing"}
            )
            continue
        for delta in cfg.deltas:
            kf = k_f_rate(summary, curve, delta)
            thr = 0 if delta >= curve.f_at_zero else f_inverse(curve, delta)
            eps = 1 - thr
            quant = sup_entropy_quantile(summary, eps)
            h0, chosen = smooth_max_entropy(dist, eps)
            payload["rates"].append(
                {
                    "curve": curve.name,
                    "delta": _num(delta, "nats"),
                    "k_f_rate": _num(kf.value, units),
                    "eps": _num(eps, "nats"),
                    "quantile": _num(quant.value, units),
                    "smooth_max_entropy": _num(h0, units),
                    "smooth_set_size": len(chosen),
                    "smooth_set": sorted(chosen),
                }
            )
    _write_json(Path(cfg.out_dir) / "analyze.json", payload)
    return 0


def _run_construct(cfg: RunConfig) -> int:
    dist = expand(cfg.source(), cfg.cap)
    summary = spectrum_cdf(dist)
    units = cfg.units
    all_within = True
    records = []
    for m in cfg.ms:
        for gamma in cfg.gammas:
            mapping, trace = build_mapping(dist, m, gamma)
            mapped = apply_mapping(dist, mapping)
            base_law = apply_mapping(dist, baseline_collapse_mapping(dist, m, gamma))
            record: dict = {
                "m": m,
                "gamma": str(gamma),
                "trace": trace_to_jsonable(trace),
                "curves": {},
            }
            for curve in cfg.curves():
                exact = divergence(dist, mapped, curve)
                entry: dict = {
                    "divergence": _num(exact, units),
                    "baseline_divergence": _num(divergence(dist, base_law, curve), units),
                }
                if check_conditions(curve).nonincreasing:
                    ach = achievability_bound(trace, curve)
                    con = converse_bound(summary, m, gamma, curve)
                    slack = 0 if isinstance(exact, Fraction) else 1e-10
                    within = (con.value <= exact + slack) and (exact <= ach.value + slack)
                    all_within = all_within and within
                    entry.update(
                        {
                            "achievability": _num(ach.value, units),
                            "achievability_clamped": ach.clamped,
                            "converse": _num(con.value, units),
                            "converse_clamped": con.clamped,
                            "within_bounds": within,
                        }
                    )
                else:
                    entry["bounds_skipped"] = "curve is not nonincreasing"
                record["curves"][curve.name] = entry
            records.append(record)
    entropy_records = []
    for gamma in cfg.gammas:
        for curve in cfg.curves():
            if not check_conditions(curve).nonincreasing:
                continue
            for delta in cfg.deltas:
                mapping, trace = build_smooth_entropy_mapping(dist, curve, delta, gamma)
                mapped = apply_mapping(dist, mapping)
                exact = divergence(dist, mapped, curve)
                bound = entropy_mapping_bound(trace, curve)
                slack = 0 if isinstance(exact, Fraction) else 1e-10
                within = exact <= bound.value + slack
                all_within = all_within and within
                entropy_records.append(
                    {
                        "curve": curve.name,
                        "delta": _num(delta, "nats"),
                        "gamma": str(gamma),
                        "m": trace.m,
                        "divergence": _num(exact, units),
                        "bound": _num(bound.value, units),
                        "within_bounds": within,
                        "flags": list(trace.flags),
                    }
                )
    payload = {
        "command": "construct",
        "mode": cfg.mode,
        "units": units,
        "n": cfg.n,
        "mappings": records,
        "entropy_mappings": entropy_records,
        "all_within_bounds": all_within,
    }
    _write_json(Path(cfg.out_dir) / "construct.json", payload)
    return 0 if all_within else 3


def _run_oracle(cfg: RunConfig) -> int:
    dist = expand(cfg.source(), cfg.cap)
    units = cfg.units
    fast = []
    slow = []
    for curve in cfg.curves():
        report = check_conditions(curve)
        if report.nonincreasing and curve.slope_at_infinity == 0:
            fast.append(curve)
        else:
            slow.append(curve)
    records = []
    for m in cfg.ms:
        entry: dict = {"m": m, "curves": {}}
        results = dict(min_fdiv_bruteforce(dist, m, fast)) if fast else {}
        if slow:
            results.update(min_fdiv_bruteforce_full(dist, m, slow))
        for name, result in sorted(results.items()):
            entry["curves"][name] = {
                "value": _num(result.value, units),
                "exact": result.exact,
                "blocks": [list(b) for b in result.plan.blocks],
                "representatives": list(result.plan.representatives),
            }
        records.append(entry)
    payload = {
        "command": "oracle",
        "mode": cfg.mode,
        "units": units,
        "n": cfg.n,
        "minima": records,
    }
    _write_json(Path(cfg.out_dir) / "oracle.json", payload)
    return 0


def _run_rdp(cfg: RunConfig) -> int:
    if not isinstance(cfg.variant, IID):
        raise SrnglabError("the rdp command needs an iid source")
    assert cfg.distortion is not None
    dist = expand(cfg.source(), cfg.cap)
    summary = spectrum_cdf(dist)
    units = cfg.units
    pmf = cfg.source().variant.pmf  # type: ignore[union-attr]
    rd_rows = [
        {"d": _num(d, "nats"), "value": _num(rd_function_iid(pmf, cfg.distortion, d), units)}
        for d in cfg.ds
    ]
    reports = []
    for curve in cfg.curves():
        if not check_conditions(curve).nonincreasing:
            continue
        for delta in cfg.deltas:
            threshold = d_threshold(summary, curve, delta, cfg.distortion)
            for d in cfg.ds:
                report = rdp_lower_bound(pmf, cfg.distortion, d, summary, curve, delta)
                reports.append(
                    {
                        "curve": curve.name,
                        "delta": _num(delta, "nats"),
                        "d": _num(d, "nats"),
                        "threshold": _num(threshold, units),
                        "rd": _num(report.rd_value, units),
                        "k_f_rate": _num(report.kf_value, units),
                        "lower": _num(report.lower, units),
                        "upper": None if report.upper is None else _num(report.upper, units),
                        "consistent": report.consistent,
                    }
                )
    payload = {
        "command": "rdp",
        "mode": cfg.mode,
        "units": units,
        "n": cfg.n,
        "rd_curve": rd_rows,
        "reports": reports,
    }
    _write_json(Path(cfg.out_dir) / "rdp.json", payload)
    return 0


def _run_sweep(cfg: RunConfig) -> int:
    if isinstance(cfg.variant, Markov):
        raise SrnglabError("the sweep command needs an iid or mixture source")
    variant = cfg.source().variant
    scale = _LN2 if cfg.units == "bits" else 1.0
    rows: list[list[Any]] = []
    for curve in cfg.curves():
        if not check_conditions(curve).nonincreasing:
            print(f"skipping {curve.name}: not nonincreasing", file=sys.stderr)
            continue
        for delta in cfg.deltas:
            for row in rate_convergence_sweep(variant, cfg.sweep_ns, curve, delta, cfg.cap):
                rows.append(
                    [row.n, repr(row.nu), repr(row.delta), row.quantity,
                     repr(row.value / scale), row.curve]
                )
    _write_csv(
        Path(cfg.out_dir) / "sweep.csv",
        ["n", "nu", "delta", "quantity", "value", "curve"],
        rows,
    )
    return 0


_RUNNERS = {
    "analyze": _run_analyze,
    "construct": _run_construct,
    "oracle": _run_oracle,
    "rdp": _run_rdp,
    "sweep": _run_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="srnglab",
        description="finite-blocklength laboratory for source resolution under f-divergences",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} workflow")
        p.add_argument("config", help="path to an INI run file")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--units", choices=("nats", "bits"), help="override display units")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--exact", action="store_true", help="force exact arithmetic")
        group.add_argument("--float", dest="float_mode", action="store_true",
                           help="force float arithmetic")
        p.add_argument("--cap", "--caps", dest="cap", type=int,
                       help="override the atom cap")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, command=args.subcommand)
        updates: dict[str, Any] = {}
        if args.out:
            updates["out_dir"] = args.out
        if args.units:
            updates["units"] = args.units
        if args.exact:
            updates["mode"] = "exact"
        if args.float_mode:
            updates["mode"] = "float"
        if args.cap:
            updates["cap"] = args.cap
        if updates:
            cfg = dataclasses.replace(cfg, **updates)
        return _RUNNERS[cfg.command](cfg)
    except SrnglabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
