"""Command-line entry point: ``fogalloc {gen,validate,run,sweep,plotdata}``."""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from . import scenario as scen
from .allocation import LOCAL, Instance, latency_violations
from .errors import BudgetExceededError, ConfigurationError, InfeasibleInstanceError
from .experiments import (CSV_COLUMNS, KINDS, cmd_plotdata, cmd_sweep, preset, report_row,
                          run_solver, verify_report)
from .solvers import DEFAULT_BUDGET, SOLVERS

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 3


def _csv_list(text, cast=str):
    return tuple(cast(x) for x in text.split(",") if x.strip())


def _number(text):
    return float(text) if any(c in text for c in ".eE") else int(text)


def _base_config(args) -> scen.ScenarioConfig:
    cfg = scen.ScenarioConfig(seed=args.seed)
    if getattr(args, "patients", None) is not None:
        cfg = replace(cfg, num_patients=args.patients)
    if getattr(args, "fs", None) is not None:
        cfg = replace(cfg, num_fs=args.fs)
    return cfg


def cmd_gen(args) -> int:
    cfg = _base_config(args)
    if args.median is not None:
        cfg = replace(cfg, criticality_median=args.median)
    s = scen.generate(cfg)
    scen.save(s, args.out)
    print(f"wrote {args.out}: {s.num_patients} patients, {s.num_fs} fog servers, seed {cfg.seed}")
    return EXIT_OK


def cmd_validate(args) -> int:
    s = scen.load(args.scenario)
    inst = Instance(s.profiles, s.params, s.pricing, s.num_fs)
    hopeless = [p for p in inst.violators if inst.n_max[p].max() <= 0]
    print(f"ok: {s.num_patients} patients, {s.num_fs} fog servers, "
          f"{len(inst.violators)} must offload, {len(hopeless)} cannot be served by any server")
    for p in hopeless:
        print(f"  patient {s.profiles[p].id}: no fog server meets its latency bound")
    return EXIT_OK


def cmd_run(args) -> int:
    s = scen.load(args.scenario)
    report = run_solver(args.solver, s, args.budget)
    if args.verify:
        verify_report(report, s)
    obj = report.objective
    print(f"solver            {report.solver_name}")
    print(f"utility           {obj.utility!r}")
    print(f"profit            {obj.profit!r}  (revenue {obj.revenue!r}, expenditure {obj.expenditure!r})")
    print(f"patient_cost      {obj.patient_cost!r}")
    print(f"fog_assigned      {report.n_fog_assigned} / {s.num_patients}")
    print(f"outer_iterations  {report.outer_iterations}")
    print(f"wall_time_s       {report.wall_time:.6f}")
    if args.assignment:
        for p, f in enumerate(report.allocation.assignment):
            print(f"  patient {s.profiles[p].id} -> {'local' if f == LOCAL else f'fs {f}'}")
    late = latency_violations(report.allocation, s.profiles, s.params)
    stranded = sorted(set(report.infeasible_patients) | set(late))
    if stranded:
        print("infeasible_patients " + " ".join(str(s.profiles[p].id) for p in stranded))
    seed = s.provenance.get("seed", "")
    row = report_row("run", "", None, seed, report, timing=True)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerow(row)
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerow(row)
    return EXIT_INFEASIBLE if stranded else EXIT_OK


def cmd_sweep_args(args) -> int:
    spec = preset(
        args.experiment,
        base=_base_config(args),
        values=_csv_list(args.values, _number) if args.values else None,
        replicas=args.replicas,
        solvers=_csv_list(args.solvers) if args.solvers else None,
        out_dir=Path(args.out),
        fs_per_patient=args.fs_per_patient,
        timing=True if args.timing else None,
        budget=args.budget,
        verify=args.verify,
    )
    paths = cmd_sweep(spec, jobs=args.jobs)
    for kind, path in paths.items():
        print(f"{kind:7s} {path}")
    return EXIT_OK


def cmd_plotdata_args(args) -> int:
    summary = cmd_plotdata(args.csv, args.out)
    print(f"wrote {args.out}: {len(summary)} series points")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fogalloc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random scenario file")
    g.add_argument("--patients", type=int, default=20)
    g.add_argument("--fs", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--median", type=float, help="median criticality protocol (middle patient fixed)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="solve one scenario")
    r.add_argument("scenario")
    r.add_argument("--solver", choices=sorted(SOLVERS), default="umpma")
    r.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration cap for the exact solver")
    r.add_argument("--verify", action="store_true", help="recompute the objective from scratch")
    r.add_argument("--assignment", action="store_true", help="print each patient's placement")
    r.add_argument("--out", help="write the CSV row here instead of stdout")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run an experiment sweep")
    s.add_argument("--experiment", choices=KINDS, required=True)
    s.add_argument("--values", help="comma-separated sweep values (default: preset)")
    s.add_argument("--patients", type=int)
    s.add_argument("--fs", type=int)
    s.add_argument("--fs-per-patient", type=float, dest="fs_per_patient")
    s.add_argument("--replicas", type=int, default=5)
    s.add_argument("--solvers", help="comma-separated subset of " + ",".join(sorted(SOLVERS)))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="results")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--timing", action="store_true", help="record wall_time_us (breaks byte-identical reruns)")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_sweep_args)

    p = sub.add_parser("plotdata", help="aggregate sweep CSVs into per-series mean/stddev")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plotdata_args)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, BudgetExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
