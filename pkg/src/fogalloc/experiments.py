"""Parameter sweeps over generated scenarios and CSV aggregation.

A sweep varies one scenario setting over a list of values, draws
``replicas`` scenarios per value (seeds ``base_seed .. base_seed+replicas-1``)
and runs every requested solver on each. Rows are written in
(sweep value, replica, solver) order whatever the degree of parallelism, and
timings are only recorded when asked for, so CSV bodies are reproducible.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .allocation import utility_U
from .errors import BudgetExceededError, ConfigurationError, InfeasibleInstanceError
from .scenario import Scenario, ScenarioConfig, generate
from .solvers import DEFAULT_BUDGET, SOLVERS, SolveReport, solve_exact

CSV_COLUMNS = [
    "experiment", "sweep_var", "sweep_value", "replica_seed", "solver", "utility", "profit",
    "patient_cost", "n_fog_assigned", "outer_iterations", "feasible", "wall_time_us",
]
TRACE_COLUMNS = ["experiment", "sweep_var", "sweep_value", "replica_seed", "solver", "iteration", "utility"]
SUMMARY_METRICS = ["utility", "profit", "patient_cost", "n_fog_assigned", "outer_iterations", "wall_time_us"]

KINDS = ("utility_vs_fs", "patient_cost", "convergence", "criticality_sweep", "dense", "exec_time")
SWEEP_VARS = ("num_fs", "num_patients", "criticality_median")

PRESETS: Dict[str, Dict] = {
    "utility_vs_fs": dict(sweep_var="num_fs", values=list(range(2, 13)), num_patients=20,
                          solvers=("umpma", "base")),
    "patient_cost": dict(sweep_var="num_fs", values=list(range(2, 13)), num_patients=20,
                         solvers=("umpma", "base")),
    "convergence": dict(sweep_var="num_patients", values=[20, 40, 60], num_fs=8, solvers=("umpma",)),
    "criticality_sweep": dict(sweep_var="criticality_median", values=[round(0.1 * k, 1) for k in range(1, 10)],
                              num_patients=21, num_fs=4, solvers=("umpma", "base")),
    "dense": dict(sweep_var="num_patients", values=[100, 200, 300, 400, 500], fs_per_patient=0.2,
                  solvers=("umpma", "base")),
    "exec_time": dict(sweep_var="num_patients", values=[4, 5, 6, 7, 8], num_fs=3,
                      solvers=("umpma", "base", "exact"), timing=True),
}


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    base: ScenarioConfig
    sweep_var: str
    values: Tuple
    replicas: int = 5
    solvers: Tuple[str, ...] = ("umpma", "base")
    out_dir: Optional[Path] = None
    fs_per_patient: Optional[float] = None
    timing: bool = False
    budget: int = DEFAULT_BUDGET
    verify: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.sweep_var not in SWEEP_VARS:
            raise ConfigurationError(f"unknown sweep variable {self.sweep_var!r}")
        if self.replicas < 0:
            raise ConfigurationError("replicas must be >= 0")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigurationError(f"unknown solver(s): {', '.join(unknown)}")
        if "exact" in self.solvers:
            for value in self.values:
                cfg = self.config_for(value, 0)
                if (cfg.num_fs + 1) ** cfg.num_patients > self.budget:
                    raise ConfigurationError(
                        f"exact solver not admissible at {self.sweep_var}={value}: "
                        f"{cfg.num_fs + 1}^{cfg.num_patients} assignments exceed budget {self.budget}")

    def config_for(self, value, replica: int) -> ScenarioConfig:
        cfg = replace(self.base, seed=self.base.seed + replica)
        if self.sweep_var == "num_fs":
            cfg = replace(cfg, num_fs=int(value))
        elif self.sweep_var == "num_patients":
            cfg = replace(cfg, num_patients=int(value))
            if self.fs_per_patient is not None:
                cfg = replace(cfg, num_fs=max(1, round(int(value) * self.fs_per_patient)))
        else:
            cfg = replace(cfg, criticality_median=float(value))
        return cfg


def preset(kind: str, base: Optional[ScenarioConfig] = None, **overrides) -> ExperimentSpec:
    """Spec for one of the built-in experiment designs, with optional overrides."""
    if kind not in PRESETS:
        raise ConfigurationError(f"no preset for {kind!r}")
    p = dict(PRESETS[kind])
    base = base or ScenarioConfig()
    if "num_patients" in p:
        base = replace(base, num_patients=p.pop("num_patients"))
    if "num_fs" in p:
        base = replace(base, num_fs=p.pop("num_fs"))
    p.update({k: v for k, v in overrides.items() if v is not None})
    p["values"] = tuple(p["values"])
    p["solvers"] = tuple(p["solvers"])
    return ExperimentSpec(kind=kind, base=base, **p)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_solver(name: str, scenario: Scenario, budget: int = DEFAULT_BUDGET) -> SolveReport:
    solver = SOLVERS[name]
    if solver is solve_exact:
        return solver(scenario.profiles, scenario.params, scenario.pricing, scenario.num_fs, budget=budget)
    return solver(scenario.profiles, scenario.params, scenario.pricing, scenario.num_fs)


def verify_report(report: SolveReport, scenario: Scenario) -> None:
    """Raise if the reported utility differs from a from-scratch evaluation of the allocation."""
    fresh = utility_U(report.allocation, scenario.profiles, scenario.params, scenario.pricing, scenario.num_fs)
    if not math.isclose(fresh.utility, report.objective.utility, rel_tol=1e-9, abs_tol=1e-9):
        raise RuntimeError(f"{report.solver_name}: reported utility {report.objective.utility!r} "
                           f"!= recomputed {fresh.utility!r}")


def report_row(experiment: str, sweep_var: str, sweep_value, replica_seed, report: SolveReport,
               timing: bool) -> Dict[str, str]:
    obj = report.objective
    return {
        "experiment": experiment,
        "sweep_var": sweep_var,
        "sweep_value": _fmt(sweep_value),
        "replica_seed": _fmt(replica_seed),
        "solver": report.solver_name,
        "utility": _fmt(float(obj.utility)),
        "profit": _fmt(float(obj.profit)),
        "patient_cost": _fmt(float(obj.patient_cost)),
        "n_fog_assigned": _fmt(report.n_fog_assigned),
        "outer_iterations": _fmt(report.outer_iterations),
        "feasible": _fmt(report.feasible),
        "wall_time_us": _fmt(int(round(report.wall_time * 1e6)) if timing else 0),
    }


def _failed_row(experiment, sweep_var, sweep_value, replica_seed, solver) -> Dict[str, str]:
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update(experiment=experiment, sweep_var=sweep_var, sweep_value=_fmt(sweep_value),
               replica_seed=_fmt(replica_seed), solver=solver, feasible="false", wall_time_us="0")
    return row


def run_point(spec: ExperimentSpec, value, replica: int):
    """Rows and convergence-trace rows for one (sweep value, replica)."""
    cfg = spec.config_for(value, replica)
    scenario = generate(cfg)
    rows, traces = [], []
    for name in spec.solvers:
        try:
            report = run_solver(name, scenario, spec.budget)
        except (InfeasibleInstanceError, BudgetExceededError):
            rows.append(_failed_row(spec.kind, spec.sweep_var, value, cfg.seed, name))
            continue
        if spec.verify:
            verify_report(report, scenario)
        rows.append(report_row(spec.kind, spec.sweep_var, value, cfg.seed, report, spec.timing))
        for it, u in enumerate(report.utility_trace):
            traces.append({"experiment": spec.kind, "sweep_var": spec.sweep_var, "sweep_value": _fmt(value),
                           "replica_seed": _fmt(cfg.seed), "solver": name, "iteration": str(it),
                           "utility": _fmt(float(u))})
    return rows, traces


def _run_task(args):
    return run_point(*args)


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> Tuple[List[Dict[str, str]], List[Dict[str, str]]]:
    tasks = [(spec, v, r) for v in spec.values for r in range(spec.replicas)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    rows = [row for r, _ in results for row in r]
    traces = [t for _, tr in results for t in tr]
    return rows, traces


def write_csv(path, rows: Iterable[Dict[str, str]], columns: Sequence[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def cmd_sweep(spec: ExperimentSpec, jobs: int = 1) -> Dict[str, Path]:
    """Run a sweep and write ``<kind>.csv``, ``<kind>_traces.csv`` and a metadata sidecar."""
    out = Path(spec.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    rows, traces = run_sweep(spec, jobs)
    paths = {"rows": out / f"{spec.kind}.csv", "traces": out / f"{spec.kind}_traces.csv",
             "meta": out / f"{spec.kind}.meta.json"}
    write_csv(paths["rows"], rows, CSV_COLUMNS)
    write_csv(paths["traces"], traces, TRACE_COLUMNS)
    meta = {
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "experiment": spec.kind,
        "sweep_var": spec.sweep_var,
        "values": list(spec.values),
        "replicas": spec.replicas,
        "solvers": list(spec.solvers),
        "base_config": spec.base.to_dict(),
        "fs_per_patient": spec.fs_per_patient,
        "timing": spec.timing,
        "rows": len(rows),
    }
    paths["meta"].write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return paths


# -- aggregation ---------------------------------------------------------------

def read_rows(path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ConfigurationError(f"{path}: missing column {missing[0]!r}")
        return list(reader)


def _sort_key(value: str):
    try:
        return (0, float(value), value)
    except ValueError:
        return (1, 0.0, value)


def aggregate(rows: Iterable[Dict[str, str]]) -> List[Dict[str, str]]:
    """Mean and sample standard deviation per (experiment, solver, sweep value).

    Only feasible rows contribute to the statistics; ``n_rows`` and
    ``n_feasible`` report how many rows each group had.
    """
    groups: Dict[Tuple[str, str, str, str], List[Dict[str, str]]] = {}
    for row in rows:
        key = (row["experiment"], row["sweep_var"], row["solver"], row["sweep_value"])
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], _sort_key(k[3]))):
        members = groups[key]
        ok = [r for r in members if r["feasible"] == "true"]
        entry = {"experiment": key[0], "sweep_var": key[1], "solver": key[2], "sweep_value": key[3],
                 "n_rows": str(len(members)), "n_feasible": str(len(ok))}
        for metric in SUMMARY_METRICS:
            xs = [float(r[metric]) for r in ok if r[metric] != ""]
            if xs:
                entry[f"{metric}_mean"] = repr(statistics.fmean(xs))
                entry[f"{metric}_std"] = repr(statistics.stdev(xs) if len(xs) > 1 else 0.0)
            else:
                entry[f"{metric}_mean"] = entry[f"{metric}_std"] = ""
        out.append(entry)
    return out


SUMMARY_COLUMNS = (["experiment", "sweep_var", "solver", "sweep_value", "n_rows", "n_feasible"]
                   + [f"{m}_{s}" for m in SUMMARY_METRICS for s in ("mean", "std")])


def cmd_plotdata(paths: Sequence, out) -> List[Dict[str, str]]:
    rows = [row for p in paths for row in read_rows(p)]
    summary = aggregate(rows)
    write_csv(out, summary, SUMMARY_COLUMNS)
    return summary
