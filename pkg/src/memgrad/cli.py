"""Benchmark harness: generate problems, run solver configurations, emit tables.

Counter columns (iterations, oracle calls, mean inner steps) are deterministic
per seed; the timing columns are wall-clock and machine dependent.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

from .bundle import CYCLIC, MAX_NORM
from .problems import LogSumExpProblem, generate, load_problem, save_problem
from .solver import (ADAPTIVE, FIXED, SolverConfig, adaptive_run, fixed_run,
                     gradient_descent_run)

__all__ = ["BenchConfig", "ExperimentSpec", "ReportRow", "RunReport",
           "run_experiment", "emit_report", "parse_report", "build_parser", "main"]

GM = "gm"

CSV_HEADER = ["config", "n", "M", "mu", "m", "strategy", "iter", "nfunc",
              "fw_per_iter", "time_s", "it_ms", "residual", "converged"]


@dataclass
class BenchConfig:
    """One labelled solver configuration; ``baseline`` runs without memory."""

    label: str
    solver: SolverConfig
    baseline: bool = False


@dataclass
class ExperimentSpec:
    """Problem parameters plus the list of solver configurations to compare."""

    n: int
    num_terms: int
    mu: float
    seed: int
    configs: list[BenchConfig]
    repetitions: int = 1
    out_path: str | None = None
    fmt: str = "csv"
    save_path: str | None = None
    load_path: str | None = None

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")


@dataclass
class ReportRow:
    config: str
    n: int
    big_m: int
    mu: float
    m: int
    strategy: str
    iterations: int
    oracle_calls: int
    fw_per_iter: float
    time_s: float
    it_ms: float
    residual: float
    converged: bool


@dataclass
class RunReport:
    rows: list[ReportRow] = field(default_factory=list)


def run_experiment(spec: ExperimentSpec) -> RunReport:
    """Run every configuration on the same problem instance and collect rows.

    A solver exception marks that row failed (converged=False) and the run
    continues.  Rows appear in specification order.
    """
    if spec.load_path is not None:
        problem = load_problem(spec.load_path)
    else:
        problem = generate(spec.n, spec.num_terms, spec.mu, spec.seed)
    if spec.save_path is not None:
        save_problem(problem, spec.save_path)

    report = RunReport()
    for bench in spec.configs:
        for _ in range(spec.repetitions):
            report.rows.append(_run_one(bench, problem))
    return report


def _run_one(bench: BenchConfig, problem: LogSumExpProblem) -> ReportRow:
    cfg = bench.solver
    fw_iters = {"total": 0}

    def observer(rec):
        fw_iters["total"] += rec.fw_iterations

    t0 = time.perf_counter()
    try:
        if bench.baseline:
            state = gradient_descent_run(cfg, problem, observer=observer)
        elif cfg.variant == FIXED:
            state = fixed_run(cfg, problem, observer=observer)
        else:
            state = adaptive_run(cfg, problem, observer=observer)
    except Exception as exc:  # noqa: BLE001 - a failed row must not kill the run
        print(f"config {bench.label} failed: {exc}", file=sys.stderr)
        return ReportRow(config=bench.label, n=problem.n, big_m=problem.num_terms,
                         mu=problem.mu, m=cfg.bundle_capacity,
                         strategy=GM if bench.baseline else cfg.strategy,
                         iterations=0, oracle_calls=0, fw_per_iter=0.0,
                         time_s=time.perf_counter() - t0, it_ms=0.0,
                         residual=float("nan"), converged=False)
    time_s = time.perf_counter() - t0
    iters = state.outer_iters
    return ReportRow(
        config=bench.label, n=problem.n, big_m=problem.num_terms, mu=problem.mu,
        m=cfg.bundle_capacity, strategy=GM if bench.baseline else cfg.strategy,
        iterations=iters, oracle_calls=state.oracle_calls,
        fw_per_iter=fw_iters["total"] / iters if iters else 0.0,
        time_s=time_s, it_ms=1000.0 * time_s / iters if iters else 0.0,
        residual=float("nan") if state.residual is None else state.residual,
        converged=state.converged)


def emit_report(report: RunReport, fmt: str = "csv") -> str:
    """Serialize a report; CSV columns and JSON keys carry the same names."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in report.rows:
            writer.writerow([r.config, r.n, r.big_m, repr(r.mu), r.m, r.strategy,
                             r.iterations, r.oracle_calls, repr(r.fw_per_iter),
                             repr(r.time_s), repr(r.it_ms), repr(r.residual),
                             r.converged])
        return buf.getvalue()
    if fmt == "json":
        rows = [dict(zip(CSV_HEADER,
                         [r.config, r.n, r.big_m, r.mu, r.m, r.strategy,
                          r.iterations, r.oracle_calls, r.fw_per_iter,
                          r.time_s, r.it_ms, r.residual, r.converged]))
                for r in report.rows]
        return json.dumps({"rows": rows}, indent=2) + "\n"
    raise ValueError("format must be 'csv' or 'json'")


def parse_report(text: str, fmt: str = "csv") -> RunReport:
    """Inverse of :func:`emit_report` (counter fields round-trip exactly)."""
    report = RunReport()
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError("unexpected CSV header")
        for rec in reader:
            vals = dict(zip(CSV_HEADER, rec))
            report.rows.append(_row_from(vals, bool_from=lambda s: s == "True"))
        return report
    if fmt == "json":
        for vals in json.loads(text)["rows"]:
            report.rows.append(_row_from(vals, bool_from=bool))
        return report
    raise ValueError("format must be 'csv' or 'json'")


def _row_from(vals, bool_from) -> ReportRow:
    return ReportRow(config=str(vals["config"]), n=int(vals["n"]),
                     big_m=int(vals["M"]), mu=float(vals["mu"]), m=int(vals["m"]),
                     strategy=str(vals["strategy"]), iterations=int(vals["iter"]),
                     oracle_calls=int(vals["nfunc"]),
                     fw_per_iter=float(vals["fw_per_iter"]),
                     time_s=float(vals["time_s"]), it_ms=float(vals["it_ms"]),
                     residual=float(vals["residual"]),
                     converged=bool_from(vals["converged"]))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="memgrad-bench",
        description="Benchmark gradient methods with and without plane memory "
                    "on generated log-sum-exp problems.")
    p.add_argument("--n", type=int, default=100, help="problem dimension")
    p.add_argument("--big-m", type=int, default=None,
                   help="number of linear terms (default 6*n)")
    p.add_argument("--mu", type=float, default=0.05, help="smoothing parameter")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--bundle-size", type=int, default=None,
                   help="plane memory capacity (default n; forced to 1 for gm)")
    p.add_argument("--strategy", choices=[GM, CYCLIC, MAX_NORM], default=MAX_NORM,
                   help="replacement strategy, or gm for the memoryless baseline")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="target residual in the objective value")
    p.add_argument("--delta", type=float, default=None,
                   help="inner solve tolerance (default epsilon/2)")
    p.add_argument("--l0", type=float, default=1.0, help="initial step constant")
    p.add_argument("--variant", choices=[FIXED, ADAPTIVE], default=ADAPTIVE,
                   help="line-searched or fixed step constant")
    p.add_argument("--max-iters", type=int, default=200_000,
                   help="outer iteration cap")
    p.add_argument("--sweep", type=str, default=None,
                   help="comma list of bundle sizes; one report row per size")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="report format")
    p.add_argument("--out", type=str, default=None, metavar="PATH",
                   help="write the report here instead of stdout")
    p.add_argument("--save-problem", type=str, default=None, metavar="PATH",
                   help="write the generated problem to a text file")
    p.add_argument("--load-problem", type=str, default=None, metavar="PATH",
                   help="load the problem from a text file instead of generating")
    p.add_argument("--cold-start-fw", action="store_true",
                   help="disable warm starting of the inner simplex solver")
    p.add_argument("--literal-linesearch", action="store_true",
                   help="accept trials against the un-doubled constant")
    return p


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    num_terms = args.big_m if args.big_m is not None else 6 * args.n
    delta = args.delta if args.delta is not None else args.epsilon / 2.0
    bundle_size = args.bundle_size if args.bundle_size is not None else args.n

    def solver_config(m: int) -> SolverConfig:
        return SolverConfig(
            bundle_capacity=m,
            strategy=CYCLIC if args.strategy == GM else args.strategy,
            delta=delta, epsilon=args.epsilon, l0=args.l0, variant=args.variant,
            max_outer_iterations=args.max_iters,
            warm_start=not args.cold_start_fw,
            literal_linesearch=args.literal_linesearch)

    if args.sweep is not None:
        if args.strategy == GM:
            raise ValueError("--sweep needs a replacement strategy, not gm")
        sizes = [int(tok) for tok in args.sweep.split(",") if tok.strip()]
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("--sweep must list positive bundle sizes")
        configs = [BenchConfig(label=f"{args.strategy}-m{s}", solver=solver_config(s))
                   for s in sizes]
    elif args.strategy == GM:
        configs = [BenchConfig(label=GM, solver=solver_config(1), baseline=True)]
    else:
        configs = [BenchConfig(label=f"{args.strategy}-m{bundle_size}",
                               solver=solver_config(bundle_size))]

    return ExperimentSpec(n=args.n, num_terms=num_terms, mu=args.mu,
                          seed=args.seed, configs=configs, fmt=args.format,
                          out_path=args.out, save_path=args.save_problem,
                          load_path=args.load_problem)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(spec)
    text = emit_report(report, spec.fmt)
    if spec.out_path is not None:
        try:
            with open(spec.out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write report to {spec.out_path}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0 if all(r.converged for r in report.rows) else 2


if __name__ == "__main__":
    sys.exit(main())
