"""Command line front end.

Subcommands cover the full workflow: generate a workload, plan a schedule,
evaluate or validate it, export the integer program, and compare planners
over a seed range.  Exit codes: 0 on success, 1 when a schedule or
assignment is infeasible, 2 for usage errors, malformed inputs, and
refused oracle runs.
"""

import argparse
import sys
from dataclasses import dataclass
from statistics import median
from typing import Dict, List, Optional, Sequence, Tuple

from .ilp import (
    DEFAULT_BIG_M,
    SolutionFormatError,
    build_model,
    export_lp,
    matrices_to_schedule,
    parse_solution,
    validate_solution,
)
from .schedule import (
    InfeasibleScheduleError,
    Schedule,
    ScheduleFormatError,
    check_feasibility,
    evaluate,
    format_schedule,
    parse_schedule,
)
from .solvers import (
    OracleInfeasibleError,
    OracleLimitError,
    OracleLimits,
    adaptive_schedule,
    exact_oracle,
    greedy_schedule,
)
from .workload import (
    Config,
    ConfigurationError,
    ScenarioParams,
    Workload,
    WorkloadFormatError,
    format_workload,
    generate_workload,
    parse_workload,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2

ALGORITHMS = ("ads", "greedy", "oracle")

SCENARIO_PRESETS: Dict[str, Dict[str, object]] = {
    "mmog": {"n": 100, "delta": 3, "theta": 4, "amplitude": 1500,
             "plateau_fraction": 0.3},
    "oppd": {"n": 100, "delta": 3, "theta": 4, "amplitude": 300,
             "plateau_fraction": 0.3},
}


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _add_scenario_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", choices=sorted(SCENARIO_PRESETS),
                        help="parameter preset; explicit flags override it")
    parser.add_argument("--n", type=int, help="number of slots")
    parser.add_argument("--delta", type=int, help="provisioning lag in slots")
    parser.add_argument("--theta", type=int, help="acceptable join delay in slots")
    parser.add_argument("--amplitude", type=int, help="peak per-slot draw")
    parser.add_argument("--plateau-fraction", type=float, dest="plateau_fraction",
                        help="fraction of the horizon spent at the plateau")


def _resolve_scenario(args: argparse.Namespace, seed: int) -> Tuple[Config, ScenarioParams]:
    merged: Dict[str, object] = {}
    if args.scenario:
        merged.update(SCENARIO_PRESETS[args.scenario])
    for field in ("n", "delta", "theta", "amplitude", "plateau_fraction"):
        value = getattr(args, field)
        if value is not None:
            merged[field] = value
    missing = [f for f in ("n", "delta", "theta", "amplitude") if f not in merged]
    if missing:
        raise ConfigurationError(
            "missing scenario parameters: " + ", ".join(missing)
            + " (pass --scenario or the explicit flags)")
    merged.setdefault("plateau_fraction", 0.3)
    config = Config(n=int(merged["n"]), delta=int(merged["delta"]),
                    theta=int(merged["theta"]))
    params = ScenarioParams(name=args.scenario or "custom",
                            amplitude=int(merged["amplitude"]),
                            plateau_fraction=float(merged["plateau_fraction"]),
                            seed=seed)
    return config, params


def _plan(algorithm: str, workload: Workload, config: Config,
          limits: Optional[OracleLimits] = None) -> Schedule:
    if algorithm == "ads":
        return adaptive_schedule(workload, config)
    if algorithm == "greedy":
        return greedy_schedule(workload, config)
    if algorithm == "oracle":
        matrices, _ = exact_oracle(workload, config, limits)
        return matrices_to_schedule(matrices, config)
    raise ConfigurationError(f"unknown algorithm {algorithm!r}")


def _cmd_generate(args: argparse.Namespace) -> int:
    config, params = _resolve_scenario(args, args.seed)
    workload = generate_workload(params, config)
    _write_text(args.out, format_workload(config, workload))
    return EXIT_OK


def _report_lines(report) -> List[str]:
    return [
        f"resource_cost={report.resource_cost}",
        f"qos_cost={report.qos_cost}",
        f"max_capacity={report.max_capacity}",
        f"num_requests={report.num_requests}",
        f"feasible={'true' if report.feasible else 'false'}",
    ]


def _cmd_solve(args: argparse.Namespace) -> int:
    config, workload = parse_workload(_read_text(args.workload))
    limits = OracleLimits(time_budget=args.time_budget)
    schedule = _plan(args.algorithm, workload, config, limits)
    _write_text(args.out, format_schedule(config, schedule))
    report = evaluate(workload, schedule, config)
    for line in _report_lines(report):
        print(line, file=sys.stderr)
    if not report.feasible:
        for violation in check_feasibility(workload, schedule, config):
            print(violation.render(), file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    config, workload = parse_workload(_read_text(args.workload))
    n, delta, schedule = parse_schedule(_read_text(args.schedule))
    if (n, delta) != (config.n, config.delta):
        raise ScheduleFormatError(
            f"schedule was built for n={n}, delta={delta}, "
            f"not n={config.n}, delta={config.delta}")
    report = evaluate(workload, schedule, config)
    _write_text(args.out, "".join(line + "\n" for line in _report_lines(report)))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _cmd_validate(args: argparse.Namespace) -> int:
    config, workload = parse_workload(_read_text(args.workload))
    if (args.schedule is None) == (args.solution is None):
        raise ConfigurationError("pass exactly one of --schedule or --solution")
    if args.schedule is not None:
        n, delta, schedule = parse_schedule(_read_text(args.schedule))
        if (n, delta) != (config.n, config.delta):
            raise ScheduleFormatError(
                f"schedule was built for n={n}, delta={delta}, "
                f"not n={config.n}, delta={config.delta}")
        violations = check_feasibility(workload, schedule, config)
    else:
        model = build_model(workload, config, big_m=args.big_m)
        matrices = parse_solution(_read_text(args.solution), model)
        violations = validate_solution(matrices, workload, config, big_m=args.big_m)
    if not violations:
        print("OK")
        return EXIT_OK
    for violation in violations:
        print(violation.render())
    return EXIT_INFEASIBLE


def _cmd_export_lp(args: argparse.Namespace) -> int:
    config, workload = parse_workload(_read_text(args.workload))
    model = build_model(workload, config, big_m=args.big_m)
    _write_text(args.out, export_lp(model))
    return EXIT_OK


@dataclass(frozen=True)
class CompareRow:
    """One planner's evaluation on one seeded workload."""

    seed: int
    algorithm: str
    resource_cost: int
    qos_cost: int
    max_capacity: int
    num_requests: int
    feasible: bool

    def as_csv(self) -> str:
        return ",".join([
            str(self.seed), self.algorithm, str(self.resource_cost),
            str(self.qos_cost), str(self.max_capacity), str(self.num_requests),
            "true" if self.feasible else "false",
        ])


CSV_HEADER = "seed,algorithm,resource_cost,qos_cost,max_capacity,num_requests,feasible"


def compare_instance(workload: Workload, config: Config, algorithms: Sequence[str],
                     seed: int, limits: Optional[OracleLimits] = None,
                     ) -> Tuple[List[CompareRow], List[str]]:
    """Evaluate each named planner on one workload.

    Returns the result rows plus notes for planners that refused the
    instance (the oracle on anything beyond its limits).
    """
    rows: List[CompareRow] = []
    notes: List[str] = []
    for algorithm in algorithms:
        try:
            schedule = _plan(algorithm, workload, config, limits)
        except OracleLimitError as exc:
            notes.append(f"{algorithm} skipped seed={seed}: {exc}")
            continue
        report = evaluate(workload, schedule, config)
        rows.append(CompareRow(
            seed=seed, algorithm=algorithm,
            resource_cost=report.resource_cost, qos_cost=report.qos_cost,
            max_capacity=report.max_capacity, num_requests=report.num_requests,
            feasible=report.feasible))
    return rows, notes


@dataclass(frozen=True)
class CompareSpec:
    """Everything one comparison run needs: dimensions, scenario template,
    seed range, planner set, and the oracle's size/time limits."""

    config: Config
    scenario: ScenarioParams
    seeds: Tuple[int, ...]
    algorithms: Tuple[str, ...]
    oracle_limits: Optional[OracleLimits] = None

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(self.seeds))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.seeds:
            raise ConfigurationError("empty seed range")
        if not self.algorithms:
            raise ConfigurationError("no algorithms requested")
        for algorithm in self.algorithms:
            if algorithm not in ALGORITHMS:
                raise ConfigurationError(f"unknown algorithm {algorithm!r}")


def run_compare(spec: CompareSpec) -> str:
    """Run every planner over every seed and render the CSV report.

    Rows come first, sorted by seed then algorithm name; planner medians
    and any skip or infeasibility notes follow as comment lines so the
    file stays loadable by any CSV reader that skips '#'.  The oracle is
    dropped up front, with a note, when the dimensions exceed its limits.
    """
    config, params = spec.config, spec.scenario
    limits = spec.oracle_limits or OracleLimits()
    notes: List[str] = []
    algorithms = list(spec.algorithms)
    if "oracle" in algorithms and config.n > limits.max_n:
        algorithms.remove("oracle")
        notes.append(f"oracle excluded: n={config.n} exceeds the oracle "
                     f"limit max_n={limits.max_n}")
    rows: List[CompareRow] = []
    for seed in spec.seeds:
        seeded = ScenarioParams(name=params.name, amplitude=params.amplitude,
                                plateau_fraction=params.plateau_fraction, seed=seed)
        workload = generate_workload(seeded, config)
        seed_rows, seed_notes = compare_instance(workload, config, algorithms,
                                                 seed, limits)
        rows.extend(seed_rows)
        notes.extend(seed_notes)
    rows.sort(key=lambda row: (row.seed, row.algorithm))
    lines = [CSV_HEADER]
    lines.extend(row.as_csv() for row in rows)
    for algorithm in sorted(set(algorithms)):
        costs = [row.resource_cost for row in rows if row.algorithm == algorithm]
        qos = [row.qos_cost for row in rows if row.algorithm == algorithm]
        if costs:
            lines.append(f"# median algorithm={algorithm} "
                         f"resource_cost={median(costs)} qos_cost={median(qos)}")
        bad = sum(1 for row in rows
                  if row.algorithm == algorithm and not row.feasible)
        if bad:
            lines.append(f"# infeasible algorithm={algorithm} rows={bad}")
    lines.extend(f"# {note}" for note in notes)
    return "".join(line + "\n" for line in lines)


def _parse_seed_range(text: str) -> List[int]:
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise ConfigurationError(f"bad seed range {text!r}: expected K or A..B") from exc
    if hi < lo:
        raise ConfigurationError(f"bad seed range {text!r}: end before start")
    return list(range(lo, hi + 1))


def _cmd_compare(args: argparse.Namespace) -> int:
    config, params = _resolve_scenario(args, 0)
    spec = CompareSpec(
        config=config, scenario=params,
        seeds=tuple(_parse_seed_range(args.seeds)),
        algorithms=tuple(name.strip() for name in args.algorithms.split(",")
                         if name.strip()),
        oracle_limits=OracleLimits(time_budget=args.time_budget))
    _write_text(args.out, run_compare(spec))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capsched",
        description="Plan and evaluate elastic capacity schedules for "
                    "slotted conference workloads.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic workload")
    _add_scenario_options(p)
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", help="plan a capacity schedule for a workload")
    p.add_argument("workload", help="workload JSON path, '-' for stdin")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="ads")
    p.add_argument("--time-budget", type=float, default=60.0,
                   help="oracle search budget in seconds")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("evaluate", help="cost and admission report for a schedule")
    p.add_argument("workload", help="workload JSON path, '-' for stdin")
    p.add_argument("schedule", help="schedule JSON path")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("validate", help="list every constraint violation")
    p.add_argument("workload", help="workload JSON path, '-' for stdin")
    p.add_argument("--schedule", help="schedule JSON path")
    p.add_argument("--solution", help="solver solution path (variable value lines)")
    p.add_argument("--big-m", type=int, default=DEFAULT_BIG_M, dest="big_m",
                   help="linking coefficient used by the model")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("export-lp", help="write the integer program in LP format")
    p.add_argument("workload", help="workload JSON path, '-' for stdin")
    p.add_argument("--big-m", type=int, default=DEFAULT_BIG_M, dest="big_m",
                   help="linking coefficient used by the model")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_export_lp)

    p = sub.add_parser("compare", help="run planners over seeded workloads")
    _add_scenario_options(p)
    p.add_argument("--seeds", default="0..9", help="seed or inclusive range A..B")
    p.add_argument("--algorithms", default="ads,greedy",
                   help="comma separated planner names")
    p.add_argument("--time-budget", type=float, default=60.0,
                   help="oracle search budget in seconds")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigurationError, WorkloadFormatError, ScheduleFormatError,
            SolutionFormatError, OracleLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleScheduleError, OracleInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    raise SystemExit(main())
