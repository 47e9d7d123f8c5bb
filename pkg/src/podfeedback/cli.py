"""Command-line entry points: feedback, simulate, batch, generate, verify.

Exit codes: 0 on success, 2 for unreadable or invalid input, 3 when an
internal cross-check or a batch run fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .coalitional import CoalitionalGame
from .dynamics import DynamicsConfig, Outcome, Policy, RandomTargets, policy_feedback, run
from .generator import GeneratorParams, RejectionBudgetExceeded, generate_instance
from .model import MICRO, InstanceError, instance_to_dict, parse_instance

EXIT_INPUT = 2
EXIT_CHECK = 3
REPORT_VERSION = 1


class InputError(Exception):
    pass


class CheckFailure(Exception):
    pass


def format_money(x) -> str:
    """Micro-units as currency units with six decimals."""
    q = round(Fraction(x))
    sign = "-" if q < 0 else ""
    q = abs(q)
    return f"{sign}{q // MICRO}.{q % MICRO:06d}"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_instance(path: str):
    try:
        return parse_instance(_read_text(path))
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from exc


def load_params(args) -> GeneratorParams:
    doc = {}
    if getattr(args, "params", None):
        try:
            doc = json.loads(_read_text(args.params))
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.params}: invalid JSON ({exc.msg})") from exc
        if not isinstance(doc, dict):
            raise InputError(f"{args.params}: expected a JSON object")
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    try:
        return GeneratorParams.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad generator parameters: {exc}") from exc


def _config(args) -> DynamicsConfig:
    try:
        return DynamicsConfig(max_rounds=args.max_rounds, epsilon=args.epsilon,
                              change_measure=args.change_measure)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# --- feedback -------------------------------------------------------------------

def cmd_feedback(args) -> int:
    inst = load_instance(args.instance)
    game = CoalitionalGame(inst)
    fb = policy_feedback(Policy(args.policy), game)
    doc = {
        "version": REPORT_VERSION,
        "policy": args.policy,
        "optimal_value_micro": game.optimum,
        "statuses": {a: s.value for a, s in zip(inst.ids, game.statuses)},
        **fb.to_dict(inst.ids),
    }
    if args.json:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        print(f"policy: {args.policy}")
        print(f"optimal value: {format_money(game.optimum)}")
        print(f"{'agent':<10} {'status':<14} {'discount':>16} {'raise':>16}")
        for a, s, d, r in zip(inst.ids, game.statuses, fb.discounts, fb.raises):
            print(f"{a:<10} {s.value:<14} {format_money(d):>16} {format_money(r):>16}")
        print(f"seller payoff: {format_money(fb.seller_payoff)}")
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    return 0


# --- simulate -------------------------------------------------------------------

def _initial(args, default_seed):
    if args.init == "values":
        return "values"
    return RandomTargets(args.seed if args.seed is not None else default_seed)


def cmd_simulate(args) -> int:
    if args.instance:
        inst = load_instance(args.instance)
    else:
        params = load_params(args)
        inst = generate_instance(params, args.index, args.bidders)
    trace = run(inst, Policy(args.policy), _config(args), _initial(args, 0))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "agent", "bid_micro", "status"])
    writer.writerows(trace.csv_rows())
    if args.out:
        Path(f"{args.out}.json").write_text(trace.to_json() + "\n")
        Path(f"{args.out}.csv").write_text(buf.getvalue())
        print(f"{trace.outcome.value} after {trace.num_rounds} rounds, "
              f"efficiency {float(trace.efficiency):.2f}%")
    else:
        sys.stdout.write(trace.to_json() + "\n")
    return 0


# --- batch ----------------------------------------------------------------------

@dataclass(frozen=True)
class RunRecord:
    policy: str
    bidders: int
    index: int
    outcome: str
    rounds: int
    efficiency: Fraction


def _run_one(task) -> RunRecord:
    params, config, policy, bidders, index = task
    inst = generate_instance(params, index, bidders)
    trace = run(inst, Policy(policy), config, RandomTargets((params.seed, bidders, index)))
    return RunRecord(policy, bidders, index, trace.outcome.value, trace.num_rounds, trace.efficiency)


def _mean_se(xs: Sequence[Fraction]) -> tuple[Optional[float], Optional[float]]:
    if not xs:
        return None, None
    n = len(xs)
    mean = sum(xs, Fraction(0)) / n
    if n < 2:
        return float(mean), None
    var = sum(((x - mean) ** 2 for x in xs), Fraction(0)) / (n - 1)
    return float(mean), math.sqrt(var / n)


@dataclass(frozen=True)
class BatchRow:
    policy: str
    bidders: int
    instances: int
    avg_rounds: float
    avg_rounds_se: Optional[float]
    avg_eff: float
    avg_eff_se: Optional[float]
    converged: int
    cycled: int
    max_rounds: int
    avg_cycle_eff: Optional[float]
    avg_cycle_eff_se: Optional[float]

    def pct(self, count: int) -> float:
        return 100 * count / self.instances


@dataclass(frozen=True)
class BatchReport:
    seed: int
    params: dict
    rows: tuple[BatchRow, ...]
    records: tuple[RunRecord, ...]

    COLUMNS = ("policy", "bidders", "avg_rounds", "avg_rounds_se", "avg_eff_pct", "avg_eff_se",
               "conv_pct", "cycle_pct", "max_rnds_pct", "avg_cycle_eff_pct", "avg_cycle_eff_se",
               "instances", "seed")

    def row(self, policy: str, bidders: int) -> BatchRow:
        return next(r for r in self.rows if r.policy == policy and r.bidders == bidders)

    def to_csv(self) -> str:
        def f(x):
            return "" if x is None else f"{x:.4f}"

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.policy, r.bidders, f(r.avg_rounds), f(r.avg_rounds_se), f(r.avg_eff),
                        f(r.avg_eff_se), f(r.pct(r.converged)), f(r.pct(r.cycled)),
                        f(r.pct(r.max_rounds)), f(r.avg_cycle_eff), f(r.avg_cycle_eff_se),
                        r.instances, self.seed])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "seed": self.seed,
            "params": self.params,
            "rows": [
                {
                    "policy": r.policy, "bidders": r.bidders, "instances": r.instances,
                    "avg_rounds": r.avg_rounds, "avg_rounds_se": r.avg_rounds_se,
                    "avg_eff_pct": r.avg_eff, "avg_eff_se": r.avg_eff_se,
                    "converged": r.converged, "cycled": r.cycled, "max_rounds": r.max_rounds,
                    "conv_pct": r.pct(r.converged), "cycle_pct": r.pct(r.cycled),
                    "max_rnds_pct": r.pct(r.max_rounds),
                    "avg_cycle_eff_pct": r.avg_cycle_eff, "avg_cycle_eff_se": r.avg_cycle_eff_se,
                }
                for r in self.rows
            ],
            # (policy, bidders, index) replays a run: instance index under the params,
            # initial targets seeded by (seed, bidders, index).
            "runs": [[r.policy, r.bidders, r.index, r.outcome, r.rounds, float(r.efficiency)]
                     for r in self.records],
        }


def aggregate(records: Sequence[RunRecord], policies: Sequence[str], bidders: Sequence[int]) -> tuple[BatchRow, ...]:
    rows = []
    for b in bidders:
        for p in policies:
            rs = sorted((r for r in records if r.policy == p and r.bidders == b), key=lambda r: r.index)
            if not rs:
                continue
            rounds, rounds_se = _mean_se([Fraction(r.rounds) for r in rs])
            eff, eff_se = _mean_se([r.efficiency for r in rs])
            cyc = [r.efficiency for r in rs if r.outcome == Outcome.CYCLED.value]
            cyc_eff, cyc_se = _mean_se(cyc)
            count = {o.value: sum(r.outcome == o.value for r in rs) for o in Outcome}
            rows.append(BatchRow(p, b, len(rs), rounds, rounds_se, eff, eff_se,
                                 count["converged"], count["cycled"], count["max_rounds"], cyc_eff, cyc_se))
    return tuple(rows)


def run_batch(params: GeneratorParams, instances: int, policies: Sequence[str] = ("vcg", "core", "bicore"),
              bidders: Optional[Sequence[int]] = None, config: Optional[DynamicsConfig] = None,
              jobs: int = 1) -> BatchReport:
    """Every (policy, bidder count, instance index) combination; rows are order-independent."""
    config = config or DynamicsConfig()
    bidders = list(bidders) if bidders else list(range(params.min_bidders, params.max_bidders + 1))
    tasks = [(params, config, p, b, k) for b in bidders for p in policies for k in range(instances)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, tasks, chunksize=16))
    else:
        records = []
        for t in tasks:
            try:
                records.append(_run_one(t))
            except (RejectionBudgetExceeded, ArithmeticError, RuntimeError) as exc:
                raise CheckFailure(f"run failed for policy {t[2]}, bidders {t[3]}, "
                                   f"index {t[4]}, seed {params.seed}: {exc}") from exc
    return BatchReport(params.seed, params.to_dict(), aggregate(records, policies, bidders), tuple(records))


def cmd_batch(args) -> int:
    params = load_params(args)
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in {x.value for x in Policy}:
            raise InputError(f"unknown policy {p!r}")
    bidders = [int(x) for x in args.bidders.split(",")] if args.bidders else None
    if bidders and any(not params.min_bidders <= b <= params.max_bidders for b in bidders):
        params = replace(params, min_bidders=min(bidders + [params.min_bidders]),
                         max_bidders=max(bidders + [params.max_bidders]))
    report = run_batch(params, args.instances, policies, bidders, _config(args), args.jobs)
    if args.out:
        Path(f"{args.out}.csv").write_text(report.to_csv())
        Path(f"{args.out}.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    sys.stdout.write(report.to_csv())
    return 0


# --- generate / verify ------------------------------------------------------------

def cmd_generate(args) -> int:
    params = load_params(args)
    lines = [json.dumps(instance_to_dict(generate_instance(params, k, args.bidders)), separators=(",", ":"))
             for k in range(args.start, args.start + args.count)]
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_verify(args) -> int:
    from .checks import run_suites

    failed = False
    for res in run_suites(args.instances, args.seed if args.seed is not None else 0):
        status = "ok" if res.ok else "FAIL"
        print(f"{res.name:<14} {res.instances:>5} instances  {status}")
        for v in res.violations[:5]:
            print(f"    {v}")
        failed |= not res.ok
    if failed:
        raise CheckFailure("cross-checks reported violations")
    return 0


# --- parser ---------------------------------------------------------------------

def _dynamics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=[x.value for x in Policy], default="bicore")
    p.add_argument("--init", choices=["values", "random"], default="random",
                   help="initial bids: true values, or random profit targets")
    p.add_argument("--epsilon", type=int, default=None,
                   help="bid increment in micro-units (default: a tenth of each agent's value)")
    p.add_argument("--max-rounds", type=int, default=20)
    p.add_argument("--change-measure", choices=["sum", "l1"], default="sum",
                   help="how the round-to-round bid change is measured")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="podfeedback", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("feedback", help="feedback vector for one instance")
    p.add_argument("instance")
    p.add_argument("--policy", choices=[x.value for x in Policy], default="bicore")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p.add_argument("--out", help="also write JSON here")
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("simulate", help="bidding dynamics for one instance")
    p.add_argument("instance", nargs="?", help="instance JSON (omit to generate one)")
    p.add_argument("--params", help="generator parameters JSON")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--bidders", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _dynamics_flags(p)
    p.add_argument("--out", help="output prefix for <out>.json and <out>.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("batch", help="aggregate dynamics over generated instances")
    p.add_argument("--params", help="generator parameters JSON")
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--policies", default="vcg,core,bicore")
    p.add_argument("--bidders", help="comma-separated bidder counts (default: the params range)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epsilon", type=int, default=None)
    p.add_argument("--max-rounds", type=int, default=20)
    p.add_argument("--change-measure", choices=["sum", "l1"], default="sum")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output prefix for <out>.csv and <out>.json")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("generate", help="write generated instances as JSON lines")
    p.add_argument("--params")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--bidders", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="run the randomised cross-check suites")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CheckFailure, RejectionBudgetExceeded) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
