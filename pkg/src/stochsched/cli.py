"""Command-line entry point: ``stochsched {gen,run,compare,oracle,verify}``.

Exit codes: 0 success, 1 a verification suite failed, 2 usage or input
error, 3 an exact computation exceeded its size cap.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict

from . import formats
from .experiments import (
    METRICS,
    SUITES,
    SuiteConfig,
    ratio_report,
    run_suites,
    write_reports_csv,
)
from .job_model import (
    CapExceededError,
    Deterministic,
    gen_free_time_gap_instance,
    gen_machine_sensitivity_instance,
    gen_random_bernoulli,
    gen_random_deterministic,
)
from .oracle import (
    DEFAULT_DP_MAX_JOBS,
    DEFAULT_DP_MAX_MACHINES,
    DEFAULT_PERM_MAX_JOBS,
    opt_adaptive_completion,
    opt_batch_free_times,
    opt_free_time_det,
)
from .policies import algorithm_names, choose_jobs, resolve_algorithm

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

GEN_KINDS = ("free-time-gap", "sensitivity", "random-bernoulli", "random-deterministic")


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(path: str):
    try:
        return formats.load_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read instance: {exc}") from exc
    except formats.InstanceFormatError as exc:
        raise UsageError(f"bad instance file: {exc}") from exc


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--kind {args.kind} needs " + ", ".join("--" + n for n in missing))


def cmd_gen(args) -> int:
    if args.kind == "free-time-gap":
        _need(args, "m")
        inst = gen_free_time_gap_instance(args.m)
    elif args.kind == "sensitivity":
        _need(args, "m", "c")
        inst = gen_machine_sensitivity_instance(args.m, args.c)
    elif args.kind == "random-bernoulli":
        _need(args, "n", "m", "seed")
        inst = gen_random_bernoulli(args.n, args.m, args.seed)
    else:
        _need(args, "n", "m", "seed")
        inst = gen_random_deterministic(args.n, args.m, args.seed)
    _emit(formats.dumps_instance(inst), args.out)
    return EXIT_OK


def _resolve(name: str):
    try:
        return resolve_algorithm(name)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; known: {', '.join(algorithm_names())}") from exc


def _write_rows(rows, fmt: str, out: str | None) -> None:
    if fmt == "json":
        _emit(_dumps([asdict(r) for r in rows]), out)
    else:
        buf = io.StringIO()
        write_reports_csv(rows, buf)
        _emit(buf.getvalue(), out)


def cmd_run(args) -> int:
    inst = _load(args.instance)
    alg = _resolve(args.alg)
    row = ratio_report(inst, args.instance_id or args.instance, alg, args.metric, args.trials, args.seed)
    _write_rows([row], args.format, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = _load(args.instance)
    alg, base = _resolve(args.alg), _resolve(args.baseline)
    ref = ratio_report(inst, args.instance_id or args.instance, base, args.metric, args.trials, args.seed)
    row = ratio_report(
        inst, args.instance_id or args.instance, alg, args.metric, args.trials, args.seed, baseline=ref.mean
    )
    _write_rows([row], args.format, args.out)
    return EXIT_OK


def _realization(args, inst):
    if args.realization is None:
        if all(isinstance(j.dist, Deterministic) for j in inst.jobs):
            return {j.id: j.dist.size for j in inst.jobs}
        raise UsageError("instance has random jobs; pass --realization")
    text = args.realization
    try:
        if not text.lstrip().startswith(("{", "[")):
            with open(text) as fh:
                text = fh.read()
        real = formats.realization_from_obj(json.loads(text))
    except (OSError, ValueError, AttributeError) as exc:
        raise UsageError(f"bad realization: {exc}") from exc
    if set(real) != set(range(inst.n)):
        raise UsageError("realization must give a size for every job")
    return real


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    if args.mode == "completion":
        res = opt_adaptive_completion(inst, args.max_jobs, args.max_machines)
        report = {"mode": "completion", "value": res.value}
    elif args.mode == "free-time":
        real = _realization(args, inst)
        value = opt_free_time_det(dict(real), inst.machines, max_jobs=args.max_free_jobs)
        report = {"mode": "free-time", "value": value}
    else:
        real = _realization(args, inst)
        plan = choose_jobs(inst)
        values = opt_batch_free_times(plan, inst, real, max_jobs=args.max_free_jobs)
        report = {
            "mode": "batch-free-time",
            "batches": [sorted(b) for b in plan.batches],
            "values": values,
        }
    _emit(_dumps(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(args.suite_names)
    if args.suites:
        names += [s for s in args.suites.split(",") if s]
    if not names or "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    config = SuiteConfig(seed=args.seed, cases=args.cases)
    outcomes = run_suites(names, config)
    report = {
        "seed": args.seed,
        "passed": all(o.passed for o in outcomes),
        "suites": [o.to_json() for o in outcomes],
    }
    _emit(_dumps(report), args.out)
    for o in outcomes:
        print(f"{o.check}: {'PASS' if o.passed else 'FAIL'} ({o.cases} cases)", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stochsched", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write an instance JSON file")
    g.add_argument("--kind", required=True, choices=GEN_KINDS)
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--c", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    def sim_args(p):
        p.add_argument("--instance", required=True)
        p.add_argument("--metric", default="total_completion", choices=METRICS)
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--format", default="csv", choices=("csv", "json"))
        p.add_argument("--instance-id")
        p.add_argument("--out")

    r = sub.add_parser("run", help="Monte Carlo estimate of one algorithm")
    r.add_argument("--alg", required=True, help="one of: " + ", ".join(algorithm_names()))
    sim_args(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="one algorithm against a baseline, as a ratio row")
    c.add_argument("--alg", required=True)
    c.add_argument("--baseline", required=True)
    sim_args(c)
    c.set_defaults(func=cmd_compare)

    o = sub.add_parser("oracle", help="exact optimum of a small instance")
    o.add_argument("--instance", required=True)
    o.add_argument("--mode", required=True, choices=("completion", "free-time", "batch-free-time"))
    o.add_argument("--realization", help="JSON object/list or a path to one")
    o.add_argument("--max-jobs", type=int, default=DEFAULT_DP_MAX_JOBS)
    o.add_argument("--max-machines", type=int, default=DEFAULT_DP_MAX_MACHINES)
    o.add_argument("--max-free-jobs", type=int, default=DEFAULT_PERM_MAX_JOBS)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run bound-verification suites")
    v.add_argument("suite_names", nargs="*", metavar="SUITE", help="suite names or 'all'")
    v.add_argument("--suites", help="comma-separated suite names")
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--cases", type=int, help="override every suite's case count")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"stochsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceededError as exc:
        print(f"stochsched: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError) as exc:
        print(f"stochsched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
