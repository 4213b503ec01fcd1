"""Command-line interface: ``fairalloc {solve,verify,oracle,demo,bench}``.

Exit codes: 0 all requested checks passed, 1 a check failed, 2 bad input,
3 the request is outside what the library supports (the message names the
precondition and, when one applies, the corpus fixture illustrating it).
"""

import argparse
import json
import random
import sys
import time
from importlib import resources

from .algorithms import ALGORITHMS, solve
from .constraints import complementary_pairs
from .errors import CapabilityError, InputError, InvariantViolation
from .fairness import fairness_report
from .generators import SETTINGS, setting_instance
from .io import dumps_instance, format_value, loads_instance, read_allocation, read_instance
from .oracle import FIXTURES, NOTIONS, count_feasible, exists_fair, mnw, run_fixture, swm_oracle

REPORT_SCHEMA = "fairalloc.report/1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPABILITY = 0, 1, 2, 3


def _render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines = []
    for key in sorted(report):
        lines.append(f"{key}: {json.dumps(report[key], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _emit(report, args):
    text = _render(report, args.format)
    sys.stdout.write(text)
    if getattr(args, "output", None):
        with open(args.output, "w") as f:
            f.write(text)


def _bundles(x, inst):
    names = inst.agent_names or [str(i) for i in inst.agents]
    return {names[i]: sorted(b) for i, b in enumerate(x)}


def _parse_order(text):
    if text is None:
        return None
    try:
        return [int(a) for a in text.split(",")]
    except ValueError:
        raise InputError(f"--order expects comma-separated agent ids, got {text!r}") from None


def cmd_solve(args):
    inst = read_instance(args.path)
    start = time.perf_counter()
    sol = solve(inst, args.algorithm, order=_parse_order(args.order), verify=args.verify)
    elapsed = time.perf_counter() - start
    fr = fairness_report(sol.allocation, inst, pareto=args.pareto)
    report = {
        "schema": REPORT_SCHEMA,
        "command": "solve",
        "instance": inst.name,
        "algorithm": sol.algorithm,
        "guarantee": sol.guarantee,
        "allocation": sol.allocation.to_lists(),
        "bundles_by_agent": _bundles(sol.allocation, inst),
        "fairness": fr.as_dict(),
        "iterations": sol.trace.iterations,
    }
    if args.timing:
        report["wall_time_s"] = round(elapsed, 6)
    ok = True
    if args.verify:
        ok = fr.fef1 or (sol.algorithm in ("iterated_swaps", "cut_and_choose_two_agents", "per_category_rr")
                         and fr.ef1_ignoring_constraints)
        report["verified"] = ok
    _emit(report, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args):
    inst = read_instance(args.instance)
    x = read_allocation(args.allocation)
    fr = fairness_report(x, inst, pareto=args.pareto)
    report = {
        "schema": REPORT_SCHEMA,
        "command": "verify",
        "instance": inst.name,
        "allocation": x.to_lists(),
        "fairness": fr.as_dict(),
    }
    _emit(report, args)
    return EXIT_OK if fr.fef1 else EXIT_FAIL


QUESTIONS = ("count", "mnw", "swm", "complementary") + tuple(NOTIONS)


def cmd_oracle(args):
    inst = read_instance(args.path)
    q = args.question
    report = {"schema": REPORT_SCHEMA, "command": "oracle", "instance": inst.name, "question": q}
    ok = True
    if q == "count":
        report["answer"] = count_feasible(inst, args.bound)
    elif q == "mnw":
        argmax, (positive, product) = mnw(inst, args.bound)
        report["answer"] = {
            "positive_agents": positive,
            "product": format_value(product),
            "allocations": [x.to_lists() for x in argmax],
        }
    elif q == "swm":
        best, x = swm_oracle(inst, args.bound)
        report["answer"] = {"welfare": format_value(best), "allocation": x.to_lists()}
    elif q == "complementary":
        if not inst.has_identical_constraints:
            raise CapabilityError("complementary pairs are defined for one shared constraint")
        report["answer"] = [list(p) for p in complementary_pairs(inst.constraints[0])]
    else:
        found = exists_fair(inst, q, args.bound)
        ok = found.holds
        report["answer"] = found.holds
        report["witness"] = found.witness.to_lists() if found.witness else None
    _emit(report, args)
    return EXIT_OK if ok else EXIT_FAIL


def corpus_text(fixture_id):
    return resources.files("fairalloc").joinpath("corpus", f"{fixture_id}.json").read_text()


def cmd_demo(args):
    results = []
    start = time.perf_counter()
    for fid in FIXTURES:
        inst = loads_instance(corpus_text(fid))
        r = run_fixture(fid, inst)
        results.append(
            {
                "id": r.id,
                "title": r.title,
                "passed": r.passed,
                "failures": [
                    {"check": c.description, "expected": repr(c.expected), "observed": repr(c.observed)}
                    for c in r.checks
                    if not c.ok
                ],
                "checks": len(r.checks),
            }
        )
    passed = sum(r["passed"] for r in results)
    report = {
        "schema": REPORT_SCHEMA,
        "command": "demo",
        "fixtures": results,
        "summary": f"{passed}/{len(results)} fixtures pass",
    }
    if args.timing:
        report["wall_time_s"] = round(time.perf_counter() - start, 6)
    _emit(report, args)
    return EXIT_OK if passed == len(results) else EXIT_FAIL


def bench_rows(seed, count, settings):
    rows = []
    for name in settings:
        algorithm, _ = SETTINGS[name]
        rng = random.Random(f"{seed}:{name}")
        fef1 = ef1 = 0
        welfare = iterations = max_envy = 0
        seconds = 0.0
        for _ in range(count):
            inst = setting_instance(name, rng)
            start = time.perf_counter()
            sol = solve(inst, algorithm)
            seconds += time.perf_counter() - start
            fr = fairness_report(sol.allocation, inst)
            fef1 += fr.fef1
            ef1 += fr.ef1_ignoring_constraints
            welfare += fr.social_welfare
            iterations += sol.trace.iterations
            max_envy = max(max_envy, max(max(row) for row in fr.envy))
        rows.append(
            {
                "setting": name,
                "algorithm": algorithm,
                "instances": count,
                "f_ef1": fef1,
                "ef1_ignoring_constraints": ef1,
                "total_welfare": format_value(welfare),
                "total_iterations": iterations,
                "max_positive_envy": format_value(max_envy),
                "seconds": seconds,
            }
        )
    return rows


def cmd_bench(args):
    settings = args.settings or list(SETTINGS)
    for s in settings:
        if s not in SETTINGS:
            raise InputError(f"unknown setting {s!r}; choose from {sorted(SETTINGS)}")
    rows = bench_rows(args.seed, args.instances, settings)
    if not args.timing:
        for r in rows:
            del r["seconds"]
    else:
        for r in rows:
            r["seconds"] = round(r["seconds"], 6)
    report = {"schema": REPORT_SCHEMA, "command": "bench", "seed": args.seed, "rows": rows}
    _emit(report, args)
    ok = all(r["f_ef1"] == r["instances"] or r["ef1_ignoring_constraints"] == r["instances"] for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(args):
    """Write a fixture's instance to stdout (or --output)."""
    text = dumps_instance(FIXTURES[args.fixture].instance())
    sys.stdout.write(text)
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fairalloc", description="Fair allocation under matroid constraints.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        if output:
            sp.add_argument("--output", help="also write the report to this file")

    s = sub.add_parser("solve", help="allocate an instance file")
    s.add_argument("path")
    s.add_argument("--algorithm", choices=sorted(ALGORITHMS))
    s.add_argument("--order", help="initial agent order, e.g. 2,0,1")
    s.add_argument("--verify", action="store_true", help="check mid-run invariants and the final guarantee")
    s.add_argument("--pareto", action="store_true", help="include a Pareto-efficiency verdict")
    s.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
    common(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="fairness report for a given allocation")
    v.add_argument("instance")
    v.add_argument("allocation")
    v.add_argument("--pareto", action="store_true")
    common(v)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force questions on small instances")
    o.add_argument("path")
    o.add_argument("question", choices=QUESTIONS)
    o.add_argument("--bound", type=int, help="maximum n^m assignments to enumerate")
    common(o)
    o.set_defaults(func=cmd_oracle)

    d = sub.add_parser("demo", help="run every corpus fixture")
    d.add_argument("--timing", action="store_true")
    common(d)
    d.set_defaults(func=cmd_demo)

    b = sub.add_parser("bench", help="seeded random instances per setting")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--instances", type=int, default=50)
    b.add_argument("--settings", nargs="*", help=f"subset of {sorted(SETTINGS)}")
    b.add_argument("--timing", action="store_true")
    common(b)
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export", help="print a fixture instance as JSON")
    e.add_argument("fixture", choices=sorted(FIXTURES))
    e.add_argument("--output")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapabilityError as e:
        ref = f" (see corpus fixture {e.reference!r})" if e.reference else ""
        print(f"fairalloc: unsupported: {e}{ref}", file=sys.stderr)
        return EXIT_CAPABILITY
    except InvariantViolation as e:
        print(f"fairalloc: invariant violated: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, OSError) as e:
        print(f"fairalloc: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
