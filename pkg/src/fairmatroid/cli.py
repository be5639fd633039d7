"""Command line: ``gen``, ``run``, ``sweep``, ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 infeasible instance.
"""
from __future__ import annotations

import argparse
import json
import sys

from .algorithms import ConfigError
from .harness import (DEFAULT_ALGOS, AlgoSpec, SweepSpec, parse_algos, parse_range, run_once,
                      summary_path, sweep, verify)
from .instances import (DEFAULT_COLORS, DEFAULT_N, KINDS, GenerationError, gen_instance, load_instance,
                        load_solution, save_instance, save_solution)
from .matroids import MalformedInputError

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairmatroid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a synthetic instance file")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, default=None, help=f"universe size (default {DEFAULT_N})")
    g.add_argument("--colors", type=int, default=None, help=f"number of colours (default {DEFAULT_COLORS})")
    g.add_argument("--r", type=int, default=10, help="solution size scale")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", required=True)

    r = sub.add_parser("run", help="run one algorithm on an instance file")
    r.add_argument("instance")
    r.add_argument("--algo", default="our", choices=("our", "twopass", "lbmi", "ubmi", "random"))
    r.add_argument("--epsilon", type=float, default=None, help="required for --algo our")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--debug-verify", action="store_true", help="check every path set as it is applied")
    r.add_argument("--fast-path", action="store_true", help="partition-matroid path generation")
    r.add_argument("-o", "--output", default=None, help="write the solution here")

    s = sub.add_parser("sweep", help="run algorithms over a range of r and collect a CSV")
    s.add_argument("--kind", choices=KINDS, default="coverage")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--colors", type=int, default=None)
    s.add_argument("--algos", default=DEFAULT_ALGOS)
    s.add_argument("--r", default="10:100:10", help="start:stop:step, both ends included")
    s.add_argument("--reps", type=int, default=40)
    s.add_argument("--seed", type=int, default=0, help="base seed for repetitions")
    s.add_argument("--instance-seed", type=int, default=0)
    s.add_argument("--no-fast-path", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    return ap


def _err(msg: str) -> None:
    print(f"fairmatroid: {msg}", file=sys.stderr)


def _gen(args) -> int:
    try:
        inst = gen_instance(args.kind, args.n, args.colors, args.r, args.seed)
    except GenerationError as exc:
        _err(str(exc))
        return EXIT_INFEASIBLE
    save_instance(inst, args.output)
    return EXIT_OK


def _run(args) -> int:
    inst = load_instance(args.instance)
    algo = AlgoSpec(args.algo, args.epsilon)
    row = run_once(inst, algo, args.seed, debug_verify=args.debug_verify, fast_path=args.fast_path)
    print(json.dumps({"instance": row.instance, "algo": row.algo, "status": row.status,
                      "f_value": row.f_value, "size": row.size, "fav": row.fav,
                      "runtime_ms": round(row.runtime_ms, 3)}, sort_keys=True))
    if row.status != "ok":
        return EXIT_INFEASIBLE
    if args.output:
        save_solution(row.solution, args.output, row.instance)
    return EXIT_OK


def _sweep(args) -> int:
    spec = SweepSpec(args.kind, tuple(parse_algos(args.algos)), tuple(parse_range(args.r)), args.reps,
                     args.seed, args.output, args.n, args.colors, args.instance_seed,
                     not args.no_fast_path, args.workers)
    rows, _ = sweep(spec)
    bad = sum(row.status != "ok" for row in rows)
    print(f"{len(rows)} rows ({bad} infeasible) -> {args.output}, {summary_path(args.output)}")
    return EXIT_OK


def _verify(args) -> int:
    inst = load_instance(args.instance)
    report = verify(inst, load_solution(args.solution))
    print(report.to_json())
    return EXIT_OK if report.ok else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"gen": _gen, "run": _run, "sweep": _sweep, "verify": _verify}[args.cmd]
    try:
        return handler(args)
    except (MalformedInputError, ConfigError, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
