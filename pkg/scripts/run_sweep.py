"""Sweep all algorithms over r on one synthetic scenario and print mean f / fav per cell.

    python scripts/run_sweep.py --kind coverage --reps 40 -o results/coverage.csv
"""
import argparse
from pathlib import Path

from fairmatroid.harness import DEFAULT_ALGOS, SweepSpec, parse_algos, parse_range, sweep
from fairmatroid.instances import KINDS

DEFAULT_R = {"coverage": "10:100:10", "clustering": "30:60:5", "recommender": "10:100:10"}


def table(summary):
    cells = {(g["algo"], g["r"]): g for g in summary["groups"]}
    algos = summary["config"]["algos"]
    lines = ["r".rjust(4) + "".join(a.rjust(20) for a in algos)]
    for r in summary["config"]["r_values"]:
        row = [str(r).rjust(4)]
        for a in algos:
            g = cells[(a, r)]
            if g["f_value_mean"] is None:
                row.append("infeasible".rjust(20))
            else:
                row.append(f"{g['f_value_mean']:9.1f} / {g['fav_mean']:6.2f}".rjust(20))
        lines.append("".join(row))
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", choices=KINDS, default="coverage")
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--r", default=None)
    ap.add_argument("--algos", default=DEFAULT_ALGOS)
    ap.add_argument("--reps", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args()
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    spec = SweepSpec(args.kind, tuple(parse_algos(args.algos)), tuple(parse_range(args.r or DEFAULT_R[args.kind])),
                     args.reps, args.seed, args.output, args.n, workers=args.workers)
    _, summary = sweep(spec)
    print(f"{args.kind}: mean f(S) / mean fav(S) over {args.reps} reps")
    print(table(summary))


if __name__ == "__main__":
    main()
