"""Empirical check of the randomized algorithm's expectation guarantees on one instance.

Prints, per epsilon, the mean size, value and violation against the bounds
(1 - eps) N, eps f(Y0) and eps fav(Y0), with standard errors.
"""
import argparse
import math

import numpy as np

from fairmatroid import Evaluator, RunConfig, build_fair_base, fav, greedy_intersection, run_randomized
from fairmatroid.fairness import upper_matroid
from fairmatroid.instances import gen_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", default="coverage")
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--r", type=int, default=40)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--eps", default="0.2,0.5,0.8")
    args = ap.parse_args()

    inst = gen_instance(args.kind, args.n, r=args.r)
    m, spec, f = inst.matroid, inst.fairness, inst.objective
    base = build_fair_base(m, spec)
    y0 = greedy_intersection(Evaluator(f), m, upper_matroid(spec))
    f0, v0 = f.value(y0), fav(y0, spec)
    print(f"{inst.name}: N={len(base)} |Y0|={len(y0)} f(Y0)={f0:.2f} fav(Y0)={v0}")
    for eps in (float(e) for e in args.eps.split(",")):
        recs = [run_randomized(Evaluator(f), m, spec, RunConfig(eps, s, fast_path=True), base=base, start=y0)
                for s in range(args.runs)]
        for name, vals, bound in [("size", [r.size for r in recs], (1 - eps) * len(base)),
                                  ("f", [r.f_value for r in recs], eps * f0),
                                  ("fav", [r.fav for r in recs], eps * v0)]:
            a = np.asarray(vals, dtype=float)
            se = a.std(ddof=1) / math.sqrt(len(a))
            print(f"  eps={eps:.1f} {name:>4}: mean {a.mean():10.3f} +- {se:.3f}  bound {bound:10.3f}")


if __name__ == "__main__":
    main()
