"""Size/value trade-off of the deterministic algorithm on N disjoint 3-edge paths.

Each path a-b-c-d has edge values 0, 1, 0. Greedy takes every middle edge
(size N, value N); the maximum matching takes the outer edges (size 2N,
value 0). Smaller epsilon buys size with value.
"""
import argparse
import math
from fractions import Fraction

from fairmatroid import Evaluator, Linear, PartitionMatroid, run_deterministic_two_matroids


def path_union(n_paths):
    left, right, w = [], [], []
    for j in range(n_paths):
        a, c, b, d = 2 * j, 2 * j + 1, 2 * j, 2 * j + 1
        left += [a, c, c]
        right += [b, b, d]
        w += [0.0, 1.0, 0.0]
    m1 = PartitionMatroid(tuple(left), (1,) * (2 * n_paths))
    m2 = PartitionMatroid(tuple(right), (1,) * (2 * n_paths))
    return Linear(tuple(w)), m1, m2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=4)
    args = ap.parse_args()
    f, m1, m2 = path_union(args.paths)
    print(f"{'eps':>5} {'steps':>5} {'size':>5} {'value':>6} {'1 - eps':>8}")
    for i in range(1, 10):
        eps = i / 10
        rec = run_deterministic_two_matroids(Evaluator(f), m1, m2, eps, verify=True)
        steps = math.floor((1 - Fraction(i, 10)) * args.paths)
        assert rec.n_iterations == steps
        print(f"{eps:5.1f} {rec.n_iterations:5d} {rec.size:5d} {rec.f_value:6.1f} {1 - eps:8.1f}")


if __name__ == "__main__":
    main()
