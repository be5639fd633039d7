"""Random instance builders shared by the test modules."""
from itertools import combinations

import numpy as np

from fairmatroid import (Coverage, ExemplarClustering, ExplicitMatroid, FairnessSpec, Linear,
                         PartitionMatroid, RecommenderBlend, UniformMatroid)
from fairmatroid.fairness import upper_matroid


def _acyclic(n_vertices, edges):
    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def graphic_matroid(n_vertices, edges):
    """Forests of a multigraph, listed explicitly."""
    n = len(edges)
    fam = []
    for mask in range(1 << n):
        sub = [edges[e] for e in range(n) if mask >> e & 1]
        if _acyclic(n_vertices, sub):
            fam.append(frozenset(e for e in range(n) if mask >> e & 1))
    return ExplicitMatroid(n, frozenset(fam))


def random_graphic(rng, n):
    nv = int(rng.integers(2, 6))
    edges = [tuple(sorted(rng.choice(nv, size=2, replace=False).tolist())) for _ in range(n)]
    return graphic_matroid(nv, edges)


def random_partition(rng, n, n_groups=None):
    k = n_groups or int(rng.integers(1, max(2, n // 2) + 1))
    groups = rng.integers(0, k, size=n)
    caps = rng.integers(0, 4, size=k)
    return PartitionMatroid(tuple(groups.tolist()), tuple(caps.tolist()))


def random_matroid(rng, n, kinds=("partition", "uniform", "explicit")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "explicit" and n > 12:
        kind = "partition"
    if kind == "partition":
        return random_partition(rng, n)
    if kind == "uniform":
        return UniformMatroid(n, int(rng.integers(0, n + 1)))
    return random_graphic(rng, n)


def random_fairness(rng, n, n_colors=None):
    c = n_colors or int(rng.integers(1, 6))
    color = rng.integers(0, c, size=n)
    sizes = np.bincount(color, minlength=c)
    upper = [int(rng.integers(0, s + 1)) for s in sizes]
    lower = [int(rng.integers(0, u + 1)) for u in upper]
    return FairnessSpec(tuple(color.tolist()), tuple(lower), tuple(upper))


def random_member(rng, m1, m2, n, size=None):
    """A random set independent in both matroids: greedy over a random order, then truncated."""
    out = []
    v1, v2 = m1.view(frozenset()), m2.view(frozenset())
    for e in rng.permutation(n).tolist():
        if v1.can_add(e) and v2.can_add(e):
            v1.add(e)
            v2.add(e)
            out.append(e)
    if size is not None:
        out = out[:size]
    return frozenset(out)


def random_objective(rng, n, kinds=("coverage", "linear", "clustering", "recommender")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "coverage":
        items = int(rng.integers(1, 2 * n + 2))
        return Coverage(tuple(tuple(sorted(set(rng.integers(0, items, size=int(rng.integers(0, 5))).tolist())))
                              for _ in range(n)))
    if kind == "linear":
        return Linear(tuple(rng.uniform(0, 10, size=n).tolist()))
    if kind == "clustering":
        return ExemplarClustering(rng.normal(size=(n, int(rng.integers(1, 4)))))
    items = rng.normal(size=(n, 4))
    return RecommenderBlend(items, np.abs(rng.normal(size=4)), float(rng.uniform(0, 1)), clip_scores=True)


def path_instance(rng, n_max=20, c_max=5):
    """(matroid, fairness, Y, P) with Y, P independent and upper-fair and |Y| <= |P|."""
    from fairmatroid.algorithms import build_fair_base
    while True:
        n = int(rng.integers(1, n_max + 1))
        m = random_matroid(rng, n)
        spec = random_fairness(rng, n, int(rng.integers(1, c_max + 1)))
        up = upper_matroid(spec)
        if rng.random() < 0.5:
            p = build_fair_base(m, spec)
            if p is None:
                continue
        else:
            p = random_member(rng, m, up, n)
        y = random_member(rng, m, up, n, size=int(rng.integers(0, len(p) + 1)))
        return m, spec, y, p


def matching_encoding(n_left, n_right, edges):
    """Edge i joins left ``edges[i][0]`` and right ``edges[i][1]``; matchings = common independent sets."""
    m1 = PartitionMatroid(tuple(a for a, _ in edges), (1,) * n_left)
    m2 = PartitionMatroid(tuple(b for _, b in edges), (1,) * n_right)
    return m1, m2


def all_subsets(n):
    for k in range(n + 1):
        yield from (frozenset(c) for c in combinations(range(n), k))
