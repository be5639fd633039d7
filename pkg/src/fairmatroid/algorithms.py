"""Randomized and deterministic fair/intersection algorithms, baselines, brute force."""
from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .exchange import (AUGMENTING, InvariantError, apply_exchange, fast_paths_partition,
                       generate_paths, generate_paths_two_matroids)
from .fairness import FairnessSpec, deficiency_k, fav, is_upper_fair, lower_matroid, upper_matroid
from .matroids import Matroid, PartitionMatroid, SizeError, UniformMatroid
from .objectives import Evaluator

BRUTE_FORCE_MAX_UNIVERSE = 16

OK = "ok"
INFEASIBLE = "infeasible"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    epsilon: float = 0.5
    seed: int = 0
    algorithm: str = "our"
    debug_verify: bool = False
    fast_path: bool = False

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie strictly inside (0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class StatTestConfig:
    n_repetitions: int = 2000
    delta: float = 0.1
    confidence: float = 3.0

    def __post_init__(self):
        if self.n_repetitions < 30:
            raise ConfigError("statistical checks need at least 30 repetitions")
        if self.delta <= 0:
            raise ConfigError("tail parameter must be positive")


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    solution: frozenset
    f_value: float
    size: int
    fav: Optional[int]
    n_iterations: int = 0
    k_initial: int = 0
    n_max: int = 0
    opt_matint_lower: float = 0.0
    seed: Optional[int] = None
    status: str = OK
    k_trace: tuple = ()
    wall_time: float = field(default=0.0, compare=False)


def _infeasible(algorithm: str, seed=None) -> RunRecord:
    return RunRecord(algorithm, frozenset(), 0.0, 0, None, seed=seed, status=INFEASIBLE)


def _record(algorithm, f: Evaluator, spec: Optional[FairnessSpec], sol, t0, **kw) -> RunRecord:
    sol = frozenset(sol)
    return RunRecord(algorithm, sol, f.evaluate(sol), len(sol),
                     fav(sol, spec) if spec is not None else None,
                     wall_time=time.perf_counter() - t0, **kw)


# --- greedy -------------------------------------------------------------------

def greedy_intersection(f: Evaluator, m1: Matroid, m2: Matroid,
                        base: Iterable[int] = ()) -> frozenset:
    """Greedy by marginal gain over the intersection of two matroids.

    Starts from ``base`` (assumed feasible) and repeatedly adds the feasible
    element with the largest gain, smallest id on ties, until nothing fits.
    Gains are re-evaluated lazily; stale heap keys are upper bounds by
    submodularity, so the picks equal those of the plain greedy.
    """
    cur = frozenset(base)
    state = f.state(cur)
    v1, v2 = m1.view(cur), m2.view(cur)
    heap = [(-state.gain(e), e) for e in range(f.n)
            if e not in cur and v1.can_add(e) and v2.can_add(e)]
    heapq.heapify(heap)
    chosen = set(cur)
    while heap:
        _, e = heapq.heappop(heap)
        # once infeasible, always infeasible (the set only grows)
        if not (v1.can_add(e) and v2.can_add(e)):
            continue
        key = (-state.gain(e), e)
        if heap and key > heap[0]:
            heapq.heappush(heap, key)
            continue
        state.add(e)
        v1.add(e)
        v2.add(e)
        chosen.add(e)
    return frozenset(chosen)


# --- maximum-cardinality intersection ---------------------------------------------

def _partition_form(m: Matroid) -> Optional[PartitionMatroid]:
    if isinstance(m, PartitionMatroid):
        return m
    if isinstance(m, UniformMatroid):
        return PartitionMatroid((0,) * m.n, (m.rank,))
    return None


def _max_card_partitions(a: PartitionMatroid, b: PartitionMatroid) -> frozenset:
    # source -> parts of a -> parts of b -> sink; elements are unit edges between parts
    na, nb = len(a.caps), len(b.caps)
    src, sink = 0, 1 + na + nb
    members: dict[tuple[int, int], list[int]] = {}
    for e in range(a.n):
        members.setdefault((a.groups[e], b.groups[e]), []).append(e)
    rows, cols, caps = [], [], []
    for g, c in enumerate(a.caps):
        rows.append(src), cols.append(1 + g), caps.append(c)
    for g, c in enumerate(b.caps):
        rows.append(1 + na + g), cols.append(sink), caps.append(c)
    for (ga, gb), elems in members.items():
        rows.append(1 + ga), cols.append(1 + na + gb), caps.append(len(elems))
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)), shape=(sink + 1, sink + 1))
    flow = maximum_flow(graph, src, sink).flow.tocoo()
    out = []
    for r, c, v in zip(flow.row, flow.col, flow.data):
        if v > 0 and 1 <= r <= na and na < c <= na + nb:
            out.extend(members[(r - 1, c - 1 - na)][:int(v)])
    return frozenset(out)


def _max_card_generic(m1: Matroid, m2: Matroid, n: int) -> frozenset:
    """Classical augmenting-path matroid intersection with BFS shortest paths."""
    cur: frozenset = frozenset()
    while True:
        v1, v2 = m1.view(cur), m2.view(cur)
        outside = [x for x in range(n) if x not in cur]
        starts = [x for x in outside if v1.can_add(x)]
        ends = {x for x in outside if v2.can_add(x)}
        inside = sorted(cur)
        prev: dict[int, Optional[int]] = {x: None for x in starts}
        queue = deque(starts)
        hit = None
        while queue:
            u = queue.popleft()
            if u not in cur and u in ends:
                hit = u
                break
            if u in cur:
                nbrs = (x for x in outside if x not in prev and v1.can_swap(u, x))
            else:
                nbrs = (a for a in inside if a not in prev and v2.can_swap(a, u))
            for w in nbrs:
                prev[w] = u
                queue.append(w)
        if hit is None:
            return cur
        path = []
        while hit is not None:
            path.append(hit)
            hit = prev[hit]
        cur = cur ^ frozenset(path)


def max_card_intersection(m1: Matroid, m2: Matroid) -> frozenset:
    """A largest set independent in both matroids."""
    a, b = _partition_form(m1), _partition_form(m2)
    if a is not None and b is not None:
        return _max_card_partitions(a, b)
    return _max_card_generic(m1, m2, m1.n)


# --- fair base -------------------------------------------------------------------

def fair_skeleton(m: Matroid, spec: FairnessSpec) -> Optional[frozenset]:
    """An independent set holding exactly ``lower[c]`` elements of every colour, or None."""
    b = max_card_intersection(m, lower_matroid(spec))
    if len(b) < sum(spec.lower):
        return None
    return b


def build_fair_base(m: Matroid, spec: FairnessSpec, verify: bool = False) -> Optional[frozenset]:
    """A maximum-cardinality fair independent set, or None if none exists.

    The skeleton from ``fair_skeleton`` is grown towards a largest
    independent upper-fair set using augmenting sets only; those add one
    element of a colour still below the target and remove nothing, so the
    lower bounds stay satisfied.
    """
    b = fair_skeleton(m, spec)
    if b is None:
        return None
    z = max_card_intersection(m, upper_matroid(spec))
    while len(b) < len(z):
        paths = generate_paths(m, spec, b, z, verify=verify)
        x = next(x for x in paths if x.kind == AUGMENTING)
        b = apply_exchange(b, x)
    return b


# --- main randomized algorithm ---------------------------------------------------

def _frac(eps: float) -> Fraction:
    # decimal reading of the float, so that e.g. (1 - 0.9) * 10 is exactly 1
    return Fraction(repr(float(eps)))


def draw_iterations(k: int, epsilon: float, rng: np.random.Generator) -> int:
    """Round ``(1 - epsilon) * k`` up with probability equal to its fractional part."""
    target = (1 - _frac(epsilon)) * k
    lo = math.floor(target)
    u = rng.random()
    return lo + 1 if u < float(target - lo) else lo


def run_randomized(f: Evaluator, m: Matroid, spec: FairnessSpec, cfg: RunConfig,
                   base: Optional[frozenset] = None, start: Optional[frozenset] = None) -> RunRecord:
    """Random augmenting paths.

    ``base`` (a maximum fair independent set) and ``start`` (the greedy
    solution) may be passed in when many runs share an instance; both are
    deterministic functions of the instance.
    """
    t0 = time.perf_counter()
    if base is None:
        base = build_fair_base(m, spec)
        if base is None:
            return _infeasible(cfg.algorithm, cfg.seed)
    upper = upper_matroid(spec)
    if start is None:
        start = greedy_intersection(f, m, upper)
    k = deficiency_k(start, base, spec)
    rng = np.random.default_rng(cfg.seed)
    n_iter = draw_iterations(k, cfg.epsilon, rng)

    y = frozenset(start)
    trace = [k]
    pool = fast_paths_partition(m, upper, y, base) if cfg.fast_path else None
    for i in range(1, n_iter + 1):
        if pool is None:
            paths = generate_paths(m, spec, y, base, verify=cfg.debug_verify)
        else:
            paths = pool
        if len(paths) != k - i + 1:
            raise InvariantError(f"iteration {i}: {len(paths)} paths, expected {k - i + 1}")
        x = paths[int(rng.integers(len(paths)))]
        if pool is not None:
            pool = [p for p in pool if p is not x]
        y = apply_exchange(y, x)
        kk = deficiency_k(y, base, spec)
        trace.append(kk)
        if cfg.debug_verify:
            if kk != k - i:
                raise InvariantError(f"deficiency {kk} after iteration {i}, expected {k - i}")
            if not (m.is_independent(y) and is_upper_fair(y, spec)):
                raise InvariantError(f"iteration {i} left the feasible region")
    f0 = f.evaluate(start)
    return _record(cfg.algorithm, f, spec, y, t0, n_iterations=n_iter, k_initial=k,
                   n_max=len(base), opt_matint_lower=f0, seed=cfg.seed, k_trace=tuple(trace))


# --- deterministic two-matroid algorithm --------------------------------------------

def run_deterministic_two_matroids(f: Evaluator, m1: Matroid, m2: Matroid, epsilon: float,
                                   verify: bool = False) -> RunRecord:
    """Apply ``floor((1 - eps)(|P| - |Y0|))`` best augmenting sets to the greedy solution."""
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"epsilon must lie strictly inside (0, 1), got {epsilon}")
    t0 = time.perf_counter()
    p = max_card_intersection(m1, m2)
    y0 = greedy_intersection(f, m1, m2)
    gap = len(p) - len(y0)
    n_iter = max(0, math.floor((1 - _frac(epsilon)) * gap))
    y = y0
    for _ in range(n_iter):
        best = None
        for x in generate_paths_two_matroids(m1, m2, y, p, verify=verify):
            cand = apply_exchange(y, x)
            key = (-f.evaluate(cand), tuple(sorted(cand)))
            if best is None or key < best[0]:
                best = (key, cand)
        y = best[1]
    return _record("det", f, None, y, t0, n_iterations=n_iter, k_initial=gap,
                   n_max=len(p), opt_matint_lower=f.evaluate(y0))


# --- baselines ----------------------------------------------------------------------

def baseline_ubmi(f: Evaluator, m: Matroid, spec: FairnessSpec) -> RunRecord:
    t0 = time.perf_counter()
    return _record("ubmi", f, spec, greedy_intersection(f, m, upper_matroid(spec)), t0)


def baseline_lbmi(f: Evaluator, m: Matroid, spec: FairnessSpec) -> RunRecord:
    t0 = time.perf_counter()
    skel = fair_skeleton(m, spec)
    if skel is None:
        return _infeasible("lbmi")
    return _record("lbmi", f, spec, greedy_intersection(f, m, upper_matroid(spec), base=skel), t0)


def split_skeleton(skel: Iterable[int], spec: FairnessSpec) -> tuple[frozenset, frozenset]:
    """Alternate the elements of each colour, in ascending id, between two halves."""
    first, second = [], []
    seen = [0] * spec.n_colors
    for e in sorted(skel):
        c = spec.color_of[e]
        (first if seen[c] % 2 == 0 else second).append(e)
        seen[c] += 1
    return frozenset(first), frozenset(second)


def baseline_twopass(f: Evaluator, m: Matroid, spec: FairnessSpec, seed: Optional[int] = None) -> RunRecord:
    t0 = time.perf_counter()
    skel = fair_skeleton(m, spec)
    if skel is None:
        return _infeasible("twopass", seed)
    upper = upper_matroid(spec)
    h1, h2 = split_skeleton(skel, spec)
    s1 = greedy_intersection(f, m, upper, base=h1)
    s2 = greedy_intersection(f, m, upper, base=h2)
    best = s2 if f.evaluate(s2) > f.evaluate(s1) else s1
    return _record("twopass", f, spec, best, t0, seed=seed)


def baseline_random(f: Evaluator, m: Matroid, spec: FairnessSpec, seed: int) -> RunRecord:
    t0 = time.perf_counter()
    order = np.random.default_rng(seed).permutation(f.n)
    v1, v2 = m.view(frozenset()), upper_matroid(spec).view(frozenset())
    out = []
    for e in order.tolist():
        if v1.can_add(e) and v2.can_add(e):
            v1.add(e)
            v2.add(e)
            out.append(e)
    return _record("random", f, spec, out, t0, seed=seed)


# --- exhaustive oracle --------------------------------------------------------------

@dataclass(frozen=True)
class BruteForceResult:
    opt_fair: Optional[float]
    opt_matint: float
    n_max: int
    best_fair: Optional[frozenset] = None
    best_matint: frozenset = frozenset()


def independent_sets(m1: Matroid, m2: Matroid, n: int):
    """Every set independent in both matroids, by depth-first extension in id order."""
    stack = [(frozenset(), 0)]
    while stack:
        s, nxt = stack.pop()
        yield s
        for e in range(nxt, n):
            t = s | {e}
            if m1.is_independent(t) and m2.is_independent(t):
                stack.append((t, e + 1))


def brute_force(f, m: Matroid, spec: FairnessSpec) -> BruteForceResult:
    """Exhaustive optimum over fair sets and over upper-fair sets, plus the largest size."""
    n = spec.n
    if n > BRUTE_FORCE_MAX_UNIVERSE:
        raise SizeError(f"brute force refuses universes above {BRUTE_FORCE_MAX_UNIVERSE}")
    value = f.evaluate if isinstance(f, Evaluator) else f.value
    upper = upper_matroid(spec)
    opt_fair, best_fair = None, None
    opt_mi, best_mi, n_max = -math.inf, frozenset(), 0
    for s in independent_sets(m, upper, n):
        val = value(s)
        key = tuple(sorted(s))
        if val > opt_mi or (val == opt_mi and key < tuple(sorted(best_mi))):
            opt_mi, best_mi = val, s
        n_max = max(n_max, len(s))
        if fav(s, spec) == 0 and (opt_fair is None or val > opt_fair
                                  or (val == opt_fair and key < tuple(sorted(best_fair)))):
            opt_fair, best_fair = val, s
    return BruteForceResult(opt_fair, opt_mi, n_max, best_fair, best_mi)
