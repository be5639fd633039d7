"""Exchange graphs and the augmenting/alternating path machinery.

Conventions: ``Y`` is the current solution, ``P`` the reference set.  Paths are
stored as element sequences ``(p1, y1, p2, y2, ...)`` starting in ``P``; the
edge ``p_i -> y_i`` is an exchange in the first matroid and ``y_i -> p_{i+1}``
one in the second (for fairness: two elements of the same colour).
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .fairness import FairnessSpec, deficiency_k, upper_matroid
from .matroids import (ExplicitMatroid, Matroid, PartitionMatroid, PreconditionError,
                       UniformMatroid)

AUGMENTING = "augmenting"
ALTERNATING = "alternating"


class InvariantError(RuntimeError):
    """An internal guarantee failed; points at an oracle or construction bug."""


class UnsupportedInputError(ValueError):
    pass


@dataclass(frozen=True)
class ExchangeGraph:
    left: tuple[int, ...]
    right: tuple[int, ...]
    edges_right_to_left: dict = field(compare=False)
    edges_left_to_right: dict = field(compare=False)


@dataclass(frozen=True)
class Matching:
    pairs: frozenset
    direction: str = "right_to_left"

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class ExchangeSet:
    vertices: tuple[int, ...]
    kind: str
    increased_color: Optional[int] = None
    decreased_color: Optional[int] = None

    @property
    def elements(self) -> frozenset:
        return frozenset(self.vertices)

    @property
    def added(self) -> tuple[int, ...]:
        return self.vertices[0::2]

    @property
    def removed(self) -> tuple[int, ...]:
        return self.vertices[1::2]


def apply_exchange(y: Iterable[int], x: ExchangeSet) -> frozenset:
    return frozenset(y) ^ x.elements


def build_exchange_graph(m1: Matroid, m2: Matroid, y: Iterable[int], p: Iterable[int]) -> ExchangeGraph:
    """Directed exchange graph between ``Y - P`` (left) and ``P - Y`` (right).

    ``p -> y`` iff ``Y - y + p`` is independent in ``m1``; ``y -> p`` iff it is
    independent in ``m2``.  Oracle questions are asked about the full ``Y``.
    """
    y = frozenset(y)
    p = frozenset(p)
    if not (m1.is_independent(y) and m2.is_independent(y)):
        raise PreconditionError("Y must be independent in both matroids")
    left = tuple(sorted(y - p))
    right = tuple(sorted(p - y))
    v1, v2 = m1.view(y), m2.view(y)
    r2l = {q: [a for a in left if v1.can_swap(a, q)] for q in right}
    l2r = {a: [q for q in right if v2.can_swap(a, q)] for a in left}
    return ExchangeGraph(left, right, r2l, l2r)


def bipartite_max_matching(left_size: int, right_size: int,
                           adjacency: Iterable[tuple[int, int]],
                           direction: str = "right_to_left") -> Matching:
    """Hopcroft-Karp maximum-cardinality matching.

    ``adjacency`` holds ``(left, right)`` pairs.  Neighbours are explored in
    ascending order, so the result depends only on the edge set.
    """
    adj: list[list[int]] = [[] for _ in range(left_size)]
    for a, b in set(adjacency):
        if not (0 <= a < left_size and 0 <= b < right_size):
            raise PreconditionError(f"edge {(a, b)} outside a {left_size}x{right_size} graph")
        adj[a].append(b)
    for row in adj:
        row.sort()
    free = -1
    match_l = [free] * left_size
    match_r = [free] * right_size
    inf = left_size + right_size + 1
    dist = [0] * left_size

    def bfs() -> bool:
        q = deque()
        for u in range(left_size):
            if match_l[u] == free:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = inf
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == free:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u: int) -> bool:
        # iterative DFS along the BFS layers
        stack = [(u, iter(adj[u]))]
        trail = []
        while stack:
            x, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w == free:
                    trail.append((x, v))
                    for a, b in trail:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[x] + 1:
                    trail.append((x, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[x] = inf
                stack.pop()
                if trail:
                    trail.pop()
        return False

    while bfs():
        for u in range(left_size):
            if match_l[u] == free:
                dfs(u)
    pairs = frozenset((u, match_l[u]) for u in range(left_size) if match_l[u] != free)
    return Matching(pairs, direction)


def _perfect_matching(left: Sequence[int], right: Sequence[int], ok) -> dict:
    """Map right element -> left element for a perfect matching under ``ok(left, right)``."""
    adj = [(i, j) for i, a in enumerate(left) for j, b in enumerate(right) if ok(a, b)]
    mt = bipartite_max_matching(len(left), len(right), adj)
    if len(mt) != len(left) or len(left) != len(right):
        raise InvariantError(
            f"no perfect matching between {len(left)} and {len(right)} exchange vertices")
    return {right[j]: left[i] for i, j in mt.pairs}


def _shortcut_one_sided(seq: list[int], view) -> list[int]:
    """Remove chords p_i -> y_j (j > i), taking the furthest jump from each p_i."""
    ps, ys = seq[0::2], seq[1::2]
    out: list[int] = []
    i = 0
    while i < len(ps):
        out.append(ps[i])
        if i >= len(ys):
            break
        jump = i
        for j in range(len(ys) - 1, i, -1):
            if view.can_swap(ys[j], ps[i]):
                jump = j
                break
        out.append(ys[jump])
        i = jump + 1
    return out


def generate_paths(m: Matroid, spec: FairnessSpec, y: Iterable[int], p: Iterable[int],
                   verify: bool = False) -> list[ExchangeSet]:
    """Disjoint augmenting/alternating sets that move ``Y`` towards the colour profile of ``P``.

    Returns ``k = deficiency_k(Y, P)`` sets; at least ``|P| - |Y|`` are
    augmenting, and each undersaturated colour c is increased by exactly
    ``|P_c| - |Y_c|`` of them.  ``Y`` and ``P`` must both be independent in
    ``m`` and upper-fair, with ``|Y| <= |P|``.
    """
    y = frozenset(y)
    p = frozenset(p)
    if len(y) > len(p):
        raise PreconditionError("generate_paths needs |Y| <= |P|")
    yr = sorted(y - p)
    pr = sorted(p - y)
    color = spec.color_of
    view = m.view(y)

    need = len(pr) - len(yr)
    p_sinks = [q for q in pr if view.can_add(q)]
    if len(p_sinks) < need:
        raise InvariantError(f"only {len(p_sinks)} P-sinks, expected at least {need}")
    chosen_sinks = set(p_sinks[:need])
    p_sinks = set(p_sinks)
    rest = [q for q in pr if q not in chosen_sinks]
    m_left = _perfect_matching(yr, rest, view.can_swap)
    m_left = {q: a for q, a in m_left.items() if q not in p_sinks}

    ys_by_color: dict[int, list[int]] = defaultdict(list)
    ps_by_color: dict[int, list[int]] = defaultdict(list)
    for a in yr:
        ys_by_color[color[a]].append(a)
    for q in pr:
        ps_by_color[color[q]].append(q)
    m_right: dict[int, int] = {}
    sources: list[int] = []
    y_sinks: set[int] = set()
    for c in sorted(set(ys_by_color) | set(ps_by_color)):
        a_list, q_list = ys_by_color[c], ps_by_color[c]
        t = min(len(a_list), len(q_list))
        m_right.update(zip(a_list[:t], q_list[:t]))
        sources.extend(q_list[t:])
        y_sinks.update(a_list[t:])
    sources.sort()

    out = []
    for s in sources:
        seq = [s]
        cur = s
        while cur not in p_sinks:
            a = m_left[cur]
            seq.append(a)
            if a in y_sinks:
                break
            cur = m_right[a]
            seq.append(cur)
        seq = _shortcut_one_sided(seq, view)
        if len(seq) % 2:
            out.append(ExchangeSet(tuple(seq), AUGMENTING, color[seq[0]]))
        else:
            out.append(ExchangeSet(tuple(seq), ALTERNATING, color[seq[0]], color[seq[-1]]))

    if len(out) != deficiency_k(y, p, spec):
        raise InvariantError("number of paths differs from the colour deficiency")
    if verify:
        for x in out:
            check_exchange_set(m, spec, y, x)
    return out


def check_exchange_set(m: Matroid, spec: FairnessSpec, y: frozenset, x: ExchangeSet) -> None:
    """Raise InvariantError unless applying ``x`` to ``y`` behaves as its kind promises."""
    new = apply_exchange(y, x)
    if not m.is_independent(new):
        raise InvariantError(f"applying {x.vertices} breaks independence")
    if not upper_matroid(spec).is_independent(new):
        raise InvariantError(f"applying {x.vertices} breaks an upper bound")
    before, after = spec.counts(y), spec.counts(new)
    delta = [b - a for a, b in zip(before, after)]
    want = [0] * spec.n_colors
    want[x.increased_color] += 1
    if x.kind == ALTERNATING:
        want[x.decreased_color] -= 1
    if delta != want:
        raise InvariantError(f"colour change {delta} does not match {x.kind} set {x.vertices}")


def generate_paths_two_matroids(m1: Matroid, m2: Matroid, y: Iterable[int], p: Iterable[int],
                                verify: bool = False) -> list[ExchangeSet]:
    """``|P| - |Y|`` disjoint sets, each growing ``Y`` by one inside both matroids."""
    y = frozenset(y)
    p = frozenset(p)
    if len(y) > len(p):
        raise PreconditionError("generate_paths_two_matroids needs |Y| <= |P|")
    yr = sorted(y - p)
    pr = sorted(p - y)
    need = len(pr) - len(yr)
    if need == 0:
        return []
    v1, v2 = m1.view(y), m2.view(y)
    ends = [q for q in pr if v1.can_add(q)]
    starts = [q for q in pr if v2.can_add(q)]
    if len(ends) < need or len(starts) < need:
        raise InvariantError("too few directly addable elements of P")
    ends_set, starts_set = set(ends), set(starts)
    ends_used = set(ends[:need])
    starts_used = starts[:need]

    back = _perfect_matching(yr, [q for q in pr if q not in ends_used], v1.can_swap)
    fwd = _perfect_matching(yr, [q for q in pr if q not in set(starts_used)], v2.can_swap)
    fwd = {a: q for q, a in fwd.items()}

    out = []
    for s in starts_used:
        seq = [s]
        cur = s
        while cur not in ends_used:
            a = back[cur]
            cur = fwd[a]
            seq += [a, cur]
        seq = _shortcut_two_sided(seq, v1, v2, starts_set, ends_set)
        out.append(ExchangeSet(tuple(seq), AUGMENTING))

    if verify:
        for x in out:
            new = apply_exchange(y, x)
            if len(new) != len(y) + 1 or not (m1.is_independent(new) and m2.is_independent(new)):
                raise InvariantError(f"applying {x.vertices} leaves the intersection")
    return out


def _shortcut_two_sided(seq: list[int], v1, v2, starts: set, ends: set) -> list[int]:
    # truncate at the first interior end vertex, then at the last start vertex before it
    for i in range(0, len(seq), 2):
        if seq[i] in ends:
            seq = seq[:i + 1]
            break
    for i in range(len(seq) - 1, -1, -2):
        if seq[i] in starts:
            seq = seq[i:]
            break
    changed = True
    while changed:
        changed = False
        for a in range(len(seq)):
            for b in range(len(seq) - 1, a + 1, -1):
                if (b - a) % 2 == 0:
                    continue
                if a % 2 == 0:
                    hit = v1.can_swap(seq[b], seq[a])
                else:
                    hit = v2.can_swap(seq[a], seq[b])
                if hit:
                    seq = seq[:a + 1] + seq[b:]
                    changed = True
                    break
            if changed:
                break
    return seq


def _as_partition(m: Matroid) -> PartitionMatroid:
    if isinstance(m, PartitionMatroid):
        return m
    if isinstance(m, UniformMatroid):
        return PartitionMatroid((0,) * m.n, (m.rank,))
    raise UnsupportedInputError(f"partition fast path needs partition matroids, got {type(m).__name__}")


def fast_paths_partition(m1: Matroid, m2: Matroid, y: Iterable[int], p: Iterable[int]) -> list[ExchangeSet]:
    """Path decomposition for two partition matroids; ``m2``'s groups act as colours.

    Elements are edges of a bipartite multigraph between colour nodes (groups
    of ``m2``) and part nodes (groups of ``m1``): ``Y - P`` edges point colour ->
    part, ``P - Y`` edges part -> colour.  Walks start at nodes with spare
    out-degree and stop at the first node with spare in-degree; cycles met on
    the way are cut out.  The walks that end at a colour node are returned, one
    per unit of colour deficiency.  Any subset of them can be applied at once.
    """
    if isinstance(m1, ExplicitMatroid) or isinstance(m2, ExplicitMatroid):
        raise UnsupportedInputError("partition fast path needs partition matroids")
    part_m, color_m = _as_partition(m1), _as_partition(m2)
    y = frozenset(y)
    p = frozenset(p)
    part, color = part_m.groups, color_m.groups

    # node ids: ("p", g) for parts, ("c", c) for colours
    out_edges: dict[tuple, deque] = defaultdict(deque)
    balance: dict[tuple, int] = defaultdict(int)   # out-degree minus in-degree
    for a in sorted(y - p):
        u, v = ("c", color[a]), ("p", part[a])
        out_edges[u].append((a, v))
        balance[u] += 1
        balance[v] -= 1
    for q in sorted(p - y):
        u, v = ("p", part[q]), ("c", color[q])
        out_edges[u].append((q, v))
        balance[u] += 1
        balance[v] -= 1

    found = []
    for src in sorted(n for n in balance if balance[n] > 0):
        while balance[src] > 0:
            nodes = [src]
            elems: list[int] = []
            pos = {src: 0}
            cur = src
            while cur == src or balance[cur] >= 0:
                e, nxt = out_edges[cur].popleft()
                elems.append(e)
                if nxt in pos:
                    cut = pos[nxt]
                    for dropped in nodes[cut + 1:]:
                        del pos[dropped]
                    nodes = nodes[:cut + 1]
                    elems = elems[:cut]
                else:
                    pos[nxt] = len(nodes)
                    nodes.append(nxt)
                cur = nxt
            balance[src] -= 1
            balance[cur] += 1
            found.append((src, cur, elems))

    out = []
    for src, dst, elems in found:
        if dst[0] != "c":
            continue
        verts = tuple(reversed(elems))
        if src[0] == "p":
            out.append(ExchangeSet(verts, AUGMENTING, color[verts[0]]))
        else:
            out.append(ExchangeSet(verts, ALTERNATING, color[verts[0]], color[verts[-1]]))
    return out
