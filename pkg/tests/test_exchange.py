from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fairmatroid import (ExchangeSet, FairnessSpec, PartitionMatroid, UniformMatroid, apply_exchange,
                         bipartite_max_matching, build_exchange_graph, deficiency_k,
                         fast_paths_partition, generate_paths, generate_paths_two_matroids)
from fairmatroid.algorithms import max_card_intersection
from fairmatroid.exchange import ALTERNATING, AUGMENTING, UnsupportedInputError, check_exchange_set
from fairmatroid.fairness import is_upper_fair, upper_matroid
from fairmatroid.matroids import PreconditionError

from helpers import path_instance, matching_encoding, random_graphic, random_member, random_partition


def brute_matching_size(edges):
    for k in range(len(edges), 0, -1):
        for sub in combinations(edges, k):
            if len({a for a, _ in sub}) == k and len({b for _, b in sub}) == k:
                return k
    return 0


class TestMatching:
    def test_complete(self):
        assert len(bipartite_max_matching(3, 3, [(a, b) for a in range(3) for b in range(3)])) == 3

    def test_empty(self):
        assert len(bipartite_max_matching(2, 2, [])) == 0

    def test_unique_maximum(self):
        assert bipartite_max_matching(2, 2, [(0, 0), (0, 1), (1, 1)]).pairs == {(0, 0), (1, 1)}

    def test_bad_edge(self):
        with pytest.raises(PreconditionError):
            bipartite_max_matching(1, 1, [(0, 3)])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 6), st.data())
    def test_maximum_against_enumeration(self, nl, nr, data):
        edges = sorted(data.draw(st.sets(st.tuples(st.integers(0, nl - 1), st.integers(0, nr - 1)), max_size=10)))
        mt = bipartite_max_matching(nl, nr, edges)
        assert len({a for a, _ in mt.pairs}) == len({b for _, b in mt.pairs}) == len(mt)
        assert mt.pairs <= set(edges)
        assert len(mt) == brute_matching_size(edges)
        g = nx.Graph()
        g.add_nodes_from((("l", a) for a in range(nl)), bipartite=0)
        g.add_edges_from((("l", a), ("r", b)) for a, b in edges)
        ref = nx.bipartite.maximum_matching(g, top_nodes=[("l", a) for a in range(nl)])
        assert len(mt) == len(ref) // 2


class TestExchangeGraph:
    def test_uniform_all_swaps(self):
        g = build_exchange_graph(UniformMatroid(4, 2), UniformMatroid(4, 2), {0, 1}, {2, 3})
        assert all(set(g.edges_right_to_left[q]) == {0, 1} for q in (2, 3))

    def test_same_colour_swap(self):
        m2 = PartitionMatroid((0, 0), (1,))
        g = build_exchange_graph(UniformMatroid(2, 2), m2, {0}, {1})
        assert g.edges_left_to_right[0] == [1]

    def test_empty_y(self):
        g = build_exchange_graph(UniformMatroid(2, 2), UniformMatroid(2, 2), set(), {0, 1})
        assert g.left == () and not any(g.edges_right_to_left.values())

    def test_intersection_stripped(self):
        g = build_exchange_graph(UniformMatroid(3, 3), UniformMatroid(3, 3), {0, 1}, {1, 2})
        assert g.left == (0,) and g.right == (2,)

    def test_y_must_be_independent(self):
        with pytest.raises(PreconditionError):
            build_exchange_graph(UniformMatroid(3, 1), UniformMatroid(3, 3), {0, 1}, {2})


def test_apply_exchange():
    assert apply_exchange({0}, ExchangeSet((2,), AUGMENTING, 1)) == {0, 2}
    assert apply_exchange({0, 1}, ExchangeSet((2, 1), ALTERNATING, 1, 0)) == {0, 2}
    assert apply_exchange({0, 1}, ExchangeSet((), AUGMENTING)) == {0, 1}


class TestGeneratePaths:
    def test_direct_addition(self):
        # y1 = 0 (colour 0); p1 = 1 (colour 0), p2 = 2 (colour 1)
        spec = FairnessSpec((0, 0, 1), (0, 0), (1, 1))
        out = generate_paths(UniformMatroid(3, 2), spec, {0}, {1, 2})
        assert [(x.vertices, x.kind) for x in out] == [((2,), AUGMENTING)]
        assert apply_exchange({0}, out[0]) == {0, 2}

    def test_alternating_swap(self):
        # y1, y2 = 0, 1 (colour 0); p1 = 2 (colour 0), p2 = 3 (colour 1)
        spec = FairnessSpec((0, 0, 0, 1), (0, 0), (2, 1))
        out = generate_paths(UniformMatroid(4, 2), spec, {0, 1}, {2, 3})
        assert len(out) == 1
        x = out[0]
        assert x.kind == ALTERNATING and x.vertices[0] == 3 and x.vertices[1] in (0, 1)
        res = apply_exchange({0, 1}, x)
        assert spec.counts(res) == [1, 1] and len(res) == 2
        # M-> pairs y=0 with p=2, so y=1 is the free Y vertex the walk stops at
        assert x.vertices == (3, 1)

    def test_equal_sets(self):
        spec = FairnessSpec((0, 1), (0, 0), (1, 1))
        assert generate_paths(UniformMatroid(2, 2), spec, {0, 1}, {0, 1}) == []

    def test_y_larger_than_p(self):
        spec = FairnessSpec((0, 0), (0,), (2,))
        with pytest.raises(PreconditionError):
            generate_paths(UniformMatroid(2, 2), spec, {0, 1}, {0})

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_path_set_properties(self, seed):
        rng = np.random.default_rng(seed)
        m, spec, y, p = path_instance(rng)
        out = generate_paths(m, spec, y, p)
        seen = set()
        for x in out:
            assert not seen & x.elements
            seen |= x.elements
            assert set(x.added) <= p - y and set(x.removed) <= y - p
            check_exchange_set(m, spec, y, x)
            view = m.view(y)
            if x.kind == AUGMENTING:
                assert view.can_add(x.vertices[-1])
            else:
                assert x.vertices[-1] in y
        assert len(out) == deficiency_k(y, p, spec)
        assert sum(x.kind == AUGMENTING for x in out) >= len(p) - len(y)
        yc, pc = spec.counts(y), spec.counts(p)
        for c in range(spec.n_colors):
            assert sum(x.increased_color == c for x in out) == max(0, pc[c] - yc[c])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_graphic_matroids(self, seed):
        """Non-partition matroids exercise the chord removal."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 11))
        m = random_graphic(rng, n)
        spec = FairnessSpec(tuple(rng.integers(0, 3, size=n).tolist()), (0, 0, 0), (n, n, n))
        p = random_member(rng, m, upper_matroid(spec), n)
        y = random_member(rng, m, upper_matroid(spec), n, size=int(rng.integers(0, len(p) + 1)))
        out = generate_paths(m, spec, y, p, verify=True)
        assert len(out) == deficiency_k(y, p, spec)


class TestTwoMatroidPaths:
    def test_free_additions(self):
        m = UniformMatroid(3, 3)
        # |P| - |Y| = 1 set; both singletons would be valid, the first addable one is used
        out = generate_paths_two_matroids(m, m, {0}, {1, 2})
        assert [x.vertices for x in out] == [(1,)]
        m2 = UniformMatroid(3, 3)
        out = generate_paths_two_matroids(m, m2, set(), {1, 2})
        assert sorted(x.vertices for x in out) == [(1,), (2,)]

    def test_equal_sizes(self):
        m = UniformMatroid(3, 3)
        assert generate_paths_two_matroids(m, m, {0}, {1}) == []

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.data())
    def test_matching_augmentation(self, nl, nr, data):
        edges = sorted(data.draw(st.sets(st.tuples(st.integers(0, nl - 1), st.integers(0, nr - 1)),
                                         min_size=1, max_size=10)))
        m1, m2 = matching_encoding(nl, nr, edges)
        p = max_card_intersection(m1, m2)
        assert len(p) == brute_matching_size(edges)
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        y = random_member(rng, m1, m2, len(edges), size=int(rng.integers(0, len(p) + 1)))
        out = generate_paths_two_matroids(m1, m2, y, p, verify=True)
        assert len(out) == len(p) - len(y)
        seen = set()
        for x in out:
            assert not seen & x.elements
            seen |= x.elements
            new = apply_exchange(y, x)
            assert len(new) == len(y) + 1
            chosen = [edges[e] for e in new]
            assert len({a for a, _ in chosen}) == len({b for _, b in chosen}) == len(chosen)
            # a classical augmenting path: it starts and ends at vertices Y leaves free
            first, last = edges[x.vertices[0]], edges[x.vertices[-1]]
            y_edges = [edges[e] for e in y]
            assert first[1] not in {b for _, b in y_edges}
            assert last[0] not in {a for a, _ in y_edges}

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_general_pairs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 11))
        m1 = random_graphic(rng, n) if rng.random() < 0.5 else random_partition(rng, n)
        m2 = random_partition(rng, n)
        p = max_card_intersection(m1, m2)
        y = random_member(rng, m1, m2, n, size=int(rng.integers(0, len(p) + 1)))
        out = generate_paths_two_matroids(m1, m2, y, p, verify=True)
        assert len(out) == len(p) - len(y)


class TestFastPaths:
    def test_empty_y(self):
        m1, m2 = matching_encoding(2, 2, [(0, 0), (1, 1)])
        out = fast_paths_partition(m1, m2, set(), {0, 1})
        assert sorted(x.vertices for x in out) == [(0,), (1,)]

    def test_equal(self):
        m1, m2 = matching_encoding(2, 2, [(0, 0), (1, 1)])
        assert fast_paths_partition(m1, m2, {0, 1}, {0, 1}) == []

    def test_rejects_explicit(self):
        rng = np.random.default_rng(0)
        with pytest.raises(UnsupportedInputError):
            fast_paths_partition(random_graphic(rng, 4), UniformMatroid(4, 2), set(), set())

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_any_subset_applies(self, seed):
        rng = np.random.default_rng(seed)
        m, spec, y, p = path_instance(rng, c_max=5)
        if not isinstance(m, (PartitionMatroid, UniformMatroid)):
            return
        up = upper_matroid(spec)
        out = fast_paths_partition(m, up, y, p)
        assert len(out) == deficiency_k(y, p, spec)
        ref = generate_paths(m, spec, y, p)
        assert sorted(x.increased_color for x in out) == sorted(x.increased_color for x in ref)
        for _ in range(5):
            pick = [x for x in out if rng.random() < 0.5]
            cur = frozenset(y)
            for x in pick:
                cur = apply_exchange(cur, x)
            assert m.is_independent(cur) and is_upper_fair(cur, spec)
        full = frozenset(y)
        for x in out:
            full = apply_exchange(full, x)
        yc, pc, fc = spec.counts(y), spec.counts(p), spec.counts(full)
        for c in range(spec.n_colors):
            if pc[c] > yc[c]:
                assert fc[c] == pc[c]
            else:
                assert pc[c] <= fc[c] <= yc[c]
