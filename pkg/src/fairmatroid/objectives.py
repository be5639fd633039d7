"""Monotone submodular objectives used in the experiments.

Every objective exposes ``value(s)`` (from scratch) and ``state(s)``, an
incremental evaluator with ``gain(e)`` / ``add(e)``.  The greedy routines run
on the incremental form; tests keep it honest against ``value``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .matroids import MalformedInputError, PreconditionError

EXHAUSTIVE_MAX_UNIVERSE = 14


def _ids(s: Iterable[int], n: int) -> list[int]:
    out = sorted(set(s))
    if out and (out[0] < 0 or out[-1] >= n):
        raise MalformedInputError(f"element ids {out} outside universe of size {n}")
    return out


@dataclass(frozen=True, eq=False)
class Coverage:
    """f(S) = |union of N(v) for v in S|."""

    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        nb = tuple(tuple(sorted(set(int(i) for i in row))) for row in self.neighbors)
        if any(i < 0 for row in nb for i in row):
            raise MalformedInputError("covered item ids must be non-negative")
        object.__setattr__(self, "neighbors", nb)

    @property
    def n(self) -> int:
        return len(self.neighbors)

    def value(self, s) -> float:
        covered = set()
        for e in _ids(s, self.n):
            covered.update(self.neighbors[e])
        return float(len(covered))

    def state(self, s=()) -> "_CoverageState":
        st = _CoverageState(self)
        for e in _ids(s, self.n):
            st.add(e)
        return st


class _CoverageState:
    def __init__(self, spec: Coverage):
        self.spec = spec
        self.covered: set[int] = set()
        self.members: set[int] = set()
        self.value = 0.0

    def gain(self, e: int) -> float:
        return float(sum(1 for i in self.spec.neighbors[e] if i not in self.covered))

    def add(self, e: int) -> None:
        self.value += self.gain(e)
        self.covered.update(self.spec.neighbors[e])
        self.members.add(e)


@dataclass(frozen=True, eq=False)
class ExemplarClustering:
    """f(S) = sum_v d(v, 0) - min over e in S + {origin} of d(v, e), squared Euclidean d."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise MalformedInputError("clustering points must be an (n, d) array")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_norms", np.einsum("ij,ij->i", pts, pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def dist_to(self, e: int) -> np.ndarray:
        diff = self.points - self.points[e]
        return np.einsum("ij,ij->i", diff, diff)

    def value(self, s) -> float:
        best = self._norms.copy()
        for e in _ids(s, self.n):
            np.minimum(best, self.dist_to(e), out=best)
        return float(np.sum(self._norms - best))

    def state(self, s=()) -> "_ClusteringState":
        st = _ClusteringState(self)
        for e in _ids(s, self.n):
            st.add(e)
        return st


class _ClusteringState:
    def __init__(self, spec: ExemplarClustering):
        self.spec = spec
        self.best = spec._norms.copy()
        self.members: set[int] = set()
        self.value = 0.0

    def gain(self, e: int) -> float:
        return float(np.sum(np.maximum(self.best - self.spec.dist_to(e), 0.0)))

    def add(self, e: int) -> None:
        d = self.spec.dist_to(e)
        self.value += float(np.sum(np.maximum(self.best - d, 0.0)))
        np.minimum(self.best, d, out=self.best)
        self.members.add(e)


@dataclass(frozen=True, eq=False)
class Linear:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise MalformedInputError("linear weights must be a vector")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def value(self, s) -> float:
        idx = _ids(s, self.n)
        return float(self.weights[idx].sum()) if idx else 0.0

    def state(self, s=()) -> "_LinearState":
        st = _LinearState(self)
        for e in _ids(s, self.n):
            st.add(e)
        return st


class _LinearState:
    def __init__(self, spec: Linear):
        self.w = spec.weights
        self.members: set[int] = set()
        self.value = 0.0

    def gain(self, e: int) -> float:
        return float(self.w[e])

    def add(self, e: int) -> None:
        self.value += float(self.w[e])
        self.members.add(e)


@dataclass(frozen=True, eq=False)
class RecommenderBlend:
    """alpha * sum_m' max(max_{m in S} <v_m, v_m'>, 0) + (1 - alpha) * sum_{m in S} <w, v_m>.

    With ``clip_scores`` the personalised term uses max(<w, v_m>, 0).
    """

    item_vectors: np.ndarray
    user_vector: np.ndarray
    alpha: float = 0.85
    clip_scores: bool = False
    _sims: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        items = np.asarray(self.item_vectors, dtype=float)
        user = np.asarray(self.user_vector, dtype=float)
        if items.ndim != 2 or user.ndim != 1 or items.shape[1] != user.shape[0]:
            raise MalformedInputError(
                f"item vectors {items.shape} and user vector {user.shape} do not match")
        if not 0.0 <= self.alpha <= 1.0:
            raise MalformedInputError("alpha must lie in [0, 1]")
        object.__setattr__(self, "item_vectors", items)
        object.__setattr__(self, "user_vector", user)
        scores = items @ user
        if self.clip_scores:
            scores = np.maximum(scores, 0.0)
        object.__setattr__(self, "_scores", scores)

    @property
    def n(self) -> int:
        return self.item_vectors.shape[0]

    @property
    def sims(self) -> np.ndarray:
        if self._sims is None:
            object.__setattr__(self, "_sims", self.item_vectors @ self.item_vectors.T)
        return self._sims

    def value(self, s) -> float:
        idx = _ids(s, self.n)
        if not idx:
            return 0.0
        cover = np.maximum(self.sims[idx].max(axis=0), 0.0).sum()
        return float(self.alpha * cover + (1.0 - self.alpha) * self._scores[idx].sum())

    def state(self, s=()) -> "_RecommenderState":
        st = _RecommenderState(self)
        for e in _ids(s, self.n):
            st.add(e)
        return st


class _RecommenderState:
    def __init__(self, spec: RecommenderBlend):
        self.spec = spec
        self.best = np.zeros(spec.n)
        self.members: set[int] = set()
        self.value = 0.0

    def gain(self, e: int) -> float:
        sp = self.spec
        cover = np.maximum(sp.sims[e] - self.best, 0.0).sum()
        return float(sp.alpha * cover + (1.0 - sp.alpha) * sp._scores[e])

    def add(self, e: int) -> None:
        self.value += self.gain(e)
        np.maximum(self.best, self.spec.sims[e], out=self.best)
        self.members.add(e)


Objective = Union[Coverage, ExemplarClustering, Linear, RecommenderBlend]


class Evaluator:
    """Oracle access to one objective, with a memo of the last set queried.

    Holds mutable state: use one per run.
    """

    def __init__(self, spec: Objective):
        self.spec = spec
        self._memo_set: frozenset | None = None
        self._memo_state = None
        self.calls = 0

    @property
    def n(self) -> int:
        return self.spec.n

    def evaluate(self, s) -> float:
        self.calls += 1
        return self.spec.value(s)

    def state(self, s=()):
        return self.spec.state(s)

    def marginal(self, s, e: int) -> float:
        s = frozenset(s)
        if e in s:
            raise PreconditionError(f"element {e} already in the set")
        if not 0 <= e < self.n:
            raise MalformedInputError(f"element id {e} outside universe of size {self.n}")
        if self._memo_set != s:
            self._memo_state = self.spec.state(s)
            self._memo_set = s
        self.calls += 1
        return self._memo_state.gain(e)


def check_monotone_submodular(spec: Objective, universe_size: int | None = None, *,
                              samples: int = 10_000, seed: int = 0,
                              rtol: float = 1e-9) -> bool:
    """Check monotonicity and diminishing returns.

    Up to ``EXHAUSTIVE_MAX_UNIVERSE`` elements every set is evaluated and the
    local conditions f(S+a) >= f(S) and f(S+a) + f(S+b) >= f(S+a+b) + f(S) are
    checked for all S, a, b (these imply the global definitions).  Larger
    universes are checked on ``samples`` random triples Y <= X, e not in X.
    """
    n = spec.n if universe_size is None else universe_size
    if n <= EXHAUSTIVE_MAX_UNIVERSE:
        vals = np.array([spec.value([e for e in range(n) if m >> e & 1]) for m in range(1 << n)])
        tol = rtol * max(1.0, float(np.abs(vals).max()))
        masks = np.arange(1 << n)
        for a in range(n):
            base = masks[(masks >> a & 1) == 0]
            if np.any(vals[base | 1 << a] - vals[base] < -tol):
                return False
            for b in range(a + 1, n):
                sub = base[(base >> b & 1) == 0]
                lhs = vals[sub | 1 << a] + vals[sub | 1 << b]
                rhs = vals[sub | 1 << a | 1 << b] + vals[sub]
                if np.any(lhs - rhs < -tol):
                    return False
        return True
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        e = int(rng.integers(n))
        in_x = rng.random(n) < rng.random()
        in_x[e] = False
        in_y = in_x & (rng.random(n) < rng.random())
        x = np.flatnonzero(in_x).tolist()
        y = np.flatnonzero(in_y).tolist()
        fx, fy = spec.value(x), spec.value(y)
        gx, gy = spec.value(x + [e]) - fx, spec.value(y + [e]) - fy
        tol = rtol * max(1.0, abs(fx), abs(fy))
        if fx < fy - tol or gy < -tol or gx < -tol or gy < gx - tol:
            return False
    return True


# --- serialization ---------------------------------------------------------

def _floats(a: np.ndarray) -> list:
    return a.tolist()


def objective_to_dict(spec: Objective) -> dict:
    if isinstance(spec, Coverage):
        return {"kind": "coverage", "neighbors": [list(r) for r in spec.neighbors]}
    if isinstance(spec, ExemplarClustering):
        return {"kind": "clustering", "points": _floats(spec.points)}
    if isinstance(spec, Linear):
        return {"kind": "linear", "weights": _floats(spec.weights)}
    if isinstance(spec, RecommenderBlend):
        return {"kind": "recommender", "item_vectors": _floats(spec.item_vectors),
                "user_vector": _floats(spec.user_vector), "alpha": spec.alpha,
                "clip_scores": spec.clip_scores}
    raise MalformedInputError(f"unknown objective type {type(spec).__name__}")


def objective_from_dict(data: dict) -> Objective:
    try:
        kind = data["kind"]
        if kind == "coverage":
            return Coverage(tuple(tuple(r) for r in data["neighbors"]))
        if kind == "clustering":
            pts = data["points"]
            return ExemplarClustering(np.array(pts, dtype=float).reshape(len(pts), -1))
        if kind == "linear":
            return Linear(np.array(data["weights"], dtype=float))
        if kind == "recommender":
            items = data["item_vectors"]
            return RecommenderBlend(np.array(items, dtype=float).reshape(len(items), -1),
                                    np.array(data["user_vector"], dtype=float),
                                    float(data["alpha"]), bool(data.get("clip_scores", False)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"bad objective record: {exc!r}") from exc
    raise MalformedInputError(f"unknown objective kind {kind!r}")
