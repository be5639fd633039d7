"""Matroid oracles over a dense ground set ``{0, ..., n-1}``.

Three kinds are supported: partition, uniform and explicit (a listed family,
test-scale only).  Sets of elements are plain ``frozenset[int]``; whenever
order matters we iterate in ascending id.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

ElementSet = frozenset

EXPLICIT_MAX_UNIVERSE = 20


class MalformedInputError(ValueError):
    """Input data that does not describe a valid object (bad ids, sizes, fields)."""


class PreconditionError(ValueError):
    """A call whose documented precondition does not hold."""


class SizeError(ValueError):
    """Refusal to run an exhaustive procedure on a too-large universe."""


def _check_ids(s: Iterable[int], n: int) -> None:
    for e in s:
        if not 0 <= e < n:
            raise MalformedInputError(f"element id {e} outside universe of size {n}")


@dataclass(frozen=True)
class PartitionMatroid:
    """Each element belongs to one group; a set is independent iff no group exceeds its cap."""

    groups: tuple[int, ...]
    caps: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(int(g) for g in self.groups))
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        for g in self.groups:
            if not 0 <= g < len(self.caps):
                raise MalformedInputError(f"group index {g} has no cap")
        if any(c < 0 for c in self.caps):
            raise MalformedInputError("partition caps must be non-negative")

    @property
    def n(self) -> int:
        return len(self.groups)

    def counts(self, s: Iterable[int]) -> list[int]:
        out = [0] * len(self.caps)
        for e in s:
            out[self.groups[e]] += 1
        return out

    def is_independent(self, s: Iterable[int]) -> bool:
        s = list(s)
        _check_ids(s, self.n)
        cnt = Counter(self.groups[e] for e in s)
        return all(c <= self.caps[g] for g, c in cnt.items())

    def view(self, y_set: Iterable[int]) -> "PartitionView":
        return PartitionView(self, frozenset(y_set))


@dataclass(frozen=True)
class UniformMatroid:
    """All sets of size at most ``rank``."""

    n: int
    rank: int

    def __post_init__(self):
        if self.n < 0 or self.rank < 0:
            raise MalformedInputError("uniform matroid needs non-negative n and rank")

    def is_independent(self, s: Iterable[int]) -> bool:
        s = set(s)
        _check_ids(s, self.n)
        return len(s) <= self.rank

    def view(self, y_set: Iterable[int]) -> "UniformView":
        return UniformView(self, frozenset(y_set))


@dataclass(frozen=True)
class ExplicitMatroid:
    """A matroid given by listing every independent set.  Only for small universes."""

    n: int
    family: frozenset

    def __post_init__(self):
        if self.n > EXPLICIT_MAX_UNIVERSE:
            raise SizeError(f"explicit matroids are limited to {EXPLICIT_MAX_UNIVERSE} elements")
        fam = frozenset(frozenset(int(e) for e in s) for s in self.family)
        if not fam:
            raise MalformedInputError("explicit family must be nonempty")
        for s in fam:
            _check_ids(s, self.n)
        object.__setattr__(self, "family", fam)

    def is_independent(self, s: Iterable[int]) -> bool:
        s = frozenset(s)
        _check_ids(s, self.n)
        return s in self.family

    def view(self, y_set: Iterable[int]) -> "GenericView":
        return GenericView(self, frozenset(y_set))


Matroid = Union[PartitionMatroid, UniformMatroid, ExplicitMatroid]


# --- fixed-Y views -------------------------------------------------------
# Path construction asks many "Y + p" and "Y - y + p" questions against one Y.
# A view answers them without re-validating or re-counting Y every time.
# Callers guarantee Y is independent, y in Y and p not in Y.  ``add`` grows Y
# in place (used by greedy scans).

class GenericView:
    def __init__(self, matroid, y_set: frozenset):
        self.matroid = matroid
        self.y_set = y_set

    def can_add(self, p: int) -> bool:
        return self.matroid.is_independent(self.y_set | {p})

    def can_swap(self, y: int, p: int) -> bool:
        return self.matroid.is_independent((self.y_set - {y}) | {p})

    def add(self, p: int) -> None:
        self.y_set = self.y_set | {p}


class PartitionView:
    def __init__(self, matroid: PartitionMatroid, y_set: frozenset):
        self.groups = matroid.groups
        self.caps = matroid.caps
        self.y_set = y_set
        self.count = matroid.counts(y_set)

    def can_add(self, p: int) -> bool:
        g = self.groups[p]
        return self.count[g] < self.caps[g]

    def can_swap(self, y: int, p: int) -> bool:
        g = self.groups[p]
        return g == self.groups[y] or self.count[g] < self.caps[g]

    def add(self, p: int) -> None:
        self.y_set = self.y_set | {p}
        self.count[self.groups[p]] += 1


class UniformView:
    def __init__(self, matroid: UniformMatroid, y_set: frozenset):
        self.size = len(y_set)
        self.rank = matroid.rank

    def can_add(self, p: int) -> bool:
        return self.size < self.rank

    def can_swap(self, y: int, p: int) -> bool:
        return self.size <= self.rank

    def add(self, p: int) -> None:
        self.size += 1


# --- spec-level operations -------------------------------------------------

def universe_size(matroid: Matroid) -> int:
    return matroid.n


def is_independent(matroid: Matroid, s: Iterable[int]) -> bool:
    return matroid.is_independent(s)


def can_exchange(matroid: Matroid, y_set: Iterable[int], y: int, p: int) -> bool:
    """True iff ``y_set - y + p`` is independent."""
    y_set = frozenset(y_set)
    if y not in y_set:
        raise PreconditionError(f"{y} is not in the set being exchanged from")
    if p in y_set:
        raise PreconditionError(f"{p} is already in the set")
    return matroid.is_independent((y_set - {y}) | {p})


def greedy_max_independent(matroid: Matroid, candidates: Sequence[int],
                           base: Iterable[int] = frozenset()) -> frozenset:
    """Extend ``base`` by scanning ``candidates`` in order and keeping what fits."""
    cur = set(base)
    if not matroid.is_independent(cur):
        raise PreconditionError("base set is not independent")
    for e in candidates:
        if e in cur:
            continue
        cur.add(e)
        if not matroid.is_independent(cur):
            cur.discard(e)
    return frozenset(cur)


def rank_of(matroid: Matroid, subset: Iterable[int]) -> int:
    return len(greedy_max_independent(matroid, sorted(set(subset))))


def check_axioms(matroid: Matroid, universe_size: int) -> bool:
    """Exhaustively check the matroid axioms over all ``2**universe_size`` subsets.

    Augmentation is checked in the equivalent form: for every independent X,
    the largest independent subset of ``V - ext(X)`` has size ``|X|``, where
    ``ext(X)`` are the elements that can be added to X.
    """
    n = universe_size
    if n > EXPLICIT_MAX_UNIVERSE:
        raise SizeError(f"exhaustive axiom check refuses universes above {EXPLICIT_MAX_UNIVERSE}")
    full = (1 << n) - 1
    indep = bytearray(1 << n)
    for mask in range(1 << n):
        indep[mask] = matroid.is_independent(e for e in range(n) if mask >> e & 1)
    if not indep[0]:
        return False
    for mask in range(1, 1 << n):
        if indep[mask]:
            m = mask
            while m:
                low = m & -m
                if not indep[mask ^ low]:
                    return False
                m ^= low
    # rank of every mask, bottom-up; valid because the family is downward-closed
    rank = [0] * (1 << n)
    popcount = [0] * (1 << n)
    for mask in range(1, 1 << n):
        popcount[mask] = popcount[mask >> 1] + (mask & 1)
        if indep[mask]:
            rank[mask] = popcount[mask]
        else:
            best = 0
            m = mask
            while m:
                low = m & -m
                r = rank[mask ^ low]
                if r > best:
                    best = r
                m ^= low
            rank[mask] = best
    for mask in range(1 << n):
        if not indep[mask]:
            continue
        ext = 0
        for e in range(n):
            bit = 1 << e
            if not mask & bit and indep[mask | bit]:
                ext |= bit
        if rank[full & ~ext] != popcount[mask]:
            return False
    return True


# --- serialization ---------------------------------------------------------

def matroid_to_dict(matroid: Matroid) -> dict:
    if isinstance(matroid, PartitionMatroid):
        return {"kind": "partition", "groups": list(matroid.groups), "caps": list(matroid.caps)}
    if isinstance(matroid, UniformMatroid):
        return {"kind": "uniform", "n": matroid.n, "rank": matroid.rank}
    if isinstance(matroid, ExplicitMatroid):
        fam = sorted((sorted(s) for s in matroid.family), key=lambda s: (len(s), s))
        return {"kind": "explicit", "n": matroid.n, "family": fam}
    raise MalformedInputError(f"unknown matroid type {type(matroid).__name__}")


def matroid_from_dict(data: dict) -> Matroid:
    try:
        kind = data["kind"]
        if kind == "partition":
            return PartitionMatroid(tuple(data["groups"]), tuple(data["caps"]))
        if kind == "uniform":
            return UniformMatroid(int(data["n"]), int(data["rank"]))
        if kind == "explicit":
            return ExplicitMatroid(int(data["n"]), frozenset(frozenset(s) for s in data["family"]))
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"bad matroid record: {exc!r}") from exc
    raise MalformedInputError(f"unknown matroid kind {kind!r}")
