"""Problem instances: container, JSON (de)serialization and synthetic generators.

The generators mirror the three experiment scenarios (graph coverage,
exemplar clustering, movie recommendation) with synthetic data; the bound
formulas are the ones used in those experiments.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fairness import FairnessSpec
from .matroids import MalformedInputError, Matroid, PartitionMatroid, matroid_from_dict, matroid_to_dict
from .objectives import (Coverage, ExemplarClustering, Objective, RecommenderBlend,
                         objective_from_dict, objective_to_dict)

FORMAT_VERSION = 1
KINDS = ("coverage", "clustering", "recommender")
DEFAULT_N = {"coverage": 2000, "clustering": 500, "recommender": 1000}
DEFAULT_COLORS = {"coverage": 7, "clustering": 6, "recommender": 18}


class GenerationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Instance:
    matroid: Matroid
    fairness: FairnessSpec
    objective: Objective
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.fairness.n
        if self.matroid.n != n or self.objective.n != n:
            raise MalformedInputError(
                f"sizes disagree: matroid {self.matroid.n}, fairness {n}, objective {self.objective.n}")

    @property
    def n(self) -> int:
        return self.fairness.n

    @property
    def name(self) -> str:
        return self.meta.get("id", "instance")

    def to_dict(self) -> dict:
        return {"format": FORMAT_VERSION, "n": self.n, "meta": self.meta,
                "matroid": matroid_to_dict(self.matroid),
                "fairness": self.fairness.to_dict(),
                "objective": objective_to_dict(self.objective)}

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        for key in ("n", "matroid", "fairness", "objective"):
            if key not in data:
                raise MalformedInputError(f"instance file lacks field {key!r}")
        inst = cls(matroid_from_dict(data["matroid"]), FairnessSpec.from_dict(data["fairness"]),
                   objective_from_dict(data["objective"]), dict(data.get("meta", {})))
        if inst.n != data["n"]:
            raise MalformedInputError(f"field 'n' says {data['n']} but the data has {inst.n} elements")
        return inst


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def _load_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst.to_dict()), encoding="utf-8")


def load_instance(path) -> Instance:
    data = _load_json(path)
    try:
        return Instance.from_dict(data)
    except MalformedInputError as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc


def save_solution(solution, path, instance: str | None = None) -> None:
    data = {"solution": sorted(int(e) for e in solution)}
    if instance is not None:
        data["instance"] = instance
    Path(path).write_text(dumps(data), encoding="utf-8")


def load_solution(path) -> frozenset:
    data = _load_json(path)
    if not isinstance(data, dict) or "solution" not in data:
        raise MalformedInputError(f"{path}: solution file lacks field 'solution'")
    sol = data["solution"]
    if not isinstance(sol, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in sol):
        raise MalformedInputError(f"{path}: field 'solution' must be a list of integers")
    if len(set(sol)) != len(sol):
        raise MalformedInputError(f"{path}: field 'solution' has duplicate ids")
    return frozenset(sol)


# --- generators --------------------------------------------------------------

def _labels(rng: np.random.Generator, n: int, shares: np.ndarray) -> np.ndarray:
    """Assign n labels with the given shares; every label gets at least one element."""
    k = len(shares)
    if n < k:
        raise GenerationError(f"cannot spread {n} elements over {k} groups")
    lab = np.concatenate([np.arange(k), rng.choice(k, size=n - k, p=shares / shares.sum())])
    rng.shuffle(lab)
    return lab


def _counts(lab: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(lab, minlength=k)


def _validate(kind: str, groups, caps, colors, lower, upper) -> None:
    sizes = _counts(np.asarray(colors), len(lower))
    for c, (lo, hi) in enumerate(zip(lower, upper)):
        if lo > hi:
            raise GenerationError(f"{kind}: colour {c} lower bound {lo} exceeds upper bound {hi}")
        if lo > sizes[c]:
            raise GenerationError(f"{kind}: colour {c} lower bound {lo} exceeds its {sizes[c]} elements")
    if sum(lower) > sum(caps):
        raise GenerationError(f"{kind}: lower bounds sum to {sum(lower)} but the matroid rank is at most {sum(caps)}")


# Bound formulas are evaluated in exact rationals: 0.4 * 30 is not 12 in floating point.

def _q(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def share_caps(sizes, n: int, r: int, factor: float = 1.0) -> list[int]:
    """``ceil(factor * |V_i| / |V| * r)`` per group."""
    return [math.ceil(_q(factor) * int(s) * r / n) for s in sizes]


def share_lower(sizes, n: int, r: int, factor: float) -> list[int]:
    """``floor(factor * |V_c| / |V| * r)`` per colour."""
    return [math.floor(_q(factor) * int(s) * r / n) for s in sizes]


def clustering_bounds(r: int, n_parts: int = 5, colors: int = 6) -> tuple[list[int], list[int], list[int]]:
    """Caps ``r / n_parts`` and bounds ``0.1 r + 2``, ``0.4 r``, rounded towards feasibility."""
    return ([math.ceil(Fraction(r, n_parts))] * n_parts, [math.floor(_q(0.1) * r + 2)] * colors,
            [math.ceil(_q(0.4) * r)] * colors)


def _coverage(rng, n, colors, r):
    n_parts = 4
    color_shares = rng.dirichlet(np.full(colors, 2.0))
    part_shares = rng.dirichlet(np.full(n_parts, 4.0))
    color = _labels(rng, n, color_shares)
    part = _labels(rng, n, part_shares)
    # colour-dependent activity so that value-greedy neglects some groups
    activity = np.linspace(0.25, 1.75, colors)[rng.permutation(colors)]
    degree = np.maximum(1, np.round(rng.lognormal(1.6, 0.8, size=n) * activity[color])).astype(int)
    degree = np.minimum(degree, n - 1)
    neighbors = []
    for v in range(n):
        nb = rng.choice(n - 1, size=degree[v], replace=False)
        nb[nb >= v] += 1
        neighbors.append(tuple(sorted(nb.tolist())))
    pc, cc = _counts(part, n_parts), _counts(color, colors)
    caps = share_caps(pc, n, r)
    lower = share_lower(cc, n, r, 0.9)
    upper = share_caps(cc, n, r, 1.5)
    return part, caps, color, lower, upper, Coverage(tuple(neighbors))


def _clustering(rng, n, colors, r):
    n_parts = 5
    age = 18.0 + 72.0 * rng.beta(1.6, 2.2, size=n)
    balance = rng.lognormal(6.5, 1.3, size=n) - rng.exponential(300.0, size=n)
    rest = rng.normal(size=(n, 5)) * rng.uniform(0.5, 2.0, size=5)
    rest[:, 0] += 0.04 * (age - 48.0)   # mild feature/age correlation
    if colors == 6:
        color = np.digitize(age, [30, 40, 50, 60, 70])
    else:
        color = np.digitize(age, np.quantile(age, np.linspace(0, 1, colors + 1)[1:-1]))
    part = np.digitize(balance, [0, 2000, 4000, 6000])
    missing = set(range(n_parts)) - set(part.tolist())
    for g in sorted(missing):  # keep every balance band populated
        part[int(rng.integers(n))] = g
    raw = np.column_stack([age, balance, rest])
    points = (raw - raw.mean(axis=0)) / raw.std(axis=0)
    caps, lower, upper = clustering_bounds(r, n_parts, colors)
    cc = _counts(color, colors)
    lower = [lo if cc[c] else 0 for c, lo in enumerate(lower)]
    return part, caps, color, lower, upper, ExemplarClustering(points)


def _recommender(rng, n, colors, r):
    n_parts, dim = 9, 20
    decade_shares = np.geomspace(0.02, 1.0, n_parts)
    part = _labels(rng, n, decade_shares)
    color = _labels(rng, n, rng.dirichlet(np.full(colors, 1.5)))
    centers = rng.normal(size=(colors, dim)) / math.sqrt(dim)
    items = centers[color] + 0.6 * rng.normal(size=(n, dim)) / math.sqrt(dim)
    user = rng.normal(size=dim) / math.sqrt(dim)
    # bias coordinate: shifts every personal score up by the same amount so none is negative
    bias = 0.1
    shift = max(0.0, -float((items @ user).min()))
    items = np.column_stack([items, np.full(n, bias)])
    user = np.append(user, shift / bias)
    pc, cc = _counts(part, n_parts), _counts(color, colors)
    caps = share_caps(pc, n, r, 1.2)
    lower = share_lower(cc, n, r, 0.8)
    upper = share_caps(cc, n, r, 1.4)
    return part, caps, color, lower, upper, RecommenderBlend(items, user, 0.85, clip_scores=True)


_GENERATORS = {"coverage": _coverage, "clustering": _clustering, "recommender": _recommender}


def instance_id(kind: str, n: int, colors: int, r: int, seed: int) -> str:
    return f"{kind}-n{n}-c{colors}-r{r}-s{seed}"


def gen_instance(kind: str, n: int | None = None, colors: int | None = None, r: int = 10,
                 seed: int = 0, check_feasible: bool = True) -> Instance:
    """Build a synthetic instance of one of the three experiment scenarios."""
    if kind not in _GENERATORS:
        raise GenerationError(f"unknown instance kind {kind!r}; choose from {', '.join(KINDS)}")
    n = DEFAULT_N[kind] if n is None else n
    colors = DEFAULT_COLORS[kind] if colors is None else colors
    if n > 100_000:
        raise GenerationError("generators are limited to 1e5 elements")
    if colors < 1 or r < 1:
        raise GenerationError("need at least one colour and r >= 1")
    rng = np.random.default_rng([seed, KINDS.index(kind)])
    part, caps, color, lower, upper, objective = _GENERATORS[kind](rng, n, colors, r)
    _validate(kind, part, caps, color, lower, upper)
    inst = Instance(PartitionMatroid(tuple(part.tolist()), tuple(caps)),
                    FairnessSpec(tuple(color.tolist()), tuple(lower), tuple(upper)),
                    objective,
                    {"id": instance_id(kind, n, colors, r, seed), "generator": kind,
                     "seed": seed, "r": r, "n": n, "colors": colors})
    if check_feasible:
        from .algorithms import fair_skeleton
        if fair_skeleton(inst.matroid, inst.fairness) is None:
            raise GenerationError(f"{kind} r={r}: no independent set meets all lower bounds")
    return inst
