"""Single runs, parameter sweeps and solution verification on instance files."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .algorithms import (INFEASIBLE, OK, RunConfig, baseline_lbmi, baseline_random, baseline_twopass,
                         baseline_ubmi, build_fair_base, greedy_intersection, run_randomized)
from .exchange import InvariantError
from .fairness import fav, is_upper_fair, upper_matroid
from .instances import GenerationError, Instance, dumps, gen_instance
from .objectives import Evaluator

ALGOS = ("our", "twopass", "lbmi", "ubmi", "random")
RANDOMIZED = ("our", "random")
CSV_HEADER = ("instance", "algo", "epsilon", "r", "rep", "seed", "f_value", "size", "fav", "runtime_ms")
DEFAULT_ALGOS = "our:0.2,our:0.5,our:0.8,twopass,lbmi,ubmi,random"


@dataclass(frozen=True)
class AlgoSpec:
    name: str
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.name not in ALGOS:
            raise ValueError(f"unknown algorithm {self.name!r}; choose from {', '.join(ALGOS)}")
        if self.name == "our":
            if self.epsilon is None:
                raise ValueError("algorithm 'our' needs an epsilon, e.g. our:0.5")
            if not 0 < self.epsilon < 1:
                raise ValueError(f"epsilon must lie strictly inside (0, 1), got {self.epsilon}")
        elif self.epsilon is not None:
            raise ValueError(f"algorithm {self.name!r} takes no epsilon")

    @property
    def label(self) -> str:
        return self.name if self.epsilon is None else f"{self.name}:{self.epsilon:g}"


def parse_algos(text: str) -> list[AlgoSpec]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        name, _, eps = tok.partition(":")
        out.append(AlgoSpec(name, float(eps) if eps else None))
    if not out:
        raise ValueError("empty algorithm list")
    return out


def parse_range(text: str) -> list[int]:
    """``start:stop:step`` with both ends included, or a single integer."""
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) == 2:
        parts.append(1)
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise ValueError(f"bad range {text!r}")
    return list(range(start, stop + 1, step))


@dataclass(frozen=True)
class ResultRow:
    instance: str
    algo: str
    epsilon: Optional[float]
    r: Optional[int]
    rep: int
    seed: Optional[int]
    f_value: Optional[float]
    size: Optional[int]
    fav: Optional[int]
    runtime_ms: float = field(default=0.0, compare=False)
    solution: frozenset = field(default=frozenset(), compare=False, repr=False)

    @property
    def status(self) -> str:
        return INFEASIBLE if self.size is None else OK

    def csv_cells(self) -> list[str]:
        def cell(x):
            if x is None:
                return ""
            return repr(x) if isinstance(x, float) else str(x)
        return [cell(getattr(self, k)) for k in CSV_HEADER[:-1]] + [f"{self.runtime_ms:.3f}"]


class _Cache:
    """Deterministic per-instance quantities shared by repeated runs."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self._base = self._start = None
        self._have_base = False
        self.fixed: dict = {}

    @property
    def base(self):
        if not self._have_base:
            self._base = build_fair_base(self.inst.matroid, self.inst.fairness)
            self._have_base = True
        return self._base

    @property
    def start(self):
        if self._start is None:
            inst = self.inst
            self._start = greedy_intersection(Evaluator(inst.objective), inst.matroid, upper_matroid(inst.fairness))
        return self._start


def _dispatch(inst: Instance, algo: AlgoSpec, seed: int, debug_verify: bool, fast_path: bool,
              cache: Optional[_Cache]):
    f = Evaluator(inst.objective)
    m, spec = inst.matroid, inst.fairness
    if algo.name == "our":
        cfg = RunConfig(algo.epsilon, seed, "our", debug_verify, fast_path)
        if cache is None or cache.base is None:
            return run_randomized(f, m, spec, cfg)
        return run_randomized(f, m, spec, cfg, base=cache.base, start=cache.start)
    if algo.name == "random":
        return baseline_random(f, m, spec, seed)
    if cache is not None and algo.name in cache.fixed:
        return cache.fixed[algo.name]
    rec = {"twopass": baseline_twopass, "lbmi": baseline_lbmi, "ubmi": baseline_ubmi}[algo.name](f, m, spec)
    if cache is not None:
        cache.fixed[algo.name] = rec
    return rec


def run_once(inst: Instance, algo: AlgoSpec | str, seed: int = 0, rep: int = 0,
             debug_verify: bool = False, fast_path: bool = False, _cache: Optional[_Cache] = None) -> ResultRow:
    """Run one algorithm and recompute the reported metrics from its solution."""
    if isinstance(algo, str):
        algo = parse_algos(algo)[0]
    rec = _dispatch(inst, algo, seed, debug_verify, fast_path, _cache)
    ms = rec.wall_time * 1000.0
    r = inst.meta.get("r")
    if rec.status == INFEASIBLE:
        return ResultRow(inst.name, algo.label, algo.epsilon, r, rep, seed, None, None, None, ms)
    sol = rec.solution
    if not (inst.matroid.is_independent(sol) and is_upper_fair(sol, inst.fairness)):
        raise InvariantError(f"{algo.label} returned a set outside the feasible region")
    value = inst.objective.value(sol)
    violation = fav(sol, inst.fairness)
    if rec.fav != violation or not math.isclose(rec.f_value, value, rel_tol=1e-9, abs_tol=1e-9):
        raise InvariantError(f"{algo.label}: reported metrics disagree with recomputation")
    return ResultRow(inst.name, algo.label, algo.epsilon, r, rep, seed, float(value), len(sol),
                     violation, ms, sol)


def rep_seed(base_seed: int, algo_index: int, r: int, rep: int) -> int:
    digest = hashlib.blake2b(f"{base_seed}:{algo_index}:{r}:{rep}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class SweepSpec:
    kind: str = "coverage"
    algos: tuple = tuple(parse_algos(DEFAULT_ALGOS))
    r_values: tuple = tuple(range(10, 101, 10))
    reps: int = 40
    base_seed: int = 0
    output: Optional[str] = None
    n: Optional[int] = None
    colors: Optional[int] = None
    instance_seed: int = 0
    fast_path: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("repetitions must be at least 1")
        if not self.algos or not self.r_values:
            raise ValueError("need at least one algorithm and one r value")


def _sweep_one_r(spec: SweepSpec, r: int) -> list[tuple]:
    """All rows of one r value, keyed by (algo index, rep)."""
    out = []
    try:
        inst = gen_instance(spec.kind, spec.n, spec.colors, r, spec.instance_seed)
    except GenerationError:
        inst = None
    cache = _Cache(inst) if inst is not None else None
    for a, algo in enumerate(spec.algos):
        for j in range(spec.reps):
            seed = rep_seed(spec.base_seed, a, r, j)
            if inst is None:
                row = ResultRow(f"{spec.kind}-r{r}", algo.label, algo.epsilon, r, j, seed, None, None, None)
            else:
                row = run_once(inst, algo, seed, j, fast_path=spec.fast_path, _cache=cache)
                if algo.name not in RANDOMIZED:
                    # deterministic algorithm; a rep carries the same solution and its seed is unused
                    row = ResultRow(row.instance, row.algo, row.epsilon, row.r, j, seed, row.f_value,
                                    row.size, row.fav, row.runtime_ms, row.solution)
            out.append(((a, r, j), row))
    return out


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.csv_cells())
    return buf.getvalue()


def summarize(rows: Sequence[ResultRow]) -> dict:
    """Per (algorithm, r): count, mean and sample std of f_value and fav over feasible rows."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.algo, row.r), []).append(row)
    out = []
    for (algo, r), grp in groups.items():
        ok = [x for x in grp if x.status == OK]
        entry = {"algo": algo, "r": r, "runs": len(grp), "feasible_runs": len(ok)}
        for key in ("f_value", "fav", "size"):
            vals = np.array([getattr(x, key) for x in ok], dtype=float)
            entry[f"{key}_mean"] = float(vals.mean()) if len(vals) else None
            entry[f"{key}_std"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out.append(entry)
    return {"groups": out}


def summary_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".summary.json")


def sweep(spec: SweepSpec) -> tuple[list[ResultRow], dict]:
    """Run every (algorithm, r, repetition); write CSV and JSON summary if an output path is set."""
    handles = []
    if spec.output is not None:
        # fail on an unwritable destination before any work is done
        handles = [open(spec.output, "w", encoding="utf-8", newline=""),
                   open(summary_path(spec.output), "w", encoding="utf-8")]
    try:
        keyed = []
        if spec.workers > 1:
            with ProcessPoolExecutor(spec.workers) as pool:
                for part in pool.map(_sweep_one_r, [spec] * len(spec.r_values), spec.r_values):
                    keyed.extend(part)
        else:
            for r in spec.r_values:
                keyed.extend(_sweep_one_r(spec, r))
        keyed.sort(key=lambda kv: kv[0])
        rows = [row for _, row in keyed]
        summary = summarize(rows)
        summary["config"] = {"kind": spec.kind, "algos": [a.label for a in spec.algos],
                           "r_values": list(spec.r_values), "reps": spec.reps,
                           "base_seed": spec.base_seed, "instance_seed": spec.instance_seed}
        if handles:
            handles[0].write(rows_to_csv(rows))
            handles[1].write(dumps(summary))
        return rows, summary
    finally:
        for h in handles:
            h.close()


def read_rows(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass(frozen=True)
class VerifyReport:
    independent: bool
    upper_fair: bool
    fav: int
    f_value: float
    size: int

    @property
    def ok(self) -> bool:
        return self.independent and self.upper_fair

    def to_json(self) -> str:
        return json.dumps({"independent": self.independent, "upper_fair": self.upper_fair,
                           "fav": self.fav, "f_value": self.f_value, "size": self.size, "ok": self.ok},
                          sort_keys=True)


def verify(inst: Instance, solution) -> VerifyReport:
    from .matroids import MalformedInputError
    sol = frozenset(solution)
    bad = [e for e in sol if not 0 <= e < inst.n]
    if bad:
        raise MalformedInputError(f"solution: element id {bad[0]} outside universe of size {inst.n}")
    return VerifyReport(inst.matroid.is_independent(sol), is_upper_fair(sol, inst.fairness),
                        fav(sol, inst.fairness), float(inst.objective.value(sol)), len(sol))
