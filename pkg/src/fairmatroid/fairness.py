"""Colour bookkeeping: bounds, the upper-bound partition matroid, violation counts."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .matroids import MalformedInputError, PartitionMatroid


@dataclass(frozen=True)
class FairnessSpec:
    color_of: tuple[int, ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "color_of", tuple(int(c) for c in self.color_of))
        object.__setattr__(self, "lower", tuple(int(x) for x in self.lower))
        object.__setattr__(self, "upper", tuple(int(x) for x in self.upper))
        if len(self.lower) != len(self.upper):
            raise MalformedInputError("lower and upper bounds differ in length")
        for c in self.color_of:
            if not 0 <= c < self.n_colors:
                raise MalformedInputError(f"color {c} has no bounds")
        for c, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo < 0 or hi < lo:
                raise MalformedInputError(f"color {c}: need 0 <= lower <= upper, got {lo}, {hi}")
        sizes = self.class_sizes()
        for c in range(self.n_colors):
            if sizes[c] == 0 and self.lower[c] > 0:
                raise MalformedInputError(f"color {c} is empty but has lower bound {self.lower[c]}")

    @property
    def n(self) -> int:
        return len(self.color_of)

    @property
    def n_colors(self) -> int:
        return len(self.lower)

    def class_sizes(self) -> list[int]:
        return self.counts(range(self.n))

    def counts(self, s: Iterable[int]) -> list[int]:
        out = [0] * self.n_colors
        for e in s:
            out[self.color_of[e]] += 1
        return out

    def to_dict(self) -> dict:
        return {"color_of": list(self.color_of), "lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_dict(cls, data: dict) -> "FairnessSpec":
        try:
            return cls(tuple(data["color_of"]), tuple(data["lower"]), tuple(data["upper"]))
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad fairness record: {exc!r}") from exc


class Saturation(str, Enum):
    UNDER = "under"
    OVER = "over"
    EXACT = "exact"


def upper_matroid(spec: FairnessSpec) -> PartitionMatroid:
    return PartitionMatroid(spec.color_of, spec.upper)


def lower_matroid(spec: FairnessSpec) -> PartitionMatroid:
    """Partition matroid with caps equal to the lower bounds."""
    return PartitionMatroid(spec.color_of, spec.lower)


def fav(s: Iterable[int], spec: FairnessSpec) -> int:
    """Total fairness violation: per colour, distance of the count from [lower, upper]."""
    total = 0
    for cnt, lo, hi in zip(spec.counts(s), spec.lower, spec.upper):
        total += max(cnt - hi, lo - cnt, 0)
    return total


def is_fair(s: Iterable[int], spec: FairnessSpec) -> bool:
    return fav(s, spec) == 0


def is_upper_fair(s: Iterable[int], spec: FairnessSpec) -> bool:
    return all(cnt <= hi for cnt, hi in zip(spec.counts(s), spec.upper))


def classify_saturation(y: Iterable[int], p: Iterable[int], spec: FairnessSpec) -> list[Saturation]:
    out = []
    for a, b in zip(spec.counts(y), spec.counts(p)):
        out.append(Saturation.UNDER if a < b else Saturation.OVER if a > b else Saturation.EXACT)
    return out


def deficiency_k(y: Iterable[int], p: Iterable[int], spec: FairnessSpec) -> int:
    """Number of elements P has beyond Y, summed over the colours where Y falls short."""
    return sum(max(0, b - a) for a, b in zip(spec.counts(y), spec.counts(p)))
