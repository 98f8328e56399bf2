"""Formal sums of (support, rational function) pairs with a divisor ledger."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .projective import ProjLine, ProjPoint, short_format


@dataclass(frozen=True)
class PairToken:
    """The unordered pair ``{p, q}`` as a point of the Hilbert square."""

    points: frozenset

    @classmethod
    def of(cls, p: ProjPoint, q: ProjPoint) -> PairToken:
        if p == q:
            raise ValueError("nonreduced pairs are not modeled")
        return cls(frozenset((p, q)))

    def __str__(self):
        a, b = sorted(self.points, key=lambda p: p.sort_key())
        return "{" + f"{a!r}, {b!r}" + "}"


@dataclass(frozen=True)
class SumToken:
    """The divisor ``p + S`` of pairs containing ``p``."""

    point: ProjPoint
    surface: str = "S"

    def __str__(self):
        return f"({self.point!r} + {self.surface})"


def describe_key(key: Hashable) -> str:
    if isinstance(key, ProjLine):
        return "line[" + ", ".join(short_format(key.field, c) for c in key.plucker) + "]"
    if isinstance(key, ProjPoint):
        return repr(key)
    return str(key)


@dataclass(frozen=True)
class Component:
    support: str
    function: object
    divisor: tuple[tuple[Hashable, int], ...]

    def divisor_counter(self) -> Counter:
        c: Counter = Counter()
        for k, m in self.divisor:
            c[k] += m
        return c


@dataclass
class Chain:
    """A formal sum of components; a cocycle when the divisors cancel."""

    name: str
    components: list[Component] = field(default_factory=list)

    def add(self, support: str, function: object, divisor: Iterable[tuple[Hashable, int]]) -> None:
        self.components.append(Component(support, function, tuple(divisor)))

    def ledger(self) -> Counter:
        total: Counter = Counter()
        for comp in self.components:
            for k, m in comp.divisor:
                total[k] += m
        return Counter({k: m for k, m in total.items() if m})

    def is_cocycle(self) -> bool:
        return not self.ledger()

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "components": [
                {
                    "support": c.support,
                    "function": str(c.function),
                    "divisor": sorted([describe_key(k), m] for k, m in c.divisor),
                }
                for c in self.components
            ],
            "ledger": sorted([describe_key(k), m] for k, m in self.ledger().items()),
        }
