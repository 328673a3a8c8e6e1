"""Generic first-order rewriting over the node family of :mod:`cau.syntax`.

A rewrite system is given by a *root function* ``rules(x) -> list`` listing
every result of applying one rule at the root of ``x`` (empty when ``x`` is
not a root redex). Everything else (leftmost-outermost steps, one-step
successor enumeration, normalization) is derived from it.
"""

from __future__ import annotations

import os
from typing import Callable, Iterator, List, Optional, Tuple

from .syntax import Node, TermPath

RootRules = Callable[[Node], List[Node]]

DEFAULT_FUEL = 10_000


def default_fuel() -> int:
    """Rewrite-step fuel, overridable through ``CAU_FUEL``."""
    try:
        return int(os.environ.get("CAU_FUEL", DEFAULT_FUEL))
    except ValueError:
        return DEFAULT_FUEL


class FuelExhausted(RuntimeError):
    """Raised when a rewriting loop runs out of fuel."""

    def __init__(self, what: str, fuel: int, last=None):
        super().__init__(f"{what}: fuel of {fuel} steps exhausted")
        self.fuel = fuel
        self.last = last


def step(x: Node, rules: RootRules) -> Optional[Node]:
    """Rewrite the leftmost-outermost redex of ``x`` (``None`` if normal)."""
    found = rules(x)
    if found:
        return found[0]
    kids = x.children()
    for i, child in enumerate(kids):
        new = step(child, rules)
        if new is not None:
            return x.rebuild(kids[:i] + (new,) + kids[i + 1:])
    return None


def successors(x: Node, rules: RootRules, path: TermPath = ()) -> Iterator[Tuple[TermPath, Node]]:
    """Every single-step rewrite of ``x`` together with its position."""
    for result in rules(x):
        yield path, result
    kids = x.children()
    for i, child in enumerate(kids):
        for p, new in successors(child, rules, path + (i,)):
            yield p, x.rebuild(kids[:i] + (new,) + kids[i + 1:])


def iterate(x: Node, rules: RootRules, fuel: Optional[int] = None, what: str = "rewriting") -> Node:
    """Normalize by repeated leftmost-outermost steps (slow reference path)."""
    fuel = default_fuel() if fuel is None else fuel
    for _ in range(fuel):
        nxt = step(x, rules)
        if nxt is None:
            return x
        x = nxt
    if step(x, rules) is None:
        return x
    raise FuelExhausted(what, fuel, x)


class Normalizer:
    """Innermost normalization with a shared fuel budget.

    Children are normalized first; root rules are then applied until none
    fires, re-normalizing each contractum. For terminating and confluent
    systems this yields the unique normal form regardless of order.
    """

    def __init__(self, rules: RootRules, fuel: Optional[int] = None, what: str = "normalization",
                 memo: Optional[dict] = None):
        self.rules = rules
        self.fuel = default_fuel() if fuel is None else fuel
        self.left = self.fuel
        self.what = what
        self._memo: dict = {} if memo is None else memo

    def __call__(self, x: Node) -> Node:
        memo = self._memo
        hit = memo.get(x)
        if hit is not None:
            return hit
        kids = x.children()
        if kids:
            new = tuple(self(k) for k in kids)
            if any(a is not b for a, b in zip(new, kids)):
                x0 = x
                x = x.rebuild(new)
            else:
                x0 = x
        else:
            x0 = x
        while True:
            found = self.rules(x)
            if not found:
                break
            self.left -= 1
            if self.left < 0:
                raise FuelExhausted(self.what, self.fuel, x)
            x = self(found[0])
        memo[x0] = x
        return x


class SharedMemo(dict):
    """Normal-form cache shared across calls; cleared wholesale when full.

    Entries map a node to its normal form, which never depends on fuel, so
    sharing is safe; only completed normalizations are ever recorded.
    """

    def __init__(self, limit: int = 500_000):
        super().__init__()
        self.limit = limit

    def __setitem__(self, key, value):
        if len(self) >= self.limit:
            self.clear()
        super().__setitem__(key, value)
