"""Branch-induced ordinal pair coloring and the partition witness search.

Fixing a branch through the arena turns the tree coloring into a
two-coloring of level pairs.  The search then looks for two of the
given disjoint tuples whose full rectangle wears one prescribed color,
which is exactly what the negative partition relation promises to find.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .arena import Node
from .certs import Certificate, Clause
from .coloring import ColoringState, color_of
from .ordinals import Ordinal

__all__ = [
    "Branch",
    "PairColoring",
    "Pr1Instance",
    "induce_pi",
    "pi_audit",
    "pr1_search",
]


@dataclass(frozen=True)
class Branch:
    """A single path through the arena, given by its 1-coordinates."""

    support: frozenset[Ordinal]

    def __post_init__(self) -> None:
        object.__setattr__(self, "support", frozenset(self.support))

    def node_at(self, level: Ordinal) -> Node:
        return Node(level, frozenset(c for c in self.support if c < level))


class PairColoring:
    """A symmetric 2-coloring of pairs from a fixed level list."""

    def __init__(self, levels: Sequence[Ordinal], values: dict[tuple[Ordinal, Ordinal], int]):
        self.levels = tuple(levels)
        self.values = dict(values)

    def pi(self, a: Ordinal, b: Ordinal) -> int:
        if a == b:
            raise ValueError("a pair needs two distinct levels")
        key = (a, b) if a < b else (b, a)
        try:
            return self.values[key]
        except KeyError:
            raise ValueError(f"pair ({a}, {b}) is outside the coloring domain") from None

    def pairs(self) -> Iterable[tuple[Ordinal, Ordinal, int]]:
        for (a, b), bit in sorted(self.values.items()):
            yield a, b, bit


def induce_pi(state: ColoringState, branch: Branch) -> PairColoring:
    """Pull the tree coloring back along a branch.

    The domain is the arena's level list below the bound; the branch
    must stay inside the arena's coordinates.
    """
    arena = state.arena
    if not branch.support <= arena.coords:
        raise ValueError("branch leaves arena")
    heights = arena.heights
    if not state.built_levels or state.built_up_to != arena.height_bound:
        raise ValueError("state must be built through the height bound")
    values = {}
    for i in range(len(heights)):
        for j in range(i + 1, len(heights)):
            lo, hi = heights[i], heights[j]
            values[(lo, hi)] = color_of(state, branch.node_at(lo), branch.node_at(hi))
    return PairColoring(heights, values)


@dataclass(frozen=True)
class Pr1Instance:
    """Disjoint ascending tuples and a target color."""

    n: int
    tuples: tuple[tuple[Ordinal, ...], ...]
    eta: int
    kappa: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "tuples", tuple(tuple(t) for t in self.tuples))
        if self.kappa != 2:
            raise ValueError("only two colors are in scope")
        if self.eta not in (0, 1):
            raise ValueError("eta must be 0 or 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        seen: set[Ordinal] = set()
        for t in self.tuples:
            if len(t) != self.n:
                raise ValueError(f"every tuple must have {self.n} entries")
            for i in range(len(t) - 1):
                if not t[i] < t[i + 1]:
                    raise ValueError("tuples must strictly increase")
            if seen & set(t):
                raise ValueError("tuples must be pairwise disjoint")
            seen |= set(t)


def pr1_search(pi: PairColoring, inst: Pr1Instance) -> tuple[int, int] | None:
    """First tuple pair whose full rectangle wears the target color."""
    level_set = set(pi.levels)
    for t in inst.tuples:
        for x in t:
            if x not in level_set:
                raise ValueError(f"tuple entry {x} is outside the coloring domain")
    for i in range(len(inst.tuples)):
        for j in range(i + 1, len(inst.tuples)):
            if all(
                pi.pi(a, b) == inst.eta
                for a in inst.tuples[i]
                for b in inst.tuples[j]
            ):
                return (i, j)
    return None


def pi_audit(
    pi: PairColoring,
    families: Sequence[tuple[Ordinal, ...]] = (),
    large: int | None = None,
) -> Certificate:
    """Coherence defects of the columns plus the best one-color-per-pair subfamily.

    The coherence clause lists, for every column pair, exactly where the
    two columns disagree below the lower one.  The homogenization clause
    searches all subfamilies of the given disjoint blocks for the
    largest one in which every block pair has a constant rectangle; with
    a threshold it becomes a real check.
    """
    clauses = []

    defect_rows = []
    levels = pi.levels
    for j in range(len(levels)):
        for k in range(j + 1, len(levels)):
            beta, gamma = levels[j], levels[k]
            defect = tuple(x for x in levels if x < beta and pi.pi(x, beta) != pi.pi(x, gamma))
            defect_rows.append({"beta": beta, "gamma": gamma, "defect": defect})
    clauses.append(
        Clause(
            "coherence",
            True,
            {"rows": defect_rows, "max_size": max((len(r["defect"]) for r in defect_rows), default=0)},
        )
    )

    blocks = [tuple(b) for b in families]
    seen: set[Ordinal] = set()
    for b in blocks:
        if seen & set(b):
            raise ValueError("family blocks must be pairwise disjoint")
        seen |= set(b)
    best: tuple[int, ...] = ()
    for size in range(len(blocks), 0, -1):
        found = None
        for combo in itertools.combinations(range(len(blocks)), size):
            if all(
                _one_constant(pi, blocks[a], blocks[b])
                for a, b in itertools.combinations(combo, 2)
            ):
                found = combo
                break
        if found is not None:
            best = found
            break
    hom_ok = True if large is None else len(best) >= large
    clauses.append(
        Clause(
            "homogenization",
            hom_ok,
            {"best_subfamily": best, "size": len(best), "large": large},
        )
    )
    return Certificate("pi_audit", tuple(clauses), {"levels": len(levels), "blocks": len(blocks)})


def _one_constant(pi: PairColoring, a: tuple[Ordinal, ...], b: tuple[Ordinal, ...]) -> bool:
    colors = {pi.pi(x, y) for x in a for y in b}
    return len(colors) == 1
