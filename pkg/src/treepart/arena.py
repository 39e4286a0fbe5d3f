"""Finite slice of the coherent binary tree.

Nodes are 0/1 functions on an ordinal interval, stored as (height,
support): the support is the set of coordinates carrying a 1 and must
sit below the height.  An Arena pins down which coordinates may ever
carry a 1 and which heights actually exist, so every construction that
walks "level by level" has a finite, explicit list of levels to walk.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .ordinals import Ordinal, ZERO, omega

__all__ = [
    "Arena",
    "ArityError",
    "Node",
    "child",
    "grid_levels",
    "ho_cmp",
    "ho_key",
    "ho_sorted",
    "is_strictly_below",
    "node_meet_data",
    "splice",
    "tree_leq",
    "x_member",
]


class ArityError(ValueError):
    """A block handed to x_member has the wrong number of nodes."""


@dataclass(frozen=True)
class Node:
    """A binary string of transfinite length: height plus 1-coordinates."""

    height: Ordinal
    support: frozenset[Ordinal] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        supp = frozenset(self.support)
        object.__setattr__(self, "support", supp)
        for coord in supp:
            if not coord < self.height:
                raise ValueError(f"support coordinate {coord} not below height {self.height}")

    def bit(self, coord: Ordinal) -> int:
        if not coord < self.height:
            raise ValueError(f"{coord} is not below {self.height}")
        return 1 if coord in self.support else 0

    def restrict(self, level: Ordinal) -> Node:
        if self.height < level:
            raise ValueError(f"cannot restrict height {self.height} up to {level}")
        return Node(level, frozenset(c for c in self.support if c < level))

    def __repr__(self) -> str:
        coords = " ".join(str(c) for c in sorted(self.support))
        return f"{self.height}[{coords}]"


def tree_leq(s: Node, t: Node) -> bool:
    """s is an initial segment of t (allowing s == t)."""
    return s.height <= t.height and t.restrict(s.height) == s


def is_strictly_below(s: Node, t: Node) -> bool:
    return s.height < t.height and t.restrict(s.height) == s


def child(s: Node, bit: int) -> Node:
    """One-step extension of s by the given bit."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    supp = s.support | {s.height} if bit else s.support
    return Node(s.height.succ(), supp)


def node_meet_data(s: Node, t: Node) -> tuple[Ordinal, frozenset[Ordinal], int]:
    """Where two nodes part ways.

    Returns (delta, dset, order): dset is the set of coordinates below
    both heights where the bits differ, delta is its minimum (or the
    smaller height when the nodes agree on the overlap), and order is
    the sign of ho_cmp(s, t).
    """
    cut = min(s.height, t.height)
    dset = frozenset(
        c for c in (s.support ^ t.support) if c < cut
    )
    delta = min(dset) if dset else cut
    return delta, dset, ho_cmp(s, t)


def ho_cmp(s: Node, t: Node) -> int:
    """Height order: shorter first, ties broken at the first disagreement.

    For nodes of equal height the one carrying a 0 at the least point of
    disagreement comes first.
    """
    if s.height != t.height:
        return -1 if s.height < t.height else 1
    dset = s.support ^ t.support
    if not dset:
        return 0
    return -1 if min(dset) in t.support else 1


ho_key = functools.cmp_to_key(ho_cmp)


def ho_sorted(nodes: Iterable[Node]) -> list[Node]:
    return sorted(nodes, key=ho_key)


def splice(s: Node, t: Node) -> Node:
    """Overwrite the lower part of t with s.

    Requires ht(s) < ht(t); the result keeps t's bits on [ht(s), ht(t))
    and uses s below that.
    """
    if not s.height < t.height:
        raise ValueError("splice needs the first node strictly shorter")
    high = frozenset(c for c in t.support if s.height <= c)
    return Node(t.height, s.support | high)


def x_member(a: tuple[Node, ...], s: Node, n: int) -> bool:
    """Test the two-chain shape over the splitting node s.

    A member is a ho-sorted 2n-tuple whose first half forms a chain
    extending s followed by 0 and whose second half forms a chain
    extending s followed by 1, with the halves separated in height and
    disagreeing exactly at ht(s) across the gap.  Arity and sortedness
    are treated as malformed input; everything else just fails the test.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(a) != 2 * n:
        raise ArityError(f"expected {2 * n} nodes, got {len(a)}")
    for i in range(len(a) - 1):
        if ho_cmp(a[i], a[i + 1]) >= 0:
            raise ValueError("block is not strictly sorted in height order")
    lo, hi = child(s, 0), child(s, 1)
    if not tree_leq(lo, a[0]) or not tree_leq(hi, a[n]):
        return False
    for i in range(n - 1):
        if not is_strictly_below(a[i], a[i + 1]):
            return False
        if not is_strictly_below(a[n + i], a[n + i + 1]):
            return False
    if not a[n - 1].height < a[n].height:
        return False
    _, dset, _ = node_meet_data(a[n - 1], a[n])
    return dset == frozenset({s.height})


@dataclass(frozen=True)
class Arena:
    """The finite node universe: coordinates, height bound, level list.

    levels must climb strictly from 0 to the (limit) height bound;
    everything below the bound counts as part of the universe, the bound
    itself is where branches live.
    """

    coords: frozenset[Ordinal]
    height_bound: Ordinal
    levels: tuple[Ordinal, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", frozenset(self.coords))
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.height_bound.is_limit:
            raise ValueError("height bound must be a limit")
        for c in self.coords:
            if not c < self.height_bound:
                raise ValueError(f"coordinate {c} not below the height bound")
        if not self.levels or self.levels[0] != ZERO or self.levels[-1] != self.height_bound:
            raise ValueError("levels must run from 0 to the height bound")
        for i in range(len(self.levels) - 1):
            if not self.levels[i] < self.levels[i + 1]:
                raise ValueError("levels must strictly increase")

    @property
    def heights(self) -> tuple[Ordinal, ...]:
        """Levels strictly below the bound: where universe nodes live."""
        return self.levels[:-1]

    def level_index(self, level: Ordinal) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise ValueError(f"{level} is not an arena level") from None

    def levels_below(self, level: Ordinal) -> tuple[Ordinal, ...]:
        return tuple(g for g in self.levels if g < level)

    def level_nodes(self, level: Ordinal) -> list[Node]:
        """All nodes of the given height, in height order."""
        if level not in self.levels:
            raise ValueError(f"{level} is not an arena level")
        live = sorted(c for c in self.coords if c < level)
        out = []
        for r in range(len(live) + 1):
            for combo in itertools.combinations(live, r):
                out.append(Node(level, frozenset(combo)))
        return ho_sorted(out)

    def nodes(self) -> Iterator[Node]:
        """The whole universe, level by level, in height order."""
        for level in self.heights:
            yield from self.level_nodes(level)

    def contains(self, node: Node) -> bool:
        return (
            node.height in self.heights
            and node.support <= self.coords
        )

    def restrictions_below(self, node: Node) -> list[Node]:
        """node cut down to every arena level under its height."""
        return [node.restrict(g) for g in self.levels if g < node.height]


def grid_levels(bound: Ordinal, step: int) -> tuple[Ordinal, ...]:
    """Evenly spaced levels for a bound of the form w.m.

    Puts step successor levels into each limit block, e.g. w.2 with
    step 3 gives 0,1,2,w,w+1,w+2,w.2.
    """
    if bound.kind != "limit" or len(bound.terms) != 1 or bound.terms[0][0] != 1:
        raise ValueError("grid_levels only handles bounds of the form w.m")
    m = bound.terms[0][1]
    out: list[Ordinal] = []
    for block in range(m):
        base = omega(1, block) if block else ZERO
        out.append(base)
        cur = base
        for _ in range(step - 1):
            cur = cur.succ()
            out.append(cur)
    out.append(bound)
    return tuple(out)
