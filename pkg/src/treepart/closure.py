"""Block families over ranked ground sets and their closure operators.

The ground elements are either ordinals (ranked by themselves) or tree
nodes (ranked by height).  A family is a finite list of blocks in one of
two shapes: pairwise rank-separated blocks, or a sunflower whose blocks
share a root and have disjoint petals.  Closing a set under a catalog of
families means repeatedly pulling in every block the set touches.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .arena import Node, ho_cmp
from .ordinals import Ordinal

__all__ = [
    "Family",
    "FamilyCatalog",
    "Ground",
    "block_max_rank",
    "block_min_rank",
    "canonical_blocks",
    "close",
    "close_delta",
    "closure_classes",
    "ground_cmp",
    "ground_key",
    "ground_sorted",
    "is_closed",
    "rank_of",
]

Ground = Union[Ordinal, Node]

FLAVORS = ("non_overlapping", "delta_system")


def rank_of(x: Ground) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, Node):
        return x.height
    raise TypeError(f"unranked ground element {x!r}")


def ground_cmp(a: Ground, b: Ground) -> int:
    ra, rb = rank_of(a), rank_of(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if isinstance(a, Node) and isinstance(b, Node):
        return ho_cmp(a, b)
    if isinstance(a, Ordinal) and isinstance(b, Ordinal):
        return 0
    # mixed ground sets should not happen; keep the order total anyway
    return -1 if isinstance(a, Ordinal) else 1


ground_key = functools.cmp_to_key(ground_cmp)


def ground_sorted(items: Iterable[Ground]) -> list[Ground]:
    return sorted(items, key=ground_key)


def block_min_rank(block: frozenset[Ground]) -> Ordinal:
    return min(rank_of(x) for x in block)


def block_max_rank(block: frozenset[Ground]) -> Ordinal:
    return max(rank_of(x) for x in block)


def canonical_blocks(blocks: Iterable[frozenset[Ground]]) -> tuple[tuple[Ground, ...], ...]:
    """Order-free fingerprint of a block list: sorted tuples, sorted."""
    canon = [tuple(ground_sorted(b)) for b in blocks]
    canon.sort(key=lambda b: tuple(ground_key(x) for x in b))
    return tuple(canon)


@dataclass(frozen=True)
class Family:
    """A finite block family over a ranked ground set.

    flavor "non_overlapping": the rank intervals of distinct blocks are
    disjoint, so the blocks line up along the rank axis.  flavor
    "delta_system": every block contains the root, petals (block minus
    root) are nonempty and pairwise disjoint.
    """

    blocks: tuple[frozenset[Ground], ...]
    flavor: str = "non_overlapping"
    root: frozenset[Ground] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        blocks = tuple(frozenset(b) for b in self.blocks)
        blocks = tuple(
            sorted(blocks, key=lambda b: tuple(ground_key(x) for x in ground_sorted(b)))
        )
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "root", frozenset(self.root))
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        for b in blocks:
            if not b:
                raise ValueError("empty block")
        if self.flavor == "non_overlapping":
            if self.root:
                raise ValueError("only sunflower families carry a root")
            for i in range(len(blocks) - 1):
                if not block_max_rank(blocks[i]) < block_min_rank(blocks[i + 1]):
                    raise ValueError("blocks overlap in rank")
        else:
            petals: set[Ground] = set()
            for b in blocks:
                if not self.root <= b:
                    raise ValueError("block misses the root")
                petal = b - self.root
                if not petal:
                    raise ValueError("empty petal")
                if petals & petal:
                    raise ValueError("petals overlap")
                petals |= petal

    def universe(self) -> frozenset[Ground]:
        out: set[Ground] = set()
        for b in self.blocks:
            out |= b
        return frozenset(out)

    def restrict(self, bound: Ordinal, inclusive: bool = False) -> Family:
        """Keep only blocks living below the bound (whole blocks)."""
        if inclusive:
            kept = tuple(b for b in self.blocks if block_max_rank(b) <= bound)
        else:
            kept = tuple(b for b in self.blocks if block_max_rank(b) < bound)
        return Family(kept, self.flavor, self.root)

    def fingerprint(self) -> tuple[tuple[Ground, ...], ...]:
        return canonical_blocks(self.blocks)


@dataclass(frozen=True)
class FamilyCatalog:
    """An ordered list of families, closed against as a unit."""

    families: tuple[Family, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "families", tuple(self.families))

    def __len__(self) -> int:
        return len(self.families)

    def __iter__(self):
        return iter(self.families)

    def __getitem__(self, i):
        return self.families[i]

    def distinct_restrictions(self, bound: Ordinal, drop_empty: bool = True) -> list[Family]:
        """Restrictions below the bound, deduplicated extensionally.

        Keeps catalog order of first appearance; empty restrictions are
        dropped unless asked for.
        """
        seen: set[tuple] = set()
        out: list[Family] = []
        for fam in self.families:
            cut = fam.restrict(bound)
            if drop_empty and not cut.blocks:
                continue
            fp = cut.fingerprint()
            if fp in seen:
                continue
            seen.add(fp)
            out.append(cut)
        return out


def close(ground: Iterable[Ground], fams: Sequence[Family]) -> frozenset[Ground]:
    """Least superset pulling in every block it touches.

    The loop order (families by index, blocks in canonical order) does
    not change the result; the least fixpoint is unique.
    """
    cur = set(ground)
    changed = True
    while changed:
        changed = False
        for fam in fams:
            for b in fam.blocks:
                if not b <= cur and b & cur:
                    cur |= b
                    changed = True
    return frozenset(cur)


def close_delta(ground: Iterable[Ground], fams: Sequence[Family]) -> frozenset[Ground]:
    """Sunflower-aware closure: roots are free, petals trigger the pull.

    Seeds with the ground set plus every root, then joins any block
    whose petal meets the set so far.
    """
    cur = set(ground)
    for fam in fams:
        cur |= fam.root
    changed = True
    while changed:
        changed = False
        for fam in fams:
            for b in fam.blocks:
                if not b <= cur and (b - fam.root) & cur:
                    cur |= b
                    changed = True
    return frozenset(cur)


def is_closed(xs: Iterable[Ground], fams: Sequence[Family]) -> bool:
    """Every block is inside or fully outside."""
    s = set(xs)
    for fam in fams:
        for b in fam.blocks:
            if b & s and not b <= s:
                return False
    return True


def closure_classes(universe: Iterable[Ground], fams: Sequence[Family]) -> list[frozenset[Ground]]:
    """Partition of the universe into minimal closed pieces.

    Blocks act as hyperedges; classes are the connected components,
    listed by their least element.
    """
    items = ground_sorted(set(universe))
    parent = {x: x for x in items}

    def find(x: Ground) -> Ground:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: Ground, b: Ground) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for fam in fams:
        for b in fam.blocks:
            inside = [x for x in b if x in parent]
            for i in range(len(inside) - 1):
                union(inside[i], inside[i + 1])
    groups: dict[Ground, set[Ground]] = {}
    for x in items:
        groups.setdefault(find(x), set()).add(x)
    classes = [frozenset(g) for g in groups.values()]
    classes.sort(key=lambda c: ground_key(ground_sorted(c)[0]))
    return classes
