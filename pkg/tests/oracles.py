"""Independent reference implementations the tests check against.

Everything here recomputes results from first principles, sharing no
code path with the library: closures by subset enumeration, pair
patterns by raw double loops, branch colorings by per-query walks.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from treepart.closure import Family, Ground
from treepart.coloring import ColoringState, color_of
from treepart.pr1 import Branch, Pr1Instance


def least_closed_superset(
    seed: frozenset[Ground], fams: Sequence[Family]
) -> frozenset[Ground]:
    """Intersection of every closed superset, by brute enumeration.

    Closed sets are closed under intersection, so the intersection of
    all of them over the block universe is the least one.
    """
    universe: set[Ground] = set(seed)
    for fam in fams:
        universe |= fam.universe()
    blocks = [frozenset(b) for fam in fams for b in fam.blocks]
    order = list(universe - seed)
    best: set[Ground] | None = None
    for r in range(len(order) + 1):
        for extra in itertools.combinations(order, r):
            cand = set(seed) | set(extra)
            if any((b & cand) and not (b <= cand) for b in blocks):
                continue
            best = cand if best is None else best & cand
    assert best is not None  # the full universe is always closed
    return frozenset(best)


def pairwise_pattern_ok(
    state: ColoringState,
    a: Sequence,
    b: Sequence,
    n: int,
) -> bool:
    """The raw two-constant check between two size-2n node tuples."""
    for i in (0, 1):
        if all(
            color_of(state, a[j], b[k]) == i
            and color_of(state, a[n + j], b[n + k]) == 1 - i
            for j in range(n)
            for k in range(n)
        ):
            return True
    return False


def phi0_naive(state: ColoringState, chain, pairs, xlists):
    """First witnessing pair, by a flat double loop re-deriving colors."""
    for alpha in range(len(chain)):
        for beta in range(alpha + 1, len(chain)):
            if not _below(state, chain[alpha], chain[beta]):
                continue
            if all(
                pairwise_pattern_ok(state, a, b, n)
                for i, (_t, n) in enumerate(pairs)
                for a in xlists[alpha][i]
                for b in xlists[beta][i]
            ):
                return (alpha, beta)
    return None


def _below(state: ColoringState, s, t) -> bool:
    if s.height < t.height:
        return t.restrict(s.height) == s
    return False


def pi_query(state: ColoringState, branch: Branch, a, b) -> int:
    """One branch pair color computed from scratch."""
    return color_of(state, branch.node_at(a), branch.node_at(b))


def pr1_search_naive(
    state: ColoringState, branch: Branch, inst: Pr1Instance
) -> tuple[int, int] | None:
    """Witness search that never touches PairColoring."""
    for i in range(len(inst.tuples)):
        for j in range(i + 1, len(inst.tuples)):
            if all(
                pi_query(state, branch, x, y) == inst.eta
                for x in inst.tuples[i]
                for y in inst.tuples[j]
            ):
                return (i, j)
    return None
