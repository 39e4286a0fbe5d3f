"""Seeded scenario generators shared across the suite.

Random families must satisfy their flavor invariants by construction,
so the generators build non-overlapping families from chopped sorted
samples and delta systems from a root plus disjoint petals, instead of
rejection sampling.  Planted catalog entries get their X-shape the same
way: one shared support set per block, split only at the entry node's
height, with block windows kept disjoint.
"""

from __future__ import annotations

import random

import pytest

from treepart.arena import Arena, Node
from treepart.closure import Family
from treepart.ordinals import ZERO, Ordinal, fin, omega
from treepart.twothin import TwoThinEntry


def rand_non_overlapping(rng: random.Random, pool: list, max_blocks: int = 4) -> Family:
    """Chop a sorted sample into consecutive runs with gaps between."""
    take = rng.randint(2, min(len(pool), 2 * max_blocks + 2))
    elems = sorted(rng.sample(pool, take))
    blocks = []
    i = 0
    while i < len(elems) and len(blocks) < max_blocks:
        width = rng.randint(1, 3)
        chunk = elems[i : i + width]
        i += width + 1  # skip one element so consecutive maxima stay below minima
        if chunk:
            blocks.append(frozenset(chunk))
    return Family(tuple(blocks), "non_overlapping")


def rand_delta_system(rng: random.Random, pool: list, max_blocks: int = 4) -> Family:
    rootsize = rng.randint(0, 2)
    shuffled = list(pool)
    rng.shuffle(shuffled)
    root = frozenset(shuffled[:rootsize])
    rest = shuffled[rootsize:]
    blocks = []
    i = 0
    for _ in range(rng.randint(1, max_blocks)):
        width = rng.randint(1, 2)
        petal = rest[i : i + width]
        i += width
        if not petal:
            break
        blocks.append(root | frozenset(petal))
    if not blocks:
        blocks = [root | frozenset(rest[:1])]
    return Family(tuple(blocks), "delta_system", root)


def rand_family(rng: random.Random, pool: list, max_blocks: int = 4) -> Family:
    if rng.random() < 0.5:
        return rand_non_overlapping(rng, pool, max_blocks)
    return rand_delta_system(rng, pool, max_blocks)


def ordinal_pool(size: int) -> list[Ordinal]:
    return [fin(k) for k in range(size)]


def make_arena(coords: set[int], limit_blocks: int, offsets: int) -> Arena:
    """Bound ω·limit_blocks, with `offsets` successor levels per block."""
    levels: list[Ordinal] = []
    for i in range(limit_blocks):
        for j in range(offsets):
            if i == 0:
                levels.append(fin(j))
            elif j == 0:
                levels.append(omega(1, i))
            else:
                levels.append(Ordinal(((1, i), (0, j))))
    bound = omega(1, limit_blocks)
    levels.append(bound)
    return Arena(
        coords=frozenset(fin(c) for c in coords),
        height_bound=bound,
        levels=tuple(levels),
    )


def plant_entry(
    rng: random.Random,
    arena: Arena,
    n: int,
    above: list[Ordinal],
    source: int,
    parity: str,
) -> TwoThinEntry | None:
    """A catalog entry built directly from arena nodes.

    The split height must itself be a coordinate; both chain halves of
    every block share one support set and differ only there, so the
    X-shape conditions hold by construction.  Block windows are carved
    off `above` left to right, keeping blocks height-separated.
    """
    coord_heights = [c for c in sorted(arena.coords) if c in arena.heights]
    if not coord_heights:
        return None
    delta = rng.choice(coord_heights)
    s = Node(
        delta, frozenset(c for c in arena.coords if c < delta and rng.random() < 0.5)
    )
    room = [g for g in above if delta < g]
    blocks = []
    pos = 0
    for _ in range(rng.randint(1, 3)):
        if pos + 2 * n > len(room):
            break
        width = rng.randint(2 * n, min(len(room) - pos, 2 * n + 2))
        hs = sorted(rng.sample(room[pos : pos + width], 2 * n))
        pos += width + rng.randint(0, 2)
        extras = frozenset(
            c for c in arena.coords if delta < c and rng.random() < 0.3
        )
        base = set(s.support) | extras
        left = [Node(h, frozenset(x for x in base if x < h)) for h in hs[:n]]
        withsplit = base | {delta}
        right = [Node(h, frozenset(x for x in withsplit if x < h)) for h in hs[n:]]
        blocks.append(tuple(left + right))
    if not blocks:
        return None
    return TwoThinEntry(s=s, n=n, blocks=tuple(blocks), parity=parity, source=source)


def rand_node(rng: random.Random, arena: Arena, level: Ordinal) -> Node:
    live = [c for c in arena.coords if c < level]
    supp = frozenset(c for c in live if rng.random() < 0.5)
    return Node(level, supp)


@pytest.fixture(scope="session")
def pipeline_state():
    """The planted end-to-end scenario, built once for the session."""
    from treepart.coloring import build_to, init_coloring
    from treepart.twothin import build_two_thin

    w2 = omega(coeff=2)
    levels = (
        tuple(fin(k) for k in range(10))
        + tuple(Ordinal(((1, 1), (0, k))) if k else omega() for k in range(8))
        + (w2,)
    )
    arena = Arena(coords=frozenset({ZERO}), height_bound=w2, levels=levels)
    src = Family(
        blocks=tuple(
            frozenset({fin(a), fin(b)})
            for a, b in [(3, 6), (7, 10), (11, 14), (15, 18), (21, 24), (25, 28)]
        ),
        flavor="non_overlapping",
    )
    cat = build_two_thin([src], arena, [(Node(ZERO, frozenset()), 1)])
    state = init_coloring(arena)
    build_to(state, cat, 5)
    return arena, cat, state
