"""Transporting ordinal block families onto the tree.

A height-monotone enumeration of the arena carries each ordinal block
to a node set; the blocks whose images land in the two-chain shape over
a splitting node survive, and splitting the survivors by position
parity restores strict height separation between consecutive blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .arena import Arena, ArityError, Node, ho_sorted, x_member
from .certs import Certificate, Clause
from .closure import Family, FamilyCatalog, Ground, canonical_blocks, close
from .ordinals import Ordinal

__all__ = [
    "HeightBijection",
    "TwoThinCatalog",
    "TwoThinEntry",
    "audit_two_thin",
    "build_two_thin",
    "entry_family",
    "height_bijection",
    "project_family",
    "restrict_entry_blocks",
]


@dataclass(frozen=True)
class HeightBijection:
    """Index <-> node, heights nondecreasing along the index."""

    nodes: tuple[Node, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def node_at(self, i: int) -> Node:
        return self.nodes[i]

    def index_of(self, node: Node) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise ValueError(f"{node!r} is not an arena node") from None


def height_bijection(arena: Arena) -> HeightBijection:
    """Enumerate the universe level by level, height order within."""
    return HeightBijection(tuple(arena.nodes()))


def project_family(
    bij: HeightBijection,
    fam: Family,
    s: Node,
    n: int,
) -> tuple[tuple[Node, ...], ...]:
    """Push an ordinal family through the enumeration, keep the X-shape.

    Each block maps pointwise (the image is re-sorted in height order,
    the enumeration preserves nothing inside a block); blocks that do
    not land as 2n-tuples of the two-chain shape over s drop out.  The
    survivors keep the source order, which is the preimage well-order.
    """
    out = []
    for block in fam.blocks:
        image = []
        ok = True
        for x in block:
            if not isinstance(x, Ordinal) or not x.is_finite or int(x) >= len(bij):
                ok = False
                break
            image.append(bij.node_at(int(x)))
        if not ok or len(image) != 2 * n:
            continue
        tup = tuple(ho_sorted(image))
        if x_member(tup, s, n):
            out.append(tup)
    return tuple(out)


@dataclass(frozen=True)
class TwoThinEntry:
    """One transported family: blocks in preimage order, raw tuples.

    Blocks are kept as plain node tuples rather than a checked family so
    the audit can be pointed at a claimed catalog and actually reject
    it; entry_family builds the checked form on demand.
    """

    s: Node
    n: int
    blocks: tuple[tuple[Node, ...], ...]
    parity: str
    source: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be even or odd")
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))


@dataclass(frozen=True)
class TwoThinCatalog:
    entries: tuple[TwoThinEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> TwoThinEntry:
        return self.entries[i]


def entry_family(entry: TwoThinEntry) -> Family:
    """The entry's blocks as a checked rank-separated node family."""
    return Family(tuple(frozenset(b) for b in entry.blocks))


def restrict_entry_blocks(entry: TwoThinEntry, bound: Ordinal) -> tuple[tuple[Node, ...], ...]:
    """Blocks living entirely below the bound, order preserved."""
    return tuple(b for b in entry.blocks if all(x.height < bound for x in b))


def build_two_thin(
    sources: FamilyCatalog,
    arena: Arena,
    pairs: Sequence[tuple[Node, int]],
) -> TwoThinCatalog:
    """Project every source through every (s, n) pair and split by parity.

    Even positions of the preimage order make one entry, odd positions
    the other; empty halves are dropped.  The skipped opposite-parity
    block is what separates consecutive same-parity blocks in height.
    """
    bij = height_bijection(arena)
    entries = []
    for si, fam in enumerate(sources):
        for s, n in pairs:
            projected = project_family(bij, fam, s, n)
            even = projected[0::2]
            odd = projected[1::2]
            if even:
                entries.append(TwoThinEntry(s, n, even, "even", si))
            if odd:
                entries.append(TwoThinEntry(s, n, odd, "odd", si))
    return TwoThinCatalog(tuple(entries))


def _block_fingerprint(blocks: Iterable[tuple[Node, ...]]) -> tuple:
    return canonical_blocks(frozenset(b) for b in blocks)


def audit_two_thin(
    cat: TwoThinCatalog,
    arena: Arena,
    alpha: Ordinal,
    targets: Sequence[TwoThinEntry] = (),
    close_samples: Sequence[tuple[frozenset[Ground], Sequence[int]]] = (),
    large: int | None = None,
    horizon: int | None = None,
) -> Certificate:
    """The four smallness clauses of a transported catalog.

    (i) how many distinct cuts at alpha, the empty cut included;
    (ii) best shared-block count against each target entry;
    (iii) closure size of each sample under the named entries;
    (iv) every entry really is a height-separated list of X-shapes.
    Thresholds (large, horizon) turn (ii) and (iii) from reports into
    real checks.
    """
    clauses = []

    cuts = {_block_fingerprint(restrict_entry_blocks(e, alpha)) for e in cat}
    clauses.append(Clause("i_restriction_count", True, {"count": len(cuts), "alpha": alpha}))

    overlaps = []
    for t in targets:
        tset = set(_block_fingerprint(t.blocks))
        best = 0
        for e in cat:
            if (e.s, e.n) != (t.s, t.n):
                continue
            best = max(best, len(tset & set(_block_fingerprint(e.blocks))))
        overlaps.append(best)
    ii_ok = True if large is None else all(b >= large for b in overlaps)
    clauses.append(Clause("ii_target_overlap", ii_ok, {"overlaps": overlaps, "large": large}))

    sizes = []
    for ground, entry_ids in close_samples:
        fams = [entry_family(cat[i]) for i in entry_ids]
        sizes.append(len(close(ground, fams)))
    iii_ok = True if horizon is None else all(s <= horizon for s in sizes)
    clauses.append(Clause("iii_closure_bounded", iii_ok, {"sizes": sizes, "horizon": horizon}))

    bad: list[dict] = []
    for ei, e in enumerate(cat):
        for bi, b in enumerate(e.blocks):
            try:
                shaped = x_member(tuple(b), e.s, e.n)
            except (ArityError, ValueError) as err:
                shaped = False
            if not shaped:
                bad.append({"entry": ei, "block": bi, "reason": "not an X-shape"})
        for bi in range(len(e.blocks) - 1):
            top = max(x.height for x in e.blocks[bi])
            bottom = min(x.height for x in e.blocks[bi + 1])
            if not top < bottom:
                bad.append({"entry": ei, "block": bi, "reason": "height overlap with the next block"})
    clauses.append(Clause("iv_non_overlapping", not bad, {"hits": bad}))

    meta = {"entries": len(cat.entries), "alpha": alpha}
    return Certificate("two_thin_audit", tuple(clauses), meta)
