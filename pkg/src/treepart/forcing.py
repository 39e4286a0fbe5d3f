"""A finite stand-in for the block-family forcing poset.

Conditions assign bits to restriction keys.  A key is the extensional
cut of a family at a block's top rank, so two families that agree below
a rank share keys there; that identification is what makes the
extracted-below-a-cut data depend only on the family-below-the-cut data.
Genericity is modeled as a finite chain of conditions meeting an
explicit list of dense requests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .certs import Certificate, Clause
from .closure import (
    Family,
    FamilyCatalog,
    Ground,
    block_max_rank,
    canonical_blocks,
    close,
    ground_key,
    ground_sorted,
)
from .ordinals import Ordinal

__all__ = [
    "Condition",
    "FilterSim",
    "FreeRequest",
    "HitRequest",
    "IncompatibleExtension",
    "ProtectRequest",
    "RestrictionKey",
    "add_root",
    "club_thin",
    "extend_condition",
    "extract_family",
    "family_audit",
    "hit_block",
    "protect_closure",
    "run_generic",
    "succ_key",
]


class IncompatibleExtension(ValueError):
    """Two conditions disagree on a key."""


@dataclass(frozen=True)
class RestrictionKey:
    """A family cut at some rank, identified purely by its blocks."""

    blocks: tuple[tuple[Ground, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", canonical_blocks(frozenset(b) for b in self.blocks))

    def sort_token(self):
        return tuple(tuple(ground_key(x) for x in b) for b in self.blocks)

    def max_block(self) -> frozenset[Ground]:
        """The top block of the cut (ties broken canonically)."""
        if not self.blocks:
            raise ValueError("empty key has no top block")
        best = self.blocks[0]
        for b in self.blocks[1:]:
            if block_max_rank(frozenset(best)) <= block_max_rank(frozenset(b)):
                best = b
        return frozenset(best)

    def top_blocks(self) -> tuple[frozenset[Ground], ...]:
        """Every block tied at the cut's top rank.

        Blocks sharing a top rank share this key, so a 1 here commits
        all of them at once; anything reasoning about commitments must
        take the whole tie class.
        """
        if not self.blocks:
            raise ValueError("empty key has no top block")
        ranks = [block_max_rank(frozenset(b)) for b in self.blocks]
        top = max(ranks)
        return tuple(
            frozenset(b) for b, r in zip(self.blocks, ranks) if r == top
        )


def succ_key(fam: Family, block: frozenset[Ground]) -> RestrictionKey:
    """The key a condition uses to speak about this block of this family."""
    block = frozenset(block)
    if block not in fam.blocks:
        raise ValueError("block does not belong to the family")
    cut = fam.restrict(block_max_rank(block), inclusive=True)
    return RestrictionKey(cut.fingerprint())


@dataclass(frozen=True)
class Condition:
    """A finite partial map from restriction keys to bits."""

    assignments: tuple[tuple[RestrictionKey, int], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[RestrictionKey, int] = {}
        for key, bit in self.assignments:
            if bit not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            if key in merged and merged[key] != bit:
                raise IncompatibleExtension("incompatible extension")
            merged[key] = bit
        ordered = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_token()))
        object.__setattr__(self, "assignments", ordered)

    def get(self, key: RestrictionKey) -> int | None:
        for k, bit in self.assignments:
            if k == key:
                return bit
        return None

    def __len__(self) -> int:
        return len(self.assignments)


def extend_condition(p: Condition, adds: Mapping[RestrictionKey, int]) -> Condition:
    """Union of assignments; a disagreement is the poset's incompatibility."""
    for key, bit in adds.items():
        old = p.get(key)
        if old is not None and old != bit:
            raise IncompatibleExtension("incompatible extension")
    return Condition(p.assignments + tuple(adds.items()))


def hit_block(p: Condition, fam: Family, block: frozenset[Ground]) -> Condition:
    """Commit a block into the generic family.

    Any later extension of the result still extracts the block, because
    conditions never change their minds about a key.
    """
    key = succ_key(fam, block)
    old = p.get(key)
    if old == 0:
        raise ValueError("block excluded by p")
    if old == 1:
        return p
    return extend_condition(p, {key: 1})


def protect_closure(
    p: Condition,
    ground: Iterable[Ground],
    fprime: Sequence[Family],
    horizon: int | None = None,
) -> tuple[Condition, frozenset[Ground]]:
    """Fence off the closure of a ground set before the filter grows.

    The bound collects the ground set plus the top blocks of everything
    p already talks about.  Every block that straddles the bound (meets
    it without sitting inside) gets its key pinned to 0, so no later
    extension can use it to pull the closure outside the bound.
    """
    bound: set[Ground] = set(ground)
    for key, _bit in p.assignments:
        # rank-tied blocks share the key, so take the whole tie class
        for b in key.top_blocks():
            bound |= b
    if horizon is not None and len(bound) > horizon:
        raise ValueError(f"bound has {len(bound)} elements, over the horizon {horizon}")
    adds: dict[RestrictionKey, int] = {}
    for fam in fprime:
        for b in fam.blocks:
            if b & bound and not b <= bound:
                key = succ_key(fam, b)
                if p.get(key) == 1:
                    # every top-tied block of a 1-key is inside the bound
                    # by construction, so this cannot happen
                    raise RuntimeError("construction bug: straddling block already committed")
                adds[key] = 0
    return extend_condition(p, adds), frozenset(bound)


def extract_family(source: FilterSim | Condition, fam: Family) -> Family:
    """The generic family's realization: blocks whose key got a 1."""
    p = source.current() if isinstance(source, FilterSim) else source
    kept = tuple(b for b in fam.blocks if p.get(succ_key(fam, b)) == 1)
    return Family(kept, fam.flavor, fam.root)


@dataclass(frozen=True)
class HitRequest:
    family: Family
    block: frozenset[Ground]


@dataclass(frozen=True)
class ProtectRequest:
    ground: frozenset[Ground]
    families: tuple[Family, ...]
    horizon: int | None = None


@dataclass(frozen=True)
class FreeRequest:
    family: Family
    block: frozenset[Ground]
    bit: int | None = None


DenseRequest = Union[HitRequest, ProtectRequest, FreeRequest]


class FilterSim:
    """A descending chain of conditions meeting explicit dense requests."""

    def __init__(self, seed: int = 0) -> None:
        self.seed = seed
        self.rng = random.Random(seed)
        self.conditions: list[Condition] = [Condition()]
        self.log: list[dict] = []

    def current(self) -> Condition:
        return self.conditions[-1]

    def apply(self, request: DenseRequest) -> None:
        cur = self.current()
        if isinstance(request, HitRequest):
            nxt = hit_block(cur, request.family, request.block)
            entry = {"kind": "hit", "block": ground_sorted(request.block)}
        elif isinstance(request, ProtectRequest):
            nxt, bound = protect_closure(cur, request.ground, request.families, request.horizon)
            entry = {
                "kind": "protect",
                "ground": ground_sorted(request.ground),
                "bound": ground_sorted(bound),
            }
        elif isinstance(request, FreeRequest):
            key = succ_key(request.family, request.block)
            old = cur.get(key)
            if old is not None:
                if request.bit is not None and request.bit != old:
                    raise IncompatibleExtension("incompatible extension")
                nxt, bit = cur, old
            else:
                bit = request.bit if request.bit is not None else self.rng.randint(0, 1)
                nxt = extend_condition(cur, {key: bit})
            entry = {"kind": "free", "block": ground_sorted(request.block), "bit": bit}
        else:
            raise TypeError(f"unknown request {request!r}")
        self.conditions.append(nxt)
        self.log.append(entry)

    def extract(self, fam: Family) -> Family:
        return extract_family(self.current(), fam)


def run_generic(requests: Sequence[DenseRequest], seed: int = 0) -> FilterSim:
    """Meet the requests in order; failures name the offending index."""
    fs = FilterSim(seed)
    for i, req in enumerate(requests):
        try:
            fs.apply(req)
        except (ValueError, RuntimeError) as e:
            raise type(e)(f"request {i}: {e}") from None
    return fs


def family_audit(
    catalog: FamilyCatalog,
    alpha: Ordinal,
    targets: Sequence[Family] = (),
    close_samples: Sequence[tuple[frozenset[Ground], Sequence[Family]]] = (),
    horizon: int | None = None,
    filter_sim: FilterSim | None = None,
    large: int | None = None,
) -> Certificate:
    """Report the smallness facts a usable catalog is expected to have.

    Counts the distinct cuts at alpha, the best block-overlap with each
    target, and the closure size of each sample; when a threshold
    (large, horizon) is given the matching clause actually fails on a
    miss, otherwise the numbers are informational.  The determination
    clause checks that families with equal cuts extract equal cuts
    through one shared filter.
    """
    clauses = []

    fingerprints = {fam.restrict(alpha).fingerprint() for fam in catalog}
    clauses.append(
        Clause("k1_restriction_count", True, {"count": len(fingerprints), "alpha": alpha})
    )

    overlaps = []
    for t in targets:
        tblocks = set(t.fingerprint())
        best = 0
        for fam in catalog:
            best = max(best, len(tblocks & set(fam.fingerprint())))
        overlaps.append(best)
    k2_ok = True if large is None else all(b >= large for b in overlaps)
    clauses.append(Clause("k2_best_overlap", k2_ok, {"overlaps": overlaps, "large": large}))

    sizes = [len(close(a, list(sub))) for a, sub in close_samples]
    k3_ok = True if horizon is None else all(s <= horizon for s in sizes)
    clauses.append(Clause("k3_closure_bounds", k3_ok, {"sizes": sizes, "horizon": horizon}))

    fs = filter_sim
    if fs is None:
        fs = FilterSim(seed=0)
        for fam in catalog:
            for b in fam.blocks:
                fs.apply(FreeRequest(fam, b))
    groups: dict[tuple, list[Family]] = {}
    for fam in catalog:
        groups.setdefault(fam.restrict(alpha).fingerprint(), []).append(fam)
    mismatches = 0
    compared = 0
    for fp, members in groups.items():
        if len(members) < 2:
            continue
        cuts = {extract_family(fs, fam).restrict(alpha).fingerprint() for fam in members}
        compared += 1
        if len(cuts) > 1:
            mismatches += 1
    clauses.append(
        Clause(
            "k1_determination",
            mismatches == 0,
            {"groups_compared": compared, "mismatches": mismatches},
        )
    )

    meta = {"alpha": alpha, "families": len(catalog.families)}
    return Certificate("family_audit", tuple(clauses), meta)


def club_thin(fam: Family, club: Sequence[Ordinal]) -> Family:
    """One block per club window, lowest start wins.

    A block belongs to the window (club[i], club[i+1]) when it lives
    entirely below the top but not entirely below the bottom.  The
    picked blocks are returned as a rank-separated family; picks that
    fail to separate are rejected by the family constructor.
    """
    for i in range(len(club) - 1):
        if not club[i] < club[i + 1]:
            raise ValueError("club must strictly increase")
    picks = []
    for i in range(len(club) - 1):
        lo, hi = club[i], club[i + 1]
        cands = [
            b
            for b in fam.blocks
            if block_max_rank(b) < hi and not block_max_rank(b) < lo
        ]
        if cands:
            cands.sort(
                key=lambda b: (
                    ground_key(min(b, key=ground_key)),
                    tuple(ground_key(x) for x in ground_sorted(b)),
                )
            )
            picks.append(cands[0])
    return Family(tuple(picks))


def add_root(root: frozenset[Ground], fam: Family) -> Family:
    """Glue a fixed root onto every block of a rank-separated family."""
    root = frozenset(root)
    for b in fam.blocks:
        if root & b:
            raise ValueError("root meets a block")
    blocks = tuple(root | b for b in fam.blocks)
    return Family(blocks, "delta_system", root)
