"""Ladders: increasing rungs below a limit with closure fences between.

Climbing toward a limit rank alpha, each rung is pushed high enough
that everything the previous rung touches closes off strictly below the
next one.  The fence F_n collects the closure of the blocks straddling
rung n, and the audit checks the fences are disjoint, closed, windowed
between neighbouring rungs, and that nothing closed leaks past its
window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .certs import Certificate, Clause
from .closure import (
    Family,
    Ground,
    block_max_rank,
    block_min_rank,
    close,
    ground_sorted,
    is_closed,
    rank_of,
)
from .ordinals import Ordinal

__all__ = [
    "InsufficientLevels",
    "LadderResult",
    "audit_ladder",
    "build_ladder",
]


class InsufficientLevels(ValueError):
    """The level pool has no element high enough for the next rung."""


@dataclass(frozen=True)
class LadderResult:
    alpha: Ordinal
    alphas: tuple[Ordinal, ...]
    fences: tuple[frozenset[Ground], ...]
    corrections: tuple[bool, ...]

    @property
    def steps(self) -> int:
        return len(self.alphas) - 1


def _straddling(fams: Sequence[Family], rung: Ordinal) -> list[frozenset[Ground]]:
    out = []
    for fam in fams:
        for b in fam.blocks:
            if block_min_rank(b) <= rung <= block_max_rank(b):
                out.append(b)
    return out


def _snap(cand: Ordinal, pool: Sequence[Ordinal] | None) -> Ordinal:
    if pool is None:
        return cand
    for level in pool:
        if cand <= level:
            return level
    raise InsufficientLevels(f"no level at or above {cand} in the pool")


def build_ladder(
    alpha: Ordinal,
    fams: Sequence[Family],
    steps: int,
    level_pool: Iterable[Ordinal] | None = None,
) -> LadderResult:
    """Climb toward alpha in the given number of rungs.

    Rung n+1 starts from the canonical ascent below alpha but is pushed
    up past the closure of whatever straddles rung n, and always strictly
    past rung n itself.  With a level pool, every rung additionally snaps
    up to the least available level.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    pool = sorted(level_pool) if level_pool is not None else None
    alphas = [_snap(alpha.fund_seq(0), pool)]
    corrections = [alphas[0] != alpha.fund_seq(0)]
    for n in range(steps):
        touching = _straddling(fams[: n + 1], alphas[n])
        seed: set[Ground] = set()
        for b in touching:
            seed |= b
        cand = alpha.fund_seq(n + 1)
        if seed:
            hull = close(seed, fams[: n + 1])
            past = max(rank_of(x) for x in hull).succ()
            if cand < past:
                cand = past
        if cand <= alphas[n]:
            cand = alphas[n].succ()
        if not cand < alpha:
            raise ValueError(f"rung {n + 1} would reach {cand}, past the limit {alpha}")
        rung = _snap(cand, pool)
        if not rung < alpha:
            raise InsufficientLevels(f"snapped rung {rung} is not below {alpha}")
        corrections.append(rung != alpha.fund_seq(n + 1))
        alphas.append(rung)
    fences = []
    for n in range(steps + 1):
        touching = _straddling(fams[:n], alphas[n])
        seed = set()
        for b in touching:
            seed |= b
        fences.append(close(seed, fams[:n]) if seed else frozenset())
    return LadderResult(alpha, tuple(alphas), tuple(fences), tuple(corrections))


def audit_ladder(
    result: LadderResult,
    fams: Sequence[Family],
    universe: Iterable[Ground] | None = None,
) -> Certificate:
    """Check the fence laws of a ladder, built or claimed.

    Clauses: fences pairwise disjoint; each fence closed under its
    prefix of families and confined to the window around its rung (with
    the rungs themselves increasing below the limit); each fence tops
    off an initial segment into a closed set; and singleton closures
    started inside a window stay in that window plus the two fences
    beside it.
    """
    alpha = result.alpha
    alphas = result.alphas
    fences = result.fences
    steps = result.steps
    if universe is None:
        pool: set[Ground] = set()
        for fam in fams:
            pool |= fam.universe()
        universe = pool
    universe = set(universe)

    clauses = []

    overlap_hits = []
    for m in range(len(fences)):
        for n in range(m + 1, len(fences)):
            bad = fences[m] & fences[n]
            if bad:
                overlap_hits.append({"m": m, "n": n, "overlap": ground_sorted(bad)})
    clauses.append(Clause("pairwise_disjoint", not overlap_hits, {"hits": overlap_hits}))

    window_hits = []
    increasing = all(alphas[i] < alphas[i + 1] for i in range(steps)) and (
        not alphas or alphas[-1] < alpha
    )
    if not increasing:
        window_hits.append({"alphas": list(alphas), "limit": alpha})
    for n in range(steps + 1):
        if not is_closed(fences[n], fams[:n]):
            window_hits.append({"n": n, "reason": "not closed"})
        hi = alpha if n == steps else alphas[n + 1]
        for x in fences[n]:
            r = rank_of(x)
            low_ok = True if n == 0 else alphas[n - 1] < r
            if not (low_ok and r < hi):
                window_hits.append({"n": n, "element": x, "rank": r})
    clauses.append(Clause("closed_and_windowed", not window_hits, {"hits": window_hits}))

    segment_hits = []
    for n in range(steps + 1):
        seg = {x for x in universe if rank_of(x) < alphas[n]} | set(fences[n])
        if not is_closed(seg, fams[:n]):
            segment_hits.append({"n": n})
    clauses.append(Clause("initial_segment_closed", not segment_hits, {"hits": segment_hits}))

    local_hits = []
    for n in range(steps):
        lo, hi = alphas[n], alphas[n + 1]
        window = {x for x in universe if lo <= rank_of(x) < hi}
        allowed = window | set(fences[n]) | set(fences[n + 1])
        for x in window:
            hull = close({x}, fams[:n])
            spill = hull - allowed
            if spill:
                local_hits.append({"n": n, "start": x, "spill": ground_sorted(spill)})
    clauses.append(Clause("singleton_closures_localized", not local_hits, {"hits": local_hits}))

    meta = {
        "alpha": alpha,
        "steps": steps,
        "alphas": list(alphas),
        "fence_sizes": [len(f) for f in fences],
        "corrections": list(result.corrections),
    }
    return Certificate("ladder_audit", tuple(clauses), meta)
