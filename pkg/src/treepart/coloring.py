"""The recursive pair coloring on the tree and its audits.

Incomparable pairs are colored 1 once and for all.  Comparable pairs
get their color from the higher node's map, which is built level by
level: successor levels copy the parent's map and color the parent 0;
limit levels run the ladder machinery, recoloring fenced-off closures
with parity constants and copying everything else from restrictions.
The audits replay the construction's bookkeeping (domains, fences,
parity) and the downstream selection arguments against the actual maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .arena import (
    Arena,
    Node,
    ho_cmp,
    ho_sorted,
    is_strictly_below,
    node_meet_data,
    tree_leq,
)
from .certs import Certificate, Clause
from .closure import Family, FamilyCatalog, close
from .ladder import LadderResult, build_ladder
from .ordinals import Ordinal, ZERO
from .twothin import TwoThinCatalog, TwoThinEntry, entry_family, restrict_entry_blocks

__all__ = [
    "ColoringState",
    "DefectReport",
    "HomSelection",
    "LimitStepTrace",
    "Phi0Instance",
    "RungRecord",
    "build_to",
    "c_good",
    "coh_defect",
    "color_of",
    "extend_limit",
    "extend_successor",
    "hom_audit",
    "hom_containment_audit",
    "homogeneous_extract",
    "init_coloring",
    "phi0_audit",
    "q_compatible",
    "structural_audit",
]


@dataclass(frozen=True)
class RungRecord:
    """What one rung of a limit step did."""

    k: int
    window: tuple[Ordinal, Ordinal]
    e_blocks: tuple[tuple[Node, ...], ...]
    x_set: frozenset[Node]
    domains: tuple[tuple[int, frozenset[Node]], ...]


@dataclass(frozen=True)
class LimitStepTrace:
    """Everything a limit step decided, enough to replay the proofs."""

    level: Ordinal
    nodes: tuple[Node, ...]
    fams: tuple[Family, ...]
    ladder: LadderResult
    rungs: tuple[RungRecord, ...]
    l: tuple[int, ...]
    horizon: Ordinal

    @property
    def steps(self) -> int:
        return self.ladder.steps


@dataclass(frozen=True)
class DefectReport:
    """An explicitly listed exceptional set; empty means exact agreement."""

    context: dict
    defects: tuple
    claim: str


class ColoringState:
    """Per-node color maps over an arena, built level by level."""

    def __init__(self, arena: Arena) -> None:
        self.arena = arena
        self.maps: dict[Node, dict[Node, int]] = {}
        self.built_levels: list[Ordinal] = []
        self.traces: dict[Ordinal, LimitStepTrace] = {}

    @property
    def built_up_to(self) -> Ordinal:
        return self.built_levels[-1]

    def color(self, x: Node, y: Node) -> int:
        return color_of(self, x, y)


def color_of(state: ColoringState, x: Node, y: Node) -> int:
    """The pair color: 1 off the chains, the higher node's map on them."""
    if x == y:
        raise ValueError("a pair needs two distinct nodes")
    if tree_leq(x, y):
        lower, higher = x, y
    elif tree_leq(y, x):
        lower, higher = y, x
    else:
        return 1
    if higher not in state.maps:
        raise ValueError(f"level {higher.height} not built")
    m = state.maps[higher]
    if lower not in m:
        raise ValueError(f"{lower!r} is not an arena restriction of {higher!r}")
    return m[lower]


def init_coloring(arena: Arena) -> ColoringState:
    state = ColoringState(arena)
    root = arena.level_nodes(ZERO)[0]
    state.maps[root] = {}
    state.built_levels.append(ZERO)
    return state


def _check_next(state: ColoringState, level: Ordinal) -> None:
    idx = state.arena.level_index(level)
    if idx == 0 or state.built_levels[-1] != state.arena.levels[idx - 1]:
        raise ValueError(
            f"wrong level order: {level} after {state.built_levels[-1]}"
        )


def extend_successor(state: ColoringState, level: Ordinal) -> ColoringState:
    """Copy the parent's map and color the parent 0.

    The parent is the node cut at the previous arena level, which in a
    sparse arena need not be one step down.
    """
    _check_next(state, level)
    if level.is_limit:
        raise ValueError(f"{level} is a limit level")
    prev = state.arena.levels[state.arena.level_index(level) - 1]
    for s in state.arena.level_nodes(level):
        parent = s.restrict(prev)
        m = dict(state.maps[parent])
        m[parent] = 0
        state.maps[s] = m
    state.built_levels.append(level)
    return state


def c_good(state: ColoringState, a: Sequence[Node], u: Node, v: Node) -> bool:
    """One constant on the block's lower half against u, the other on
    the upper half against v."""
    a = tuple(a)
    if len(a) < 2 or len(a) % 2:
        raise ValueError("block must have size 2n")
    n = len(a) // 2
    _, split, _ = node_meet_data(a[n - 1], a[n])
    if len(split) != 1:
        raise ValueError("block halves must disagree at a single point")
    delta = next(iter(split))
    _, duv, _ = node_meet_data(u, v)
    if duv != frozenset({delta}):
        raise ValueError(f"u and v must disagree exactly at {delta}")
    if not is_strictly_below(a[n - 1], u):
        raise ValueError("a(n-1) is not below u")
    if not is_strictly_below(a[2 * n - 1], v):
        raise ValueError("a(2n-1) is not below v")
    for i in (0, 1):
        if all(
            color_of(state, a[j], u) == i and color_of(state, a[n + j], v) == 1 - i
            for j in range(n)
        ):
            return True
    return False


def extend_limit(
    state: ColoringState,
    level: Ordinal,
    cat: TwoThinCatalog,
    steps: int,
) -> tuple[ColoringState, LimitStepTrace]:
    """The limit step: ladder, fences, parity recoloring, copies.

    Every node of the new level walks the rungs: inside the k-th window
    its map copies the cut at the next rung, except on the recolored
    set X_k (the fence plus the closure of the window blocks that fail
    goodness for some once-split pair), where node i gets its parity
    constant.  Whatever the rungs never reached is filled by copying
    the nearest higher cut, the topmost stretch defaulting to 0.
    """
    _check_next(state, level)
    if not level.is_limit:
        raise ValueError(f"{level} is not a limit level")
    arena = state.arena
    nodes = tuple(arena.level_nodes(level))
    fams = tuple(
        FamilyCatalog(tuple(entry_family(e) for e in cat)).distinct_restrictions(level)
    )
    required = max(len(nodes), len(fams))
    if steps < required:
        raise ValueError(
            f"insufficient rungs: {steps} given, need at least {required}"
            f" ({len(nodes)} nodes, {len(fams)} families)"
        )
    pool = [g for g in arena.levels if g < level]
    lad = build_ladder(level, fams, steps, level_pool=pool)
    alphas, fences = lad.alphas, lad.fences
    l = tuple(len(node_meet_data(nodes[0], s)[1]) % 2 for s in nodes)

    cmaps: dict[int, dict[Node, int]] = {}
    rungs = []
    for k in range(steps):
        lo, hi = alphas[k], alphas[k + 1]
        limit_i = min(k, len(nodes))

        e_blocks = []
        for fam in fams[:k]:
            for b in fam.blocks:
                bs = tuple(ho_sorted(b))
                if len(bs) < 2 or len(bs) % 2:
                    continue
                heights = [x.height for x in bs]
                if not (lo <= min(heights) and max(heights) < hi):
                    continue
                if set(bs) & fences[k + 1]:
                    continue
                if _ek_pair_exists(state, bs, nodes, limit_i, hi):
                    e_blocks.append(bs)

        seed: set[Node] = set()
        for b in e_blocks:
            seed |= set(b)
        x_set = set(fences[k]) | (set(close(seed, fams[:k])) if seed else set())
        if not fences[k] <= x_set:
            raise RuntimeError("construction bug: fence escaped its recolor set")
        if x_set & fences[k + 1]:
            raise RuntimeError("construction bug: recolor set meets the next fence")

        # (2) parity constants on the recolor set
        for i in range(limit_i):
            si = nodes[i]
            for x in x_set:
                if is_strictly_below(x, si):
                    if x in cmaps[i]:
                        raise RuntimeError("construction bug: rule 2 overwrite")
                    cmaps[i][x] = l[i]

        # (3) the rest of the window copies the cut at the next rung
        wlevels = [g for g in arena.levels if lo <= g < hi]
        for i in range(limit_i):
            si = nodes[i]
            ref = state.maps[si.restrict(hi)]
            for g in wlevels:
                x = si.restrict(g)
                if x in x_set or x in fences[k + 1] or x in cmaps[i]:
                    continue
                cmaps[i][x] = ref[x]

        # (4) node k starts out as the cut at the next rung, fence removed
        if k < len(nodes):
            ref = state.maps[nodes[k].restrict(hi)]
            cmaps[k] = {x: bit for x, bit in ref.items() if x not in fences[k + 1]}

        for i in range(min(k + 1, len(nodes))):
            expected = {
                nodes[i].restrict(g) for g in arena.levels if g < hi
            } - fences[k + 1]
            if set(cmaps[i]) != expected:
                raise RuntimeError(
                    f"construction bug: domain of node {i} drifted at rung {k}"
                )
        rungs.append(
            RungRecord(
                k,
                (lo, hi),
                tuple(e_blocks),
                frozenset(x_set),
                tuple((i, frozenset(cmaps[i])) for i in range(min(k + 1, len(nodes)))),
            )
        )

    # leftover: levels the rungs never reached, plus the last fence
    for i, si in enumerate(nodes):
        m = cmaps[i]
        for g in arena.levels:
            if not g < level:
                break
            x = si.restrict(g)
            if x in m:
                continue
            above = [h for h in arena.levels if g < h < level]
            if above:
                m[x] = state.maps[si.restrict(above[0])][x]
            else:
                m[x] = 0

    for i, si in enumerate(nodes):
        state.maps[si] = cmaps[i]
    state.built_levels.append(level)
    trace = LimitStepTrace(level, nodes, fams, lad, tuple(rungs), l, alphas[steps])
    state.traces[level] = trace
    return state, trace


def _ek_pair_exists(
    state: ColoringState,
    bs: tuple[Node, ...],
    nodes: tuple[Node, ...],
    limit_i: int,
    hi: Ordinal,
) -> bool:
    """Some once-split pair of already-running nodes sees bs fail goodness."""
    m = len(bs) // 2
    for i in range(limit_i):
        for j in range(limit_i):
            if i == j:
                continue
            si, sj = nodes[i], nodes[j]
            _, dset, _ = node_meet_data(si, sj)
            if len(dset) != 1:
                continue
            if not is_strictly_below(bs[m - 1], si):
                continue
            if not is_strictly_below(bs[2 * m - 1], sj):
                continue
            if not c_good(state, bs, si.restrict(hi), sj.restrict(hi)):
                return True
    return False


def build_to(
    state: ColoringState,
    cat: TwoThinCatalog,
    steps: int,
    through: Ordinal | None = None,
) -> ColoringState:
    """Run the recursion over every remaining level up to the target.

    The default target is the height bound itself: its nodes carry the
    colorings the branch walk reads off.
    """
    target = through if through is not None else state.arena.height_bound
    for g in state.arena.levels:
        if not state.built_up_to < g:
            continue
        if target < g:
            break
        if g.is_limit:
            extend_limit(state, g, cat, steps)
        else:
            extend_successor(state, g)
    return state


def coh_defect(state: ColoringState, s: Node, t: Node) -> DefectReport:
    """Exactly where the two chains' colorings disagree below s."""
    if s != t and not is_strictly_below(s, t):
        raise ValueError("incomparable input")
    defects: tuple = ()
    if s != t:
        ms, mt = state.maps.get(s), state.maps.get(t)
        if ms is None or mt is None:
            raise ValueError("both nodes must be built")
        defects = tuple(ho_sorted(x for x in ms if ms[x] != mt[x]))
    return DefectReport(
        context={"s": s, "t": t},
        defects=defects,
        claim="colorings of the two nodes agree below s off this set",
    )


def hom_audit(
    state: ColoringState,
    entry: TwoThinEntry,
    alpha: Ordinal,
    pair: tuple[Node, Node],
) -> DefectReport:
    """Blocks below alpha that miss the two-constant pattern at the pair.

    Blocks whose top is not below the pair's upper node are vacuous and
    never counted.
    """
    a0, a1 = pair
    if a0.height != alpha or a1.height != alpha:
        raise ValueError("pair must sit at the audited level")
    if ho_cmp(a0, a1) >= 0:
        raise ValueError("pair must be sorted in height order")
    _, dset, _ = node_meet_data(a0, a1)
    if dset != frozenset({entry.s.height}):
        raise ValueError(
            f"pair must disagree exactly at {entry.s.height}, got {sorted(dset)}"
        )
    n = entry.n
    defects = []
    for b in restrict_entry_blocks(entry, alpha):
        if not is_strictly_below(b[2 * n - 1], a1):
            continue
        good = any(
            all(
                color_of(state, b[j], a0) == i and color_of(state, b[n + j], a1) == 1 - i
                for j in range(n)
            )
            for i in (0, 1)
        )
        if not good:
            defects.append(b)
    return DefectReport(
        context={"s": entry.s, "n": n, "alpha": alpha, "pair": pair},
        defects=tuple(defects),
        claim="all other low blocks split their constants across the pair",
    )


def hom_containment_audit(
    state: ColoringState,
    trace: LimitStepTrace,
    entry: TwoThinEntry,
    pair: tuple[Node, Node],
) -> Certificate:
    """Defects may only live below the pair's working band or past the horizon.

    The band starts once the pair's nodes and the entry's family have all
    entered the construction and runs to the last rung; inside it the
    rung bookkeeping leaves no room for a failure.
    """
    report = hom_audit(state, entry, trace.level, pair)
    alphas = trace.ladder.alphas
    steps = trace.steps
    i = trace.nodes.index(pair[0])
    j = trace.nodes.index(pair[1])
    fam_r = entry_family(entry).restrict(trace.level)
    n_index = None
    for fi, fam in enumerate(trace.fams):
        if fam.fingerprint() == fam_r.fingerprint():
            n_index = fi
            break
    meta = {"level": trace.level, "i": i, "j": j, "family_index": n_index}
    if n_index is None or max(i, j, n_index) + 1 > steps:
        clause = Clause(
            "defects_within_predicted",
            True,
            {"note": "pair or family outside the rung horizon, nothing claimed"},
        )
        return Certificate("hom_containment", (clause,), meta)
    start = alphas[max(i, j, n_index) + 1]
    horizon = alphas[steps]
    strays = []
    for b in report.defects:
        top = max(x.height for x in b)
        if start <= top < horizon:
            strays.append(b)
    meta.update({"band_start": start, "horizon": horizon, "defects": len(report.defects)})
    clause = Clause("defects_within_predicted", not strays, {"strays": strays})
    return Certificate("hom_containment", (clause,), meta)


def structural_audit(state: ColoringState, trace: LimitStepTrace) -> Certificate:
    """Replay a limit step's bookkeeping against the finished maps.

    Checks the recorded domains, the window-by-window disagreement
    bound, the parity law for once-split pairs, and that every window
    block swallowed by a recolor set came out good for its pairs.
    """
    nodes = trace.nodes
    alphas = trace.ladder.alphas
    fences = trace.ladder.fences
    arena = state.arena
    clauses = []

    domain_hits = []
    for rec in trace.rungs:
        hi = alphas[rec.k + 1]
        for i, dom in rec.domains:
            expected = {
                nodes[i].restrict(g) for g in arena.levels if g < hi
            } - fences[rec.k + 1]
            if set(dom) != expected:
                domain_hits.append({"rung": rec.k, "node": i})
    clauses.append(Clause("domain_identity", not domain_hits, {"hits": domain_hits}))

    coh_hits = []
    for rec in trace.rungs:
        k = rec.k
        lo, hi = rec.window
        allowed = rec.x_set | fences[k + 1]
        for i in range(min(k + 1, len(nodes))):
            si = nodes[i]
            cut = state.maps[si.restrict(hi)]
            full = state.maps[si]
            for g in arena.levels:
                if not (lo <= g < hi):
                    continue
                x = si.restrict(g)
                if full[x] != cut[x] and x not in allowed:
                    coh_hits.append({"rung": k, "node": i, "at": x})
    clauses.append(Clause("coh_bound", not coh_hits, {"hits": coh_hits}))

    parity_hits = []
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if i == j:
                continue
            _, dset, _ = node_meet_data(nodes[i], nodes[j])
            if len(dset) == 1 and trace.l[j] != 1 - trace.l[i]:
                parity_hits.append({"i": i, "j": j})
    clauses.append(Clause("parity_soundness", not parity_hits, {"hits": parity_hits}))

    good_hits = []
    for rec in trace.rungs:
        k = rec.k
        limit_i = min(k, len(nodes))
        for fam in trace.fams[:k]:
            for b in fam.blocks:
                if not b <= rec.x_set:
                    continue
                bs = tuple(ho_sorted(b))
                m = len(bs) // 2
                for i in range(limit_i):
                    for j in range(limit_i):
                        if i == j:
                            continue
                        _, dset, _ = node_meet_data(nodes[i], nodes[j])
                        if len(dset) != 1:
                            continue
                        if not is_strictly_below(bs[m - 1], nodes[i]):
                            continue
                        if not is_strictly_below(bs[2 * m - 1], nodes[j]):
                            continue
                        if not c_good(state, bs, nodes[i], nodes[j]):
                            good_hits.append({"rung": k, "block": bs, "i": i, "j": j})
    clauses.append(Clause("recolored_blocks_good", not good_hits, {"hits": good_hits}))

    meta = {"level": trace.level, "steps": trace.steps, "nodes": len(nodes)}
    return Certificate("structural_audit", tuple(clauses), meta)


@dataclass(frozen=True)
class HomSelection:
    selected: tuple[int, ...]
    reports: tuple[DefectReport, ...]
    pattern_holds: bool
    failures: tuple


def homogeneous_extract(
    state: ColoringState,
    entry: TwoThinEntry,
    instances: Sequence[Sequence[tuple[Node, ...]]],
) -> HomSelection:
    """Select instances whose blocks dodge each other's defect sets.

    Each instance charges a finite set: coherence defects along its
    chains plus the low blocks its own top pair cannot split.  Kept
    instances pairwise avoid those sets, and the pairwise two-constant
    pattern on the kept ones is then verified outright.
    """
    n = entry.n
    entry_set = {frozenset(b) for b in entry.blocks}
    unions = []
    for x in instances:
        for b in x:
            if frozenset(b) not in entry_set:
                raise ValueError("foreign block")
        u: set[Node] = set()
        for b in x:
            u |= set(b)
        unions.append(u)
    sizes = {len(x) for x in instances}
    if len(sizes) > 1:
        raise ValueError("instances must have uniform size")
    for a, b in itertools.combinations(range(len(instances)), 2):
        if unions[a] & unions[b]:
            raise ValueError("instances overlap")

    avoid: list[frozenset[Node]] = []
    reports = []
    for xi, x in enumerate(instances):
        fa: set[Node] = set()
        for b in x:
            bs = tuple(b)
            for k in range(1, n):
                fa |= set(coh_defect(state, bs[0], bs[k]).defects)
            u0 = bs[n].restrict(bs[0].height)
            for k in range(n):
                fa |= set(coh_defect(state, u0, bs[n + k]).defects)
            rep = hom_audit(state, entry, bs[0].height, (bs[0], u0))
            for db in rep.defects:
                fa |= set(db)
        avoid.append(frozenset(fa))
        reports.append(
            DefectReport(
                context={"instance": xi},
                defects=tuple(ho_sorted(fa)),
                claim="other instances must stay off this set",
            )
        )

    selected: list[int] = []
    for xi in range(len(instances)):
        if all(
            not (unions[xi] & avoid[eta]) and not (unions[eta] & avoid[xi])
            for eta in selected
        ):
            selected.append(xi)

    failures = []
    for xa in selected:
        for xb in selected:
            if xa == xb:
                continue
            for ba in instances[xa]:
                for bb in instances[xb]:
                    if not is_strictly_below(ba[2 * n - 1], bb[2 * n - 1]):
                        continue
                    ok = any(
                        all(
                            color_of(state, ba[j], bb[k2]) == i
                            and color_of(state, ba[n + j], bb[n + k2]) == 1 - i
                            for j in range(n)
                            for k2 in range(n)
                        )
                        for i in (0, 1)
                    )
                    if not ok:
                        failures.append((xa, xb, tuple(ba), tuple(bb)))
    return HomSelection(tuple(selected), tuple(reports), not failures, tuple(failures))


@dataclass(frozen=True)
class Phi0Instance:
    """A finite candidate for the chain-with-pattern statement."""

    pairs: tuple[tuple[Node, int], ...]
    families: tuple[tuple[tuple[Node, ...], ...], ...]
    chain: tuple[Node, ...]
    xlists: tuple[tuple[tuple[tuple[Node, ...], ...], ...], ...]

    def __post_init__(self) -> None:
        if len(self.families) != len(self.pairs):
            raise ValueError("malformed instance: one family per (t, N) pair")
        if len(self.xlists) != len(self.chain):
            raise ValueError("malformed instance: one x-list row per chain node")
        for row in self.xlists:
            if len(row) != len(self.pairs):
                raise ValueError("malformed instance: row width must match the pairs")
            for i, cell in enumerate(row):
                fam = {tuple(b) for b in self.families[i]}
                for b in cell:
                    if tuple(b) not in fam:
                        raise ValueError("malformed instance: block outside its family")
                    if len(b) != 2 * self.pairs[i][1]:
                        raise ValueError("malformed instance: block arity mismatch")


def phi0_audit(state: ColoringState, inst: Phi0Instance) -> tuple[int, int] | None:
    """First chain-ordered pair whose x-lists pairwise split constants."""
    for a_i in range(len(inst.chain)):
        for b_i in range(a_i + 1, len(inst.chain)):
            if not is_strictly_below(inst.chain[a_i], inst.chain[b_i]):
                continue
            if _phi0_pair_ok(state, inst, a_i, b_i):
                return (a_i, b_i)
    return None


def _phi0_pair_ok(state: ColoringState, inst: Phi0Instance, a_i: int, b_i: int) -> bool:
    for i, (_t, big_n) in enumerate(inst.pairs):
        for a in inst.xlists[a_i][i]:
            for b in inst.xlists[b_i][i]:
                ok = any(
                    all(
                        color_of(state, a[k], b[k2]) == j
                        and color_of(state, a[big_n + k], b[big_n + k2]) == 1 - j
                        for k in range(big_n)
                        for k2 in range(big_n)
                    )
                    for j in (0, 1)
                )
                if not ok:
                    return False
    return True


def q_compatible(
    state: ColoringState,
    entry: TwoThinEntry,
    p: Sequence[tuple[Node, ...]],
    candidate: tuple[Node, ...],
) -> bool:
    """Would adding the candidate keep the condition pairwise split?"""
    entry_set = {frozenset(b) for b in entry.blocks}
    blocks = [tuple(b) for b in p] + [tuple(candidate)]
    for b in blocks:
        if frozenset(b) not in entry_set:
            raise ValueError("foreign block")
    n = entry.n
    for a, b in itertools.permutations(blocks, 2):
        if not is_strictly_below(a[2 * n - 1], b[2 * n - 1]):
            continue
        ok = any(
            all(
                color_of(state, a[k], b[k2]) == i
                and color_of(state, a[n + k], b[n + k2]) == 1 - i
                for k in range(n)
                for k2 in range(n)
            )
            for i in (0, 1)
        )
        if not ok:
            return False
    return True
