"""Serialization: canonical JSON forms, text labels, and TSV dumps.

Ordinals travel as [[exponent, coefficient], ...] term lists (inputs may
also be bare ints or the compact text form), nodes as {"h", "supp"}
objects, families as {"flavor", "root", "blocks"}.  Everything written
to disk goes through one canonical dumper so reruns are byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any

from .arena import Arena, Node, ho_sorted
from .certs import Certificate, Clause
from .closure import Family, Ground, ground_sorted
from .ladder import LadderResult
from .ordinals import Ordinal, format_ordinal, parse_ordinal
from .pr1 import Branch, PairColoring, Pr1Instance
from .twothin import TwoThinEntry

__all__ = [
    "arena_from_json",
    "branch_from_json",
    "canonical_dumps",
    "encode",
    "entry_from_json",
    "family_from_json",
    "ground_from_json",
    "ladder_from_json",
    "node_from_json",
    "ordinal_from_json",
    "pr1_from_json",
    "write_coloring_tsv",
    "write_json",
    "write_pi_tsv",
]


def ordinal_from_json(v: Any) -> Ordinal:
    if isinstance(v, bool):
        raise ValueError(f"not an ordinal: {v!r}")
    if isinstance(v, int):
        return parse_ordinal(v)
    if isinstance(v, str):
        return parse_ordinal(v)
    if isinstance(v, list):
        return Ordinal(tuple((int(e), int(c)) for e, c in v))
    raise ValueError(f"not an ordinal: {v!r}")


def node_from_json(v: Any) -> Node:
    if not isinstance(v, dict) or "h" not in v:
        raise ValueError(f"not a node: {v!r}")
    supp = frozenset(ordinal_from_json(c) for c in v.get("supp", []))
    return Node(ordinal_from_json(v["h"]), supp)


def ground_from_json(v: Any) -> Ground:
    if isinstance(v, dict):
        return node_from_json(v)
    return ordinal_from_json(v)


def family_from_json(v: Any) -> Family:
    if isinstance(v, list):
        v = {"blocks": v}
    blocks = tuple(frozenset(ground_from_json(x) for x in b) for b in v["blocks"])
    flavor = v.get("flavor", "non_overlapping")
    root = frozenset(ground_from_json(x) for x in v.get("root", []))
    return Family(blocks, flavor, root)


def arena_from_json(v: Any) -> Arena:
    coords = frozenset(ordinal_from_json(c) for c in v["coords"])
    bound = ordinal_from_json(v["height_bound"])
    levels = tuple(ordinal_from_json(g) for g in v["levels"])
    return Arena(coords, bound, levels)


def branch_from_json(v: Any) -> Branch:
    if isinstance(v, list):
        return Branch(frozenset(ordinal_from_json(c) for c in v))
    return Branch(frozenset(ordinal_from_json(c) for c in v.get("support", [])))


def entry_from_json(v: Any) -> TwoThinEntry:
    blocks = tuple(tuple(node_from_json(x) for x in b) for b in v["blocks"])
    return TwoThinEntry(
        node_from_json(v["s"]),
        int(v["n"]),
        blocks,
        v.get("parity", "even"),
        int(v.get("source", 0)),
    )


def ladder_from_json(v: Any) -> LadderResult:
    alphas = tuple(ordinal_from_json(a) for a in v["alphas"])
    fences = tuple(frozenset(ground_from_json(x) for x in f) for f in v["fences"])
    corrections = tuple(bool(b) for b in v.get("corrections", [False] * len(alphas)))
    return LadderResult(ordinal_from_json(v["alpha"]), alphas, fences, corrections)


def pr1_from_json(v: Any) -> Pr1Instance:
    tuples = tuple(tuple(ordinal_from_json(x) for x in t) for t in v["tuples"])
    return Pr1Instance(int(v["n"]), tuples, int(v["eta"]), int(v.get("kappa", 2)))


def encode(obj: Any) -> Any:
    """Anything the package produces, as plain JSON data."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Ordinal):
        return [[e, c] for e, c in obj.terms]
    if isinstance(obj, Node):
        return {"h": encode(obj.height), "supp": [encode(c) for c in sorted(obj.support)]}
    if isinstance(obj, Family):
        return {
            "flavor": obj.flavor,
            "root": [encode(x) for x in ground_sorted(obj.root)],
            "blocks": [[encode(x) for x in ground_sorted(b)] for b in obj.blocks],
        }
    if isinstance(obj, Certificate):
        return {
            "name": obj.name,
            "passed": obj.passed,
            "clauses": [encode(c) for c in obj.clauses],
            "meta": encode(obj.meta),
        }
    if isinstance(obj, Clause):
        return {"name": obj.name, "pass": obj.passed, "witness": encode(obj.detail)}
    if isinstance(obj, PairColoring):
        return {
            "levels": [encode(g) for g in obj.levels],
            "values": [[encode(a), encode(b), bit] for a, b, bit in obj.pairs()],
        }
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {_key_text(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        try:
            items = ground_sorted(obj)
        except TypeError:
            items = sorted(obj, key=lambda x: canonical_dumps(encode(x)))
        return [encode(x) for x in items]
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    return str(obj)


def _key_text(k: Any) -> str:
    if isinstance(k, str):
        return k
    if isinstance(k, Ordinal):
        return format_ordinal(k)
    if isinstance(k, Node):
        return repr(k)
    return str(k)


def canonical_dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.write_text(canonical_dumps(encode(obj)))
    return path


def write_coloring_tsv(path: str | Path, state) -> Path:
    """Sorted (s, x, color) triples, one per line."""
    lines = ["s\tx\tcolor"]
    for level in state.built_levels:
        for s in state.arena.level_nodes(level):
            m = state.maps.get(s)
            if m is None:
                continue
            for x in ho_sorted(m):
                lines.append(f"{s!r}\t{x!r}\t{m[x]}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_pi_tsv(path: str | Path, pi: PairColoring) -> Path:
    lines = ["alpha\tbeta\tcolor"]
    for a, b, bit in pi.pairs():
        lines.append(f"{format_ordinal(a)}\t{format_ordinal(b)}\t{bit}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path
