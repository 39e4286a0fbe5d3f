"""Scenario files: one JSON document describing a whole experiment.

A scenario names the arena, the source families, the filter requests,
the transform pairs, the branch, and the search instances; each CLI
command recomputes the pipeline up to its stage from the same data, so
any command on the same file is deterministic down to the byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .arena import Arena, Node
from .certs import Certificate, Clause
from .closure import Family, FamilyCatalog
from .coloring import (
    ColoringState,
    build_to,
    coh_defect,
    hom_audit,
    hom_containment_audit,
    init_coloring,
    structural_audit,
)
from .forcing import (
    FilterSim,
    FreeRequest,
    HitRequest,
    ProtectRequest,
    club_thin,
    extract_family,
    family_audit,
    run_generic,
)
from .jsonio import (
    arena_from_json,
    branch_from_json,
    entry_from_json,
    family_from_json,
    ground_from_json,
    ladder_from_json,
    node_from_json,
    ordinal_from_json,
    pr1_from_json,
    write_coloring_tsv,
    write_json,
    write_pi_tsv,
)
from .ladder import audit_ladder, build_ladder
from .ordinals import Ordinal, format_ordinal
from .pr1 import Branch, PairColoring, induce_pi, pi_audit, pr1_search
from .twothin import TwoThinCatalog, audit_two_thin, build_two_thin

__all__ = [
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "scenario_run",
    "stage_color",
    "stage_family",
    "stage_pr1",
    "stage_two_thin",
]

COMMANDS = ("build-family", "two-thin", "color", "audit", "pr1", "report")


class ScenarioError(Exception):
    """The scenario file cannot be used as given."""


@dataclass
class Scenario:
    path: str
    arena: Arena | None
    families: tuple[Family, ...]
    clubs: tuple[tuple[Ordinal, ...] | None, ...]
    two_thin_pairs: tuple[tuple[Node, int], ...]
    branch: Branch | None
    requests: tuple
    pr1: tuple[dict, ...]
    large_threshold: int | None
    seed: int
    steps: int | None
    audit: dict
    ladder_check: dict | None


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ScenarioError(f"{path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: line {e.lineno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be an object")

    def parse(key: str, fn, default=None):
        if key not in raw:
            return default
        try:
            return fn(raw[key])
        except (ValueError, KeyError, TypeError, IndexError) as e:
            raise ScenarioError(f"{path}: key {key!r}: {e}") from None

    arena = parse("arena", arena_from_json)
    families = parse(
        "families", lambda v: tuple(family_from_json(f) for f in v), ()
    )
    clubs = parse(
        "clubs",
        lambda v: tuple(
            tuple(ordinal_from_json(x) for x in c) if c is not None else None for c in v
        ),
        (),
    )
    two_thin_pairs = parse("two_thin_pairs", _pairs_from_json, ())
    branch = parse("branch", branch_from_json)
    pr1 = parse("pr1", lambda v: tuple(v if isinstance(v, list) else [v]), ())
    large = parse("large_threshold", int)
    seed = parse("seed", int, 0)
    steps = parse("steps", int)
    audit = parse("audit", dict, {})
    ladder_check = parse("ladder_check", dict)

    requests = []
    for i, r in enumerate(raw.get("requests", [])):
        try:
            requests.append(_request_from_json(r, families))
        except (ValueError, KeyError, TypeError, IndexError) as e:
            raise ScenarioError(f"{path}: request {i}: {e}") from None

    return Scenario(
        path=str(path),
        arena=arena,
        families=families,
        clubs=clubs,
        two_thin_pairs=two_thin_pairs,
        branch=branch,
        requests=tuple(requests),
        pr1=pr1,
        large_threshold=large,
        seed=seed,
        steps=steps,
        audit=audit,
        ladder_check=ladder_check,
    )


def _pairs_from_json(v: Any) -> tuple[tuple[Node, int], ...]:
    out = []
    for p in v:
        if isinstance(p, dict):
            out.append((node_from_json(p["s"]), int(p["n"])))
        else:
            out.append((node_from_json(p[0]), int(p[1])))
    return tuple(out)


def _request_from_json(r: dict, families: Sequence[Family]):
    kind = r.get("kind")
    if kind == "hit":
        fam = families[int(r["family"])]
        return HitRequest(fam, frozenset(ground_from_json(x) for x in r["block"]))
    if kind == "protect":
        idxs = r.get("families", list(range(len(families))))
        return ProtectRequest(
            frozenset(ground_from_json(x) for x in r.get("ground", [])),
            tuple(families[int(j)] for j in idxs),
            r.get("horizon"),
        )
    if kind == "free":
        fam = families[int(r["family"])]
        return FreeRequest(
            fam,
            frozenset(ground_from_json(x) for x in r["block"]),
            r.get("bit"),
        )
    raise ValueError(f"unknown request kind {kind!r}")


def stage_family(sc: Scenario) -> tuple[FamilyCatalog, FilterSim, Certificate]:
    """Run the filter, extract the sources, thin along the clubs."""
    fs = run_generic(sc.requests, sc.seed)
    thinned = []
    for i, fam in enumerate(sc.families):
        got = extract_family(fs, fam)
        club = sc.clubs[i] if i < len(sc.clubs) else None
        thinned.append(club_thin(got, club) if club else got)
    catalog = FamilyCatalog(tuple(thinned))

    cfg = sc.audit.get("family", {})
    if "alpha" in cfg:
        alpha = ordinal_from_json(cfg["alpha"])
    elif sc.arena is not None:
        alpha = sc.arena.height_bound
    else:
        tops = [
            max(x if isinstance(x, Ordinal) else x.height for x in b)
            for fam in catalog
            for b in fam.blocks
        ]
        alpha = max(tops).succ() if tops else Ordinal()
    targets = tuple(family_from_json(t) for t in cfg.get("targets", []))
    samples = tuple(
        (
            frozenset(ground_from_json(x) for x in s.get("ground", [])),
            [catalog[int(j)] for j in s.get("families", [])],
        )
        for s in cfg.get("close_samples", [])
    )
    cert = family_audit(
        catalog,
        alpha,
        targets,
        samples,
        horizon=cfg.get("horizon"),
        large=cfg.get("large"),
    )
    return catalog, fs, cert


def stage_two_thin(sc: Scenario, catalog: FamilyCatalog) -> tuple[TwoThinCatalog, Certificate]:
    if sc.arena is None:
        raise ScenarioError(f"{sc.path}: the two-thin stage needs an arena")
    cat = build_two_thin(catalog, sc.arena, sc.two_thin_pairs)
    cfg = sc.audit.get("two_thin", {})
    alpha = ordinal_from_json(cfg["alpha"]) if "alpha" in cfg else sc.arena.height_bound
    targets = tuple(entry_from_json(t) for t in cfg.get("targets", []))
    samples = tuple(
        (
            frozenset(node_from_json(x) for x in s.get("ground", [])),
            tuple(int(j) for j in s.get("entries", [])),
        )
        for s in cfg.get("close_samples", [])
    )
    cert = audit_two_thin(
        cat,
        sc.arena,
        alpha,
        targets,
        samples,
        large=cfg.get("large"),
        horizon=cfg.get("horizon"),
    )
    return cat, cert


def stage_color(sc: Scenario, cat: TwoThinCatalog) -> tuple[ColoringState, Certificate]:
    if sc.arena is None:
        raise ScenarioError(f"{sc.path}: the color stage needs an arena")
    state = init_coloring(sc.arena)
    build_to(state, cat, sc.steps)
    clauses = []
    for level in state.built_levels:
        trace = state.traces.get(level)
        if trace is None:
            continue
        cert = structural_audit(state, trace)
        for c in cert.clauses:
            clauses.append(Clause(f"{format_ordinal(level)}/{c.name}", c.passed, c.detail))
    if not clauses:
        clauses.append(Clause("successor_steps_only", True, {}))
    meta = {
        "levels_built": [format_ordinal(g) for g in state.built_levels],
        "limit_levels": [format_ordinal(g) for g in state.traces],
    }
    return state, Certificate("color", tuple(clauses), meta)


def stage_pr1(
    sc: Scenario, state: ColoringState
) -> tuple[PairColoring, list, Certificate]:
    if sc.branch is None:
        raise ScenarioError(f"{sc.path}: the pr1 stage needs a branch")
    pi = induce_pi(state, sc.branch)
    clauses = []
    witnesses = []
    for idx, spec in enumerate(sc.pr1):
        inst = pr1_from_json(spec)
        w = pr1_search(pi, inst)
        witnesses.append(w)
        if "expect" in spec:
            exp = tuple(spec["expect"]) if spec["expect"] is not None else None
            ok = w == exp
        else:
            ok = w is not None
        clauses.append(
            Clause(
                f"instance_{idx}",
                ok,
                {"witness": list(w) if w else None, "eta": inst.eta, "n": inst.n},
            )
        )
    picfg = sc.audit.get("pi", {})
    fams = tuple(
        tuple(ordinal_from_json(x) for x in b) for b in picfg.get("families", [])
    )
    large = picfg.get("large", sc.large_threshold if fams else None)
    picert = pi_audit(pi, fams, large=large)
    for c in picert.clauses:
        clauses.append(Clause(f"pi/{c.name}", c.passed, c.detail))
    meta = {"instances": len(sc.pr1), "levels": len(pi.levels)}
    return pi, witnesses, Certificate("pr1", tuple(clauses), meta)


def stage_audit(
    sc: Scenario,
    family_cert: Certificate,
    twothin: TwoThinCatalog | None,
    twothin_cert: Certificate | None,
    state: ColoringState | None,
) -> Certificate:
    """Bundle every configured audit into one certificate."""
    clauses = []

    if sc.ladder_check is not None:
        cfg = sc.ladder_check
        fams = tuple(
            sc.families[f] if isinstance(f, int) else family_from_json(f)
            for f in cfg.get("families", [])
        )
        alpha = ordinal_from_json(cfg["alpha"])
        pool = (
            [ordinal_from_json(g) for g in cfg["level_pool"]]
            if "level_pool" in cfg
            else None
        )
        if "result" in cfg:
            result = ladder_from_json(cfg["result"])
        else:
            result = build_ladder(alpha, fams, int(cfg["steps"]), pool)
        universe = (
            [ground_from_json(x) for x in cfg["universe"]] if "universe" in cfg else None
        )
        for c in audit_ladder(result, fams, universe).clauses:
            clauses.append(Clause(f"ladder/{c.name}", c.passed, c.detail))

    for c in family_cert.clauses:
        clauses.append(Clause(f"family/{c.name}", c.passed, c.detail))
    if twothin_cert is not None:
        for c in twothin_cert.clauses:
            clauses.append(Clause(f"two_thin/{c.name}", c.passed, c.detail))

    for i, item in enumerate(sc.audit.get("coh", [])):
        if state is None:
            raise ScenarioError(f"{sc.path}: coherence audits need an arena")
        rep = coh_defect(state, node_from_json(item["s"]), node_from_json(item["t"]))
        heights = [x.height for x in rep.defects]
        if "expect" in item:
            ok = heights == [ordinal_from_json(e) for e in item["expect"]]
        else:
            ok = True
        clauses.append(
            Clause(f"coh_{i}", ok, {"defects": rep.defects, "expect": item.get("expect")})
        )

    for i, item in enumerate(sc.audit.get("hom", [])):
        if state is None or twothin is None:
            raise ScenarioError(f"{sc.path}: hom audits need an arena")
        entry = twothin[int(item["entry"])]
        pair = (node_from_json(item["pair"][0]), node_from_json(item["pair"][1]))
        alpha = (
            ordinal_from_json(item["alpha"]) if "alpha" in item else pair[0].height
        )
        trace = state.traces.get(alpha)
        if trace is not None:
            cert = hom_containment_audit(state, trace, entry, pair)
            for c in cert.clauses:
                clauses.append(Clause(f"hom_{i}/{c.name}", c.passed, c.detail))
        else:
            rep = hom_audit(state, entry, alpha, pair)
            clauses.append(Clause(f"hom_{i}", True, {"defects": rep.defects}))

    if not clauses:
        clauses.append(Clause("nothing_configured", True, {}))
    return Certificate("audit", tuple(clauses), {"scenario": sc.path})


def scenario_run(path: str | Path, command: str, outdir: str | Path) -> int:
    """Run one command against one scenario; returns the exit status."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    try:
        cert = _dispatch(load_scenario(path), command, outdir)
    except (ScenarioError, ValueError, KeyError, IndexError) as e:
        (outdir / f"{command}.cert.json").unlink(missing_ok=True)
        write_json(outdir / f"{command}.error.json", {"error": str(e)})
        print(f"scenario error: {e}")
        return 3
    (outdir / f"{command}.error.json").unlink(missing_ok=True)
    write_json(outdir / f"{command}.cert.json", cert)
    print(cert.summary())
    return 0 if cert.passed else 2


def _dispatch(sc: Scenario, command: str, outdir: Path) -> Certificate:
    catalog, fs, family_cert = stage_family(sc)
    if command == "build-family":
        write_json(
            outdir / "families.json",
            {"catalog": list(catalog), "filter_log": fs.log},
        )
        return family_cert

    if command == "two-thin":
        cat, cert = stage_two_thin(sc, catalog)
        write_json(outdir / "two_thin.json", {"entries": list(cat)})
        return cert

    if command == "color":
        cat, _ = stage_two_thin(sc, catalog)
        state, cert = stage_color(sc, cat)
        write_coloring_tsv(outdir / "coloring.tsv", state)
        write_json(
            outdir / "traces.json",
            {format_ordinal(g): t for g, t in state.traces.items()},
        )
        return cert

    if command == "audit":
        cat = None
        twothin_cert = None
        state = None
        if sc.arena is not None:
            cat, twothin_cert = stage_two_thin(sc, catalog)
            state, _ = stage_color(sc, cat)
        return stage_audit(sc, family_cert, cat, twothin_cert, state)

    if command == "pr1":
        cat, _ = stage_two_thin(sc, catalog)
        state, _ = stage_color(sc, cat)
        pi, _witnesses, cert = stage_pr1(sc, state)
        write_pi_tsv(outdir / "pi.tsv", pi)
        return cert

    # report: everything, plus figures next to the delimited dumps
    from .report import render_ladder_windows, render_pi_heatmap

    cat, twothin_cert = stage_two_thin(sc, catalog)
    state, color_cert = stage_color(sc, cat)
    write_json(outdir / "families.json", {"catalog": list(catalog), "filter_log": fs.log})
    write_json(outdir / "two_thin.json", {"entries": list(cat)})
    write_coloring_tsv(outdir / "coloring.tsv", state)
    write_json(
        outdir / "traces.json", {format_ordinal(g): t for g, t in state.traces.items()}
    )
    artifacts = ["families.json", "two_thin.json", "coloring.tsv", "traces.json"]
    stage_pass = {
        "family": family_cert.passed,
        "two_thin": twothin_cert.passed,
        "color": color_cert.passed,
    }
    if sc.branch is not None:
        pi, _witnesses, pr1_cert = stage_pr1(sc, state)
        write_pi_tsv(outdir / "pi.tsv", pi)
        artifacts.append("pi.tsv")
        stage_pass["pr1"] = pr1_cert.passed
        render_pi_heatmap(pi, outdir / "pi_heatmap.png")
        artifacts.append("pi_heatmap.png")
    if state.traces:
        render_ladder_windows(state.traces, outdir / "ladder_windows.png")
        artifacts.append("ladder_windows.png")
    clauses = (
        Clause("artifacts_written", True, {"files": artifacts}),
        Clause("all_audits_passed", all(stage_pass.values()), {"stages": stage_pass}),
    )
    return Certificate("report", clauses, {"scenario": sc.path})
