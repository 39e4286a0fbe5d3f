"""Transport of ordinal families onto the tree and the catalog audit."""

from __future__ import annotations

import random

import pytest

from treepart.arena import Node
from treepart.closure import Family, FamilyCatalog
from treepart.ordinals import fin, omega
from treepart.twothin import (
    TwoThinCatalog,
    TwoThinEntry,
    audit_two_thin,
    build_two_thin,
    entry_family,
    height_bijection,
    project_family,
    restrict_entry_blocks,
)

from conftest import make_arena, plant_entry


def N(h: int, *supp: int) -> Node:
    return Node(fin(h), frozenset(fin(c) for c in supp))


def blk(*xs: int) -> frozenset:
    return frozenset(fin(x) for x in xs)


ARENA = make_arena({0}, 1, 8)  # bound w, levels 0..7
ROOT = N(0)


class TestBijection:
    def test_enumeration_order(self):
        bij = height_bijection(ARENA)
        assert len(bij) == 15  # 1 + 2 per successor level
        assert bij.node_at(0) == N(0)
        assert bij.node_at(1) == N(1)
        assert bij.node_at(2) == N(1, 0)
        assert bij.node_at(3) == N(2)
        assert bij.node_at(4) == N(2, 0)
        assert bij.node_at(14) == N(7, 0)

    def test_heights_nondecreasing(self):
        bij = height_bijection(ARENA)
        hs = [bij.node_at(i).height for i in range(len(bij))]
        assert hs == sorted(hs)

    def test_bound_level_not_enumerated(self):
        bij = height_bijection(ARENA)
        assert all(nd.height < omega() for nd in bij.nodes)

    def test_index_round_trip(self):
        bij = height_bijection(ARENA)
        for i in range(len(bij)):
            assert bij.index_of(bij.node_at(i)) == i

    def test_foreign_node(self):
        bij = height_bijection(ARENA)
        with pytest.raises(ValueError, match="not an arena node"):
            bij.index_of(N(50))


class TestProject:
    BIJ = height_bijection(ARENA)

    def test_survivors(self):
        # indices 3,6 land on (2,{}),(3,{0}): a two-chain split at the root
        fam = Family((blk(1, 2), blk(3, 6), blk(7, 10), blk(11, 14)))
        out = project_family(self.BIJ, fam, ROOT, 1)
        assert out == (
            (N(2), N(3, 0)),
            (N(4), N(5, 0)),
            (N(6), N(7, 0)),
        )

    def test_same_level_pair_dropped(self):
        # (1,{}),(1,{0}) never splits: no height step between the halves
        fam = Family((blk(1, 2),))
        assert project_family(self.BIJ, fam, ROOT, 1) == ()

    def test_wrong_side_dropped(self):
        # index 4 is (2,{0}), on the 1-side, so it cannot open the block
        fam = Family((blk(4, 7),))
        assert project_family(self.BIJ, fam, ROOT, 1) == ()

    def test_wrong_arity_dropped(self):
        fam = Family((blk(3, 6, 9),))
        assert project_family(self.BIJ, fam, ROOT, 1) == ()

    def test_out_of_range_dropped(self):
        fam = Family((blk(20, 30),))
        assert project_family(self.BIJ, fam, ROOT, 1) == ()

    def test_infinite_ordinal_dropped(self):
        fam = Family((frozenset({omega(), omega().succ()}),))
        assert project_family(self.BIJ, fam, ROOT, 1) == ()


class TestEntry:
    def test_validation(self):
        with pytest.raises(ValueError, match="n must be"):
            TwoThinEntry(ROOT, 0, (), "even", 0)
        with pytest.raises(ValueError, match="parity"):
            TwoThinEntry(ROOT, 1, (), "both", 0)

    def test_entry_family_checked(self):
        e = TwoThinEntry(ROOT, 1, ((N(2), N(3, 0)), (N(4), N(5, 0))), "even", 0)
        fam = entry_family(e)
        assert fam.blocks == (frozenset({N(2), N(3, 0)}), frozenset({N(4), N(5, 0)}))

    def test_restrict_blocks(self):
        e = TwoThinEntry(ROOT, 1, ((N(2), N(3, 0)), (N(4), N(5, 0))), "even", 0)
        assert restrict_entry_blocks(e, fin(4)) == ((N(2), N(3, 0)),)
        assert restrict_entry_blocks(e, fin(6)) == e.blocks


class TestBuild:
    def test_parity_split(self):
        fam = Family((blk(3, 6), blk(7, 10), blk(11, 14)))
        cat = build_two_thin(FamilyCatalog((fam,)), ARENA, [(ROOT, 1)])
        assert len(cat) == 2
        even, odd = cat[0], cat[1]
        assert (even.parity, odd.parity) == ("even", "odd")
        assert even.blocks == ((N(2), N(3, 0)), (N(6), N(7, 0)))
        assert odd.blocks == ((N(4), N(5, 0)),)
        assert even.source == odd.source == 0

    def test_empty_half_dropped(self):
        fam = Family((blk(3, 6),))
        cat = build_two_thin(FamilyCatalog((fam,)), ARENA, [(ROOT, 1)])
        assert [e.parity for e in cat] == ["even"]

    def test_no_survivors_no_entries(self):
        fam = Family((blk(1, 2),))
        cat = build_two_thin(FamilyCatalog((fam,)), ARENA, [(ROOT, 1)])
        assert len(cat) == 0

    def test_split_restores_separation(self):
        # consecutive survivors share no height gap, but either parity
        # class alone is separated by the skipped block between them
        fam = Family((blk(3, 6), blk(7, 10), blk(11, 14)))
        cat = build_two_thin(FamilyCatalog((fam,)), ARENA, [(ROOT, 1)])
        for e in cat:
            for a, b in zip(e.blocks, e.blocks[1:]):
                assert max(x.height for x in a) < min(x.height for x in b)


class TestAudit:
    @pytest.fixture()
    def cat(self):
        fam = Family((blk(3, 6), blk(7, 10), blk(11, 14)))
        return build_two_thin(FamilyCatalog((fam,)), ARENA, [(ROOT, 1)])

    def test_clause_names(self, cat):
        cert = audit_two_thin(cat, ARENA, omega())
        assert [c.name for c in cert.clauses] == [
            "i_restriction_count",
            "ii_target_overlap",
            "iii_closure_bounded",
            "iv_non_overlapping",
        ]
        assert cert.passed

    def test_restriction_count(self, cat):
        cert = audit_two_thin(cat, ARENA, fin(4))
        # below 4 the even entry keeps one block, the odd entry none
        counts = next(c for c in cert.clauses if c.name == "i_restriction_count")
        assert counts.detail["count"] == 2

    def test_target_overlap_threshold(self, cat):
        target = cat[0]
        good = audit_two_thin(cat, ARENA, omega(), targets=[target], large=2)
        assert good.passed
        strict = audit_two_thin(cat, ARENA, omega(), targets=[target], large=3)
        assert not strict.passed

    def test_closure_horizon(self, cat):
        sample = (frozenset({N(2)}), [0])
        good = audit_two_thin(cat, ARENA, omega(), close_samples=[sample], horizon=4)
        assert good.passed
        tight = audit_two_thin(cat, ARENA, omega(), close_samples=[sample], horizon=1)
        assert not tight.passed

    def test_tampered_shape_rejected(self):
        bad = TwoThinEntry(ROOT, 1, ((N(3, 0), N(2)),), "even", 0)
        cert = audit_two_thin(TwoThinCatalog((bad,)), ARENA, omega())
        clause = next(c for c in cert.clauses if c.name == "iv_non_overlapping")
        assert not clause.passed
        assert clause.detail["hits"][0]["reason"] == "not an X-shape"

    def test_tampered_overlap_rejected(self):
        bad = TwoThinEntry(
            ROOT, 1, ((N(2), N(5, 0)), (N(4), N(7, 0))), "even", 0
        )
        cert = audit_two_thin(TwoThinCatalog((bad,)), ARENA, omega())
        clause = next(c for c in cert.clauses if c.name == "iv_non_overlapping")
        assert not clause.passed
        reasons = {h["reason"] for h in clause.detail["hits"]}
        assert "height overlap with the next block" in reasons


class TestPlanted:
    def test_planted_entries_pass_audit(self):
        for seed in range(60):
            rng = random.Random(seed)
            arena = make_arena({0, 2, 5}, rng.choice([1, 2]), 8)
            above = [h for h in arena.heights]
            e = plant_entry(rng, arena, rng.choice([1, 2]), above, 0, "even")
            if e is None:
                continue
            cert = audit_two_thin(TwoThinCatalog((e,)), arena, arena.height_bound)
            assert cert.passed, f"seed {seed}: {[c.name for c in cert.clauses if not c.passed]}"
