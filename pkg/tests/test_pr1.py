"""Branch-induced pair coloring and the partition witness search."""

from __future__ import annotations

import random

import pytest

from treepart.coloring import coh_defect, init_coloring
from treepart.ordinals import ZERO, Ordinal, fin, omega
from treepart.pr1 import Branch, PairColoring, Pr1Instance, induce_pi, pi_audit, pr1_search

from conftest import make_arena
from oracles import pr1_search_naive

W = omega()


def wp(k: int) -> Ordinal:
    return Ordinal(((1, 1), (0, k))) if k else W


@pytest.fixture(scope="module")
def pi(pipeline_state):
    _, _, state = pipeline_state
    return induce_pi(state, Branch(frozenset({ZERO})))


class TestBranch:
    def test_node_at_filters_support(self):
        br = Branch(frozenset({fin(2), fin(5)}))
        assert br.node_at(fin(4)).support == {fin(2)}
        assert br.node_at(fin(1)).support == frozenset()
        assert br.node_at(W).support == {fin(2), fin(5)}


class TestInduce:
    def test_branch_outside_coords(self, pipeline_state):
        _, _, state = pipeline_state
        with pytest.raises(ValueError, match="branch leaves arena"):
            induce_pi(state, Branch(frozenset({fin(5)})))

    def test_state_must_reach_the_bound(self):
        arena = make_arena({0}, 1, 4)
        state = init_coloring(arena)
        with pytest.raises(ValueError, match="built through the height bound"):
            induce_pi(state, Branch(frozenset()))

    def test_domain_is_the_levels_below_the_bound(self, pi, pipeline_state):
        arena, _, _ = pipeline_state
        assert pi.levels == arena.heights
        assert len(pi.levels) == 18
        assert len(pi.values) == 18 * 17 // 2


class TestPairColoring:
    def test_symmetric(self, pi):
        assert pi.pi(fin(3), W) == pi.pi(W, fin(3))

    def test_identity_rejected(self, pi):
        with pytest.raises(ValueError, match="distinct"):
            pi.pi(fin(3), fin(3))

    def test_outside_domain(self, pi):
        with pytest.raises(ValueError, match="outside the coloring domain"):
            pi.pi(fin(3), omega(coeff=2))

    def test_pairs_sorted_stream(self, pi):
        rows = list(pi.pairs())
        assert len(rows) == len(pi.values)
        assert rows == sorted(rows)

    def test_pinned_ones(self, pi):
        # the w recoloring is the only source of 1s on this branch
        ones = {(a, b) for a, b, bit in pi.pairs() if bit == 1}
        expected = {(fin(k), wp(j)) for k in (3, 5, 7) for j in range(8)}
        assert ones == expected


class TestInstanceValidation:
    def test_kappa(self):
        with pytest.raises(ValueError, match="two colors"):
            Pr1Instance(1, ((fin(1),),), 0, kappa=3)

    def test_eta(self):
        with pytest.raises(ValueError, match="eta"):
            Pr1Instance(1, ((fin(1),),), 2)

    def test_n(self):
        with pytest.raises(ValueError, match="n must be"):
            Pr1Instance(0, (), 0)

    def test_arity(self):
        with pytest.raises(ValueError, match="entries"):
            Pr1Instance(2, ((fin(1),),), 0)

    def test_ascending(self):
        with pytest.raises(ValueError, match="strictly increase"):
            Pr1Instance(2, ((fin(2), fin(1)),), 0)

    def test_disjoint(self):
        with pytest.raises(ValueError, match="disjoint"):
            Pr1Instance(1, ((fin(1),), (fin(1),)), 0)


class TestSearch:
    def test_pinned_witnesses(self, pi):
        cases = [
            (1, ((fin(2),), (fin(3),), (W,)), 1, (1, 2)),
            (1, ((fin(3),), (fin(5),)), 0, (0, 1)),
            (2, ((fin(3), fin(5)), (W, wp(1))), 1, (0, 1)),
            (2, ((fin(0), fin(1)), (fin(2), fin(4))), 0, (0, 1)),
        ]
        for n, tuples, eta, expect in cases:
            assert pr1_search(pi, Pr1Instance(n, tuples, eta)) == expect

    def test_no_witness(self, pi):
        # {3} x {w} is all 1s, so no 0-rectangle exists among these
        inst = Pr1Instance(1, ((fin(3),), (W,)), 0)
        assert pr1_search(pi, inst) is None

    def test_entry_outside_domain(self, pi):
        inst = Pr1Instance(1, ((omega(coeff=2),),), 0)
        with pytest.raises(ValueError, match="outside the coloring domain"):
            pr1_search(pi, inst)

    def test_matches_naive_oracle(self, pi, pipeline_state):
        _, _, state = pipeline_state
        branch = Branch(frozenset({ZERO}))
        levels = list(pi.levels)
        rng = random.Random(17)
        for trial in range(80):
            n = rng.randint(1, 2)
            count = rng.randint(2, 4)
            deck = list(levels)
            rng.shuffle(deck)
            tuples = []
            for _ in range(count):
                take = sorted(deck[:n], key=lambda o: o)
                deck = deck[n:]
                tuples.append(tuple(take))
            inst = Pr1Instance(n, tuple(tuples), rng.randint(0, 1))
            assert pr1_search(pi, inst) == pr1_search_naive(state, branch, inst), (
                f"trial {trial}"
            )


class TestPiAudit:
    def test_clause_names(self, pi):
        cert = pi_audit(pi)
        assert [c.name for c in cert.clauses] == ["coherence", "homogenization"]
        assert cert.passed

    def test_coherence_rows_match_tree_defects(self, pi, pipeline_state):
        # every column pair's defect list equals the chain disagreement
        # computed on the tree itself
        _, _, state = pipeline_state
        branch = Branch(frozenset({ZERO}))
        cert = pi_audit(pi)
        rows = next(c for c in cert.clauses if c.name == "coherence").detail["rows"]
        assert len(rows) == 18 * 17 // 2
        for row in rows:
            s = branch.node_at(row["beta"])
            t = branch.node_at(row["gamma"])
            tree = tuple(x.height for x in coh_defect(state, s, t).defects)
            assert row["defect"] == tree, (row["beta"], row["gamma"])

    def test_coherence_max_size(self, pi):
        cert = pi_audit(pi)
        coh = next(c for c in cert.clauses if c.name == "coherence")
        assert coh.detail["max_size"] == 3

    def test_homogenization_best(self, pi):
        fams = ((fin(0), fin(1)), (fin(3), fin(5)), (W, wp(1)))
        cert = pi_audit(pi, families=fams, large=2)
        hom = next(c for c in cert.clauses if c.name == "homogenization")
        assert hom.passed
        assert hom.detail["best_subfamily"] == (0, 1, 2)
        assert hom.detail["size"] == 3

    def test_homogenization_threshold_fails(self, pi):
        # 3-9 is a 0 pair while 3-w is a 1 pair: the rectangle is mixed
        fams = ((fin(3), fin(5)), (fin(9), W))
        cert = pi_audit(pi, families=fams, large=2)
        hom = next(c for c in cert.clauses if c.name == "homogenization")
        assert not hom.passed
        assert hom.detail["size"] == 1

    def test_overlapping_families_rejected(self, pi):
        with pytest.raises(ValueError, match="disjoint"):
            pi_audit(pi, families=((fin(1), fin(2)), (fin(2), fin(3))))
