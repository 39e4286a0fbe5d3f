import pytest
from hypothesis import given, strategies as st

from treepart.ordinals import (
    ZERO,
    NotALimitError,
    Ordinal,
    fin,
    format_ordinal,
    omega,
    parse_ordinal,
)

w = omega()


def ordinals(max_exp=3, max_coeff=4):
    def build(pairs):
        terms = []
        last = None
        for e, c in sorted(set(pairs), reverse=True):
            if last is None or e < last:
                terms.append((e, c))
                last = e
        return Ordinal(tuple(terms))

    return st.lists(
        st.tuples(st.integers(0, max_exp), st.integers(1, max_coeff)), max_size=4
    ).map(build)


class TestConstruction:
    def test_zero_is_empty_terms(self):
        assert Ordinal().terms == ()
        assert Ordinal() == ZERO
        assert not ZERO

    def test_rejects_unsorted_exponents(self):
        with pytest.raises(ValueError):
            Ordinal(((0, 1), (1, 1)))

    def test_rejects_zero_coefficient(self):
        with pytest.raises(ValueError):
            Ordinal(((1, 0),))

    def test_immutable(self):
        with pytest.raises(AttributeError):
            w.terms = ()

    def test_no_cross_type_comparison(self):
        assert fin(3) != 3
        with pytest.raises(TypeError):
            fin(3) < 3


class TestOrder:
    def test_compare_equal(self):
        assert omega() == omega()

    def test_finite_below_omega(self):
        assert fin(3) < w

    def test_lexicographic_on_terms(self):
        assert w < omega(coeff=2) < omega(exp=2)
        assert omega(exp=2) < Ordinal(((2, 1), (0, 1)))

    @given(ordinals(), ordinals())
    def test_total(self, a, b):
        assert (a < b) + (a == b) + (b < a) == 1


class TestKind:
    def test_kinds(self):
        assert ZERO.kind == "zero"
        assert fin(7).kind == "successor"
        assert w.kind == "limit"
        assert omega(coeff=2).kind == "limit"
        assert Ordinal(((1, 1), (0, 3))).kind == "successor"

    @given(ordinals())
    def test_succ_is_successor(self, a):
        s = a.succ()
        assert s.kind == "successor"
        assert a < s

    @given(ordinals())
    def test_nothing_between_a_and_succ(self, a):
        # in CNF the successor differs only in the finite tail
        s = a.succ()
        assert s.terms[-1][0] == 0


class TestFundSeq:
    def test_omega_steps_are_finite(self):
        assert w.fund_seq(3) == fin(3)
        assert w.fund_seq(0) == ZERO

    def test_omega_two(self):
        assert omega(coeff=2).fund_seq(5) == Ordinal(((1, 1), (0, 5)))
        assert omega(coeff=2).fund_seq(0) == w

    def test_omega_squared(self):
        assert omega(exp=2).fund_seq(2) == omega(coeff=3)
        assert omega(exp=2).fund_seq(0) == w

    def test_rejects_non_limit(self):
        with pytest.raises(NotALimitError):
            fin(4).fund_seq(1)
        with pytest.raises(NotALimitError):
            ZERO.fund_seq(0)

    @given(ordinals().filter(lambda a: a.is_limit), st.integers(0, 30))
    def test_below_and_increasing(self, a, n):
        assert a.fund_seq(n) < a
        assert a.fund_seq(n) < a.fund_seq(n + 1)


class TestIntInterop:
    def test_fin_round_trip(self):
        assert int(fin(12)) == 12
        assert fin(0) == ZERO

    def test_int_rejects_infinite(self):
        with pytest.raises(ValueError):
            int(w)

    def test_below_enumerates_finite(self):
        assert [int(x) for x in fin(4).below()] == [0, 1, 2, 3]


class TestText:
    def test_format(self):
        assert format_ordinal(ZERO) == "0"
        assert format_ordinal(fin(7)) == "7"
        assert format_ordinal(w) == "w"
        assert format_ordinal(Ordinal(((2, 3), (1, 4), (0, 7)))) == "w^2.3+w.4+7"

    def test_parse_text(self):
        assert parse_ordinal("w.2") == omega(coeff=2)
        assert parse_ordinal("w+5") == Ordinal(((1, 1), (0, 5)))
        assert parse_ordinal(9) == fin(9)

    @given(ordinals())
    def test_round_trip(self, a):
        assert parse_ordinal(format_ordinal(a)) == a
