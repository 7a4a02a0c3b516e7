from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suncolor.coeff import RationalFunction
from suncolor.errors import DegreeMismatchError, ParseError, ResourceLimitError
from suncolor.perm import (
    AlgebraElement,
    Permutation,
    all_permutations,
    antisymmetriser,
    parse_cycles,
    render_cycles,
    subset_sum,
    symmetriser,
)


def P(text, degree):
    return parse_cycles(text, degree)


class TestPermutation:
    def test_compose_paper_example(self):
        pi = P("(132)", 3)
        sigma = P("(12)", 3)
        assert pi * sigma == P("(23)", 3)

    def test_compose_reverse_order(self):
        # brute-force check of sigma o pi
        pi = P("(132)", 3)
        sigma = P("(12)", 3)
        expected = Permutation([sigma(pi(x)) for x in (1, 2, 3)])
        assert sigma * pi == expected == P("(13)", 3)

    def test_identity_composition(self):
        sigma = P("(12)", 3)
        assert Permutation.identity(3) * sigma == sigma

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatchError):
            P("(12)", 2) * P("(12)", 3)

    def test_two_line_to_cycles(self):
        p = Permutation([2, 4, 5, 1, 3])
        assert p.cycles() == ((1, 2, 4), (3, 5))
        assert render_cycles(p) == "(124)(35)"

    def test_identity_has_no_cycles(self):
        assert Permutation.identity(4).cycles() == ()
        assert render_cycles(Permutation.identity(4)) == "()"

    def test_parse_cycle_images(self):
        assert P("(132)", 3).images == (3, 1, 2)

    def test_parse_roundtrip(self):
        for p in all_permutations(5):
            assert parse_cycles(render_cycles(p), 5) == p

    def test_parse_spaced_and_large_degree(self):
        p = parse_cycles("(1 10)(2,3)", 10)
        assert p(1) == 10 and p(10) == 1 and p(2) == 3
        assert parse_cycles(render_cycles(p), 10) == p

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            parse_cycles("(11)", 3)  # two-digit token in compact form: 1 twice
        with pytest.raises(ParseError):
            parse_cycles("(14)", 3)  # out of range
        with pytest.raises(ParseError):
            parse_cycles("(12)(13)", 3)  # 1 named twice
        with pytest.raises(ParseError):
            parse_cycles("12)", 3)

    def test_sign(self):
        assert Permutation.identity(3).sign() == 1
        assert P("(12)", 3).sign() == -1
        assert P("(123)", 3).sign() == 1

    def test_sign_multiplicative_and_assoc(self):
        perms = list(all_permutations(4))
        for a in perms[::5]:
            for b in perms[::7]:
                assert (a * b).sign() == a.sign() * b.sign()
                for c in perms[::11]:
                    assert (a * b) * c == a * (b * c)

    def test_inverse(self):
        for p in all_permutations(4):
            assert p * p.inverse() == Permutation.identity(4)


class TestSymmetrisers:
    def test_antisymmetriser_two(self):
        a = antisymmetriser(2)
        assert a.coefficient(Permutation.identity(2)) == Fraction(1, 2)
        assert a.coefficient(P("(12)", 2)) == Fraction(-1, 2)

    def test_antisymmetriser_three_signs(self):
        a = antisymmetriser(3)
        expected = {
            "()": 1,
            "(12)": -1,
            "(23)": -1,
            "(13)": -1,
            "(123)": 1,
            "(132)": 1,
        }
        assert len(a.terms) == 6
        for text, sgn in expected.items():
            assert a.coefficient(P(text, 3)) == Fraction(sgn, 6)

    def test_symmetriser_one(self):
        assert symmetriser(1) == AlgebraElement.unit(1)

    def test_idempotence(self):
        for n in range(1, 5):
            s, a = symmetriser(n), antisymmetriser(n)
            assert s * s == s
            assert a * a == a

    def test_sym_times_antisym_vanishes(self):
        assert (symmetriser(2) * antisymmetriser(2)).is_zero
        assert (symmetriser(3) * antisymmetriser(3)).is_zero

    def test_absorption_exhaustive(self):
        for n in range(1, 7):
            s, a = symmetriser(n), antisymmetriser(n)
            for p in all_permutations(n):
                e = AlgebraElement.from_permutation(p)
                assert s * e == s and e * s == s
                sa = a.scale(p.sign())
                assert a * e == sa and e * a == sa

    def test_recursion_relations(self):
        # S_n = (1/n) (S_{n-1} + (n-1) S_{n-1} tau S_{n-1}),
        # A_n = (1/n) (A_{n-1} - (n-1) A_{n-1} tau A_{n-1}),
        # with tau the transposition of the last two lines.
        for n in range(2, 7):
            tau = AlgebraElement.from_permutation(Permutation.transposition(n, n - 1, n))
            s1 = symmetriser(n - 1).embed(n)
            lhs = (s1 + (s1 * tau * s1).scale(n - 1)).scale(Fraction(1, n))
            assert lhs == symmetriser(n)
            a1 = antisymmetriser(n - 1).embed(n)
            lhs = (a1 - (a1 * tau * a1).scale(n - 1)).scale(Fraction(1, n))
            assert lhs == antisymmetriser(n)

    def test_two_shared_lines_vanish(self):
        # S and A factors sharing >= 2 lines multiply to zero
        s12 = subset_sum(3, [1, 2])
        a12 = subset_sum(3, [1, 2], signed=True)
        assert (s12 * a12).is_zero
        s123 = subset_sum(4, [1, 2, 3])
        a23 = subset_sum(4, [2, 3], signed=True)
        assert (s123 * a23).is_zero
        # one shared line does not force zero
        s12 = subset_sum(3, [1, 2])
        a13 = subset_sum(3, [1, 3], signed=True)
        assert not (s12 * a13).is_zero

    def test_degree_cap(self):
        with pytest.raises(ResourceLimitError):
            symmetriser(9)
        symmetriser(9, cap=9)  # configurable


class TestAlgebraElement:
    def test_linear_ops(self):
        x = AlgebraElement.from_permutation(P("(12)", 3), 2)
        y = AlgebraElement.from_permutation(P("(12)", 3), -2)
        assert (x + y).is_zero
        assert x - x == AlgebraElement.zero(3)
        assert x.scale(0).is_zero

    def test_dagger_involution(self):
        e = symmetriser(3) * AlgebraElement.from_permutation(P("(123)", 3), 3)
        assert e.dagger().dagger() == e

    def test_dagger_antimultiplicative(self):
        a = AlgebraElement.from_permutation(P("(123)", 4), 2)
        b = symmetriser(4)
        assert (a * b).dagger() == b.dagger() * a.dagger()

    def test_hermitian_check(self):
        assert symmetriser(3).is_hermitian()
        assert antisymmetriser(4).is_hermitian()
        assert not AlgebraElement.from_permutation(P("(123)", 3)).is_hermitian()

    def test_trace_dimension(self):
        # identity on V^3 has trace N^3; a transposition N^2
        e = AlgebraElement.unit(3)
        assert e.trace_dimension() == RationalFunction.parse("N^3")
        t = AlgebraElement.from_permutation(P("(12)", 3))
        assert t.trace_dimension() == RationalFunction.parse("N^2")

    def test_unit_is_neutral(self):
        e = symmetriser(3)
        one = AlgebraElement.unit(3)
        assert one * e == e and e * one == e


@given(st.permutations(list(range(1, 7))), st.permutations(list(range(1, 7))))
@settings(max_examples=80, deadline=None)
def test_sign_multiplicativity_property(a, b):
    pa, pb = Permutation(a), Permutation(b)
    assert (pa * pb).sign() == pa.sign() * pb.sign()
