import random
from fractions import Fraction

import pytest

from suncolor.coeff import RF_N, RF_TR, RationalFunction
from suncolor.errors import EngineError, ResourceLimitError, SignatureMismatchError
from suncolor.rewrite import (
    Limits,
    NormalForm,
    Wiring,
    derive_casimir_adjoint,
    derive_casimir_fundamental,
    eliminate_fd,
    expand_bars,
    fierz_reduce,
    inner_product,
    normal_form,
)
from suncolor.tensor import TensorExpr

from conftest import random_expression

P = TensorExpr.parse
RF = RationalFunction.parse


class TestEliminateFD:
    def test_single_f_becomes_two_loops(self):
        e = eliminate_fd(P("f(a,b,c)"))
        assert e.n_terms == 2
        assert all(v[0] == "t" for d in e.terms for v in d.verts)

    def test_no_fd_unchanged(self):
        e = P("t(a;i,k)*t(b;k,j)")
        assert eliminate_fd(e) == e

    def test_ff_contraction_gives_adjoint_casimir(self):
        nf = normal_form(P("f(a,x,y)*f(b,y,x)"))
        assert nf.terms == {Wiring.make([], [], [(0, 1)]): RF("2*N*TR")}

    def test_strictly_decreases_vertex_count(self):
        e = P("f(a,b,x)*dv(x,c,e)")
        out = eliminate_fd(e)
        assert all(v[0] == "t" for d in out.terms for v in d.verts)


class TestFierz:
    def test_casimir_fundamental(self):
        assert derive_casimir_fundamental() == RF("T_R*(N^2-1)/N")

    def test_casimir_adjoint(self):
        assert derive_casimir_adjoint() == RF("2*T_R*N")

    def test_single_pair_open_form(self):
        # t(a;i,k) t(a;l,m) = T_R (delta(i,m) delta(l,k) - 1/N delta(i,k) delta(l,m))
        nf = normal_form(P("[out: i; in: k; out: l; in: m] t(a;i,k)*t(a;l,m)"))
        cross = Wiring.make([(0, (), 3), (2, (), 1)], [], [])
        split = Wiring.make([(0, (), 1), (2, (), 3)], [], [])
        assert nf.terms == {cross: RF_TR, split: -RF_TR / RF_N}

    def test_no_internal_gluon_unchanged(self):
        e = P("t(a;i,k)*t(b;k,j)")
        assert fierz_reduce(e) == e

    def test_requires_prior_stages(self):
        with pytest.raises(EngineError):
            fierz_reduce(P("f(a,b,c)"))


class TestExpandBars:
    def test_asym3_has_six_terms(self):
        e = expand_bars(P("asym(i,j,m;k,l,n)"))
        assert e.n_terms == 6

    def test_sym_over_one_line_is_identity(self):
        assert expand_bars(P("sym(i;k)")) == P("delta(i,k)")

    def test_nested_bars_idempotent(self):
        assert normal_form(P("sym(i,j;p,q)*sym(p,q;k,l)")) == normal_form(P("sym(i,j;k,l)"))
        assert normal_form(P("asym(i,j;p,q)*asym(p,q;k,l)")) == normal_form(
            P("asym(i,j;k,l)")
        )

    def test_bar_cap(self):
        e = P("sym(i1,i2,i3;k1,k2,k3)")
        with pytest.raises(ResourceLimitError):
            expand_bars(e, Limits(bar_cap=2))


class TestNormalForm:
    def test_jacobi_is_zero(self):
        jac = P("f(a,d,e)*f(b,c,e) + f(b,d,e)*f(c,a,e) + f(c,d,e)*f(a,b,e)")
        assert normal_form(jac).is_zero

    def test_singlet_plus_adjoint_is_identity(self):
        e = P("(1/N)*delta(i,j)*delta(l,k) + (1/TR)*t(a;i,j)*t(a;l,k)")
        nf = normal_form(e)
        ident = Wiring.make([(0, (), 2), (3, (), 1)], [], [])
        assert nf.terms == {ident: RationalFunction.from_int(1)}

    def test_open_generator_pair(self):
        nf = normal_form(P("t(a;i,k)*t(a;k,j)"))
        assert nf.terms == {Wiring.make([(0, (), 1)], [], []): RF("T_R*(N-1/N)")}

    def test_single_generator_trace_vanishes(self):
        assert normal_form(P("t(a;i,i)")).is_zero

    def test_two_generator_loop_becomes_pairing(self):
        nf = normal_form(P("t(a;i,k)*t(b;k,i)"))
        assert nf.terms == {Wiring.make([], [], [(0, 1)]): RF_TR}

    def test_linear(self):
        a = P("f(a,b,x)*f(x,c,e)")
        b = P("gd(a,b)*gd(c,e)")
        combo = a + b.scale(RF("N/2"))
        nfa, nfb, nfc = normal_form(a), normal_form(b), normal_form(combo)
        for w in set(nfa.terms) | set(nfb.terms) | set(nfc.terms):
            assert nfc.coefficient(w) == nfa.coefficient(w) + nfb.coefficient(w) * RF("N/2")

    def test_idempotent(self):
        rng = random.Random(23)
        for _ in range(20):
            e = random_expression(rng, max_atoms=4)
            nf = normal_form(e)
            assert normal_form(nf.to_expr()) == nf

    def test_zero_input(self):
        assert normal_form(P("0")).is_zero

    def test_json_roundtrippable_fields(self):
        import json

        nf = normal_form(P("f(a,b,x)*f(x,c,e)"))
        data = json.loads(nf.to_json())
        assert {t["coeff"] for t in data["terms"]}
        assert all(set(t["wiring"]) == {"strings", "traces", "pairs"} for t in data["terms"])

    def test_term_cap(self):
        e = P("asym(i1,i2,i3;k1,k2,k3)*asym(j1,j2,j3;l1,l2,l3)")
        with pytest.raises(ResourceLimitError):
            normal_form(e, Limits(max_terms=4))


class TestInnerProduct:
    def test_trace_basis_overlap(self):
        c1 = P("[out: i; in: j; glu: a,b] t(a;i,k)*t(b;k,j)")
        c3 = P("[out: i; in: j; glu: a,b] delta(i,j)*gd(a,b)")
        assert inner_product(c1, c3) == RF("T_R*(N^2-1)")

    def test_gluon_pairings_overlap(self):
        idAA = P("[glu: a1,a2,b1,b2] gd(a1,b1)*gd(a2,b2)")
        trAA = P("[glu: a1,a2,b1,b2] gd(a1,a2)*gd(b1,b2)")
        assert inner_product(idAA, trAA) == RF("N^2-1")

    def test_symmetric_for_real_coefficients(self):
        rng = random.Random(5)
        c1 = P("[glu: a,b] gd(a,b)")
        c2 = P("[glu: a,b] t(a;i,k)*t(b;k,i)")
        assert inner_product(c1, c2) == inner_product(c2, c1)

    def test_positive_at_concrete_point(self):
        c = P("[out: i; in: j; glu: a,b] t(a;i,k)*t(b;k,j)")
        v = inner_product(c, c).evaluate(3, Fraction(1, 2))
        assert v > 0

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatchError):
            inner_product(P("gd(a,b)"), P("delta(i,j)"))
