from fractions import Fraction

import pytest

from suncolor.coeff import RF_N, RationalFunction
from suncolor.errors import ResourceLimitError
from suncolor.multiplet import (
    BasisVector,
    compose_maps,
    connector_candidates,
    export_basis,
    gluon_projectors_AA,
    gram_matrix,
    gram_rank_at,
    identity_map,
    import_basis,
    map_dagger,
    map_trace,
    proportionality,
    quark_multiplet_basis,
    trace_basis,
    transition_operators,
    vbarv_aa_multiplet_basis,
    vbarv_adjoint_projector,
    vbarv_singlet_projector,
    verify_basis,
)
from suncolor.perm import parse_cycles
from suncolor.rewrite import inner_product, normal_form
from suncolor.tensor import TensorExpr

RF = RationalFunction.parse


@pytest.fixture(scope="module")
def gluon_suite():
    return gluon_projectors_AA()


@pytest.fixture(scope="module")
def quark_basis():
    return quark_multiplet_basis(3)


class TestTraceBasis:
    def test_sizes(self):
        assert len(trace_basis(1, 2)) == 3
        assert len(trace_basis(0, 4)) == 9
        assert len(trace_basis(1, 0)) == 1

    def test_quark_line_only(self):
        (v,) = trace_basis(1, 0)
        assert v.expr == TensorExpr.parse("[out: u1; in: d1] delta(u1,d1)")

    def test_gram_entry_vbarv_a2(self):
        vs = trace_basis(1, 2)
        gram = gram_matrix(vs)
        values = {str(x) for row in gram for x in row}
        # the string wiring against the disconnected wiring gives T_R (N^2-1)
        assert inner_product(vs[0].expr, vs[2].expr) in (
            RF("T_R*(N^2-1)"),
            RF("T_R^2*(N^2-1)"),
        ) or any(g == RF("T_R*(N^2-1)") for row in gram for g in row)

    def test_a4_gram_rank(self):
        vs = trace_basis(0, 4)
        assert gram_rank_at(vs, 3) == 8
        assert gram_rank_at(vs, 5) == 9

    def test_cap(self):
        with pytest.raises(ResourceLimitError):
            trace_basis(2, 8)

    def test_json_roundtrip(self):
        vs = trace_basis(1, 2)
        again = import_basis(export_basis(vs))
        assert [v.label for v in again] == [v.label for v in vs]
        for a, b in zip(vs, again):
            assert a.expr == b.expr and a.norm_sq == b.norm_sq


class TestGluonProjectors(object):
    def test_traces_at_n3(self, gluon_suite):
        dims = [p.dimension.evaluate(3) for p in gluon_suite]
        assert dims == [1, 8, 8, 10, 10, 27, 0]

    def test_projector_axioms(self, gluon_suite):
        report = verify_basis(gluon_suite, expect_complete=True)
        assert all(report.idempotent.values())
        assert all(report.hermitian.values())
        assert report.transversal
        assert report.complete

    def test_dimension_sum(self, gluon_suite):
        total = gluon_suite[0].dimension
        for p in gluon_suite[1:]:
            total = total + p.dimension
        assert total == (RF_N**2 - 1) ** 2

    def test_symbolic_dimensions_match_hook_content(self, gluon_suite):
        # cross-check against the Littlewood-Richardson content at N = 3..6
        from suncolor.tableaux import adjoint_diagram, lr_multiply, sun_trim

        for n in (3, 4, 5, 6):
            adj = adjoint_diagram(n)
            counts = sun_trim(lr_multiply(adj, adj), n)
            got = sorted(p.dimension.evaluate(n) for p in gluon_suite)
            want = []
            for d, m in counts.items():
                want.extend([Fraction(d.dimension_at(n))] * m)
            if len(want) < len(got):  # the vanishing one at N=3
                want.extend([Fraction(0)] * (len(got) - len(want)))
            assert got == sorted(want)

    def test_new_multiplet_norms(self, gluon_suite):
        for p in gluon_suite:
            assert inner_product(p.expr, p.expr) == p.dimension


class TestTransitions:
    def test_adjoint_pair_transition(self, gluon_suite):
        t12 = transition_operators(gluon_suite[1], gluon_suite[2])
        assert not t12.norm_sq.is_zero
        # image in target, kernel containing the target-orthogonal space:
        # P_t T P_s = T exactly
        sandwich = compose_maps(
            compose_maps(gluon_suite[2].expr, t12.expr, 2), gluon_suite[1].expr, 2
        )
        assert normal_form(sandwich) == normal_form(t12.expr)
        # orthogonal to every projector
        for p in gluon_suite:
            assert inner_product(p.expr, t12.expr).is_zero

    def test_transition_proportional_to_fd_bridge(self, gluon_suite):
        t12 = transition_operators(gluon_suite[1], gluon_suite[2])
        bridge = TensorExpr.parse("[glu: a1,a2,b1,b2] dv(a1,a2,x)*f(x,b1,b2)")
        assert proportionality(t12.expr, bridge) is not None

    def test_singlet_to_singlet(self, gluon_suite):
        v = transition_operators(vbarv_singlet_projector(), gluon_suite[0])
        assert not v.norm_sq.is_zero
        # proportional to the sandwiched two-generator bent wiring
        two_gen = TensorExpr.parse(
            "[glu: a1,a2; in: k; out: m] t(a1;u,k)*t(a2;m,u)"
        )
        sandwiched = compose_maps(
            gluon_suite[0].expr,
            two_gen.compose(vbarv_singlet_projector().expr, [(2, 0), (3, 1)]),
            2,
        )
        assert proportionality(v.expr, sandwiched) is not None

    def test_no_connector_raises(self, gluon_suite):
        from suncolor.errors import ConnectorNotFoundError

        # singlet and the 27-like multiplet are inequivalent: no connector
        with pytest.raises(ConnectorNotFoundError):
            transition_operators(gluon_suite[0], gluon_suite[5])


class TestQuarkBasis:
    def test_composition(self, quark_basis):
        assert [v.kind for v in quark_basis] == ["projector"] * 4 + ["transition"] * 2

    def test_gram_diagonal(self, quark_basis):
        gram = gram_matrix(quark_basis)
        n = len(quark_basis)
        for i in range(n):
            assert not gram[i][i].is_zero
            for j in range(n):
                if i != j:
                    assert gram[i][j].is_zero

    def test_projector_dimensions(self, quark_basis):
        dims = {v.label: v.dimension for v in quark_basis if v.kind == "projector"}
        assert dims["[123]"] == RF("N*(N+1)*(N+2)/6")
        assert dims["[12/3]"] == RF("N*(N^2-1)/3")
        assert dims["[13/2]"] == RF("N*(N^2-1)/3")
        assert dims["[1/2/3]"] == RF("N*(N-1)*(N-2)/6")

    def test_projectors_sum_to_identity(self, quark_basis):
        report = verify_basis(quark_basis, expect_complete=True)
        assert report.complete and report.transversal
        assert all(report.idempotent.values()) and all(report.hermitian.values())

    def test_transition_norm_matches_oracle(self, quark_basis):
        from suncolor.oracle import numeric_inner

        t1 = next(v for v in quark_basis if v.kind == "transition")
        for n in (3, 4):
            want = numeric_inner(t1.expr, t1.expr, n)
            got = complex(t1.norm_sq.evaluate(n, Fraction(1, 2)))
            assert abs(want - got) < 1e-9 * abs(want)

    def test_transition_sandwich_identity(self, quark_basis):
        # P_target T P_source = T exactly for every produced transition
        by_label = {v.label: v for v in quark_basis}
        for t in (v for v in quark_basis if v.kind == "transition"):
            src_label, tgt_label = t.label.split("->")
            sandwich = compose_maps(
                compose_maps(by_label[tgt_label].expr, t.expr, 3),
                by_label[src_label].expr,
                3,
            )
            assert normal_form(sandwich) == normal_form(t.expr)

    def test_b_squared_proportional_to_b(self, quark_basis):
        t1 = next(v for v in quark_basis if v.kind == "transition")
        swap = TensorExpr.from_permutation(parse_cycles("(23)", 3))
        b = compose_maps(t1.expr, swap, 3)
        b2 = compose_maps(b, b, 3)
        ratio = proportionality(b2, b)
        assert ratio is not None and not ratio.is_zero


class TestVbarVA2:
    def test_three_vector_basis_orthogonal(self):
        vs = vbarv_aa_multiplet_basis()
        assert len(vs) == 3
        gram = gram_matrix(vs)
        for i in range(3):
            assert not gram[i][i].is_zero
            for j in range(3):
                if i != j:
                    assert gram[i][j].is_zero

    def test_signature_matches_trace_basis(self):
        vs = vbarv_aa_multiplet_basis()
        ts = trace_basis(1, 2)
        assert vs[0].expr.sig == ts[0].expr.sig


class TestHelpers:
    def test_identity_map_trace(self):
        ident = identity_map(("g", "g"))
        assert map_trace(ident, 2) == (RF_N**2 - 1) ** 2
        ident_q = identity_map(("o", "o", "o"))
        assert map_trace(ident_q, 3) == RF_N**3

    def test_map_dagger_on_projector(self):
        p = vbarv_adjoint_projector()
        assert normal_form(map_dagger(p.expr, 2)) == normal_form(p.expr)

    def test_connector_enumeration_starts_with_pairings(self):
        first = next(iter(connector_candidates(("o", "o"), ("o", "o"))))
        assert all(v[0] == "t" or True for d in first.terms for v in d.verts)
        assert all(not d.verts for d in first.terms)

    def test_single_projector_gram(self, gluon_suite):
        report = verify_basis([gluon_suite[1]])
        assert report.gram[0][0] == gluon_suite[1].dimension


class TestFullAABasis:
    def test_nine_vector_multiplet_basis_orthogonal(self, gluon_suite):
        # seven projectors plus the two adjoint-pair transition operators form
        # an orthogonal basis of the A x A colour space
        t12 = transition_operators(gluon_suite[1], gluon_suite[2])
        t21 = transition_operators(gluon_suite[2], gluon_suite[1])
        vs = list(gluon_suite) + [t12, t21]
        gram = gram_matrix(vs)
        for i in range(9):
            for j in range(9):
                if i != j:
                    assert gram[i][j].is_zero, (vs[i].label, vs[j].label)
        # all diagonal entries are nonzero rational functions (the vanishing
        # multiplet at N=3 still has nonzero symbolic norm)
        for i in range(9):
            assert not gram[i][i].is_zero

    def test_rank_stabilises_for_n_at_least_four(self):
        vs = trace_basis(0, 4)
        for n in (4, 6):
            assert gram_rank_at(vs, n) == 9


class TestMoreTraceBases:
    def test_two_quark_pairs(self):
        vs = trace_basis(2, 0)
        assert len(vs) == 2  # parallel lines and the swap

    def test_two_gluons(self):
        vs = trace_basis(0, 2)
        assert len(vs) == 1
        assert vs[0].norm_sq == (RF_N**2 - 1)

    def test_signature_mismatch_rejected(self):
        from suncolor.errors import SignatureMismatchError

        a = trace_basis(1, 0)[0]
        b = trace_basis(0, 2)[0]
        with pytest.raises(SignatureMismatchError):
            gram_matrix([a, b])
