import math

import pytest

from suncolor.coeff import RationalFunction
from suncolor.errors import ParseError, ResourceLimitError
from suncolor.tableaux import (
    MultipletCount,
    YoungDiagram,
    YoungTableau,
    adjoint_diagram,
    decompose_adjoint_power,
    first_occurrence,
    lr_multiply,
    standard_tableaux,
    sun_trim,
    sun_trim_diagram,
)

D = lambda *rows: YoungDiagram(tuple(rows))


class TestDiagram:
    def test_validation(self):
        with pytest.raises(ValueError):
            YoungDiagram((1, 2))
        with pytest.raises(ValueError):
            YoungDiagram((2, 0))

    def test_hook_products(self):
        assert D(2).hook_product() == 2
        assert D(2, 1).hook_product() == 3
        assert D(1, 1, 1).hook_product() == 6
        assert D(2, 2).hook_product() == 12
        assert D(3, 2).hook_product() == 24
        assert YoungDiagram().hook_product() == 1

    def test_sun_dimension(self):
        assert D(2).sun_dimension() == RationalFunction.parse("N*(N+1)/2")
        assert D(2, 1).sun_dimension() == RationalFunction.parse("N*(N^2-1)/3")
        assert D(1).sun_dimension() == RationalFunction.parse("N")

    def test_dimension_at(self):
        assert D(2, 1).dimension_at(3) == 8
        assert D(4, 2).dimension_at(3) == 27
        assert D(3, 3).dimension_at(3) == 10
        assert D(2, 1, 1, 1).dimension_at(3) == 0

    def test_parse_render(self):
        for d in (D(4, 2, 1), YoungDiagram(), D(3)):
            assert YoungDiagram.parse(str(d)) == d
        with pytest.raises(ParseError):
            YoungDiagram.parse("4,2")

    def test_conjugate(self):
        assert D(3, 1).conjugate() == D(2, 1, 1)
        assert D(2, 2).conjugate() == D(2, 2)


class TestTableaux:
    def test_standard_count_small(self):
        assert len(standard_tableaux(1)) == 1
        assert len(standard_tableaux(2)) == 2
        assert len(standard_tableaux(3)) == 4

    def test_syt2_display(self):
        assert [str(t) for t in standard_tableaux(2)] == ["[12]", "[1/2]"]

    def test_syt3_display_order(self):
        assert [str(t) for t in standard_tableaux(3)] == [
            "[123]",
            "[12/3]",
            "[13/2]",
            "[1/2/3]",
        ]

    def test_standardness_predicate(self):
        assert YoungTableau.parse("[12/3]").is_standard()
        assert not YoungTableau.parse("[23/1]").is_standard()
        assert not YoungTableau.parse("[21/3]").is_standard()

    def test_parse_render_roundtrip(self):
        for n in range(1, 6):
            for t in standard_tableaux(n):
                assert YoungTableau.parse(str(t)) == t

    def test_remove_largest(self):
        t = YoungTableau.parse("[12/3]")
        assert t.remove_largest() == YoungTableau.parse("[12]")

    def test_count_matches_hook_length_formula(self):
        # number of SYT of a shape = n! / hook product, checked by enumeration
        from suncolor.tableaux import partitions, standard_tableaux_of_shape

        for n in range(1, 7):
            total = 0
            for rows in partitions(n):
                d = YoungDiagram(rows)
                found = len(standard_tableaux_of_shape(d))
                assert found == math.factorial(n) // d.hook_product()
                total += found
            assert total == len(standard_tableaux(n))


class TestLR:
    def test_box_times_box(self):
        c = lr_multiply(D(1), D(1))
        assert c[D(2)] == 1 and c[D(1, 1)] == 1 and len(c) == 2

    def test_eight_times_eight_su3(self):
        c = sun_trim(lr_multiply(D(2, 1), D(2, 1)), 3)
        assert c[YoungDiagram()] == 1
        assert c[D(2, 1)] == 2
        assert c[D(3)] == 1
        assert c[D(3, 3)] == 1
        assert c[D(4, 2)] == 1
        assert len(c) == 5
        assert c.total_dimension_at(3) == 64

    def test_dimension_conservation(self):
        cases = [
            (D(2, 1), D(2, 1)),
            (D(3, 1), D(2)),
            (D(2, 2), D(2, 1)),
            (D(1, 1), D(3)),
        ]
        for a, b in cases:
            product = lr_multiply(a, b)
            for n in (3, 4, 5):
                trimmed = sun_trim(product, n)
                assert (
                    trimmed.total_dimension_at(n)
                    == a.dimension_at(n) * b.dimension_at(n)
                )

    def test_trim(self):
        assert sun_trim_diagram(D(1, 1, 1), 3) == YoungDiagram()
        assert sun_trim_diagram(D(3, 3, 3), 3) == YoungDiagram()
        assert sun_trim_diagram(D(2, 1, 1, 1), 3) is None
        assert sun_trim_diagram(D(3, 2, 1), 3) == D(2, 1)

    def test_multiplet_count_json(self):
        c = lr_multiply(D(2, 1), D(1))
        assert MultipletCount.from_json(c.to_json()) == c


class TestAdjointPowers:
    def test_adjoint_diagram(self):
        assert adjoint_diagram(3) == D(2, 1)
        assert adjoint_diagram(2) == D(2)
        assert adjoint_diagram(3).dimension_at(3) == 8

    def test_table_row_n2(self):
        dec = decompose_adjoint_power(2, 3)
        assert dec.multiplets == 6
        assert dec.colour_space_dimension == 8
        large = decompose_adjoint_power(2)
        assert large.multiplets == 7
        assert large.colour_space_dimension == 9

    def test_table_row_n3(self):
        dec = decompose_adjoint_power(3, 3)
        assert (dec.multiplets, dec.colour_space_dimension) == (29, 145)
        large = decompose_adjoint_power(3)
        assert (large.multiplets, large.colour_space_dimension) == (51, 265)

    def test_total_dimension_identity(self):
        for n_colours in (3, 4):
            for power in range(4):
                dec = decompose_adjoint_power(power, n_colours)
                assert dec.counts.total_dimension_at(n_colours) == (n_colours**2 - 1) ** power

    def test_first_occurrence_base_cases(self):
        assert first_occurrence(YoungDiagram(), 3) == 0
        assert first_occurrence(D(2, 1), 3) == 1

    def test_first_occurrence_paper_table(self):
        for rows in ((3,), (3, 3), (4, 2)):
            assert first_occurrence(YoungDiagram(rows), 3) == 2
        for rows in ((5, 1), (5, 4), (6, 3)):
            assert first_occurrence(YoungDiagram(rows), 3) == 3

    def test_first_occurrence_cap(self):
        with pytest.raises(ResourceLimitError):
            first_occurrence(D(8, 4), 3, cap=1)

    def test_first_occurrence_bound_and_step_property(self):
        # every multiplet of A^n has first occurrence <= n, and multiplying by
        # one more adjoint shifts the first occurrence by at most one
        for n_colours in (3, 4):
            adj = adjoint_diagram(n_colours)
            for power in range(4):
                for d, _ in decompose_adjoint_power(power, n_colours).counts.items():
                    assert first_occurrence(d, n_colours) <= power
            for power in range(3):
                for d, _ in decompose_adjoint_power(power, n_colours).counts.items():
                    nf = first_occurrence(d, n_colours)
                    for dk, _ in sun_trim(lr_multiply(d, adj), n_colours).counts.items():
                        assert abs(first_occurrence(dk, n_colours) - nf) <= 1
