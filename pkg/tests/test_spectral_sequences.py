import pytest

from src.shared.errors import MismatchedDifferential, OutOfRange
from src.features.rep_algebra import IrrepSum
from src.features.spectral_sequences import (
    ForcedDifferential,
    GradedTable,
    GysinPage,
    circle_leray_page,
    circle_link_closed_form,
    circle_link_ih,
    gysin_assemble,
    invariant_kummer_row,
)

Q = IrrepSum.trivial()
V11 = IrrepSum.of((1, 1))


class TestGradedTable:

    def test_zero_entries_are_not_stored(self):
        table = GradedTable(entries={0: Q, 1: IrrepSum.zero(), 2: V11}, context_genus=2)
        assert table.degrees() == [0, 2]
        assert table.at(1).is_zero

    def test_negative_degree(self):
        with pytest.raises(OutOfRange):
            GradedTable(entries={-1: Q}, context_genus=1)

    def test_degree_above_top(self):
        with pytest.raises(OutOfRange):
            GradedTable(entries={4: Q}, context_genus=1, top_degree=2)

    def test_rows(self):
        table = GradedTable(entries={0: Q, 2: V11 + Q, 4: Q}, context_genus=2, top_degree=4)
        assert table.dimension_row() == [1, 0, 6, 0, 1]
        assert table.rank_row() == [1, 0, 2, 0, 1]
        assert table.row_labels() == ["Q", "0", "V[1,1] + Q", "0", "Q"]
        assert table.total() == V11 + Q * 3


class TestCircleLink:

    def test_kummer_row(self):
        row = invariant_kummer_row(4)
        assert row.row_labels() == ["Q", "0", "V[1,1] + Q", "0"]

    def test_kummer_row_through_top(self):
        row = invariant_kummer_row(4, through=6)
        assert row.row_labels() == ["Q", "0", "V[1,1] + Q", "0", "V[1,1] + Q", "0", "Q"]

    def test_genus_four(self):
        assert circle_link_ih(4).row_labels() == ["Q", "0", "V[1,1]", "0"]

    def test_genus_two(self):
        assert circle_link_ih(2).row_labels() == ["Q", "0"]

    def test_genus_one(self):
        assert circle_link_ih(1).row_labels() == ["Q"]

    @pytest.mark.parametrize("g", range(1, 13))
    def test_closed_form(self, g):
        assert circle_link_ih(g).matches(circle_link_closed_form(g))

    def test_leray_page_differentials(self):
        page = circle_leray_page(4)
        assert page.width == 6
        assert page.d2_ranks[(0, 1)] == Q
        assert page.d2_ranks[(2, 1)] == V11 + Q
        assert page.cell(3, 2, 0) == V11
        assert page.cell(3, 4, 1) == V11
        assert page.cell(3, 6, 1) == Q

    def test_genus_out_of_range(self):
        with pytest.raises(OutOfRange):
            circle_link_closed_form(0)


class TestGysin:

    def test_fiber_over_a1_in_genus_four(self, registry):
        table = gysin_assemble(registry.gysin_page(4, 1)).strip_twists()
        even = [str(table.at(d)) for d in range(0, 13, 2)]
        assert even == ["Q", "Q", "V[2] + 2 Q", "V[2] + 4 Q", "4 Q", "3 Q", "Q"]
        assert all(table.at(d).is_zero for d in range(1, 13, 2))
        assert table.matches(registry.fiber_table(4, 1))

    def test_twists_survive_assembly(self, registry):
        table = gysin_assemble(registry.gysin_page(4, 1))
        assert str(table.at(4)) == "V[2](0) + 2 Q(-2)"

    def test_without_the_differential(self, registry):
        table = gysin_assemble(registry.gysin_page(4, 1).without_differentials())
        assert str(table.at(7)) == "V[2](-2)"
        assert str(table.at(8)) == "V[2](-2) + 4 Q(-4)"

    def test_differential_must_move_one_column(self):
        with pytest.raises(MismatchedDifferential):
            ForcedDifferential(source=(0, 1), target=(2, 1), cancelled=Q)

    def test_differential_must_cancel_something(self):
        with pytest.raises(MismatchedDifferential):
            ForcedDifferential(source=(0, 1), target=(1, 1), cancelled=IrrepSum.zero())

    def test_differential_larger_than_its_cells(self):
        page = GysinPage(
            columns={
                0: GradedTable(entries={1: Q}, context_genus=1),
                1: GradedTable(entries={1: Q * 2}, context_genus=1),
            },
            context_genus=1,
            forced_differentials=(ForcedDifferential(source=(0, 1), target=(1, 1), cancelled=Q * 2),),
        )
        with pytest.raises(MismatchedDifferential):
            gysin_assemble(page)
