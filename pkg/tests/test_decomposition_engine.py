import pytest

from src.shared.errors import (
    BadDims,
    BoundViolation,
    Contradiction,
    MissingDataset,
    NegativeMultiplicity,
    OutOfRange,
)
from src.shared.stage_runner import StageRunner
from src.features.datasets import load_registry
from src.features.rep_algebra import IrrepSum
from src.features.spectral_sequences import GradedTable
from src.features.decomposition import (
    BettiValue,
    BettiWithUnknowns,
    Constraint,
    DecompositionEngine,
    LinkStore,
    LinkSymbol,
    run_genus,
)
from src.features.decomposition.models import SymbolTerm
from src.features.decomposition.handlers import (
    BlowupHandler,
    ContributionHandler,
    LinkResolutionHandler,
    NewSystemHandler,
    StratificationHandler,
)

Q = IrrepSum.trivial()
V11 = IrrepSum.of((1, 1))

# fiber over A_2 in genus 4 with V[2,2] dropped from degree 4
DAMAGED_FIBER = """\
[fiber genus=4 stratum=2 dim=5]
0: Q
2: Q
4: V[1,1] + 2 Q
5: V[2]
6: V[2,2] + V[1,1] + 3 Q
8: V[1,1] + 2 Q
10: Q
"""

SIX_PAIRWISE_SUMS = {
    "IH6(N_{0,4},Q) + IH2(N_{0,3},V[1,1]) = Q",
    "IH4(N_{1,4},Q) + IH0(N_{1,3},V[1,1]) = V[2]",
    "IH6(N_{1,4},Q) + IH2(N_{1,3},V[1,1]) = V[2]",
    "IH4(N_{2,4},Q) + IH0(N_{2,3},V[1,1]) = V[2,2]",
    "IH5(N_{2,4},Q) + IH1(N_{2,3},V[1,1]) = V[2]",
    "IH6(N_{2,4},Q) + IH2(N_{2,3},V[1,1]) = V[2,2]",
}


def _ledger(report, k):
    return [(e.fiber_degree, str(e.system)) for e in report.ledger_at(k)]


def _cells(row):
    return row.label, {m: v.render() for m, v in sorted(row.cells.items()) if v.render() != "0"}


def _symbol(k, r, q, coefficient=()):
    return LinkSymbol(lower=k, upper=r, coefficient=coefficient, degree=q)


def _constraint(right, *terms, stratum=0, degree=0):
    return Constraint(
        stratum=stratum,
        degree=degree,
        left=tuple(SymbolTerm(symbol=s, multiplicity=m) for s, m in terms),
        right=right,
    )


class TestStratification:

    @pytest.mark.parametrize("g,fiber_dims,defect", [
        (1, (0,), 0),
        (2, (1, 1), 0),
        (3, (3, 3, 2), 1),
        (4, (9, 6, 5, 3), 8),
    ])
    def test_defect(self, g, fiber_dims, defect):
        handler = StratificationHandler()
        assert handler.defect(handler.make_stratification(g, fiber_dims)) == defect

    def test_dimensions(self):
        strat = StratificationHandler().make_stratification(4, (9, 6, 5, 3))
        assert strat.total_dim == 10
        assert strat.codim(2) == 7
        assert strat.link_dim(0, 4) == 19
        assert strat.shift_label(2, 4) == -3

    def test_wrong_number_of_fibers(self):
        with pytest.raises(BadDims):
            StratificationHandler().make_stratification(3, (1, 1))

    def test_genus_zero(self):
        with pytest.raises(OutOfRange):
            StratificationHandler().make_stratification(0, ())


class TestLinkStore:

    def test_trivial_degree_zero(self):
        assert LinkStore().value(0, 4, (), 0) == Q
        assert LinkStore().value(0, 4, (1, 1), 0) is None

    def test_duality_and_range(self):
        store = LinkStore()
        store.seed_circle_link(4)
        assert store.link_dim(3, 4) == 7
        assert store.value(3, 4, (), 2) == V11
        assert store.value(3, 4, (), 5) == V11
        assert store.value(3, 4, (), 8).is_zero

    def test_assign_conflict(self):
        store = LinkStore()
        symbol = _symbol(0, 2, 1)
        assert store.assign(symbol, IrrepSum.zero())
        assert not store.assign(symbol, IrrepSum.zero())
        with pytest.raises(Contradiction):
            store.assign(symbol, Q)

    def test_copy_is_independent(self):
        store = LinkStore()
        copy = store.copy()
        copy.assign(_symbol(0, 2, 1), Q)
        assert store.value(0, 2, (), 1) is None


class TestLinkResolution:

    def test_single_unknown_is_divided_by_its_multiplicity(self):
        symbol = _symbol(0, 2, 1)
        resolution = LinkResolutionHandler().resolve_links([_constraint(Q * 2, (symbol, 2))], LinkStore())
        assert resolution.links.value_of(symbol) == Q
        assert resolution.retained == ()

    def test_indivisible_right_side(self):
        with pytest.raises(Contradiction):
            LinkResolutionHandler().resolve_links([_constraint(Q, (_symbol(0, 2, 1), 2))], LinkStore())

    def test_zero_right_side_fixes_every_unknown(self):
        a, b = _symbol(0, 3, 2), _symbol(0, 2, 1)
        resolution = LinkResolutionHandler().resolve_links([_constraint(IrrepSum.zero(), (a, 1), (b, 1))], LinkStore())
        assert resolution.links.value_of(a).is_zero
        assert resolution.links.value_of(b).is_zero
        assert resolution.zero_forced == (a, b)

    def test_single_unknown_is_not_zero_forced(self):
        symbol = _symbol(0, 2, 1)
        resolution = LinkResolutionHandler().resolve_links([_constraint(IrrepSum.zero(), (symbol, 1))], LinkStore())
        assert resolution.links.value_of(symbol).is_zero
        assert resolution.zero_forced == ()

    def test_zero_right_side_against_a_seeded_value(self):
        seeded, other = _symbol(2, 3, 0, (1, 1)), _symbol(2, 4, 4)
        store = LinkStore()
        store.assign(seeded, V11, "seed")
        with pytest.raises(Contradiction) as excinfo:
            LinkResolutionHandler().resolve_links(
                [_constraint(IrrepSum.zero(), (other, 1), (seeded, 1), stratum=2, degree=4)], store
            )
        assert (excinfo.value.stratum, excinfo.value.degree) == (2, 4)

    def test_fixpoint_and_retention(self):
        a, b, c = _symbol(0, 3, 2), _symbol(0, 2, 1), _symbol(1, 3, 1)
        first = _constraint(V11 + Q, (a, 1), (b, 1))
        second = _constraint(Q, (b, 1))
        kept = _constraint(V11, (a, 1), (c, 1))
        store = LinkStore()
        resolution = LinkResolutionHandler().resolve_links([first, kept, second], store)
        assert resolution.links.value_of(b) == Q
        assert resolution.links.value_of(a) == V11
        # c follows from `kept` once a is known
        assert resolution.links.value_of(c).is_zero
        assert store.value_of(a) is None

    def test_two_unknowns_are_retained(self):
        a, b = _symbol(0, 3, 2), _symbol(0, 2, 1)
        constraint = _constraint(Q, (a, 1), (b, 1))
        resolution = LinkResolutionHandler().resolve_links([constraint], LinkStore())
        assert resolution.retained == (constraint,)

    def test_known_side_must_balance(self):
        store = LinkStore()
        store.assign(_symbol(0, 2, 1), Q)
        with pytest.raises(Contradiction) as excinfo:
            LinkResolutionHandler().resolve_links([_constraint(V11, (_symbol(0, 2, 1), 1), stratum=2, degree=5)], store)
        assert excinfo.value.stratum == 2


class TestNewSystems:

    def _genus_two(self):
        strat = StratificationHandler().make_stratification(2, (1, 1))
        links = LinkStore()
        links.seed_circle_link(2)
        return strat, links

    def test_genus_two_over_a1(self):
        strat, links = self._genus_two()
        prediction = ContributionHandler(strat).predicted_contributions(1, [], links)
        assert prediction.row(0).known == Q
        assert not prediction.row(1).has_unknowns
        fiber = GradedTable(entries={0: Q, 2: Q}, context_genus=1)
        result = NewSystemHandler(strat).infer_new_systems(1, fiber, prediction)
        assert [(e.fiber_degree, str(e.system), e.shift_label) for e in result.entries] == [(2, "Q", 0)]
        assert result.constraints == ()

    def test_fiber_smaller_than_prediction(self):
        strat, links = self._genus_two()
        prediction = ContributionHandler(strat).predicted_contributions(1, [], links)
        fiber = GradedTable(entries={2: Q}, context_genus=1)
        with pytest.raises(NegativeMultiplicity) as excinfo:
            NewSystemHandler(strat).infer_new_systems(1, fiber, prediction)
        assert excinfo.value.stratum == 1
        assert excinfo.value.degree == 0

    def test_residual_without_mirror(self):
        strat, links = self._genus_two()
        prediction = ContributionHandler(strat).predicted_contributions(1, [], links)
        fiber = GradedTable(entries={0: Q, 5: Q}, context_genus=1)
        with pytest.raises(BoundViolation):
            NewSystemHandler(strat).infer_new_systems(1, fiber, prediction)


class TestGenusRuns:

    def test_genus_one_has_no_new_systems(self, reports):
        report = reports[1]
        assert report.ledger == ()
        assert report.ih.render() == "1 0 1"

    def test_genus_two(self, reports):
        report = reports[2]
        assert _ledger(report, 1) == [(2, "Q")]
        assert _ledger(report, 0) == []
        assert report.defect == 0
        assert report.ih.render() == "1 0 1 0 1 0 1"

    def test_genus_three(self, reports):
        report = reports[3]
        assert _ledger(report, 2) == [(2, "Q"), (4, "Q")]
        assert [e.shift_label for e in report.ledger_at(2)] == [-1, 1]
        assert _ledger(report, 1) == [(4, "Q"), (6, "Q")]
        assert _ledger(report, 0) == []
        assert report.ih.render() == "1 0 1 0 1 0 2 0 1 0 1 0 1"
        assert report.assembly.matches_taut() == []
        assert report.assembly.sum_row == (1, 0, 2, 0, 4, 0, 6, 0, 4, 0, 2, 0, 1)

    def test_genus_three_table_rows(self, reports):
        rows = reports[3].assembly.rows
        assert [_cells(row) for row in rows] == [
            ("IH*(Sat_2)[-1]{j=2}", {2: "1", 4: "1", 6: "1", 8: "1"}),
            ("IH*(Sat_2)[1]{j=4}", {4: "1", 6: "1", 8: "1", 10: "1"}),
            ("IH*(Sat_1)[-1]{j=4}", {4: "1", 6: "1"}),
            ("IH*(Sat_1)[1]{j=6}", {6: "1", 8: "1"}),
        ]
        assert set(rows[0].cells) == set(range(2, 9))

    def test_genus_four_table_rows(self, reports):
        assert [_cells(row) for row in reports[4].assembly.rows] == [
            ("IH*(Sat_3)[-2]{j=2}", {2: "1", 4: "1", 6: "1", 8: "2", 10: "1", 12: "1", 14: "1"}),
            ("IH*(Sat_3,V[1,1])[0]{j=4}", {10: "?"}),
            ("IH*(Sat_3)[0]{j=4}", {4: "1", 6: "1", 8: "1", 10: "2", 12: "1", 14: "1", 16: "1"}),
            ("IH*(Sat_3)[2]{j=6}", {6: "1", 8: "1", 10: "1", 12: "2", 14: "1", 16: "1", 18: "1"}),
            ("IH*(Sat_2)[-3]{j=4}", {4: "1", 6: "1", 8: "1", 10: "1"}),
            ("2 IH*(Sat_2)[-1]{j=6}", {6: "2", 8: "2", 10: "2", 12: "2"}),
            ("2 IH*(Sat_2)[1]{j=8}", {8: "2", 10: "2", 12: "2", 14: "2"}),
            ("IH*(Sat_2)[3]{j=10}", {10: "1", 12: "1", 14: "1", 16: "1"}),
            ("IH*(Sat_1)[-3]{j=6}", {6: "1", 8: "1"}),
            ("2 IH*(Sat_1)[-1]{j=8}", {8: "2", 10: "2"}),
            ("2 IH*(Sat_1)[1]{j=10}", {10: "2", 12: "2"}),
            ("IH*(Sat_1)[3]{j=12}", {12: "1", 14: "1"}),
            ("new part of H*(F_{0,4})", {2: "1", 4: "1", 6: "2", 8: "3", 10: "3", 12: "3", 14: "2", 16: "1", 18: "1"}),
        ]

    @pytest.mark.parametrize("g", [2, 3, 4])
    def test_lower_genus_is_reused_unchanged(self, reports, registry, g):
        report, below = reports[g], reports[g - 1]
        assert report.recursive_ih[g - 1] == below.ih
        assert all(report.recursive_ih[k] == below.recursive_ih[k] for k in below.recursive_ih)
        for family in below.links.families():
            for known, carried in zip(below.links.row(family), report.links.row(family)):
                if known is not None:
                    assert carried == known
        standalone = DecompositionEngine(registry).run_genus(g - 1)
        assert standalone.ledger == below.ledger
        assert standalone.ih == below.ih

    def test_genus_four_ledger(self, reports):
        report = reports[4]
        assert _ledger(report, 3) == [(2, "Q"), (4, "V[1,1] + Q"), (6, "Q")]
        assert _ledger(report, 2) == [(4, "Q"), (6, "2 Q"), (8, "2 Q"), (10, "Q")]
        assert _ledger(report, 1) == [(6, "Q"), (8, "2 Q"), (10, "2 Q"), (12, "Q")]
        assert [e.fiber_degree for e in report.ledger_at(0)] == list(range(2, 19, 2))
        assert [e.system.rank for e in report.ledger_at(0)] == [1, 1, 2, 3, 3, 3, 2, 1, 1]

    @pytest.mark.parametrize("g", range(1, 5))
    def test_ledger_is_symmetric(self, reports, g):
        report = reports[g]
        for k in range(g):
            axis = report.stratification.codim(k)
            entries = {(e.fiber_degree, e.system) for e in report.ledger_at(k)}
            assert entries == {(2 * axis - j, system) for j, system in entries}

    def test_genus_four_constraints(self, reports):
        assert {c.label for c in reports[4].constraints} == SIX_PAIRWISE_SUMS

    def test_genus_four_links(self, reports):
        links = reports[4].links
        assert [None if v is None else str(v) for v in links.row((2, 4, ()))] == ["Q", "0", "0", "0", None, None, None]
        assert links.value(0, 4, (), 19) == Q
        assert links.value(0, 4, (), 18).is_zero
        assert links.value(2, 3, (1, 1), 0) is None

    def test_builtin_pairwise_sums_are_not_zero_forced(self, reports):
        labels = {s.label for s in reports[4].zero_forced}
        assert "IH4(N_{2,4},Q)" not in labels
        assert "IH0(N_{2,3},V[1,1])" not in labels

    def test_lost_summand_is_reported_as_zero_forced(self, tmp_path):
        (tmp_path / "damaged.ihdat").write_text(DAMAGED_FIBER, encoding="utf-8")
        report = DecompositionEngine(load_registry(tmp_path)).run_genus(4)
        labels = {s.label for s in report.zero_forced}
        assert {"IH4(N_{2,4},Q)", "IH0(N_{2,3},V[1,1])"} <= labels
        assert report.links.value(2, 4, (), 4).is_zero

    def test_seed_contradicting_a_fiber(self, tmp_path):
        (tmp_path / "seed.ihdat").write_text(
            '[link-seed lower=2 upper=3 coeff="V[1,1]"]\n0: V[1,1]\n', encoding="utf-8"
        )
        with pytest.raises(NegativeMultiplicity) as excinfo:
            DecompositionEngine(load_registry(tmp_path)).run_genus(4)
        assert (excinfo.value.stratum, excinfo.value.degree) == (2, 4)

    def test_genus_four_assembly(self, reports):
        assembly = reports[4].assembly
        assert assembly.sum_row[::2] == (1, 3, 5, 11, 17, 19, 17, 11, 5, 3, 1)
        assert assembly.ih.even_row() == ["1", "1", "1", "2", "2", "?>=2", "2", "2", "1", "1", "1"]
        assert "h10(Vor_4) = IH10(Sat_4) + IH6(Sat_3,V[1,1]) + 17" in [r.label for r in assembly.relations]
        bounds = {b.symbol: b.lower for b in assembly.bounds}
        assert bounds["h10(Vor_4)"] == 19
        assert bounds["IH10(Sat_4)"] == 2
        assert assembly.toroidal[10].render() == "?>=19"

    def test_coefficient_series_forced_to_zero(self, reports):
        series = reports[4].assembly.coefficient_series["Sat_3,V[1,1]"]
        assert series.unknown_degrees() == [6]
        assert all(v.exact == 0 for q, v in enumerate(series.values) if q != 6)

    def test_perfect_cone(self, reports):
        report = reports[4]
        assert report.blowup.label == "Perf_4"
        assert report.blowup.even_row() == ["1", "2", "4", "9", "14", "?>=16", "14", "9", "4", "2", "1"]
        assert all(v.exact == 0 for v in report.blowup.values[1::2])
        assert report.point_check.passed

    def test_lower_genera_have_no_blowup(self, reports):
        assert reports[3].blowup is None

    def test_missing_genus(self, registry):
        with pytest.raises(MissingDataset, match="no dataset for genus 5"):
            run_genus(5, registry)

    def test_genus_zero_is_rejected(self, registry):
        with pytest.raises(OutOfRange):
            DecompositionEngine(registry).run_genus(0)


class TestBlowup:

    def test_round_trip(self, reports, registry):
        handler = BlowupHandler()
        exceptional = registry.exceptional_table(4)
        toroidal = reports[4].assembly.toroidal
        perf = handler.blowup_split(toroidal, exceptional, 10)
        restored = handler.blowup_restore(perf, exceptional, 10, toroidal.label)
        assert restored.values == toroidal.values

    def test_exceptional_new_systems(self, registry):
        entries = BlowupHandler().exceptional_new_systems(registry.exceptional_table(4), 10)
        assert [(e.fiber_degree, e.system.rank) for e in entries] == [
            (2, 1), (4, 1), (6, 2), (8, 3), (10, 3), (12, 3), (14, 2), (16, 1), (18, 1)
        ]

    def test_split_below_exceptional_part(self, registry):
        small = BettiWithUnknowns.from_ints("X", [1] + [0] * 20)
        with pytest.raises(NegativeMultiplicity):
            BlowupHandler().blowup_split(small, registry.exceptional_table(4), 10)

    def test_weak_lower_bound_is_clamped_at_zero(self):
        exceptional = GradedTable(entries={10: IrrepSum.trivial(3)}, context_genus=0)
        weak = BettiWithUnknowns(
            label="X",
            values=tuple([BettiValue.known(0)] * 10 + [BettiValue.unknown(lower=1)]),
        )
        handler = BlowupHandler()
        perf = handler.blowup_split(weak, exceptional, 10)
        assert perf[10].lower == 0
        assert perf[10].render() == "?"
        restored = handler.blowup_restore(perf, exceptional, 10, "X")
        assert restored[10].render() == "?>=3"

    def test_upper_bound_below_exceptional_part(self):
        exceptional = GradedTable(entries={10: IrrepSum.trivial(3)}, context_genus=0)
        capped = BettiWithUnknowns(
            label="X",
            values=tuple([BettiValue.known(0)] * 10 + [BettiValue.unknown(upper=2)]),
        )
        with pytest.raises(NegativeMultiplicity) as excinfo:
            BlowupHandler().blowup_split(capped, exceptional, 10)
        assert excinfo.value.degree == 10

    def test_exceptional_too_large(self):
        exceptional = GradedTable(entries={20: Q}, context_genus=0)
        with pytest.raises(BadDims):
            BlowupHandler().blowup_split(BettiWithUnknowns.from_ints("X", [1]), exceptional, 10)


def test_stage_runner_attaches_stratum():
    def fail():
        raise NegativeMultiplicity("too small")

    runner = StageRunner("test")
    assert runner.execute("ok", lambda: 3) == 3
    with pytest.raises(NegativeMultiplicity) as excinfo:
        runner.execute("fail", fail, stratum=2)
    assert excinfo.value.stratum == 2
    assert runner.completed_steps == ["ok"]
