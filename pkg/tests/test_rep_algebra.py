from math import comb

import pytest

from src.shared.errors import NegativeMultiplicity, NonMonotone, OutOfRange, TooManyRows
from src.features.rep_algebra import (
    IrrepSum,
    Partition,
    align_twists,
    dual,
    exterior_power_decomposition,
    irrep_dimension,
    partition_normalize,
    partition_weight,
    sum_add,
    sum_max,
    sum_min,
    sum_subtract,
    weyl_dimension,
)

Q = IrrepSum.trivial()
V11 = IrrepSum.of((1, 1))
V22 = IrrepSum.of((2, 2))


def _partitions(max_weight, max_rows):
    """Every partition of weight <= max_weight with at most max_rows rows."""
    found = [()]

    def extend(parts, remaining):
        largest = parts[-1] if parts else remaining
        for part in range(1, min(largest, remaining) + 1):
            grown = parts + (part,)
            if len(grown) <= max_rows:
                found.append(grown)
                extend(grown, remaining - part)

    extend((), max_weight)
    return sorted(found, key=lambda p: (sum(p), p))


def _king_tableaux(parts, genus):
    """Count symplectic tableaux of shape `parts`: letters 1 < 1' < ... < g < g',
    rows weakly and columns strictly increasing, row r holding only letters >= r."""
    boxes = [(r, c) for r, length in enumerate(parts) for c in range(length)]
    filling = {}

    def fill(index):
        if index == len(boxes):
            return 1
        r, c = boxes[index]
        low = 2 * r
        if c > 0:
            low = max(low, filling[(r, c - 1)])
        if r > 0:
            low = max(low, filling[(r - 1, c)] + 1)
        count = 0
        for letter in range(low, 2 * genus):
            filling[(r, c)] = letter
            count += fill(index + 1)
        del filling[(r, c)]
        return count

    return fill(0)


SMALL_WEIGHTS = [(parts, g) for g in (1, 2, 3) for parts in _partitions(3, g)]

GENUS_THREE_PARTS = _partitions(3, 3)
UNTWISTED_SUMS = [IrrepSum.zero()] + [
    IrrepSum.of(parts, 1 + i % 3) + IrrepSum.of(GENUS_THREE_PARTS[(i + 2) % len(GENUS_THREE_PARTS)])
    for i, parts in enumerate(GENUS_THREE_PARTS)
]
TWISTED_SUMS = [
    IrrepSum.of(parts, twist=-sum(parts)) + IrrepSum.trivial(1 + i % 2, twist=-i)
    for i, parts in enumerate(GENUS_THREE_PARTS)
]



class TestPartition:

    def test_trailing_zeros_are_dropped(self):
        assert partition_normalize([2, 1, 0], 3).parts == (2, 1)

    def test_increasing_parts_rejected(self):
        with pytest.raises(NonMonotone):
            partition_normalize([1, 2], 2)

    def test_negative_part_rejected(self):
        with pytest.raises(NonMonotone):
            partition_normalize([1, -1], 2)

    def test_too_many_rows(self):
        with pytest.raises(TooManyRows):
            partition_normalize([1, 1, 1], 2)

    def test_negative_genus(self):
        with pytest.raises(OutOfRange):
            partition_normalize([], -1)

    def test_genus_zero_only_allows_trivial(self):
        assert partition_normalize([], 0).is_trivial
        with pytest.raises(TooManyRows):
            partition_normalize([1], 0)

    def test_weight_and_label(self):
        p = Partition(parts=(2, 2), ambient_genus=2)
        assert partition_weight(p) == 4
        assert p.label == "V[2,2]"
        assert Partition(parts=(), ambient_genus=1).label == "Q"

    @pytest.mark.parametrize("parts,genus,expected", [
        ((), 3, 1),
        ((1,), 1, 2),
        ((1,), 2, 4),
        ((1, 1), 2, 5),
        ((2,), 2, 10),
        ((2, 2), 2, 14),
        ((1, 1), 3, 14),
        ((1, 1, 1), 3, 14),
    ])
    def test_weyl_dimension(self, parts, genus, expected):
        assert weyl_dimension(Partition(parts=parts, ambient_genus=genus)) == expected

    @pytest.mark.parametrize("parts,genus", SMALL_WEIGHTS)
    def test_weyl_dimension_counts_symplectic_tableaux(self, parts, genus):
        assert weyl_dimension(Partition(parts=parts, ambient_genus=genus)) == _king_tableaux(parts, genus)

    @pytest.mark.parametrize("parts,genus", SMALL_WEIGHTS)
    def test_normalize_is_idempotent(self, parts, genus):
        padded = list(parts) + [0] * (genus - len(parts))
        once = partition_normalize(padded, genus)
        assert partition_normalize(once.parts, genus) == once
        assert once.parts == parts



class TestIrrepSum:

    def test_canonical_order_and_label(self):
        total = V22 + V11 + Q * 2
        assert str(total) == "V[2,2] + V[1,1] + 2 Q"
        assert total == IrrepSum.from_counts({((), None): 2, ((1, 1), None): 1, ((2, 2), None): 1})

    def test_zero_renders_as_zero(self):
        assert str(IrrepSum.zero()) == "0"
        assert IrrepSum.zero().is_zero

    def test_subtract_below_zero(self):
        with pytest.raises(NegativeMultiplicity):
            sum_subtract(Q, V11)

    def test_negative_counts_rejected(self):
        with pytest.raises(NegativeMultiplicity):
            IrrepSum.from_counts({((), None): -1})

    def test_scaling(self):
        assert (V11 * 3).rank == 3
        assert 2 * Q == Q + Q
        with pytest.raises(NegativeMultiplicity):
            Q * -1

    def test_min_and_max(self):
        a = V11 + Q * 2
        b = V22 + Q
        assert sum_min(a, b) == Q
        assert sum_max(a, b) == V22 + V11 + Q * 2

    def test_dimension(self):
        assert irrep_dimension(V22 + V11 + Q * 2, 2) == 21
        assert (V11 + Q).dimension(2) == 6


class TestTwists:

    def test_mixed_operands_drop_twists(self):
        twisted = IrrepSum.of((2,), twist=-2)
        assert str(sum_add(twisted, IrrepSum.of((2,)))) == "2 V[2]"

    def test_twisted_operands_keep_twists(self):
        total = sum_add(IrrepSum.trivial(twist=-1), IrrepSum.trivial(twist=-2))
        assert str(total) == "Q(-2) + Q(-1)"

    def test_zero_is_neutral(self):
        twisted = IrrepSum.trivial(twist=-1)
        assert sum_add(IrrepSum.zero(), twisted) == twisted
        assert align_twists(IrrepSum.zero(), twisted) == (IrrepSum.zero(), twisted)

    def test_matches_ignores_one_sided_twists(self):
        assert IrrepSum.of((2,), twist=-1).matches(IrrepSum.of((2,)))
        assert not IrrepSum.of((2,), twist=-1).matches(IrrepSum.of((2,), twist=-2))

    def test_dual_is_an_involution(self):
        a = IrrepSum.of((2,), twist=-3) + IrrepSum.trivial(twist=-1)
        assert dual(IrrepSum.trivial(twist=-3), weight=2) == IrrepSum.trivial(twist=1)
        assert dual(dual(a, weight=4), weight=4) == a
        assert dual(V11) == V11


class TestSumLaws:

    @pytest.mark.parametrize("a", UNTWISTED_SUMS)
    @pytest.mark.parametrize("b", UNTWISTED_SUMS)
    def test_subtract_undoes_add(self, a, b):
        assert sum_subtract(sum_add(a, b), b) == a

    @pytest.mark.parametrize("a", TWISTED_SUMS)
    @pytest.mark.parametrize("b", TWISTED_SUMS)
    def test_subtract_undoes_add_with_twists(self, a, b):
        assert sum_subtract(sum_add(a, b), b) == a

    @pytest.mark.parametrize("a", UNTWISTED_SUMS + TWISTED_SUMS)
    @pytest.mark.parametrize("weight", [0, 3])
    def test_dual_twice_is_identity(self, a, weight):
        assert dual(dual(a, weight=weight), weight=weight) == a

    @pytest.mark.parametrize("a", UNTWISTED_SUMS)
    def test_dual_fixes_untwisted_sums(self, a):
        assert dual(a, weight=3) == a


class TestExteriorPowers:


    def test_wedge_two_of_genus_two(self):
        assert exterior_power_decomposition(2, 2) == V11 + Q

    def test_duality_above_genus(self):
        assert exterior_power_decomposition(3, 4) == exterior_power_decomposition(3, 2)
        assert exterior_power_decomposition(3, 6) == Q

    @pytest.mark.parametrize("g", range(1, 8))
    def test_dimensions_are_binomials(self, g):
        for q in range(2 * g + 1):
            assert exterior_power_decomposition(g, q).dimension(g) == comb(2 * g, q)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            exterior_power_decomposition(2, 5)
