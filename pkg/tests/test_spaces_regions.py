"""Tests for spaces, exact region algebra and cover cells"""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import pl
from core_maps import FiniteMap, PLMap, Rotation, Shift, evaluate
from error_handler import BadParameter, SpaceMismatch
from points import AlphaNumber, CirclePoint, FinitePoint, IntervalPoint, SeqPoint
from spaces_regions import (
    CIRCLE, SHIFT_SPACE, UNIT_INTERVAL, RegionSet, SpaceSpec, ball, basis_cells, distance, image,
    preimage, shift_width_for
)

unit_rationals = st.fractions(min_value=0, max_value=1, max_denominator=32)
radii = st.fractions(min_value=Fraction(1, 64), max_value=Fraction(3, 4), max_denominator=64)

open_unit = unit_rationals.filter(lambda v: 0 < v < 1)
bits = st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=3).map(tuple)
seq_points = st.builds(SeqPoint, bits, st.lists(st.integers(0, 1), max_size=4).map(tuple), bits, st.integers(-3, 3))


@st.composite
def pl_maps(draw):
    """PL self-maps of [0,1] with jumps and arbitrary values at the breakpoints"""
    knots = draw(st.integers(0, 3))
    xs = (Fraction(0), *sorted(draw(st.lists(open_unit, min_size=knots, max_size=knots, unique=True))), Fraction(1))
    pieces = []
    for x0, x1 in zip(xs, xs[1:]):
        y0, y1 = draw(unit_rationals), draw(unit_rationals)
        slope = (y1 - y0) / (x1 - x0)
        pieces.append((slope, y0 - slope * x0))
    values = draw(st.lists(unit_rationals, min_size=len(xs), max_size=len(xs)))
    return PLMap(xs, tuple(pieces), tuple(values))


@st.composite
def unit_intervals(draw):
    a, b = draw(unit_rationals), draw(unit_rationals)
    return RegionSet.interval(UNIT_INTERVAL, min(a, b), max(a, b), draw(st.booleans()), draw(st.booleans()))


@st.composite
def arcs(draw):
    lo, length = draw(unit_rationals), draw(unit_rationals)
    return RegionSet.interval(CIRCLE, lo, lo + length, draw(st.booleans()), draw(st.booleans()))


def interval(lo, hi, lo_closed=True, hi_closed=True):
    return RegionSet.interval(UNIT_INTERVAL, Fraction(lo), Fraction(hi), lo_closed, hi_closed)


class TestSpaceSpec:
    """Space validation"""

    def test_finite_labels(self):
        space = SpaceSpec.finite(3, ['a', 'b', 'c'])
        assert space.index_of('b') == 1
        with pytest.raises(BadParameter):
            space.index_of('z')

    def test_rejects_bad_metric(self):
        with pytest.raises(ValueError):
            SpaceSpec.finite(2, metric=((0, 1), (2, 0)))

    def test_diameters(self):
        assert CIRCLE.diameter == Fraction(1, 2)
        assert SpaceSpec.finite(3).diameter == 1

    def test_round_trip(self):
        space = SpaceSpec.finite(2, ['x', 'y'])
        assert SpaceSpec.from_dict(space.to_dict()) == space


class TestRegionAlgebra:
    """Boolean operations are exact"""

    def test_interval_union_merges(self):
        region = interval(0, Fraction(1, 2), True, False).union(interval(Fraction(1, 2), 1))
        assert region == RegionSet.full(UNIT_INTERVAL)

    def test_open_endpoint_is_respected(self):
        left = interval(0, Fraction(1, 2), True, False)
        right = interval(Fraction(1, 2), 1)
        assert not left.intersects(right)
        assert left.closure().intersects(right)

    def test_complement(self):
        region = interval(Fraction(1, 4), Fraction(1, 2))
        assert region.union(region.complement()).is_full()
        assert region.intersection(region.complement()).is_empty()

    def test_circle_arc_wraps(self):
        arc = RegionSet.interval(CIRCLE, Fraction(3, 4), Fraction(5, 4))
        assert arc.contains(CirclePoint(Fraction(0)))
        assert arc.contains(CirclePoint(Fraction(7, 8)))
        assert not arc.contains(CirclePoint(Fraction(1, 2)))

    def test_cylinder_algebra(self):
        a = RegionSet.cylinder({0: 0})
        b = RegionSet.cylinder({1: 1})
        both = a.intersection(b)
        assert both == RegionSet.cylinder({0: 0, 1: 1})
        assert a.union(a.complement()).is_full()

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            interval(0, 1).intersection(RegionSet.full(CIRCLE))

    def test_finite_indices_checked(self):
        with pytest.raises(SpaceMismatch):
            RegionSet(SpaceSpec.finite(2), (5,))


class TestMetric:
    """Distances, diameters, gaps and balls"""

    def test_diam(self):
        assert interval(Fraction(1, 8), Fraction(3, 8)).diam() == Fraction(1, 4)
        assert RegionSet.cylinder({0: 0}).diam() == Fraction(1, 2)
        assert RegionSet.cylinder({2: 1}).diam() == 1
        assert RegionSet.full(CIRCLE).diam() == Fraction(1, 2)

    def test_gap(self):
        assert interval(0, Fraction(1, 4)).gap(interval(Fraction(1, 2), 1)) == Fraction(1, 4)
        assert RegionSet.cylinder({0: 0}).gap(RegionSet.cylinder({0: 1})) == 1
        assert RegionSet.cylinder({1: 0}).gap(RegionSet.cylinder({1: 1})) == Fraction(1, 2)

    def test_circle_distance_wraps(self):
        assert distance(CIRCLE, CirclePoint(Fraction(1, 10)), CirclePoint(Fraction(9, 10))) == Fraction(1, 5)

    def test_shift_distance(self):
        x = SeqPoint.periodic((0,))
        y = SeqPoint((0,), (1,), (0,), -2)
        assert distance(SHIFT_SPACE, x, y) == Fraction(1, 4)

    def test_shift_ball_at_half(self):
        x = SeqPoint.periodic((0,))
        assert ball(SHIFT_SPACE, x, Fraction(1, 2)) == RegionSet.cylinder({-1: 0, 0: 0, 1: 0})

    @given(unit_rationals, radii)
    def test_interval_ball_diameter(self, x, radius):
        region = ball(UNIT_INTERVAL, IntervalPoint(x), radius)
        assert region.contains(IntervalPoint(x))
        assert region.diam() <= 2 * radius

    @given(st.integers(0, 3), radii)
    def test_shift_ball_diameter(self, shift, radius):
        x = SeqPoint((0,), (1, 0, 1), (1,), -shift)
        region = ball(SHIFT_SPACE, x, radius)
        assert region.contains(x)
        assert region.diam() <= 2 * radius

    def test_bad_radius(self):
        with pytest.raises(BadParameter):
            ball(UNIT_INTERVAL, IntervalPoint(Fraction(0)), 0)


class TestImages:
    """Exact forward images and preimages"""

    def test_pl_image(self, g1, g2, g3):
        upper = interval(Fraction(1, 2), 1)
        assert image(upper, g1) == interval(Fraction(1, 4), Fraction(1, 2))
        assert image(upper, g2) == interval(1, 1)
        lower = interval(Fraction(1, 4), Fraction(1, 2), True, False)
        assert image(lower, g3) == interval(Fraction(1, 2), 1, True, False)

    def test_pl_preimage(self, g3):
        target = interval(0, Fraction(1, 4))
        expected = interval(0, Fraction(1, 8)).union(interval(Fraction(1, 2), Fraction(5, 8)))
        assert preimage(target, g3) == expected

    @given(unit_rationals, unit_rationals)
    def test_image_contains_images_of_points(self, a, b):
        g3 = pl([0, '1/2', 1], [(2, 0), (2, -1)])
        lo, hi = min(a, b), max(a, b)
        region = interval(lo, hi)
        mapped = image(region, g3)
        for x in (lo, (lo + hi) / 2, hi):
            assert mapped.contains(IntervalPoint(g3.value_at(x)))

    def test_rotation_moves_arcs_by_alpha(self):
        arc = RegionSet.interval(CIRCLE, Fraction(0), Fraction(1, 4))
        moved = image(arc, Rotation(1))
        assert moved.contains(CirclePoint(Fraction(1, 8), 1))
        assert preimage(moved, Rotation(1)) == arc
        assert moved.diam() == arc.diam()

    def test_finite_image(self, four_cycle):
        space = SpaceSpec.finite(4)
        region = RegionSet(space, (0, 1))
        assert image(region, four_cycle) == RegionSet(space, (1, 2))
        assert preimage(region, FiniteMap((0, 0, 0, 3))) == RegionSet(space, (0, 1, 2))

    def test_shift_image(self):
        region = RegionSet.cylinder({0: 1})
        assert image(region, Shift(1)) == RegionSet.cylinder({-1: 1})
        assert preimage(region, Shift(1)) == RegionSet.cylinder({1: 1})

    def test_finite_point_membership(self):
        space = SpaceSpec.finite(3)
        assert RegionSet(space, (2,)).contains(FinitePoint(2))

    @given(pl_maps(), unit_intervals(), unit_intervals(), unit_rationals)
    def test_pl_preimage_is_pointwise(self, m, first, second, x):
        region = first.union(second)
        point = IntervalPoint(x)
        assert preimage(region, m).contains(point) == region.contains(evaluate(m, point))

    @given(st.integers(-3, 3), unit_rationals, arcs(), unit_rationals, st.integers(-3, 3))
    def test_rotation_preimage_is_pointwise(self, step, offset, region, base, steps):
        m = Rotation(step, offset)
        point = CirclePoint(base, steps)
        assert preimage(region, m).contains(point) == region.contains(evaluate(m, point))

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(
        st.lists(st.integers(0, n - 1), min_size=n, max_size=n), st.sets(st.integers(0, n - 1)),
        st.integers(0, n - 1))))
    def test_finite_preimage_is_pointwise(self, drawn):
        table, targets, index = drawn
        space = SpaceSpec.finite(len(table))
        region, m, point = RegionSet(space, tuple(targets)), FiniteMap(tuple(table)), FinitePoint(index)
        assert preimage(region, m).contains(point) == region.contains(evaluate(m, point))

    @given(st.integers(-3, 3), st.dictionaries(st.integers(-3, 3), st.integers(0, 1), max_size=3), seq_points)
    def test_shift_preimage_is_pointwise(self, power, constraints, point):
        region, m = RegionSet.cylinder(constraints), Shift(power)
        assert preimage(region, m).contains(point) == region.contains(evaluate(m, point))


class TestCells:
    """Cover cells and representatives"""

    def test_interval_cells(self):
        cells = basis_cells(UNIT_INTERVAL, Fraction(1, 8))
        assert len(cells) == 8
        assert cells[-1].contains(IntervalPoint(Fraction(1)))
        union = cells[0]
        for cell in cells[1:]:
            union = union.union(cell)
        assert union.is_full()

    def test_shift_cell_width(self):
        assert shift_width_for(Fraction(1, 2)) == 1
        assert shift_width_for(Fraction(1, 4)) == 3
        cells = basis_cells(SHIFT_SPACE, Fraction(1, 4))
        assert len(cells) == 8
        assert all(cell.diam() <= Fraction(1, 4) for cell in cells)

    def test_centers_lie_in_cells(self):
        for space in (UNIT_INTERVAL, CIRCLE, SHIFT_SPACE, SpaceSpec.finite(3)):
            for cell in basis_cells(space, Fraction(1, 4)):
                assert cell.contains(cell.center())

    def test_sample_points_lie_in_region(self):
        region = RegionSet.interval(CIRCLE, AlphaNumber(0, 1), AlphaNumber(Fraction(1, 2), 1))
        points = region.sample_points(2)
        assert points
        assert all(region.contains(p) for p in points)
