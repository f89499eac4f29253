"""Tests for map specifications, exact composition and structural analysis"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import pl
from core_maps import (
    IDENTITY, Composite, FiniteMap, Inverse, PLMap, Rotation, Shift, analyze, commutes,
    compile_window, compose, evaluate, flatten, invert, map_from_dict, uniformly_continuous
)
from error_handler import HeterogeneousWindow, NotInvertible, SpaceMismatch
from gallery import get_fixture, list_fixtures
from models import Verdict
from points import CirclePoint, FinitePoint, IntervalPoint, SeqPoint
from window_cache import window_cache

unit_rationals = st.fractions(min_value=0, max_value=1, max_denominator=64)
bits = st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=4).map(tuple)


def points_of(space):
    """Exact points of a fixture's phase space"""
    if space.kind == 'interval':
        return unit_rationals.map(IntervalPoint)
    if space.kind == 'circle':
        return st.builds(CirclePoint, unit_rationals, st.integers(-6, 6))
    if space.kind == 'finite':
        return st.integers(0, space.size - 1).map(FinitePoint)
    return st.builds(SeqPoint, bits, st.lists(st.integers(0, 1), max_size=4).map(tuple), bits,
                     st.integers(-4, 4))


open_unit = unit_rationals.filter(lambda v: 0 < v < 1)


@st.composite
def pl_homeomorphisms(draw):
    """Continuous monotone PL bijections of [0,1], increasing or decreasing"""
    knots = draw(st.integers(0, 4))
    xs = [Fraction(0), *sorted(draw(st.lists(open_unit, min_size=knots, max_size=knots, unique=True))), Fraction(1)]
    ys = [Fraction(0), *sorted(draw(st.lists(open_unit, min_size=knots, max_size=knots, unique=True))), Fraction(1)]
    if draw(st.booleans()):
        ys = [1 - y for y in ys]
    pieces = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append((slope, y0 - slope * x0))
    return pl(xs, pieces)


permutations = st.integers(1, 7).flatmap(lambda n: st.permutations(list(range(n)))).map(tuple)


class TestEvaluate:
    """Exact point images"""

    def test_pl_maps(self, g1, g2, g3):
        half = IntervalPoint(Fraction(1, 2))
        assert evaluate(g1, half) == IntervalPoint(Fraction(1, 4))
        assert evaluate(g2, half) == IntervalPoint(Fraction(1))
        assert evaluate(g3, half) == IntervalPoint(Fraction(0))
        assert evaluate(g3, IntervalPoint(Fraction(1))) == IntervalPoint(Fraction(1))

    def test_rotation_counts_alpha_steps(self):
        x = CirclePoint(Fraction(1, 3))
        assert evaluate(Rotation(1, Fraction(1, 2)), x) == CirclePoint(Fraction(5, 6), 1)

    def test_finite_and_shift(self, four_cycle):
        assert evaluate(four_cycle, FinitePoint(3)) == FinitePoint(0)
        x = SeqPoint((0,), (1,), (0,), 0)
        assert evaluate(Shift(1), x).at(-1) == 1

    def test_space_mismatch(self, g1):
        with pytest.raises(SpaceMismatch):
            evaluate(g1, FinitePoint(0))

    def test_finite_point_out_of_range(self, four_cycle):
        with pytest.raises(SpaceMismatch):
            evaluate(four_cycle, FinitePoint(7))


class TestCompose:
    """Flattening and composition"""

    @given(unit_rationals)
    def test_pl_composition_is_pointwise(self, x):
        g1 = pl([0, 1], [('1/2', 0)])
        g2 = pl([0, '1/2', 1], [(2, 0), (0, 1)])
        g3 = pl([0, '1/2', 1], [(2, 0), (2, -1)])
        for outer, inner in ((g3, g1), (g2, g3), (g3, g3), (g1, g2)):
            point = IntervalPoint(x)
            assert evaluate(compose(outer, inner), point) == evaluate(outer, evaluate(inner, point))

    def test_identity_is_neutral(self, g3):
        assert compose(IDENTITY, g3) == g3
        assert compose(g3, IDENTITY) == g3

    def test_g2_after_g1_is_identity_on_interval(self, g1, g2):
        assert compose(g2, g1) == pl([0, 1], [(1, 0)])

    def test_rotations_add(self):
        assert compose(Rotation(1), Rotation(-1)) == Rotation(0, 0)
        assert compose(Rotation(2, Fraction(3, 4)), Rotation(0, Fraction(1, 2))) == Rotation(2, Fraction(1, 4))

    def test_shift_powers_add(self):
        assert compose(Shift(2), Shift(-1)) == Shift(1)

    def test_heterogeneous(self):
        with pytest.raises(HeterogeneousWindow):
            compose(Rotation(1), Shift(1))
        with pytest.raises(HeterogeneousWindow):
            Composite((Rotation(1), Shift(1)))

    def test_flatten_composite(self, four_cycle):
        assert flatten(Composite((four_cycle, four_cycle))) == FiniteMap((2, 3, 0, 1))

    def test_normal_form_equality(self):
        # a redundant breakpoint disappears
        assert pl([0, '1/3', 1], [(1, 0), (1, 0)]) == pl([0, 1], [(1, 0)])

    def test_round_trip_through_dict(self, g2):
        assert map_from_dict(g2.to_dict()) == g2
        assert map_from_dict(Inverse(FiniteMap((1, 0))).to_dict()) == Inverse(FiniteMap((1, 0)))

    def test_rejects_pieces_leaving_interval(self):
        with pytest.raises(ValueError):
            PLMap.from_pieces([0, 1], [(2, 0)])


class TestWindows:
    """compile_window and the window cocycle"""

    @pytest.mark.parametrize('name', list_fixtures())
    @settings(max_examples=1000)
    @given(st.integers(1, 12), st.integers(0, 4), st.integers(0, 4), st.data())
    def test_cocycle(self, name, i, m, n, data):
        space, s = get_fixture(name).system()
        whole = compile_window(s, i, m + n)
        split = compose(compile_window(s, i + m, n), compile_window(s, i, m))
        assert whole == split
        point = data.draw(points_of(space))
        stepwise = point
        for j in range(i, i + m + n):
            stepwise = evaluate(s.map_at(j), stepwise)
        assert evaluate(whole, point) == stepwise

    def test_alternating_rotation_windows(self, alternating_rotation):
        for k in range(1, 51):
            assert compile_window(alternating_rotation, 1, 2 * k) == Rotation(0, 0)
        assert compile_window(alternating_rotation, 2, 1) == Rotation(-1)

    def test_periodic_windows_are_memoized(self, alternating_rotation):
        compile_window(alternating_rotation, 1, 4)
        compile_window(alternating_rotation, 3, 4)
        assert window_cache.get_cache_stats()['hits'] >= 4

    def test_zero_length_window(self, alternating_rotation):
        assert compile_window(alternating_rotation, 5, 0) == IDENTITY


class TestCommutes:
    """Exact commutation decisions"""

    def test_rotations_and_shifts_commute(self):
        assert commutes(Rotation(1), Rotation(-3, Fraction(1, 2))).verdict is Verdict.HOLDS
        assert commutes(Shift(1), Shift(-1)).verdict is Verdict.HOLDS

    def test_pl_witness(self, g1, g3):
        result = commutes(g1, g3)
        assert result.verdict is Verdict.FAILS
        x = Fraction(result.witness['point'])
        assert evaluate(compose(g1, g3), IntervalPoint(x)) != evaluate(compose(g3, g1), IntervalPoint(x))

    def test_finite_witness(self, four_cycle):
        swap = FiniteMap((1, 0, 2, 3))
        result = commutes(four_cycle, swap)
        assert result.verdict is Verdict.FAILS
        assert result.witness['a_after_b'] != result.witness['b_after_a']

    def test_mismatched_spaces(self, g1):
        with pytest.raises(SpaceMismatch):
            commutes(g1, Rotation(1))


class TestAnalyze:
    """Structural flags"""

    def test_g1_not_surjective(self, g1):
        flags = analyze(g1)
        assert (flags.continuous, flags.surjective, flags.injective, flags.feeble_open) == (True, False, True, True)

    def test_g2_not_feeble_open(self, g2):
        flags = analyze(g2)
        assert flags.continuous and flags.surjective
        assert not flags.feeble_open and not flags.injective

    def test_g3_discontinuous_surjection(self, g3):
        flags = analyze(g3)
        assert not flags.continuous and flags.surjective and not flags.injective

    def test_isometries(self, four_cycle):
        assert analyze(Rotation(1)).isometry
        assert analyze(four_cycle).isometry
        assert not analyze(Shift(1)).isometry
        assert analyze(Shift(0)).isometry

    def test_uniform_continuity(self, g3):
        assert uniformly_continuous(Composite((g3, g3)))


class TestInvert:
    """Exact inverses"""

    def test_finite_inverse(self, four_cycle):
        assert compose(invert(four_cycle), four_cycle) == FiniteMap((0, 1, 2, 3))

    def test_rotation_and_shift(self):
        assert invert(Rotation(2, Fraction(1, 3))) == Rotation(-2, Fraction(2, 3))
        assert invert(Shift(3)) == Shift(-3)

    def test_pl_inverse(self):
        m = pl([0, '1/2', 1], [('1/2', 0), ('3/2', '-1/2')])
        assert compose(invert(m), m) == pl([0, 1], [(1, 0)])

    def test_not_invertible_flags(self, g1, g2):
        with pytest.raises(NotInvertible) as raised:
            invert(g2)
        assert raised.value.flag == 'injective'
        with pytest.raises(NotInvertible) as raised:
            invert(g1)
        assert raised.value.flag == 'surjective'

    @given(pl_homeomorphisms(), unit_rationals)
    def test_pl_inverse_undoes_the_map(self, m, x):
        point = IntervalPoint(x)
        inverse = invert(m)
        assert evaluate(inverse, evaluate(m, point)) == point
        assert evaluate(m, evaluate(inverse, point)) == point

    @given(st.integers(-5, 5), unit_rationals, unit_rationals, st.integers(-5, 5))
    def test_rotation_inverse_undoes_the_map(self, step, offset, base, steps):
        m = Rotation(step, offset)
        point = CirclePoint(base, steps)
        assert evaluate(invert(m), evaluate(m, point)) == point

    @given(permutations, st.data())
    def test_finite_inverse_undoes_the_map(self, table, data):
        m = FiniteMap(table)
        point = FinitePoint(data.draw(st.integers(0, len(table) - 1)))
        assert evaluate(invert(m), evaluate(m, point)) == point
        assert compose(m, invert(m)) == FiniteMap(tuple(range(len(table))))
