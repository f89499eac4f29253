"""Tests for periodic reductions, tail systems and the transfer harness"""

from fractions import Fraction

import pytest

from core_maps import FiniteMap, map_from_dict
from detectors import CoverSpec
from error_handler import BadParameter, NotPeriodic, Unsupported
from gallery import G3, get_fixture
from hitting_index import sensitivity_hits
from models import Consistency
from reductions import (
    THEOREMS, compile_period_map, hypothesis_flags, implication_compare, reduced_schedule, shift_compare,
    theorem_for, transfer_compare
)
from schedules import Schedule
from spaces_regions import UNIT_INTERVAL

QUARTER = Fraction(1, 4)
PERIODIC_FIXTURES = ['nonsurjective-transitive', 'circle-alternating', 'k-transfer-counterexample',
                     'weak-but-not', 'doubling-kato']


def system(name):
    return get_fixture(name).system()


@pytest.fixture
def doubled_g3() -> Schedule:
    g3 = map_from_dict(G3)
    return Schedule.periodic([g3, g3], ['g3'])


class TestPeriodMap:
    """g = f_k o ... o f_1"""

    def test_square_of_four_cycle(self):
        _, s = system('k-transfer-counterexample')
        assert compile_period_map(s) == FiniteMap((2, 3, 0, 1))

    def test_declared_period_wins_over_detected(self):
        _, s = system('k-transfer-counterexample')
        assert compile_period_map(s, 2) == compile_period_map(s)
        assert reduced_schedule(s).generators == [FiniteMap((2, 3, 0, 1))]

    def test_rejects_wrong_period(self):
        _, s = system('nonsurjective-transitive')
        with pytest.raises(BadParameter):
            compile_period_map(s, 2)

    def test_not_periodic(self):
        _, s = system('shift-growing-blocks')
        with pytest.raises(NotPeriodic):
            compile_period_map(s)
        _, prefixed = system('finite-hitting-isolated')
        with pytest.raises(NotPeriodic):
            compile_period_map(prefixed)

    @pytest.mark.parametrize('name', PERIODIC_FIXTURES)
    def test_reduced_hits_are_every_kth(self, name):
        space, s = system(name)
        k = s.period()
        g = reduced_schedule(s)
        horizon = 12
        for cell in CoverSpec(space, QUARTER).cells:
            nds = set(sensitivity_hits(cell, QUARTER, s, k * horizon).members)
            reduced = sensitivity_hits(cell, QUARTER, g, horizon).members
            assert reduced == tuple(n for n in range(1, horizon + 1) if k * n in nds)


class TestTransferCompare:
    """Period and tail theorems against fixture verdicts"""

    def test_doubling_pair_is_cofinitely_sensitive(self, doubled_g3):
        params = {'delta': '1/4', 'w': '1/8', 'T': 30}
        case = transfer_compare(doubled_g3, UNIT_INTERVAL, 'cofinitely_sensitive', params)
        assert case.consistency is Consistency.CONSISTENT
        assert case.nds_report.holds and case.reduced_report.holds
        reduced = reduced_schedule(doubled_g3)
        for cell in CoverSpec(UNIT_INTERVAL, Fraction(1, 8)).cells:
            for s in (doubled_g3, reduced):
                assert set(range(6, 31)) <= set(sensitivity_hits(cell, QUARTER, s, 30).members)

    def test_converse_failure_is_not_applicable(self):
        space, s = system('k-transfer-counterexample')
        case = transfer_compare(s, space, 'transitive', {'T': 20})
        assert case.nds_report.holds
        assert case.reduced_report.fails
        assert case.reduced_report.witnesses[0]['pair'] == [0, 1]
        assert case.consistency is Consistency.NOT_APPLICABLE
        assert case.directions[1]['claimed'] is False
        assert case.exit_code == 0

    def test_tail_converse_needs_feeble_open_maps(self):
        space, s = system('nonsurjective-transitive')
        case = shift_compare(s, space, 2, 'sensitive', {'delta': '1/4', 'w': '1/8', 'T': 60})
        converse = case.directions[1]
        assert converse['status'] == 'NotApplicable'
        assert 'feeble_open' in converse['unmet_hypotheses']
        assert case.hypotheses['not_feeble_open'] == ['g2']
        assert case.hypotheses['all_surjective'] is False

    def test_tail_transitivity(self):
        space, s = system('doubling-kato')
        case = shift_compare(s, space, 3, 'transitive', {'w': '1/8', 'T': 20})
        assert case.consistency is Consistency.CONSISTENT
        assert case.theorem_tag == 'shift-transitivity'

    def test_shift_needs_later_start(self):
        space, s = system('doubling-kato')
        with pytest.raises(BadParameter):
            shift_compare(s, space, 1, 'transitive', {})

    def test_uncovered_property(self):
        with pytest.raises(Unsupported):
            theorem_for('period', 'kato')


class TestImplications:
    """Single-system implications"""

    def test_weak_mixing_gives_kato(self):
        space, s = system('doubling-kato')
        params = {'delta': '1/4', 'epsilon': '1/16', 'w': '1/8', 'T': 30}
        case = implication_compare(s, space, 'weakly-mixing-kato', params)
        assert case.consistency is Consistency.CONSISTENT
        assert (case.nds_report.property, case.reduced_report.property) == ('weakly_mixing', 'kato')

    def test_mixing_gives_cofinite_sensitivity(self):
        space, s = system('doubling-kato')
        case = implication_compare(s, space, 'mixing-cofinitely-sensitive', {'delta': '1/4', 'w': '1/8', 'T': 30})
        assert case.consistency is Consistency.CONSISTENT

    def test_unmet_hypotheses_are_not_violations(self):
        space, s = system('k-transfer-counterexample')
        case = implication_compare(s, space, 'nonrecurrent-sensitive', {'delta': '1/4', 'T': 20})
        assert case.nds_report.holds and case.reduced_report.fails
        assert case.consistency is Consistency.NOT_APPLICABLE
        assert 'no_isolated_points' in case.directions[0]['unmet_hypotheses']
        assert any(note.startswith('needs-fixture') for note in case.notes)

    def test_unknown_tag(self):
        space, s = system('doubling-kato')
        with pytest.raises(BadParameter):
            implication_compare(s, space, 'period-sensitive', {})

    def test_registry_tags_match_keys(self):
        assert all(tag == theorem.tag for tag, theorem in THEOREMS.items())
        assert THEOREMS['period-transitive'].converse_hypotheses is None


class TestHypothesisFlags:
    """Flags recorded with each case"""

    def test_finite_cycle_flags(self):
        space, s = system('k-transfer-counterexample')
        flags = hypothesis_flags(s, space, {})
        assert flags['all_surjective'] and flags['commutative'] and flags['periodic']
        assert not flags['no_isolated_points']
        assert flags['nonrecurrent_point'] is False

    def test_nonrecurrent_point_flag(self):
        space, s = system('finite-hitting-isolated')
        flags = hypothesis_flags(s, space, {'point': 'a', 'epsilon': '1/2', 'T': 20})
        assert flags['nonrecurrent_point'] is False
        assert flags['periodic'] is False
