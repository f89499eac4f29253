"""Tests for verdict enums, samples, reports and system documents"""

from fractions import Fraction

import pytest

from error_handler import DocumentError
from models import (
    SCHEMA_VERSION, Consistency, IndexSample, PropertyReport, ReportVerdict, SystemDocument, TransferCase,
    Verdict, fraction_text, join_verdicts
)


def report(verdict=ReportVerdict.HOLDS_EVIDENCE, witnesses=None) -> PropertyReport:
    return PropertyReport('transitive', {'T': 10, 'w': '1/8'}, verdict, witnesses or [])


def document(**overrides) -> dict:
    data = {
        'space': {'kind': 'finite', 'size': 2},
        'generators': [{'name': 'swap', 'map': {'kind': 'finite', 'table': [1, 0]}}],
        'schedule': {'kind': 'periodic', 'word': ['swap']},
    }
    data.update(overrides)
    return data


class TestVerdicts:
    """Three-valued verdicts"""

    @pytest.mark.parametrize('verdict, code', [
        (Verdict.HOLDS, 0), (Verdict.FAILS, 2), (Verdict.INCONCLUSIVE, 3),
    ])
    def test_report_verdicts(self, verdict, code):
        mapped = ReportVerdict.from_verdict(verdict)
        assert mapped.to_verdict() is verdict
        assert mapped.exit_code == code

    def test_join(self):
        assert join_verdicts([Verdict.HOLDS, Verdict.HOLDS]) is Verdict.HOLDS
        assert join_verdicts([Verdict.HOLDS, Verdict.INCONCLUSIVE]) is Verdict.INCONCLUSIVE
        assert join_verdicts([Verdict.INCONCLUSIVE, Verdict.FAILS]) is Verdict.FAILS
        assert join_verdicts([]) is Verdict.HOLDS

    def test_fraction_text(self):
        assert fraction_text(Fraction(6, 4)) == '3/2'
        assert fraction_text(Fraction(4, 2)) == '2'


class TestIndexSample:
    """Finite-horizon samples"""

    def test_rejects_unsorted_members(self):
        with pytest.raises(ValueError):
            IndexSample(10, (3, 2))
        with pytest.raises(ValueError):
            IndexSample(5, (6,))

    def test_prefix(self):
        sample = IndexSample(10, (2, 5, 9))
        assert sample.prefix(6) == IndexSample(6, (2, 5))
        assert 5 in sample and len(sample) == 3

    def test_dict(self):
        sample = IndexSample(4, (1, 4), exact=False)
        assert IndexSample.from_dict(sample.to_dict()) == sample


class TestPropertyReport:
    """Detector reports"""

    def test_failure_needs_a_witness(self):
        with pytest.raises(ValueError):
            report(ReportVerdict.FAILS_WITNESS)

    def test_round_trip(self):
        failed = report(ReportVerdict.FAILS_WITNESS, [{'pair': [0, 1]}])
        assert failed.fails and not failed.holds
        assert PropertyReport.from_dict(failed.to_dict()) == failed

    def test_transfer_case_exit_code(self):
        case = TransferCase('fixture', 'transitive', {}, report(), report(), 'period-transitive', [], {},
                            Consistency.VIOLATION)
        assert case.exit_code == 2
        assert case.to_dict()['consistency'] == 'Violation'


class TestSystemDocument:
    """Document validation and building"""

    def test_build(self):
        space, s = SystemDocument.from_dict(document()).build()
        assert space.size == 2
        assert s.period() == 1

    def test_schema_version_is_written(self):
        assert SystemDocument.from_dict(document()).to_dict()['schema_version'] == SCHEMA_VERSION

    @pytest.mark.parametrize('overrides, path', [
        ({'space': {'kind': 'torus'}}, '/space/kind'),
        ({'generators': [{'name': '', 'map': {'kind': 'finite'}}]}, '/generators/0/name'),
        ({'generators': [{'name': 'swap', 'map': 'swap'}]}, '/generators/0/map'),
        ({'schedule': {'word': ['swap']}}, '/schedule/kind'),
        ({'schedule': {'kind': 'triangular', 'base': 'swap', 'filler': 'id'}}, '/schedule/filler'),
        ({'defaults': []}, '/defaults'),
        ({'schema_version': 9}, '/schema_version'),
    ])
    def test_validation_paths(self, overrides, path):
        with pytest.raises(DocumentError) as raised:
            SystemDocument.from_dict(document(**overrides))
        assert raised.value.path == path

    def test_missing_section(self):
        data = document()
        del data['schedule']
        with pytest.raises(DocumentError) as raised:
            SystemDocument.from_dict(data)
        assert raised.value.path == '/schedule'

    def test_bad_map_surfaces_on_build(self):
        data = document(generators=[{'name': 'swap', 'map': {'kind': 'finite', 'table': [5, 0]}}])
        with pytest.raises(DocumentError) as raised:
            SystemDocument.from_dict(data).build()
        assert raised.value.path == '/generators/0/map'
