"""Tests for the command-line front end"""

import io
import json

import pytest

import config
from gallery import get_fixture
from main import EXIT_FAILS, EXIT_OK, EXIT_USAGE, main
from utils import document_hash


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def restore_workers(monkeypatch):
    monkeypatch.setattr(config, 'WORKERS', 1)


class TestCheck:
    """check subcommand"""

    def test_isometry_fails_with_exit_two(self):
        code, out, _ = run('check', '--system', 'circle-alternating', '--property', 'sensitive',
                           '--delta', '1/10', '--horizon', '100')
        assert code == EXIT_FAILS
        report = json.loads(out)
        assert report['result']['verdict'] == 'FailsWitness'
        assert report['parameters']['delta'] == '1/10'
        assert report['document_hash'] == document_hash(get_fixture('circle-alternating').document)

    def test_holds_exits_zero(self):
        code, out, _ = run('check', '--system', 'doubling-kato', '--property', 'kato')
        assert code == EXIT_OK
        assert json.loads(out)['parameters'] == {'T': 30, 'delta': '1/4', 'epsilon': '1/16', 'w': '1/8'}

    def test_inconclusive_exits_three(self):
        code, _, _ = run('check', '--system', 'minimal2-blocks', '--property', 'minimal_m1',
                         '--cover', '1/4', '--horizon', '20')
        assert code == 3

    def test_float_parameters_are_rejected(self):
        code, out, err = run('check', '--system', 'doubling-kato', '--property', 'sensitive', '--delta', '0.25')
        assert code == EXIT_USAGE
        assert out == ''
        assert err

    def test_output_is_identical_across_workers(self):
        argv = ('check', '--system', 'nonsurjective-transitive', '--property', 'transitive', '--horizon', '30')
        _, serial, _ = run('--workers', '1', *argv)
        _, threaded, _ = run('--workers', '4', *argv)
        assert serial == threaded

    def test_minimality_points(self):
        code, out, _ = run('check', '--system', 'minimal2-blocks', '--property', 'minimal_m2', '--points', '1')
        assert code == EXIT_FAILS
        assert json.loads(out)['result']['witnesses'][0]['point'] == '1'


class TestOrbitAndHits:
    """eval, orbit, hits and classify"""

    def test_eval_identity_window(self):
        code, out, _ = run('eval', '--system', 'circle-alternating', '--point', '1/3', '--n', '2')
        assert code == EXIT_OK
        assert json.loads(out)['result'] == {'image': '1/3'}

    def test_orbit_csv(self):
        code, out, _ = run('orbit', '--system', 'triangular-3pt', '--point', '1', '--horizon', '3')
        assert code == EXIT_OK
        assert out == 'n,point\n1,2\n2,2\n3,3\n'

    def test_hits(self):
        code, out, _ = run('hits', '--system', 'finite-hitting-isolated', '--U', '{x2}', '--V', '{a}',
                           '--horizon', '50')
        assert code == EXIT_OK
        assert json.loads(out)['result']['members'] == [1]

    def test_separation_curve(self):
        code, out, _ = run('hits', '--system', 'shift-growing-blocks', '--U', '[0:1]', '--horizon', '4',
                           '--emit-curve')
        assert code == EXIT_OK
        assert out == 'n,diam\n1,1\n2,1\n3,1/2\n4,1/2\n'

    def test_hits_needs_target(self):
        code, _, err = run('hits', '--system', 'doubling-kato', '--U', '[0,1/8]')
        assert code == EXIT_USAGE
        assert '--V or --delta' in err

    def test_classify_growing_gaps(self):
        code, out, _ = run('classify', '--system', 'shift-growing-blocks', '--U', '[0:0]', '--delta', '1/2',
                           '--horizon', '300', '--kind', 'syndetic', '--sub-horizon', '75')
        assert code == EXIT_FAILS
        classifier = json.loads(out)['result']['classifier']
        assert (classifier['max_gap'], classifier['sub_max_gap']) == (8, 5)


class TestCompare:
    """compare subcommand"""

    def test_period_transfer(self):
        code, out, _ = run('compare', '--system', 'k-transfer-counterexample', '--mode', 'period',
                           '--property', 'transitive')
        assert code == EXIT_OK
        result = json.loads(out)['result']
        assert result['consistency'] == 'NotApplicable'
        assert result['system'] == 'k-transfer-counterexample'

    def test_implication(self):
        code, out, _ = run('compare', '--system', 'doubling-kato', '--mode', 'implication',
                           '--tag', 'weakly-mixing-kato')
        assert code == EXIT_OK
        assert json.loads(out)['result']['consistency'] == 'Consistent'

    def test_implication_needs_tag(self):
        code, _, _ = run('compare', '--system', 'doubling-kato', '--mode', 'implication')
        assert code == EXIT_USAGE

    def test_period_needs_property(self):
        code, _, err = run('compare', '--system', 'doubling-kato', '--mode', 'period')
        assert code == EXIT_USAGE
        assert '--property' in err


class TestExamplesAndSchema:
    """example and schema subcommands"""

    def test_run_fixture(self):
        code, out, _ = run('example', 'run', 'minimal2-blocks')
        assert code == EXIT_OK
        assert json.loads(out)['diff'] == []

    def test_list(self):
        code, out, _ = run('example', 'list')
        assert code == EXIT_OK
        assert 'weak-but-not' in json.loads(out)['fixtures']

    def test_show_needs_name(self):
        code, _, _ = run('example', 'show')
        assert code == EXIT_USAGE

    def test_unknown_fixture(self):
        code, _, err = run('example', 'run', 'tent-map')
        assert code == EXIT_USAGE
        assert err

    def test_schema(self):
        code, out, _ = run('schema')
        assert code == EXIT_OK
        schema = json.loads(out)
        assert schema['required'] == ['schema_version', 'space', 'generators', 'schedule']


class TestUsage:
    """Argument errors exit with 1"""

    @pytest.mark.parametrize('argv', [
        (),
        ('frobnicate',),
        ('check', '--system', 'doubling-kato'),
        ('check', '--system', 'doubling-kato', '--property', 'chaotic'),
        ('orbit', '--system', 'doubling-kato', '--point', '1/2', '--horizon', 'many'),
    ])
    def test_usage_errors(self, argv):
        code, out, _ = run(*argv)
        assert code == EXIT_USAGE
        assert out == ''

    def test_missing_document(self, tmp_path):
        code, _, err = run('check', '--system', str(tmp_path / 'absent.json'), '--property', 'transitive')
        assert code == EXIT_USAGE
        assert err

    def test_document_file_matches_fixture(self, tmp_path):
        path = tmp_path / 'doubling.json'
        path.write_text(json.dumps(get_fixture('doubling-kato').document), encoding='utf-8')
        _, from_file, _ = run('check', '--system', str(path), '--property', 'mixing')
        _, from_name, _ = run('check', '--system', 'doubling-kato', '--property', 'mixing')
        assert json.loads(from_file)['result'] == json.loads(from_name)['result']
