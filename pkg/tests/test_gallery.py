"""Tests for the fixture gallery and its manifests"""

import json
from fractions import Fraction
from itertools import product

import pytest

from core_maps import evaluate
from error_handler import DocumentError, UnknownFixture
from gallery import FIXTURES, OPERATIONS, ManifestEntry, get_fixture, list_fixtures, load_system, run_entry, run_fixture
from models import SystemDocument
from points import CirclePoint, FinitePoint, IntervalPoint, SeqPoint
from spaces_regions import CIRCLE, UNIT_INTERVAL, distance
from utils import document_hash

EXPECTED_FIXTURES = [
    'circle-alternating',
    'doubling-kato',
    'finite-hitting-isolated',
    'k-transfer-counterexample',
    'minimal2-blocks',
    'nonsurjective-transitive',
    'shift-growing-blocks',
    'triangular-3pt',
    'weak-but-not',
]


class TestRegistry:
    """Fixture names and lookups"""

    def test_every_construction_is_registered(self):
        assert list_fixtures() == EXPECTED_FIXTURES

    def test_unknown_fixture(self):
        with pytest.raises(UnknownFixture):
            get_fixture('tent-map')

    def test_documents_validate(self):
        for name in list_fixtures():
            document = get_fixture(name).document
            assert SystemDocument.from_dict(document).to_dict() == document

    def test_every_fixture_pins_a_paper_result(self):
        for fixture in FIXTURES.values():
            assert fixture.manifest
            assert fixture.notes
        tags = {entry.provenance for fixture in FIXTURES.values() for entry in fixture.manifest}
        assert tags == {'PAPER', 'DERIVED'}

    def test_manifest_entries_are_checked(self):
        with pytest.raises(ValueError):
            ManifestEntry('verdict', {}, 'Holds', 'GUESS')
        with pytest.raises(ValueError):
            ManifestEntry('simulate', {}, None, 'DERIVED')
        assert {entry.operation for fixture in FIXTURES.values() for entry in fixture.manifest} <= set(OPERATIONS)


class TestManifests:
    """Every pinned result reproduces exactly"""

    @pytest.mark.parametrize('name', EXPECTED_FIXTURES)
    def test_fixture_passes(self, name):
        assert run_fixture(name) == []

    def test_errors_become_values(self):
        space, s = get_fixture('shift-growing-blocks').system()
        entry = ManifestEntry('transfer', {'property': 'sensitive', 'delta': '1/2', 'T': 10}, None, 'DERIVED')
        assert run_entry(space, s, entry)['error'] == 'not_periodic'

    def test_show_round_trips_through_json(self):
        data = get_fixture('triangular-3pt').to_dict()
        assert json.loads(json.dumps(data)) == data


def derived(name, operation, **match) -> ManifestEntry:
    for entry in get_fixture(name).manifest:
        if entry.provenance == 'DERIVED' and entry.operation == operation and \
                all(entry.params.get(key) == value for key, value in match.items()):
            return entry
    raise LookupError(f"{name} has no derived {operation} entry matching {match}")


def walk(s, x, horizon: int) -> list:
    """x, f_1(x), f_2(f_1(x)), ... applied one map at a time"""
    points = [x]
    for n in range(1, horizon + 1):
        points.append(evaluate(s.map_at(n), points[-1]))
    return points


def widest_gap(members, t: int) -> int:
    marks = [0, *(n for n in members if n <= t), t + 1]
    return max(b - a for a, b in zip(marks, marks[1:]))


def dyadic_preimage(k: int, y: Fraction, n: int) -> Fraction:
    """The point of [k/8, (k+1)/8) that n doublings mod 1 send to y"""
    return (y + k * 2 ** (n - 3)) / 2 ** n


class TestDerivedEntriesByDirectIteration:
    """Derived manifest values recomputed from raw orbits, without the detectors"""

    def test_triangular_orbit(self):
        entry = derived('triangular-3pt', 'orbit')
        space, s = get_fixture('triangular-3pt').system()
        x = FinitePoint(space.index_of(entry.params['point']))
        labels = [space.label(p.index) for p in walk(s, x, entry.params['T'])[1:]]
        assert labels == entry.expected

    def test_triangular_return_gaps(self):
        entry = derived('triangular-3pt', 'return_gaps')
        space, s = get_fixture('triangular-3pt').system()
        x = FinitePoint(space.index_of(entry.params['point']))
        orbit = walk(s, x, entry.params['T'])
        # discrete metric: within 1/2 means equal
        returns = [n for n in range(1, len(orbit)) if orbit[n] == x]
        assert [widest_gap(returns, t) for t in entry.params['at']] == entry.expected

    def test_isolated_point_hitting_set(self):
        entry = derived('finite-hitting-isolated', 'hitting_set')
        space, s = get_fixture('finite-hitting-isolated').system()
        a = FinitePoint(space.index_of(entry.params['U'].strip('{}')))
        target = FinitePoint(space.index_of(entry.params['V'].strip('{}')))
        orbit = walk(s, a, entry.params['T'])
        assert [n for n in range(1, len(orbit)) if orbit[n] == target] == entry.expected

    def test_isolated_point_system_is_transitive(self):
        entry = derived('finite-hitting-isolated', 'verdict', property='transitive')
        space, s = get_fixture('finite-hitting-isolated').system()
        horizon = entry.params['T']
        orbits = {p: walk(s, FinitePoint(p), horizon)[1:] for p in range(space.size)}
        every_pair_meets = all(FinitePoint(q) in orbits[p] for p in range(space.size) for q in range(space.size))
        assert entry.expected == ('HoldsEvidence' if every_pair_meets else 'FailsWitness')

    def test_rotations_preserve_every_distance(self):
        entry = derived('circle-alternating', 'verdict', property='sensitive')
        _, s = get_fixture('circle-alternating').system()
        grid = [CirclePoint(Fraction(j, 10), j % 3) for j in range(10)]
        walks = [walk(s, x, entry.params['T']) for x in grid]
        for first, second in product(walks, repeat=2):
            start = distance(CIRCLE, first[0], second[0])
            assert all(distance(CIRCLE, p, q) == start for p, q in zip(first, second))
        assert entry.expected == 'FailsWitness'

    @pytest.mark.parametrize('kind', ['syndetic', 'thickly_syndetic'])
    def test_growing_blocks_gap_growth(self, kind):
        entry = derived('shift-growing-blocks', 'classify', kind=kind)
        _, s = get_fixture('shift-growing-blocks').system()
        horizon = entry.params['T']
        marker = SeqPoint((0,), (1,), (0,), 0)
        orbit = walk(s, marker, horizon)
        # f_1^n [0:0] is the cylinder fixing the marker's coordinate; its diameter exceeds 1/2 off 0
        hits = {n for n in range(1, horizon + 1) if orbit[n].at(0) != 1}
        if kind == 'thickly_syndetic':
            k = entry.params['k']
            horizon -= k
            hits = {n for n in range(1, horizon + 1) if all(n + j in hits for j in range(k + 1))}
        sub = min(entry.params['sub_horizon'], horizon)
        late, early = widest_gap(hits, horizon), widest_gap(hits, sub)
        assert late > early
        assert entry.expected == {'verdict': 'Fails', 'max_gap': late, 'sub_max_gap': early}

    def test_doubling_is_mixing(self):
        entry = derived('doubling-kato', 'verdict', property='mixing')
        _, s = get_fixture('doubling-kato').system()
        for n in range(3, entry.params['T'] + 1):
            for k, j in product(range(8), repeat=2):
                y = Fraction(3 * j + 1, 24)
                x = dyadic_preimage(k, y, n)
                assert Fraction(k, 8) <= x < Fraction(k + 1, 8)
                assert walk(s, IntervalPoint(x), n)[-1] == IntervalPoint(y)
        assert entry.expected == 'HoldsEvidence'

    def test_doubling_separates_every_cell_from_time_three(self):
        entry = derived('doubling-kato', 'verdict', property='cofinitely_sensitive')
        _, s = get_fixture('doubling-kato').system()
        delta = Fraction(entry.params['delta'])
        for k in range(8):
            first = walk(s, IntervalPoint(Fraction(3 * k + 1, 24)), entry.params['T'])
            second = walk(s, IntervalPoint(Fraction(3 * k + 2, 24)), entry.params['T'])
            assert all(distance(UNIT_INTERVAL, p, q) > delta for p, q in zip(first[3:], second[3:]))
        assert entry.expected == 'HoldsEvidence'

    def test_nonsurjective_cells_meet_by_time_nine(self):
        entry = derived('nonsurjective-transitive', 'verdict', property='transitive')
        _, s = get_fixture('nonsurjective-transitive').system()
        assert entry.params['T'] >= 9
        for k, j in product(range(8), repeat=2):
            y = Fraction(3 * j + 1, 24)
            x = (y + k) / 8
            assert walk(s, IntervalPoint(x), 9)[-1] == IntervalPoint(y)
        assert entry.expected == 'HoldsEvidence'


class TestLoadSystem:
    """Fixture names and document files"""

    def test_by_name(self):
        space, s, document = load_system('circle-alternating')
        assert space.kind == 'circle'
        assert s.names == ['rot', 'rot_inv']
        assert document_hash(document) == document_hash(get_fixture('circle-alternating').document)

    def test_by_path(self, tmp_path):
        path = tmp_path / 'system.json'
        path.write_text(json.dumps(get_fixture('doubling-kato').document), encoding='utf-8')
        space, s, _ = load_system(str(path))
        assert space.kind == 'interval'
        assert s.period() == 1

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"space": ', encoding='utf-8')
        with pytest.raises(DocumentError):
            load_system(str(path))

    def test_bad_schedule_reports_path(self, tmp_path):
        document = dict(get_fixture('doubling-kato').document)
        document['schedule'] = {'kind': 'periodic', 'word': ['nope']}
        path = tmp_path / 'bad.json'
        path.write_text(json.dumps(document), encoding='utf-8')
        with pytest.raises(DocumentError) as raised:
            load_system(str(path))
        assert raised.value.path == '/schedule/word/0'

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_system(str(tmp_path / 'absent.json'))
