"""
Gallery Module

Executable encodings of the constructive examples, each with a manifest of
pinned results. A fixture is a system document plus manifest entries; each
entry names an operation, its parameters, the expected value and a
provenance tag (PAPER or DERIVED).

run_fixture re-runs every entry and returns the diff, empty on pass.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from core_maps import IDENTITY, FiniteMap, PLMap, Rotation, Shift, analyze, compile_window, flatten
from detectors import CoverSpec, minimality, orbit_points, run_property
from error_handler import DocumentError, NDSError, UnknownFixture, log_system_event
from hitting_index import classify, hitting_set, max_gap, sensitivity_hits
from models import SystemDocument
from reductions import implication_compare, shift_compare, transfer_compare
from spaces_regions import RegionSet, distance
from utils import format_point, parse_point, parse_region, parse_rational, to_jsonable

logger = logging.getLogger(__name__)

PROVENANCE_TAGS = ('PAPER', 'DERIVED')


@dataclass(frozen=True)
class ManifestEntry:
    """One pinned result of a fixture"""
    operation: str
    params: Dict[str, Any]
    expected: Any
    provenance: str
    note: str = ''

    def __post_init__(self):
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"provenance must be one of {PROVENANCE_TAGS}")
        if self.operation not in OPERATIONS:
            raise ValueError(f"unknown manifest operation {self.operation!r}")

    def to_dict(self) -> dict:
        return {
            'operation': self.operation,
            'params': self.params,
            'expected': self.expected,
            'provenance': self.provenance,
            'note': self.note,
        }


@dataclass
class Fixture:
    """
    Named system with its manifest

    Attributes:
        name (str): registry name
        document (dict): the system document
        manifest (list): ManifestEntry items
        notes (str): where the construction comes from
    """
    name: str
    document: Dict[str, Any]
    manifest: List[ManifestEntry] = field(default_factory=list)
    notes: str = ''

    def system(self):
        """(SpaceSpec, Schedule) built from the document"""
        return SystemDocument.from_dict(self.document).build()

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'document': self.document,
            'manifest': [entry.to_dict() for entry in self.manifest],
            'notes': self.notes,
        }


# Manifest operations. Each takes (space, schedule, params) and returns a JSON value.

def _detector_params(params: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in params.items() if key not in ('property', 'keys', 'n', 'period', 'tag')}


def _op_verdict(space, s, params):
    return run_property(params['property'], space, s, _detector_params(params)).verdict.value


def _op_witness(space, s, params):
    report = run_property(params['property'], space, s, _detector_params(params))
    keys = params.get('keys', [])
    witness = report.witnesses[0] if report.witnesses else {}
    return {'verdict': report.verdict.value, **{key: witness.get(key) for key in keys}}


def _op_analyze(space, s, params):
    generator = s.generators[s.names.index(params['generator'])]
    return analyze(generator).to_dict()[params['flag']]


def _op_orbit_set(space, s, params):
    x = parse_point(space, params['point'])
    seen = {format_point(space, p) for p in orbit_points(space, x, s, int(params['T']))}
    return sorted(seen, key=parse_rational) if space.kind == 'interval' else sorted(seen)


def _op_orbit(space, s, params):
    x = parse_point(space, params['point'])
    return [format_point(space, p) for p in orbit_points(space, x, s, int(params['T']))[1:]]


def _op_hitting_set(space, s, params):
    u, v = parse_region(space, params['U']), parse_region(space, params['V'])
    return list(hitting_set(u, v, s, int(params['T'])).members)


def _op_classify(space, s, params):
    u = parse_region(space, params['U'])
    sample = sensitivity_hits(u, parse_rational(params['delta']), s, int(params['T']))
    result = classify(sample, params['kind'], k=params.get('k'), sub_horizon=params.get('sub_horizon'))
    return {'verdict': result.verdict.value, 'max_gap': result.max_gap, 'sub_max_gap': result.sub_max_gap}


def _op_return_gaps(space, s, params):
    x = parse_point(space, params['point'])
    epsilon = parse_rational(params['epsilon'])
    horizon = int(params['T'])
    points = orbit_points(space, x, s, horizon)
    members = tuple(n for n in range(1, horizon + 1) if distance(space, points[n], x) < epsilon)
    return [max_gap(members, t) for t in params['at']]


def _is_identity(m) -> bool:
    m = flatten(m)
    if m == IDENTITY or m == Rotation(0, 0) or m == Shift(0):
        return True
    if isinstance(m, FiniteMap):
        return m.table == tuple(range(m.size))
    return isinstance(m, PLMap) and m == PLMap.from_pieces([0, 1], [(1, 0)])


def _op_window_identity(space, s, params):
    period = int(params['every'])
    return all(_is_identity(compile_window(s, 1, period * k)) for k in range(1, int(params['up_to']) + 1))


def _op_all_periodic(space, s, params):
    points = RegionSet.full(space).sample_points(int(params.get('depth', 3)))
    k, horizon = int(params['k']), int(params['T'])
    return all(run_property('periodic', space, s, {'point': p, 'k': k, 'T': horizon}).holds for p in points)


def _op_minimality(space, s, params):
    points = [parse_point(space, p) for p in params.get('points', [])]
    cover = CoverSpec(space, parse_rational(params.get('w', '1/8')))
    report = minimality(s, params['mode'], cover, int(params['T']), points)
    witness = report.witnesses[0] if report.witnesses else {}
    return {'verdict': report.verdict.value, **{key: witness.get(key) for key in params.get('keys', [])}}


def _case_summary(case, params) -> dict:
    summary = {
        'consistency': case.consistency.value,
        'nds': case.nds_report.verdict.value,
        'reduced': case.reduced_report.verdict.value,
    }
    for key in params.get('keys', []):
        if key == 'reduced_witness':
            summary[key] = case.reduced_report.witnesses[0].get('pair') if case.reduced_report.witnesses else None
        elif key == 'converse':
            converse = case.directions[1]
            summary[key] = {'status': converse['status'], 'unmet': converse['unmet_hypotheses']}
        elif key == 'not_feeble_open':
            summary[key] = case.hypotheses['not_feeble_open']
    return summary


def _op_transfer(space, s, params):
    case = transfer_compare(s, space, params['property'], _detector_params(params), period=params.get('period'))
    return _case_summary(case, params)


def _op_shift(space, s, params):
    case = shift_compare(s, space, int(params['n']), params['property'], _detector_params(params))
    return _case_summary(case, params)


def _op_implication(space, s, params):
    case = implication_compare(s, space, params['tag'], _detector_params(params))
    return _case_summary(case, params)


OPERATIONS: Dict[str, Callable] = {
    'verdict': _op_verdict,
    'witness': _op_witness,
    'analyze': _op_analyze,
    'orbit_set': _op_orbit_set,
    'orbit': _op_orbit,
    'hitting_set': _op_hitting_set,
    'classify': _op_classify,
    'return_gaps': _op_return_gaps,
    'window_identity': _op_window_identity,
    'all_periodic': _op_all_periodic,
    'minimality': _op_minimality,
    'transfer': _op_transfer,
    'shift': _op_shift,
    'implication': _op_implication,
}


# System documents

def _pl(breakpoints, pieces) -> dict:
    return PLMap.from_pieces([Fraction(x) for x in breakpoints],
                             [(Fraction(a), Fraction(b)) for a, b in pieces]).to_dict()


G1 = _pl([0, 1], [('1/2', 0)])
G2 = _pl([0, '1/2', 1], [(2, 0), (0, 1)])
G3 = _pl([0, '1/2', 1], [(2, 0), (2, -1)])


def _document(name: str, space: dict, generators: List[Tuple[str, dict]], schedule: dict,
              defaults: Optional[dict] = None) -> dict:
    return SystemDocument(
        space=space,
        generators=[{'name': g, 'map': m} for g, m in generators],
        schedule=schedule,
        defaults=defaults or {},
        name=name,
    ).to_dict()


def _entry(operation: str, expected: Any, provenance: str = 'DERIVED', note: str = '', **params) -> ManifestEntry:
    return ManifestEntry(operation, params, expected, provenance, note)


def _build_fixtures() -> Dict[str, Fixture]:
    fixtures = [
        Fixture(
            'nonsurjective-transitive',
            _document('nonsurjective-transitive', {'kind': 'interval'},
                      [('g1', G1), ('g2', G2), ('g3', G3)],
                      {'kind': 'periodic', 'word': ['g1', 'g2', 'g3']},
                      {'T': 60, 'w': '1/8'}),
            [
                _entry('analyze', False, 'PAPER', "g1 is not surjective", generator='g1', flag='surjective'),
                _entry('verdict', 'HoldsEvidence', 'PAPER', "transitive with infinitely many non-surjective maps",
                       property='transitive', w='1/8', T=60),
                _entry('verdict', 'HoldsEvidence', note="every cell pair is hit by n <= 30",
                       property='transitive', w='1/8', T=30),
                _entry('analyze', False, note="g2 is constant on [1/2,1]", generator='g2', flag='feeble_open'),
                _entry('shift', {'consistency': 'NotApplicable', 'nds': 'HoldsEvidence', 'reduced': 'FailsWitness',
                                 'converse': {'status': 'NotApplicable',
                                              'unmet': ['all_surjective', 'feeble_open']},
                                 'not_feeble_open': ['g2']},
                       note="tail theorem needs surjective maps; converse needs feeble open maps",
                       property='sensitive', n=2, delta='1/4', w='1/8', T=60, keys=['converse', 'not_feeble_open']),
            ],
            "interval maps x/2, the doubling-then-constant map and the doubling map mod 1",
        ),
        Fixture(
            'finite-hitting-isolated',
            _document('finite-hitting-isolated',
                      {'kind': 'finite', 'size': 5, 'labels': ['x0', 'x1', 'x2', 'x3', 'a']},
                      [('to_a', FiniteMap((4, 4, 4, 4, 4)).to_dict()),
                       ('to_x0', FiniteMap((0, 0, 0, 0, 0)).to_dict()),
                       ('f', FiniteMap((1, 2, 3, 0, 0)).to_dict())],
                      {'kind': 'explicit', 'prefix': ['to_a', 'to_x0'], 'tail': ['f']},
                      {'T': 50}),
            [
                _entry('hitting_set', [1], 'PAPER', "N(U,{a}) is finite", U='{x2}', V='{a}', T=50),
                _entry('hitting_set', [1], U='{a}', V='{a}', T=50),
                _entry('verdict', 'HoldsEvidence', note="transitive although a is isolated",
                       property='transitive', T=50),
                _entry('verdict', 'FailsWitness', 'PAPER', "the isolated point is not periodic",
                       property='periodic', point='a', k=4, T=50),
            ],
            "four-point cycle x0..x3 augmented by an isolated point a; constant maps first",
        ),
        Fixture(
            'circle-alternating',
            _document('circle-alternating', {'kind': 'circle'},
                      [('rot', Rotation(1).to_dict()), ('rot_inv', Rotation(-1).to_dict())],
                      {'kind': 'periodic', 'word': ['rot', 'rot_inv']},
                      {'T': 100, 'w': '1/8', 'delta': '1/10'}),
            [
                _entry('window_identity', True, 'PAPER', "f_1^{2k} = id", every=2, up_to=50),
                _entry('all_periodic', True, 'PAPER', "every point is periodic", k=2, T=100),
                _entry('verdict', 'FailsWitness', note="isometries are never sensitive",
                       property='sensitive', delta='1/10', w='1/8', T=100),
                _entry('minimality', {'verdict': 'FailsWitness'}, 'PAPER', "orbits have two points",
                       mode='M2', w='1/8', T=100),
                _entry('verdict', 'HoldsEvidence', 'PAPER', "every point is almost periodic",
                       property='almost_periodic', point='1/3', epsilon='1/100', T=100),
                _entry('verdict', 'FailsWitness', 'PAPER', "the two-point orbit is not invariant",
                       property='minimal_point', point='1/3', T=100),
            ],
            "rotation by alpha alternating with its inverse",
        ),
        Fixture(
            'triangular-3pt',
            _document('triangular-3pt', {'kind': 'finite', 'size': 3, 'labels': ['1', '2', '3']},
                      [('f', FiniteMap((1, 2, 0)).to_dict()), ('id', IDENTITY.to_dict())],
                      {'kind': 'triangular', 'base': 'f', 'filler': 'id'},
                      {'T': 300}),
            [
                _entry('orbit', ['2', '2', '3', '3', '3', '1', '1', '1', '1', '2'], point='1', T=10),
                _entry('minimality', {'verdict': 'HoldsEvidence'}, 'PAPER', "no proper invariant subset",
                       mode='M1', T=30),
                _entry('minimality', {'verdict': 'HoldsEvidence'}, 'PAPER', "every orbit is dense",
                       mode='M2', T=30),
                _entry('verdict', 'HoldsEvidence', 'PAPER', "each point is minimal",
                       property='minimal_point', point='1', T=30),
                _entry('return_gaps', [18, 48], note="return gaps grow without bound",
                       point='1', epsilon='1/2', T=300, at=[60, 300]),
                _entry('verdict', 'FailsWitness', 'PAPER', "no point is almost periodic",
                       property='almost_periodic', point='1', epsilon='1/2', T=300, sub_horizon=60),
            ],
            "three-cycle applied at triangular times, identity elsewhere",
        ),
        Fixture(
            'minimal2-blocks',
            _document('minimal2-blocks', {'kind': 'interval'}, [],
                      {'kind': 'family', 'family': 'halving-blocks'},
                      {'T': 100, 'w': '1/8'}),
            [
                _entry('orbit_set', ['1/2', '1'], 'PAPER', "orb(1) = {1/2, 1}", point='1', T=100),
                _entry('minimality', {'verdict': 'FailsWitness', 'point': '1', 'missed_cell': 0}, 'PAPER',
                       "the orbit of 1 is not dense", mode='M2', w='1/8', T=100, points=['1'],
                       keys=['point', 'missed_cell']),
                _entry('minimality', {'verdict': 'Inconclusive'}, note="M1 is not finitely checkable here",
                       mode='M1', w='1/4', T=20),
            ],
            "five-block family: identity, halving, doubling-then-constant, lift and pull-back by 2^-(k+2)",
        ),
        Fixture(
            'shift-growing-blocks',
            _document('shift-growing-blocks', {'kind': 'shift'},
                      [('sigma', Shift(1).to_dict()), ('sigma_inv', Shift(-1).to_dict()),
                       ('id', IDENTITY.to_dict())],
                      {'kind': 'growing_blocks', 'generator': 'sigma', 'inverse': 'sigma_inv', 'filler': 'id'},
                      {'T': 300, 'delta': '1/2'}),
            [
                _entry('classify', {'verdict': 'Fails', 'max_gap': 8, 'sub_max_gap': 5},
                       note="sensitivity times have growing gaps",
                       U='[0:0]', delta='1/2', T=300, kind='syndetic', sub_horizon=75),
                _entry('classify', {'verdict': 'Fails', 'max_gap': 9, 'sub_max_gap': 6},
                       U='[0:0]', delta='1/2', T=300, kind='thickly_syndetic', k=1, sub_horizon=75),
                _entry('verdict', 'FailsWitness', 'PAPER', "cannot be syndetically sensitive",
                       property='syndetically_sensitive', delta='1/2', w='1/2', T=300, sub_horizon=75),
                _entry('verdict', 'FailsWitness', 'PAPER', "cannot be thickly syndetically sensitive",
                       property='thickly_syndetically_sensitive', delta='1/2', w='1/2', T=300, sub_horizon=75),
            ],
            "blocks of n shifts then n inverse shifts, each followed by n identities",
        ),
        Fixture(
            'k-transfer-counterexample',
            _document('k-transfer-counterexample', {'kind': 'finite', 'size': 4},
                      [('h3', FiniteMap((3, 0, 1, 2)).to_dict()), ('h_inv', FiniteMap((3, 0, 1, 2)).to_dict())],
                      {'kind': 'periodic', 'word': ['h3', 'h_inv']},
                      {'T': 20}),
            [
                _entry('verdict', 'HoldsEvidence', 'PAPER', "the 2-periodic system is transitive",
                       property='transitive', T=20),
                _entry('transfer', {'consistency': 'NotApplicable', 'nds': 'HoldsEvidence',
                                    'reduced': 'FailsWitness', 'reduced_witness': [0, 1]},
                       'PAPER', "g = h^2 is not transitive", property='transitive', T=20,
                       keys=['reduced_witness']),
            ],
            "4-cycle h applied as h^3, h^-1 alternately",
        ),
        Fixture(
            'weak-but-not',
            _document('weak-but-not', {'kind': 'shift'},
                      [('sigma', Shift(1).to_dict()), ('sigma_inv', Shift(-1).to_dict())],
                      {'kind': 'periodic', 'word': ['sigma', 'sigma_inv']},
                      {'T': 100, 'delta': '1/2', 'L': 8}),
            [
                _entry('verdict', 'HoldsEvidence', 'PAPER', "weakly sensitive",
                       property='weak_sensitive', delta='1/2', w='1/4', L=8, T=100),
                _entry('verdict', 'FailsWitness', 'PAPER', "not sensitive",
                       property='sensitive', delta='1/2', w='1/4', T=100),
                _entry('verdict', 'HoldsEvidence', 'PAPER', "weakly transitive",
                       property='weak_transitive', w='1/4', L=8, T=100),
                _entry('verdict', 'FailsWitness', 'PAPER', "not transitive",
                       property='transitive', w='1/4', T=100),
            ],
            "shift alternating with its inverse",
        ),
        Fixture(
            'doubling-kato',
            _document('doubling-kato', {'kind': 'interval'}, [('g3', G3)],
                      {'kind': 'periodic', 'word': ['g3']},
                      {'T': 30, 'w': '1/8', 'delta': '1/4', 'epsilon': '1/16'}),
            [
                _entry('verdict', 'HoldsEvidence', property='mixing', w='1/8', T=30),
                _entry('verdict', 'HoldsEvidence', property='kato', delta='1/4', epsilon='1/16', w='1/8', T=30),
                _entry('verdict', 'HoldsEvidence', note="mixing, weak mixing and transitivity are ordered",
                       property='transitivity_chain', w='1/8', T=30),
                _entry('verdict', 'HoldsEvidence', property='cofinitely_sensitive', delta='1/4', w='1/8', T=30),
                _entry('transfer', {'consistency': 'Consistent', 'nds': 'HoldsEvidence', 'reduced': 'HoldsEvidence'},
                       property='cofinitely_sensitive', period=2, delta='1/4', w='1/8', T=30),
                _entry('implication', {'consistency': 'Consistent', 'nds': 'HoldsEvidence',
                                       'reduced': 'HoldsEvidence'},
                       tag='weakly-mixing-kato', delta='1/4', epsilon='1/16', w='1/8', T=30),
            ],
            "the doubling map mod 1 as an autonomous mixing system",
        ),
    ]
    return {fixture.name: fixture for fixture in fixtures}


FIXTURES: Dict[str, Fixture] = _build_fixtures()


def list_fixtures() -> List[str]:
    return sorted(FIXTURES)


def get_fixture(name: str) -> Fixture:
    """
    Raises:
        UnknownFixture: If name is not registered
    """
    fixture = FIXTURES.get(name)
    if fixture is None:
        raise UnknownFixture(name)
    return fixture


def run_entry(space, s, entry: ManifestEntry) -> Any:
    """Actual value of one manifest entry; NDS errors become {'error': type}"""
    try:
        return to_jsonable(OPERATIONS[entry.operation](space, s, entry.params))
    except NDSError as e:
        return {'error': e.error_type, 'message': str(e)}


def run_fixture(name: str) -> List[Dict[str, Any]]:
    """
    Re-run a fixture's manifest

    Returns:
        list: one diff per failing entry (expected vs actual); empty on pass

    Raises:
        UnknownFixture: If name is not registered
    """
    fixture = get_fixture(name)
    space, s = fixture.system()
    diff = []
    for index, entry in enumerate(fixture.manifest):
        actual = run_entry(space, s, entry)
        if actual != to_jsonable(entry.expected):
            diff.append({
                'entry': index,
                'operation': entry.operation,
                'params': entry.params,
                'expected': entry.expected,
                'actual': actual,
                'provenance': entry.provenance,
            })
    log_system_event("[GALLERY] run", f"{name}: {len(fixture.manifest) - len(diff)}/{len(fixture.manifest)} pass")
    return diff


def load_system(source: str):
    """
    Resolve a fixture name or a JSON document path

    Returns:
        tuple: (SpaceSpec, Schedule, document dict)

    Raises:
        DocumentError: If the file is not a valid system document
        OSError: If the file cannot be read
    """
    if source in FIXTURES:
        document = FIXTURES[source].document
    else:
        with open(source, 'r', encoding='utf-8') as handle:
            try:
                document = json.load(handle)
            except json.JSONDecodeError as e:
                raise DocumentError('', f"invalid JSON: {e}") from e
    space, s = SystemDocument.from_dict(document).build()
    return space, s, document
