"""
Data Models Module

This module contains the value types shared by the toolkit:
- Verdict / ReportVerdict / Consistency: three-valued outcomes
- VerdictResult: outcome of an exact decision with an optional witness
- MapAnalysis: structural flags of a single map
- IndexSample: a subset of {1,...,T}
- ClassVerdict: classifier output for an IndexSample
- PropertyReport: detector output
- TransferCase: paired verdicts of a reduction
- SystemDocument: the JSON system document

Each model includes validation methods to ensure data integrity.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple
import logging

from error_handler import DocumentError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class Verdict(Enum):
    HOLDS = 'Holds'
    FAILS = 'Fails'
    INCONCLUSIVE = 'Inconclusive'


class ReportVerdict(Enum):
    HOLDS_EVIDENCE = 'HoldsEvidence'
    FAILS_WITNESS = 'FailsWitness'
    INCONCLUSIVE = 'Inconclusive'

    @classmethod
    def from_verdict(cls, verdict: Verdict) -> 'ReportVerdict':
        return {
            Verdict.HOLDS: cls.HOLDS_EVIDENCE,
            Verdict.FAILS: cls.FAILS_WITNESS,
            Verdict.INCONCLUSIVE: cls.INCONCLUSIVE,
        }[verdict]

    def to_verdict(self) -> Verdict:
        return {
            ReportVerdict.HOLDS_EVIDENCE: Verdict.HOLDS,
            ReportVerdict.FAILS_WITNESS: Verdict.FAILS,
            ReportVerdict.INCONCLUSIVE: Verdict.INCONCLUSIVE,
        }[self]

    @property
    def exit_code(self) -> int:
        return {
            ReportVerdict.HOLDS_EVIDENCE: 0,
            ReportVerdict.FAILS_WITNESS: 2,
            ReportVerdict.INCONCLUSIVE: 3,
        }[self]


class Consistency(Enum):
    CONSISTENT = 'Consistent'
    VIOLATION = 'Violation'
    NOT_APPLICABLE = 'NotApplicable'


def join_verdicts(verdicts) -> Verdict:
    """Conjunction: all Holds -> Holds, any Fails -> Fails, else Inconclusive"""
    verdicts = list(verdicts)
    if any(v is Verdict.FAILS for v in verdicts):
        return Verdict.FAILS
    if all(v is Verdict.HOLDS for v in verdicts):
        return Verdict.HOLDS
    return Verdict.INCONCLUSIVE


def fraction_text(value) -> str:
    """Serialize a rational as "p/q" (or "p" for integers)"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class VerdictResult:
    """Outcome of an exact decision such as commutes(a, b)"""
    verdict: Verdict
    witness: Optional[Dict[str, Any]] = None
    exact: bool = True

    def to_dict(self) -> dict:
        return {'verdict': self.verdict.value, 'witness': self.witness, 'exact': self.exact}


@dataclass(frozen=True)
class MapAnalysis:
    """Structural flags of a map"""
    continuous: bool
    surjective: bool
    injective: bool
    feeble_open: bool
    isometry: bool

    @property
    def bijective(self) -> bool:
        return self.surjective and self.injective

    def to_dict(self) -> dict:
        return {
            'continuous': self.continuous,
            'surjective': self.surjective,
            'injective': self.injective,
            'feeble_open': self.feeble_open,
            'isometry': self.isometry,
        }


@dataclass(frozen=True)
class IndexSample:
    """
    Finite-horizon sample of a set of times

    Attributes:
        horizon (int): T
        members (tuple): strictly increasing elements of [1, T]
        exact (bool): False when produced in sampled mode
    """
    horizon: int
    members: Tuple[int, ...] = ()
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'members', tuple(self.members))
        self.validate()

    def validate(self) -> bool:
        if not isinstance(self.horizon, int) or self.horizon < 0:
            raise ValueError("horizon must be a natural number")
        previous = 0
        for n in self.members:
            if not isinstance(n, int) or n <= previous or n > self.horizon:
                raise ValueError("members must be strictly increasing within [1, T]")
            previous = n
        return True

    def prefix(self, horizon: int) -> 'IndexSample':
        """The sample restricted to [1, horizon]"""
        horizon = min(horizon, self.horizon)
        return IndexSample(horizon, tuple(n for n in self.members if n <= horizon), self.exact)

    def __contains__(self, n: int) -> bool:
        return n in set(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {'T': self.horizon, 'members': list(self.members), 'exact': self.exact}

    @classmethod
    def from_dict(cls, data: dict) -> 'IndexSample':
        return cls(int(data['T']), tuple(int(n) for n in data.get('members', [])), bool(data.get('exact', True)))


@dataclass(frozen=True)
class ClassVerdict:
    """
    Classifier verdict for an IndexSample

    Attributes:
        kind (str): syndetic, thick, cofinite, thickly_syndetic or upper_density
        verdict (Verdict): Holds / Fails / Inconclusive
        horizon (int): T of the classified sample
        sub_horizon (int): the earlier horizon used for trend comparison
        max_gap (int): largest gap over [0, T+1]
        sub_max_gap (int): largest gap over [0, sub_horizon+1]
        longest_run (int): longest run of consecutive members
        sub_longest_run (int): longest run within the sub-horizon
        tail_start (int): least N with [N, T] inside the members (T+1 if none)
        density (Fraction): |members| / T
        member_count (int): |members|
        witness (dict): the gap, run or tail that decided the verdict
    """
    kind: str
    verdict: Verdict
    horizon: int
    sub_horizon: int
    max_gap: int
    sub_max_gap: int
    longest_run: int
    sub_longest_run: int
    tail_start: int
    density: Fraction
    member_count: int
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'verdict': self.verdict.value,
            'horizon': self.horizon,
            'sub_horizon': self.sub_horizon,
            'max_gap': self.max_gap,
            'sub_max_gap': self.sub_max_gap,
            'longest_run': self.longest_run,
            'sub_longest_run': self.sub_longest_run,
            'tail_start': self.tail_start,
            'density': fraction_text(self.density),
            'member_count': self.member_count,
            'witness': self.witness,
        }


@dataclass
class PropertyReport:
    """
    Three-valued detector report

    Attributes:
        property (str): property name, e.g. "cofinitely_sensitive"
        parameters (dict): serialized parameters (delta, epsilon, T, w, ...)
        verdict (ReportVerdict): HoldsEvidence / FailsWitness / Inconclusive
        witnesses (list): concrete witnesses; FailsWitness carries a replayable one
        evidence (list): quantifier instantiations that were checked
        provenance (dict): schedule fingerprint and arithmetic mode
    """
    property: str
    parameters: Dict[str, Any]
    verdict: ReportVerdict
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    evidence: List[Any] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        """Validate data after initialization"""
        self.validate()

    def validate(self) -> bool:
        if not isinstance(self.property, str) or not self.property:
            raise ValueError("property must be a non-empty string")
        if not isinstance(self.verdict, ReportVerdict):
            raise ValueError("verdict must be a ReportVerdict")
        if self.verdict is ReportVerdict.FAILS_WITNESS and not self.witnesses:
            raise ValueError("FailsWitness reports must carry a witness")
        return True

    @property
    def holds(self) -> bool:
        return self.verdict is ReportVerdict.HOLDS_EVIDENCE

    @property
    def fails(self) -> bool:
        return self.verdict is ReportVerdict.FAILS_WITNESS

    def to_dict(self) -> dict:
        return {
            'property': self.property,
            'parameters': self.parameters,
            'verdict': self.verdict.value,
            'witnesses': self.witnesses,
            'evidence': self.evidence,
            'provenance': self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'PropertyReport':
        return cls(
            property=data['property'],
            parameters=dict(data.get('parameters', {})),
            verdict=ReportVerdict(data['verdict']),
            witnesses=list(data.get('witnesses', [])),
            evidence=list(data.get('evidence', [])),
            provenance=dict(data.get('provenance', {})),
        )


@dataclass
class TransferCase:
    """
    Paired verdicts of a system and its reduction

    Attributes:
        system (str): system identifier (fixture name or document hash)
        property (str): property name
        parameters (dict): shared detector parameters
        nds_report (PropertyReport): report on the original system
        reduced_report (PropertyReport): report on the reduced system
        theorem_tag (str): registry tag of the governing implication
        directions (list): per-direction applicability and outcome
        hypotheses (dict): recorded hypothesis flags
        consistency (Consistency): Consistent / Violation / NotApplicable
        notes (list): human-readable remarks
    """
    system: str
    property: str
    parameters: Dict[str, Any]
    nds_report: PropertyReport
    reduced_report: PropertyReport
    theorem_tag: str
    directions: List[Dict[str, Any]]
    hypotheses: Dict[str, Any]
    consistency: Consistency
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'system': self.system,
            'property': self.property,
            'parameters': self.parameters,
            'nds_report': self.nds_report.to_dict(),
            'reduced_report': self.reduced_report.to_dict(),
            'theorem_tag': self.theorem_tag,
            'directions': self.directions,
            'hypotheses': self.hypotheses,
            'consistency': self.consistency.value,
            'notes': self.notes,
        }

    @property
    def exit_code(self) -> int:
        return 2 if self.consistency is Consistency.VIOLATION else 0


_RATIONAL = {'type': 'string', 'pattern': r'^-?\d+(/\d+)?$'}

SYSTEM_SCHEMA = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'title': 'Non-autonomous discrete system',
    'type': 'object',
    'required': ['schema_version', 'space', 'generators', 'schedule'],
    'properties': {
        'schema_version': {'const': SCHEMA_VERSION},
        'name': {'type': 'string'},
        'space': {
            'type': 'object',
            'required': ['kind'],
            'properties': {
                'kind': {'enum': ['interval', 'circle', 'finite', 'shift']},
                'size': {'type': 'integer', 'minimum': 1},
                'labels': {'type': 'array', 'items': {'type': 'string'}},
                'metric': {'type': 'array', 'items': {'type': 'array', 'items': _RATIONAL}},
            },
        },
        'generators': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['name', 'map'],
                'properties': {
                    'name': {'type': 'string'},
                    'map': {'$ref': '#/definitions/map'},
                },
            },
        },
        'schedule': {
            'type': 'object',
            'required': ['kind'],
            'properties': {
                'kind': {'enum': ['periodic', 'triangular', 'growing_blocks', 'explicit', 'family', 'offset']},
                'word': {'type': 'array', 'items': {'type': 'string'}},
                'base': {'type': 'string'},
                'filler': {'type': 'string'},
                'generator': {'type': 'string'},
                'inverse': {'type': 'string'},
                'repeat_scale': {'type': 'integer', 'minimum': 1},
                'filler_scale': {'type': 'integer', 'minimum': 0},
                'prefix': {'type': 'array', 'items': {'type': 'string'}},
                'tail': {'type': 'array', 'items': {'type': 'string'}},
                'family': {'type': 'string'},
                'offset': {'type': 'integer', 'minimum': 0},
                'rule': {'type': 'object'},
            },
        },
        'defaults': {
            'type': 'object',
            'properties': {
                'T': {'type': 'integer', 'minimum': 1},
                'w': _RATIONAL,
                'delta': _RATIONAL,
                'epsilon': _RATIONAL,
                'theta': _RATIONAL,
                'L': {'type': 'integer', 'minimum': 1},
            },
        },
    },
    'definitions': {
        'map': {
            'type': 'object',
            'required': ['kind'],
            'properties': {
                'kind': {'enum': ['identity', 'pl', 'rotation', 'finite', 'shift', 'composite', 'inverse']},
                'breakpoints': {'type': 'array', 'items': _RATIONAL},
                'pieces': {'type': 'array', 'items': {'type': 'array', 'items': _RATIONAL, 'minItems': 2, 'maxItems': 2}},
                'point_values': {'type': 'array', 'items': _RATIONAL},
                'step': {'type': 'integer'},
                'offset': _RATIONAL,
                'table': {'type': 'array', 'items': {'type': 'integer', 'minimum': 0}},
                'power': {'type': 'integer'},
                'maps': {'type': 'array', 'items': {'$ref': '#/definitions/map'}, 'minItems': 1},
                'inner': {'$ref': '#/definitions/map'},
            },
        },
    },
}

_SCHEDULE_NAME_FIELDS = ('base', 'filler', 'generator', 'inverse')
_SCHEDULE_WORD_FIELDS = ('word', 'prefix', 'tail')


@dataclass
class SystemDocument:
    """
    JSON system document: space, named generators, schedule rule, defaults

    `validate` checks structure and name resolution and raises DocumentError
    with the failing path; `build` constructs the library objects.
    """
    space: Dict[str, Any]
    generators: List[Dict[str, Any]]
    schedule: Dict[str, Any]
    defaults: Dict[str, Any] = field(default_factory=dict)
    name: str = ''
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        """Validate data after initialization"""
        self.validate()

    def validate(self) -> bool:
        if self.schema_version != SCHEMA_VERSION:
            raise DocumentError('/schema_version', f"unsupported schema version {self.schema_version!r}")
        if not isinstance(self.space, dict) or self.space.get('kind') not in ('interval', 'circle', 'finite', 'shift'):
            raise DocumentError('/space/kind', "must be one of interval, circle, finite, shift")
        if not isinstance(self.generators, list):
            raise DocumentError('/generators', "must be an array")
        names = []
        for index, entry in enumerate(self.generators):
            if not isinstance(entry, dict) or not isinstance(entry.get('name'), str) or not entry['name']:
                raise DocumentError(f'/generators/{index}/name', "must be a non-empty string")
            if entry['name'] in names:
                raise DocumentError(f'/generators/{index}/name', f"duplicate generator name {entry['name']!r}")
            if not isinstance(entry.get('map'), dict) or 'kind' not in entry['map']:
                raise DocumentError(f'/generators/{index}/map', "must be a map object with a kind")
            names.append(entry['name'])
        self._validate_rule(self.schedule, '/schedule', names)
        if not isinstance(self.defaults, dict):
            raise DocumentError('/defaults', "must be an object")
        return True

    def _validate_rule(self, rule: Any, path: str, names: List[str]) -> None:
        if not isinstance(rule, dict) or not isinstance(rule.get('kind'), str):
            raise DocumentError(f'{path}/kind', "schedule rule needs a kind")
        for key in _SCHEDULE_NAME_FIELDS:
            if key in rule and rule[key] not in names:
                raise DocumentError(f'{path}/{key}', f"unknown generator {rule[key]!r}")
        for key in _SCHEDULE_WORD_FIELDS:
            if key in rule:
                if not isinstance(rule[key], list):
                    raise DocumentError(f'{path}/{key}', "must be an array of generator names")
                for position, item in enumerate(rule[key]):
                    if item not in names:
                        raise DocumentError(f'{path}/{key}/{position}', f"unknown generator {item!r}")
        if rule['kind'] == 'offset':
            self._validate_rule(rule.get('rule'), f'{path}/rule', names)

    def build(self):
        """
        Construct (SpaceSpec, Schedule) from the document

        Raises:
            DocumentError: If a map, space or rule is malformed
        """
        # Import here to avoid circular imports
        from spaces_regions import SpaceSpec
        from core_maps import map_from_dict
        from schedules import Schedule

        try:
            space = SpaceSpec.from_dict(self.space)
        except (ValueError, KeyError, TypeError) as e:
            raise DocumentError('/space', str(e)) from e
        maps = []
        for index, entry in enumerate(self.generators):
            try:
                maps.append(map_from_dict(entry['map']))
            except (ValueError, KeyError, TypeError) as e:
                raise DocumentError(f'/generators/{index}/map', str(e)) from e
        try:
            schedule = Schedule.from_dict(self.schedule, maps, [entry['name'] for entry in self.generators])
        except (ValueError, KeyError, TypeError) as e:
            raise DocumentError('/schedule', str(e)) from e
        return space, schedule

    def to_dict(self) -> dict:
        data = {
            'schema_version': self.schema_version,
            'space': self.space,
            'generators': self.generators,
            'schedule': self.schedule,
            'defaults': self.defaults,
        }
        if self.name:
            data['name'] = self.name
        return data

    @classmethod
    def from_dict(cls, data: Any) -> 'SystemDocument':
        if not isinstance(data, dict):
            raise DocumentError('', "document must be a JSON object")
        for key in ('space', 'generators', 'schedule'):
            if key not in data:
                raise DocumentError(f'/{key}', "required property missing")
        return cls(
            space=data['space'],
            generators=data['generators'],
            schedule=data['schedule'],
            defaults=data.get('defaults', {}),
            name=data.get('name', ''),
            schema_version=data.get('schema_version', SCHEMA_VERSION),
        )
