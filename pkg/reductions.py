"""
Reductions Module

k-periodic reduction g = f_k o ... o f_1, the tail systems f_{n,inf}, and
the paired-verdict harness that checks fixture-level consistency with the
transfer theorems in THEOREMS.

A TransferCase records both reports, the hypothesis flags and, per
implication direction, whether it applies and whether it held up.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from core_maps import MapSpec, analyze, compile_window, uniformly_continuous
from detectors import check_nonrecurrent, map_cells, run_property
from error_handler import BadParameter, NotPeriodic, Unsupported, log_system_event
from models import Consistency, PropertyReport, TransferCase, Verdict
from schedules import Schedule, detect_period, family_analysis, shifted_system
from spaces_regions import SpaceSpec
from utils import parse_point

logger = logging.getLogger(__name__)

NDS_TO_REDUCED = 'nds_to_reduced'
REDUCED_TO_NDS = 'reduced_to_nds'


@dataclass(frozen=True)
class Theorem:
    """
    One registered implication

    Attributes:
        tag (str): registry key
        mode (str): period, shift or implication
        properties (tuple): properties the theorem speaks about
        forward (str): claimed direction, nds_to_reduced or reduced_to_nds
        forward_hypotheses (tuple): flags the claimed direction needs
        converse_hypotheses (tuple | None): flags the converse needs; None when
            the converse is not claimed
        consequent (str): implied property for implication-mode entries
        needs_fixture (bool): no built-in fixture meets the hypotheses
        statement (str): one-line statement
    """
    tag: str
    mode: str
    properties: Tuple[str, ...]
    forward: str
    forward_hypotheses: Tuple[str, ...] = ()
    converse_hypotheses: Optional[Tuple[str, ...]] = None
    consequent: Optional[str] = None
    needs_fixture: bool = False
    statement: str = ''

    def to_dict(self) -> dict:
        return {
            'tag': self.tag,
            'mode': self.mode,
            'properties': list(self.properties),
            'forward': self.forward,
            'forward_hypotheses': list(self.forward_hypotheses),
            'converse_hypotheses': None if self.converse_hypotheses is None else list(self.converse_hypotheses),
            'consequent': self.consequent,
            'needs_fixture': self.needs_fixture,
            'statement': self.statement,
        }


_UC = ('uniformly_continuous',)
_TAIL = ('all_surjective', 'no_isolated_points')

THEOREMS: Dict[str, Theorem] = {theorem.tag: theorem for theorem in (
    Theorem('period-sensitive', 'period', ('sensitive',), REDUCED_TO_NDS, (), _UC,
            statement="g sensitive implies f_{1,inf} sensitive; converse for uniformly continuous f_p"),
    Theorem('period-li-yorke-sensitive', 'period', ('li_yorke_sensitive',), REDUCED_TO_NDS, (), _UC,
            statement="g Li-Yorke sensitive implies f_{1,inf} Li-Yorke sensitive; converse for uniformly continuous f_p"),
    Theorem('period-cofinitely-sensitive', 'period', ('cofinitely_sensitive',), NDS_TO_REDUCED, (), _UC,
            statement="f_{1,inf} cofinitely sensitive implies g cofinitely sensitive; converse for uniformly continuous f_p"),
    Theorem('period-syndetically-sensitive', 'period', ('syndetically_sensitive',), REDUCED_TO_NDS, (), _UC,
            statement="g syndetically sensitive implies f_{1,inf} syndetically sensitive; converse for uniformly continuous f_p"),
    Theorem('period-ergodically-sensitive', 'period', ('ergodically_sensitive',), REDUCED_TO_NDS, (), _UC,
            statement="g ergodically sensitive implies f_{1,inf} ergodically sensitive; converse for uniformly continuous f_p"),
    Theorem('period-transitive', 'period', ('transitive',), REDUCED_TO_NDS, (), None,
            statement="g transitive implies f_{1,inf} transitive; the converse fails in general"),
    Theorem('shift-sensitivity', 'shift',
            ('sensitive', 'multi_sensitive', 'syndetically_sensitive', 'cofinitely_sensitive', 'ergodically_sensitive'),
            NDS_TO_REDUCED, _TAIL, _TAIL + ('feeble_open',),
            statement="with surjective maps and no isolated points, f_{1,inf} sensitive implies f_{n,inf} sensitive; "
                      "converse when f_{1,inf} is feeble open"),
    Theorem('shift-transitivity', 'shift', ('transitive', 'weakly_mixing', 'mixing'), NDS_TO_REDUCED, (), (),
            statement="f_{1,inf} is (weakly mixing, mixing) transitive iff every f_{n,inf} is"),
    Theorem('weakly-mixing-kato', 'implication', ('weakly_mixing',), NDS_TO_REDUCED, (), None, 'kato',
            statement="weakly mixing implies Kato chaos"),
    Theorem('mixing-cofinitely-sensitive', 'implication', ('mixing',), NDS_TO_REDUCED, ('nontrivial',), None,
            'cofinitely_sensitive', statement="a nontrivial mixing system is cofinitely sensitive"),
    Theorem('nonrecurrent-sensitive', 'implication', ('transitive',), NDS_TO_REDUCED,
            ('all_surjective', 'commutative', 'periodic', 'no_isolated_points', 'nonrecurrent_point'), None,
            'sensitive', needs_fixture=True,
            statement="a surjective commutative k-periodic transitive system without isolated points "
                      "and with a nonrecurrent point is sensitive"),
)}


def theorem_for(mode: str, prop: str) -> Theorem:
    """
    Registry entry governing a property in the given mode

    Raises:
        Unsupported: If no registered theorem covers the pair
    """
    for theorem in THEOREMS.values():
        if theorem.mode == mode and prop in theorem.properties:
            return theorem
    raise Unsupported(f"no {mode} transfer theorem covers {prop!r}")


def compile_period_map(s: Schedule, period: Optional[int] = None) -> MapSpec:
    """
    g = f_k o ... o f_1 compiled exactly

    k is the given period, else the declared period of the rule (the word
    length of a periodic rule), else detect_period(s).

    Raises:
        NotPeriodic: If no period is known or found
        BadParameter: If the given period does not repeat the sequence
    """
    k = period or s.period() or detect_period(s)
    if k is None:
        raise NotPeriodic("schedule has no period within the search bound")
    if period is not None:
        if period < 1 or any(s.map_at(n + period) != s.map_at(n) for n in range(1, 2 * period + 1)):
            raise BadParameter(f"{period} is not a period of the schedule")
    log_system_event("[REDUCTION] period map", f"k={k}")
    return compile_window(s, 1, k)


def reduced_schedule(s: Schedule, period: Optional[int] = None) -> Schedule:
    """The autonomous system Periodic{g}"""
    return Schedule.periodic([compile_period_map(s, period)], ['g'])


def hypothesis_flags(s: Schedule, space: SpaceSpec, params: Dict[str, Any], horizon: int = 20) -> Dict[str, Any]:
    """Flags recorded with every TransferCase"""
    maps = s.generators_used(horizon)
    family = family_analysis(s, horizon)
    flags = {
        'uniformly_continuous': all(uniformly_continuous(m) for m in maps),
        'all_surjective': family['all_surjective'],
        'no_isolated_points': not space.has_isolated_points,
        'feeble_open': all(analyze(m).feeble_open for m in maps),
        'not_feeble_open': [name for name, m in zip(_labels(s, maps), maps) if not analyze(m).feeble_open],
        'commutative': family['commutative'] is Verdict.HOLDS,
        'periodic': (s.period() or detect_period(s)) is not None,
        'nontrivial': space.kind != 'finite' or space.size > 1,
    }
    point = params.get('point')
    if point is None:
        flags['nonrecurrent_point'] = False
    else:
        x = parse_point(space, point) if isinstance(point, str) else point
        epsilon = Fraction(params.get('epsilon', Fraction(1, 8)))
        flags['nonrecurrent_point'] = check_nonrecurrent(space, x, s, epsilon, int(params.get('T', 100))).holds
    return flags


def _labels(s: Schedule, maps: List[MapSpec]) -> List[str]:
    if s.used_indices():
        return [s.names[j] for j in s.used_indices()]
    return [f"f@{n}" for n in range(1, len(maps) + 1)]


def _direction(name: str, antecedent: PropertyReport, consequent: PropertyReport,
               claimed: bool, hypotheses: Tuple[str, ...], flags: Dict[str, Any]) -> Dict[str, Any]:
    unmet = [h for h in hypotheses if not flags.get(h)]
    applicable = claimed and not unmet
    contradiction = antecedent.holds and consequent.fails
    if not applicable:
        status = Consistency.NOT_APPLICABLE
    elif contradiction:
        status = Consistency.VIOLATION
    else:
        status = Consistency.CONSISTENT
    return {
        'direction': name,
        'claimed': claimed,
        'hypotheses': list(hypotheses),
        'unmet_hypotheses': unmet,
        'antecedent': antecedent.verdict.value,
        'consequent': consequent.verdict.value,
        'contradiction': contradiction,
        'status': status.value,
    }


def _assemble(system: str, prop: str, params: Dict[str, Any], nds: PropertyReport, reduced: PropertyReport,
              theorem: Theorem, flags: Dict[str, Any], notes: List[str]) -> TransferCase:
    reports = {NDS_TO_REDUCED: (nds, reduced), REDUCED_TO_NDS: (reduced, nds)}
    converse = REDUCED_TO_NDS if theorem.forward == NDS_TO_REDUCED else NDS_TO_REDUCED
    directions = [
        _direction(theorem.forward, *reports[theorem.forward], True, theorem.forward_hypotheses, flags),
        _direction(converse, *reports[converse], theorem.converse_hypotheses is not None,
                   theorem.converse_hypotheses or (), flags),
    ]
    if any(d['status'] == Consistency.VIOLATION.value for d in directions):
        consistency = Consistency.VIOLATION
    elif any(d['contradiction'] for d in directions):
        consistency = Consistency.NOT_APPLICABLE
    else:
        consistency = Consistency.CONSISTENT
    if theorem.needs_fixture:
        notes.append("needs-fixture: no built-in fixture meets every hypothesis")
    case = TransferCase(
        system=system,
        property=prop,
        parameters={key: value for key, value in params.items()},
        nds_report=nds,
        reduced_report=reduced,
        theorem_tag=theorem.tag,
        directions=directions,
        hypotheses=flags,
        consistency=consistency,
        notes=notes,
    )
    log_system_event("[REDUCTION] compare", f"{theorem.tag}: {consistency.value}")
    return case


def _run_pair(prop_a: str, space: SpaceSpec, a: Schedule, prop_b: str, b: Schedule, params) -> List[PropertyReport]:
    return map_cells(lambda job: run_property(job[0], space, job[1], params), [(prop_a, a), (prop_b, b)])


def transfer_compare(s: Schedule, space: SpaceSpec, prop: str, params: Dict[str, Any],
                     system: str = '', period: Optional[int] = None) -> TransferCase:
    """
    Run a detector on f_{1,inf} and on Periodic{g} and check the period theorem

    Raises:
        NotPeriodic: If s has no period
        Unsupported: If no period theorem covers the property
    """
    theorem = theorem_for('period', prop)
    reduced = reduced_schedule(s, period)
    nds_report, reduced_report = _run_pair(prop, space, s, prop, reduced, params)
    k = period or s.period() or detect_period(s)
    notes = [f"g = f_{k} o ... o f_1 with k = {k}"]
    return _assemble(system or s.fingerprint[:12], prop, params, nds_report, reduced_report,
                     theorem, hypothesis_flags(s, space, params), notes)


def shift_compare(s: Schedule, space: SpaceSpec, n: int, prop: str, params: Dict[str, Any],
                  system: str = '') -> TransferCase:
    """
    Run a detector on f_{1,inf} and on f_{n,inf} and check the tail theorem

    Raises:
        BadParameter: If n < 2
        Unsupported: If no shift theorem covers the property
    """
    if n < 2:
        raise BadParameter("tail systems start at n >= 2")
    theorem = theorem_for('shift', prop)
    tail = shifted_system(s, n)
    nds_report, tail_report = _run_pair(prop, space, s, prop, tail, params)
    notes = [f"reduced system is f_{{{n},inf}}"]
    return _assemble(system or s.fingerprint[:12], prop, params, nds_report, tail_report,
                     theorem, hypothesis_flags(s, space, params), notes)


def implication_compare(s: Schedule, space: SpaceSpec, tag: str, params: Dict[str, Any],
                        system: str = '') -> TransferCase:
    """
    Check a single-system implication: the antecedent report goes in
    nds_report, the consequent report in reduced_report

    Raises:
        BadParameter: If tag is not an implication-mode theorem
    """
    theorem = THEOREMS.get(tag)
    if theorem is None or theorem.mode != 'implication':
        raise BadParameter(f"unknown implication theorem {tag!r}")
    antecedent, consequent = _run_pair(theorem.properties[0], space, s, theorem.consequent, s, params)
    notes = [f"{theorem.properties[0]} implies {theorem.consequent} on the same system"]
    return _assemble(system or s.fingerprint[:12], theorem.properties[0], params, antecedent, consequent,
                     theorem, hypothesis_flags(s, space, params), notes)
