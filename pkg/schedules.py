"""
Schedules Module

Deterministic rules n -> f_n producing the map sequence f_{1,inf}:
- PeriodicRule: the word repeats
- TriangularRule: base map at positions j(j+1)/2, filler elsewhere
- GrowingBlocksRule: block n holds n copies of a generator, each followed
  by n fillers, then the same with the generator's inverse
- ExplicitRule: finite prefix followed by a periodic tail
- FamilyRule: maps built per index by a registered family
- OffsetRule: another rule re-based to start later

Indices start at 1. Rules refer to generators by position; documents refer
to them by name.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import config
from core_maps import MapSpec, PLMap, analyze, commutes
from error_handler import BadParameter
from models import Verdict, join_verdicts

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeriodicRule:
    word: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'word', tuple(self.word))
        if not self.word:
            raise ValueError("periodic word must be nonempty")


@dataclass(frozen=True)
class TriangularRule:
    base: int
    filler: int


@dataclass(frozen=True)
class GrowingBlocksRule:
    generator: int
    inverse: int
    filler: int
    repeat_scale: int = 1
    filler_scale: int = 1

    def __post_init__(self):
        if self.repeat_scale < 1 or self.filler_scale < 0:
            raise ValueError("repeat_scale must be >= 1 and filler_scale >= 0")


@dataclass(frozen=True)
class ExplicitRule:
    prefix: Tuple[int, ...]
    tail: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(self.prefix))
        object.__setattr__(self, 'tail', tuple(self.tail))
        if not self.tail:
            raise ValueError("explicit rule needs a nonempty periodic tail")


@dataclass(frozen=True)
class FamilyRule:
    name: str

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown map family {self.name!r}")


@dataclass(frozen=True)
class OffsetRule:
    rule: 'Rule'
    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("offset must be a natural number")


Rule = Union[PeriodicRule, TriangularRule, GrowingBlocksRule, ExplicitRule, FamilyRule, OffsetRule]


# Indexed map families

def _pl(breakpoints, pieces) -> PLMap:
    return PLMap.from_pieces([Fraction(x) for x in breakpoints],
                             [(Fraction(a), Fraction(b)) for a, b in pieces])


@lru_cache(maxsize=None)
def halving_block_map(k: int, r: int) -> PLMap:
    """
    Map f_{5k+r} of the halving-blocks family

    r=1 identity, r=2 x/2, r=3 doubles [0,1/2) and sends [1/2,1] to 1,
    r=4 lifts [0,1/2) by e = 2^-(k+2), r=5 pulls back by e.
    """
    e = Fraction(1, 2 ** (k + 2))
    if r == 1:
        return _pl([0, 1], [(1, 0)])
    if r == 2:
        return _pl([0, 1], [(Fraction(1, 2), 0)])
    if r == 3:
        return _pl([0, Fraction(1, 2), 1], [(2, 0), (0, 1)])
    if r == 4:
        return _pl([0, Fraction(1, 2), 1], [(1, e), (1 - 2 * e, 2 * e)])
    if r == 5:
        scale = 2 ** (k + 1)
        return _pl([0, e, Fraction(1, 2) + e, 1],
                   [(0, 0), (1, -e), (Fraction(scale, scale - 1), Fraction(-1, scale - 1))])
    raise ValueError("block position must be in 1..5")


def _halving_blocks(n: int) -> MapSpec:
    return halving_block_map((n - 1) // 5, (n - 1) % 5 + 1)


FAMILIES: Dict[str, Tuple[str, Callable[[int], MapSpec]]] = {
    'halving-blocks': ('interval', _halving_blocks),
}


def triangular_position(j: int) -> int:
    """Index of the j-th base map in a triangular rule"""
    return j * (j + 1) // 2


def _is_triangular(n: int) -> bool:
    j = int((2 * n) ** 0.5)
    while triangular_position(j) < n:
        j += 1
    while triangular_position(j) > n:
        j -= 1
    return triangular_position(j) == n


def _rule_index(rule: Rule, n: int) -> Optional[int]:
    """Generator index used at time n, None for family rules"""
    if isinstance(rule, PeriodicRule):
        return rule.word[(n - 1) % len(rule.word)]
    if isinstance(rule, TriangularRule):
        return rule.base if _is_triangular(n) else rule.filler
    if isinstance(rule, GrowingBlocksRule):
        block, start = 1, 1
        while True:
            unit = 1 + block * rule.filler_scale
            half = block * rule.repeat_scale * unit
            if n < start + 2 * half:
                offset = n - start
                letter = rule.generator if offset < half else rule.inverse
                return letter if (offset % half) % unit == 0 else rule.filler
            start += 2 * half
            block += 1
    if isinstance(rule, ExplicitRule):
        if n <= len(rule.prefix):
            return rule.prefix[n - 1]
        return rule.tail[(n - len(rule.prefix) - 1) % len(rule.tail)]
    if isinstance(rule, OffsetRule):
        return _rule_index(rule.rule, n + rule.offset)
    return None


def _rule_family(rule: Rule) -> Optional[Tuple[str, int]]:
    offset = 0
    while isinstance(rule, OffsetRule):
        offset += rule.offset
        rule = rule.rule
    if isinstance(rule, FamilyRule):
        return rule.name, offset
    return None


@dataclass
class Schedule:
    """
    A map sequence f_{1,inf}

    Attributes:
        generators (list): the finite generator set F
        rule (Rule): rule choosing the generator (or family map) at each n
        names (list): generator names, used for serialization
    """
    generators: List[MapSpec]
    rule: Rule
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.generators = list(self.generators)
        if not self.names:
            self.names = [f"f{j + 1}" for j in range(len(self.generators))]
        self.names = list(self.names)
        self._fingerprint = None
        self.validate()

    def validate(self) -> bool:
        if len(self.names) != len(self.generators):
            raise ValueError("need one name per generator")
        if _rule_family(self.rule) is None and not self.generators:
            raise ValueError("schedule needs at least one generator")
        for index in self.used_indices():
            if not 0 <= index < len(self.generators):
                raise ValueError(f"rule refers to generator {index} out of range")
        return True

    # Constructors

    @classmethod
    def periodic(cls, maps: Sequence[MapSpec], names: Sequence[str] = ()) -> 'Schedule':
        """Periodic schedule repeating `maps` in order (repeated maps share a generator)"""
        generators, word = [], []
        for m in maps:
            if m not in generators:
                generators.append(m)
            word.append(generators.index(m))
        if names and len(names) != len(generators):
            raise ValueError("need one name per distinct map")
        return cls(generators, PeriodicRule(tuple(word)), list(names))

    @classmethod
    def family(cls, name: str) -> 'Schedule':
        return cls([], FamilyRule(name), [])

    # Evaluation

    def map_at(self, n: int) -> MapSpec:
        """The n-th map f_n, n >= 1"""
        if n < 1:
            raise BadParameter("schedule indices start at 1")
        family = _rule_family(self.rule)
        if family is not None:
            name, offset = family
            return FAMILIES[name][1](n + offset)
        return self.generators[_rule_index(self.rule, n)]

    def index_at(self, n: int) -> Optional[int]:
        """Generator index used at time n (None for family rules)"""
        if n < 1:
            raise BadParameter("schedule indices start at 1")
        return _rule_index(self.rule, n)

    def used_indices(self) -> List[int]:
        rule = self.rule
        while isinstance(rule, OffsetRule):
            rule = rule.rule
        if isinstance(rule, PeriodicRule):
            used = rule.word
        elif isinstance(rule, TriangularRule):
            used = (rule.base, rule.filler)
        elif isinstance(rule, GrowingBlocksRule):
            used = (rule.generator, rule.inverse, rule.filler)
        elif isinstance(rule, ExplicitRule):
            used = rule.prefix + rule.tail
        else:
            used = ()
        return sorted(set(used))

    def generators_used(self, horizon: int = 20) -> List[MapSpec]:
        """Distinct maps the rule uses; the first `horizon` maps for families"""
        if _rule_family(self.rule) is not None:
            maps = []
            for n in range(1, horizon + 1):
                m = self.map_at(n)
                if m not in maps:
                    maps.append(m)
            return maps
        return [self.generators[j] for j in self.used_indices()]

    def period(self) -> Optional[int]:
        """A period of the sequence from n=1 read off the rule, or None"""
        if isinstance(self.rule, PeriodicRule):
            return len(self.rule.word)
        if isinstance(self.rule, ExplicitRule) and not self.rule.prefix:
            return len(self.rule.tail)
        return None

    @property
    def space_kind(self) -> Optional[str]:
        family = _rule_family(self.rule)
        if family is not None:
            return FAMILIES[family[0]][0]
        kinds = {m.space_kind for m in self.generators} - {None}
        return kinds.pop() if len(kinds) == 1 else None

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            data = {
                'generators': [m.to_dict() for m in self.generators],
                'rule': rule_to_dict(self.rule, list(range(len(self.generators)))),
            }
            text = json.dumps(data, sort_keys=True, separators=(',', ':'))
            self._fingerprint = hashlib.sha256(text.encode('utf-8')).hexdigest()
        return self._fingerprint

    # Serialization

    def to_dict(self) -> dict:
        return rule_to_dict(self.rule, self.names)

    @classmethod
    def from_dict(cls, data: dict, maps: Sequence[MapSpec], names: Sequence[str]) -> 'Schedule':
        return cls(list(maps), rule_from_dict(data, list(names)), list(names))


def rule_to_dict(rule: Rule, names: Sequence) -> dict:
    if isinstance(rule, PeriodicRule):
        return {'kind': 'periodic', 'word': [names[j] for j in rule.word]}
    if isinstance(rule, TriangularRule):
        return {'kind': 'triangular', 'base': names[rule.base], 'filler': names[rule.filler]}
    if isinstance(rule, GrowingBlocksRule):
        return {
            'kind': 'growing_blocks',
            'generator': names[rule.generator],
            'inverse': names[rule.inverse],
            'filler': names[rule.filler],
            'repeat_scale': rule.repeat_scale,
            'filler_scale': rule.filler_scale,
        }
    if isinstance(rule, ExplicitRule):
        return {
            'kind': 'explicit',
            'prefix': [names[j] for j in rule.prefix],
            'tail': [names[j] for j in rule.tail],
        }
    if isinstance(rule, FamilyRule):
        return {'kind': 'family', 'family': rule.name}
    return {'kind': 'offset', 'offset': rule.offset, 'rule': rule_to_dict(rule.rule, names)}


def rule_from_dict(data: dict, names: List[str]) -> Rule:
    def index(name):
        if name not in names:
            raise ValueError(f"unknown generator {name!r}")
        return names.index(name)

    kind = data.get('kind')
    if kind == 'periodic':
        return PeriodicRule(tuple(index(n) for n in data['word']))
    if kind == 'triangular':
        return TriangularRule(index(data['base']), index(data['filler']))
    if kind == 'growing_blocks':
        return GrowingBlocksRule(
            index(data['generator']), index(data['inverse']), index(data['filler']),
            int(data.get('repeat_scale', 1)), int(data.get('filler_scale', 1)))
    if kind == 'explicit':
        return ExplicitRule(tuple(index(n) for n in data.get('prefix', [])), tuple(index(n) for n in data['tail']))
    if kind == 'family':
        return FamilyRule(data['family'])
    if kind == 'offset':
        return OffsetRule(rule_from_dict(data['rule'], names), int(data['offset']))
    raise ValueError(f"unknown schedule kind {kind!r}")


def map_at(s: Schedule, n: int) -> MapSpec:
    return s.map_at(n)


def detect_period(s: Schedule, bound: Optional[int] = None) -> Optional[int]:
    """
    Least k <= bound with f_{n+k} == f_n for all n, decided from the rule

    Only periodic and explicit rules can be periodic; other rules give None.
    """
    bound = config.PERIOD_BOUND if bound is None else bound
    if bound < 1:
        raise BadParameter("period bound must be >= 1")
    rule = s.rule
    if isinstance(rule, PeriodicRule):
        maps = [s.generators[j] for j in rule.word]
        size = len(maps)
        for k in range(1, min(size, bound) + 1):
            if size % k == 0 and all(maps[j] == maps[(j + k) % size] for j in range(size)):
                return k
        return None
    if isinstance(rule, ExplicitRule):
        checked = len(rule.prefix) + len(rule.tail)
        for k in range(1, bound + 1):
            if all(s.map_at(n + k) == s.map_at(n) for n in range(1, checked + 1)):
                return k
        return None
    return None


def family_analysis(s: Schedule, horizon: int = 20) -> dict:
    """
    Structural facts about the generator family

    Returns:
        dict: finitely_generated, generators, commutative (Verdict),
            all_surjective and the non-commuting or non-surjective witness
    """
    finitely_generated = _rule_family(s.rule) is None
    maps = s.generators_used(horizon)
    if finitely_generated:
        labels = [s.names[j] for j in s.used_indices()]
    else:
        labels = [f"f@{n}" for n in range(1, len(maps) + 1)]
    verdicts, witness = [], None
    for a in range(len(maps)):
        for b in range(a + 1, len(maps)):
            result = commutes(maps[a], maps[b])
            verdicts.append(result.verdict)
            if result.verdict is Verdict.FAILS and witness is None:
                witness = {'pair': [labels[a], labels[b]], **result.witness}
    not_surjective = [label for label, m in zip(labels, maps) if not analyze(m).surjective]
    return {
        'finitely_generated': finitely_generated,
        'generators': labels,
        'commutative': join_verdicts(verdicts),
        'commutative_witness': witness,
        'all_surjective': not not_surjective,
        'not_surjective': not_surjective,
    }


def shifted_system(s: Schedule, n: int) -> Schedule:
    """
    The schedule f_{n,inf}: index 1 of the result is index n of s

    Periodic words rotate, explicit prefixes shrink, other rules are
    wrapped in an OffsetRule.
    """
    if n < 1:
        raise BadParameter("shift start must be >= 1")
    drop = n - 1
    rule = s.rule
    if isinstance(rule, PeriodicRule):
        cut = drop % len(rule.word)
        new_rule = PeriodicRule(rule.word[cut:] + rule.word[:cut])
    elif isinstance(rule, ExplicitRule):
        if drop <= len(rule.prefix):
            new_rule = ExplicitRule(rule.prefix[drop:], rule.tail)
        else:
            cut = (drop - len(rule.prefix)) % len(rule.tail)
            new_rule = ExplicitRule((), rule.tail[cut:] + rule.tail[:cut])
    elif isinstance(rule, OffsetRule):
        new_rule = OffsetRule(rule.rule, rule.offset + drop)
    elif drop == 0:
        new_rule = rule
    else:
        new_rule = OffsetRule(rule, drop)
    return Schedule(s.generators, new_rule, s.names)
