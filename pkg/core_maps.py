"""
Core Maps Module

Exact representation and evaluation of single maps and of composed windows
f_i^n = f_{i+n-1} o ... o f_i.

Map kinds:
- PLMap: piecewise-linear self-map of [0,1] with rational data
- Rotation: x -> x + k*alpha + offset on the circle
- FiniteMap: table on {0, ..., n-1}
- Shift: power of the left shift on two-sided binary sequences
- Identity, Composite (right-to-left), Inverse
"""

import logging
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Tuple, Union

from error_handler import HeterogeneousWindow, NotInvertible, SpaceMismatch
from models import MapAnalysis, Verdict, VerdictResult, fraction_text
from points import CirclePoint, FinitePoint, IntervalPoint, Point, point_kind
from window_cache import window_cache

logger = logging.getLogger(__name__)


def _fractions(values) -> Tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Identity:
    """Identity map on any space"""

    space_kind = None

    def to_dict(self) -> dict:
        return {'kind': 'identity'}


IDENTITY = Identity()


@dataclass(frozen=True)
class PLMap:
    """
    Piecewise-linear self-map of [0,1]

    Stored in normal form: breakpoints 0 = x_0 < ... < x_p = 1, an affine
    map (a_i, b_i) on each open piece (x_i, x_{i+1}), and the value at every
    breakpoint. Breakpoints that change nothing are removed, so two PLMaps
    are equal exactly when they agree pointwise.

    Use PLMap.from_pieces for the right-open piece convention.
    """
    breakpoints: Tuple[Fraction, ...]
    pieces: Tuple[Tuple[Fraction, Fraction], ...]
    point_values: Tuple[Fraction, ...]

    space_kind = 'interval'

    def __post_init__(self):
        breakpoints = _fractions(self.breakpoints)
        pieces = tuple(_fractions(piece) for piece in self.pieces)
        values = _fractions(self.point_values)
        self._check(breakpoints, pieces, values)
        breakpoints, pieces, values = self._normalize(breakpoints, pieces, values)
        object.__setattr__(self, 'breakpoints', breakpoints)
        object.__setattr__(self, 'pieces', pieces)
        object.__setattr__(self, 'point_values', values)

    @staticmethod
    def _check(breakpoints, pieces, values) -> None:
        if len(breakpoints) < 2 or breakpoints[0] != 0 or breakpoints[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(breakpoints, breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pieces) != len(breakpoints) - 1:
            raise ValueError("need exactly one affine piece between consecutive breakpoints")
        if len(values) != len(breakpoints):
            raise ValueError("need one value per breakpoint")
        for index, piece in enumerate(pieces):
            if len(piece) != 2:
                raise ValueError("each piece is a pair (a, b)")
            a, b = piece
            for x in (breakpoints[index], breakpoints[index + 1]):
                if not 0 <= a * x + b <= 1:
                    raise ValueError(f"piece {index} leaves [0,1] near x={x}")
        for value in values:
            if not 0 <= value <= 1:
                raise ValueError("breakpoint values must lie in [0,1]")

    @staticmethod
    def _normalize(breakpoints, pieces, values):
        keep_bp, keep_pieces, keep_values = [breakpoints[0]], [pieces[0]], [values[0]]
        for index in range(1, len(breakpoints) - 1):
            x = breakpoints[index]
            a, b = pieces[index]
            if keep_pieces[-1] == (a, b) and values[index] == a * x + b:
                continue
            keep_bp.append(x)
            keep_values.append(values[index])
            keep_pieces.append((a, b))
        keep_bp.append(breakpoints[-1])
        keep_values.append(values[-1])
        return tuple(keep_bp), tuple(keep_pieces), tuple(keep_values)

    @classmethod
    def from_pieces(cls, breakpoints, pieces) -> 'PLMap':
        """Build with right-open pieces [x_i, x_{i+1}), the last one closed"""
        breakpoints = _fractions(breakpoints)
        pieces = tuple(_fractions(piece) for piece in pieces)
        values = []
        for index, x in enumerate(breakpoints):
            a, b = pieces[min(index, len(pieces) - 1)]
            values.append(a * x + b)
        return cls(breakpoints, pieces, tuple(values))

    def locate(self, x: Fraction) -> Tuple[str, int]:
        """('point', i) if x is breakpoint i, else ('piece', i) for the open piece"""
        index = bisect_left(self.breakpoints, x)
        if index < len(self.breakpoints) and self.breakpoints[index] == x:
            return 'point', index
        return 'piece', index - 1

    def value_at(self, x: Fraction) -> Fraction:
        where, index = self.locate(x)
        if where == 'point':
            return self.point_values[index]
        a, b = self.pieces[index]
        return a * x + b

    def piece_limits(self, index: int) -> Tuple[Fraction, Fraction]:
        """Values of piece `index` extended to its two end breakpoints"""
        a, b = self.pieces[index]
        return a * self.breakpoints[index] + b, a * self.breakpoints[index + 1] + b

    def to_dict(self) -> dict:
        return {
            'kind': 'pl',
            'breakpoints': [fraction_text(x) for x in self.breakpoints],
            'pieces': [[fraction_text(a), fraction_text(b)] for a, b in self.pieces],
            'point_values': [fraction_text(v) for v in self.point_values],
        }


@dataclass(frozen=True)
class Rotation:
    """Rotation of the circle by step*alpha + offset"""
    step: int
    offset: Fraction = Fraction(0)

    space_kind = 'circle'

    def __post_init__(self):
        offset = Fraction(self.offset)
        object.__setattr__(self, 'step', int(self.step))
        object.__setattr__(self, 'offset', offset - (offset.numerator // offset.denominator))

    def to_dict(self) -> dict:
        return {'kind': 'rotation', 'step': self.step, 'offset': fraction_text(self.offset)}


@dataclass(frozen=True)
class FiniteMap:
    """Self-map of {0, ..., n-1} given by its table"""
    table: Tuple[int, ...]

    space_kind = 'finite'

    def __post_init__(self):
        table = tuple(int(t) for t in self.table)
        if not table:
            raise ValueError("finite map table must be nonempty")
        if any(t < 0 or t >= len(table) for t in table):
            raise ValueError("finite map targets must be indices of the space")
        object.__setattr__(self, 'table', table)

    @property
    def size(self) -> int:
        return len(self.table)

    def to_dict(self) -> dict:
        return {'kind': 'finite', 'table': list(self.table)}


@dataclass(frozen=True)
class Shift:
    """sigma**power with (sigma x)_i = x_{i+1}"""
    power: int

    space_kind = 'shift'

    def __post_init__(self):
        object.__setattr__(self, 'power', int(self.power))

    def to_dict(self) -> dict:
        return {'kind': 'shift', 'power': self.power}


@dataclass(frozen=True)
class Composite:
    """maps[0] o maps[1] o ... ; the last map is applied first"""
    maps: Tuple['MapSpec', ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("composite needs at least one map")
        object.__setattr__(self, 'maps', maps)
        kinds = {space_kind(m) for m in maps} - {None}
        if len(kinds) > 1:
            raise HeterogeneousWindow(f"composite mixes spaces {sorted(kinds)}")

    @property
    def space_kind(self) -> Optional[str]:
        kinds = {space_kind(m) for m in self.maps} - {None}
        return kinds.pop() if kinds else None

    def to_dict(self) -> dict:
        return {'kind': 'composite', 'maps': [m.to_dict() for m in self.maps]}


@dataclass(frozen=True)
class Inverse:
    """Inverse of a bijective map, resolved on use"""
    inner: 'MapSpec'

    @property
    def space_kind(self) -> Optional[str]:
        return space_kind(self.inner)

    def to_dict(self) -> dict:
        return {'kind': 'inverse', 'inner': self.inner.to_dict()}


MapSpec = Union[Identity, PLMap, Rotation, FiniteMap, Shift, Composite, Inverse]


def space_kind(m: MapSpec) -> Optional[str]:
    """Space the map acts on; None for Identity"""
    return m.space_kind


def map_from_dict(data: dict) -> MapSpec:
    """Create a MapSpec from its JSON dictionary"""
    kind = data.get('kind')
    if kind == 'identity':
        return IDENTITY
    if kind == 'pl':
        if 'point_values' in data:
            return PLMap(
                _fractions(data['breakpoints']),
                tuple(_fractions(p) for p in data['pieces']),
                _fractions(data['point_values']),
            )
        return PLMap.from_pieces(data['breakpoints'], data['pieces'])
    if kind == 'rotation':
        return Rotation(int(data.get('step', 0)), Fraction(data.get('offset', '0')))
    if kind == 'finite':
        return FiniteMap(tuple(data['table']))
    if kind == 'shift':
        return Shift(int(data['power']))
    if kind == 'composite':
        return Composite(tuple(map_from_dict(m) for m in data['maps']))
    if kind == 'inverse':
        return Inverse(map_from_dict(data['inner']))
    raise ValueError(f"unknown map kind {kind!r}")


def _check_point(m: MapSpec, x: Point) -> None:
    kind = space_kind(m)
    if kind is not None and point_kind(x) != kind:
        raise SpaceMismatch(f"{type(m).__name__} acts on the {kind} space, got a {point_kind(x)} point")
    if isinstance(m, FiniteMap) and x.index >= m.size:
        raise SpaceMismatch(f"point {x.index} outside a finite space of size {m.size}")


def evaluate(m: MapSpec, x: Point) -> Point:
    """
    Exact image of a point

    Raises:
        SpaceMismatch: If the point is not in the map's space
        NotInvertible: If an Inverse wraps a non-bijection
    """
    _check_point(m, x)
    if isinstance(m, Identity):
        return x
    if isinstance(m, PLMap):
        return IntervalPoint(m.value_at(x.value))
    if isinstance(m, Rotation):
        return CirclePoint(x.base + m.offset, x.irrational_steps + m.step)
    if isinstance(m, FiniteMap):
        return FinitePoint(m.table[x.index])
    if isinstance(m, Shift):
        return x.shifted(m.power)
    if isinstance(m, Composite):
        for inner in reversed(m.maps):
            x = evaluate(inner, x)
        return x
    if isinstance(m, Inverse):
        return evaluate(invert(m.inner), x)
    raise TypeError(f"not a map: {m!r}")


def _compose_pl(outer: PLMap, inner: PLMap) -> PLMap:
    cuts = set(inner.breakpoints)
    for index, (a, b) in enumerate(inner.pieces):
        if a == 0:
            continue
        low, high = inner.breakpoints[index], inner.breakpoints[index + 1]
        for y in outer.breakpoints:
            x = (y - b) / a
            if low < x < high:
                cuts.add(x)
    breakpoints = sorted(cuts)
    pieces = []
    for low, high in zip(breakpoints, breakpoints[1:]):
        _, inner_index = inner.locate((low + high) / 2)
        a, b = inner.pieces[inner_index]
        where, outer_index = outer.locate(a * (low + high) / 2 + b)
        if where == 'point':
            # only reachable for constant inner pieces
            pieces.append((Fraction(0), outer.point_values[outer_index]))
        else:
            c, d = outer.pieces[outer_index]
            pieces.append((c * a, c * b + d))
    values = [outer.value_at(inner.value_at(x)) for x in breakpoints]
    return PLMap(tuple(breakpoints), tuple(pieces), tuple(values))


def flatten(m: MapSpec) -> MapSpec:
    """Resolve Composite and Inverse into a single concrete map"""
    if isinstance(m, Composite):
        result = IDENTITY
        for inner in reversed(m.maps):
            result = compose(inner, result)
        return result
    if isinstance(m, Inverse):
        return invert(flatten(m.inner))
    return m


def compose(outer: MapSpec, inner: MapSpec) -> MapSpec:
    """
    outer o inner as a single flattened map

    Raises:
        HeterogeneousWindow: If the two maps act on different spaces
    """
    outer, inner = flatten(outer), flatten(inner)
    if isinstance(outer, Identity):
        return inner
    if isinstance(inner, Identity):
        return outer
    if type(outer) is not type(inner):
        raise HeterogeneousWindow(f"cannot compose {type(outer).__name__} with {type(inner).__name__}")
    if isinstance(outer, PLMap):
        return _compose_pl(outer, inner)
    if isinstance(outer, Rotation):
        return Rotation(outer.step + inner.step, outer.offset + inner.offset)
    if isinstance(outer, FiniteMap):
        if outer.size != inner.size:
            raise HeterogeneousWindow("finite maps on spaces of different sizes")
        return FiniteMap(tuple(outer.table[t] for t in inner.table))
    return Shift(outer.power + inner.power)


def compile_window(schedule, i: int, n: int) -> MapSpec:
    """
    f_i^n = f_{i+n-1} o ... o f_i as one flattened map

    Windows over a k-periodic schedule are memoized by (i mod k, n).

    Args:
        schedule: object with map_at(n), period() and fingerprint
        i (int): first index, >= 1
        n (int): window length, >= 0
    """
    if i < 1 or n < 0:
        raise ValueError("window needs i >= 1 and n >= 0")
    if n == 0:
        return IDENTITY
    period = schedule.period()
    anchor = (i - 1) % period + 1 if period else i
    result = IDENTITY
    for length in range(1, n + 1):
        key = (schedule.fingerprint, anchor, length)
        window = window_cache.get(key)
        if window is None:
            window = compose(schedule.map_at(i + length - 1), result)
            window_cache.put(key, window)
        result = window
    return result


def _pl_witness(left: PLMap, right: PLMap) -> Optional[Fraction]:
    marks = sorted(set(left.breakpoints) | set(right.breakpoints))
    candidates = []
    for low, high in zip(marks, marks[1:]):
        candidates.extend([low, (low + high) / 2])
    candidates.append(marks[-1])
    for x in candidates:
        if left.value_at(x) != right.value_at(x):
            return x
    return None


def commutes(a: MapSpec, b: MapSpec) -> VerdictResult:
    """
    Decide a o b == b o a

    Raises:
        SpaceMismatch: If a and b act on different spaces
    """
    a, b = flatten(a), flatten(b)
    kinds = {space_kind(a), space_kind(b)} - {None}
    if len(kinds) > 1:
        raise SpaceMismatch(f"maps act on different spaces {sorted(kinds)}")
    if isinstance(a, Identity) or isinstance(b, Identity):
        return VerdictResult(Verdict.HOLDS)
    if isinstance(a, (Rotation, Shift)):
        return VerdictResult(Verdict.HOLDS)
    ab, ba = compose(a, b), compose(b, a)
    if ab == ba:
        return VerdictResult(Verdict.HOLDS)
    if isinstance(a, FiniteMap):
        index = next(j for j in range(a.size) if ab.table[j] != ba.table[j])
        witness = {'point': index, 'a_after_b': ab.table[index], 'b_after_a': ba.table[index]}
    else:
        x = _pl_witness(ab, ba)
        witness = {
            'point': fraction_text(x),
            'a_after_b': fraction_text(ab.value_at(x)),
            'b_after_a': fraction_text(ba.value_at(x)),
        }
    return VerdictResult(Verdict.FAILS, witness)


def pl_image_atoms(m: PLMap):
    """Images of the open pieces and of the breakpoints, as Interval atoms"""
    # Import here to avoid circular imports
    from spaces_regions import Interval

    atoms = []
    for index, (a, b) in enumerate(m.pieces):
        v0, v1 = m.piece_limits(index)
        if a == 0:
            atoms.append(Interval.point(b))
        else:
            atoms.append(Interval(min(v0, v1), max(v0, v1), False, False))
    atoms.extend(Interval.point(v) for v in m.point_values)
    return atoms


def _analyze_pl(m: PLMap) -> MapAnalysis:
    # Import here to avoid circular imports
    from spaces_regions import Interval, merge_intervals

    continuous = True
    for index, x in enumerate(m.breakpoints):
        limits = []
        if index > 0:
            limits.append(m.piece_limits(index - 1)[1])
        if index < len(m.pieces):
            limits.append(m.piece_limits(index)[0])
        if any(limit != m.point_values[index] for limit in limits):
            continuous = False
            break

    atoms = pl_image_atoms(m)
    image = merge_intervals(atoms)
    surjective = image == [Interval(Fraction(0), Fraction(1), True, True)]
    feeble_open = all(a != 0 for a, _ in m.pieces)
    injective = feeble_open and all(
        first.intersect(second).is_empty() for first, second in combinations(atoms, 2)
    )
    isometry = continuous and len(m.pieces) == 1 and m.pieces[0] in (
        (Fraction(1), Fraction(0)), (Fraction(-1), Fraction(1)))
    return MapAnalysis(continuous, surjective, injective, feeble_open, isometry)


def analyze(m: MapSpec, metric=None) -> MapAnalysis:
    """
    Structural flags of a map

    Args:
        m (MapSpec): the map; Composite and Inverse are flattened first
        metric: optional distance table for finite maps (discrete by default)
    """
    if isinstance(m, Inverse):
        return analyze(m.inner, metric)
    m = flatten(m)
    if isinstance(m, Identity):
        return MapAnalysis(True, True, True, True, True)
    if isinstance(m, PLMap):
        return _analyze_pl(m)
    if isinstance(m, Rotation):
        return MapAnalysis(True, True, True, True, True)
    if isinstance(m, Shift):
        return MapAnalysis(True, True, True, True, m.power == 0)
    table = m.table
    targets = set(table)
    injective = len(targets) == m.size
    if metric is None:
        isometry = injective
    else:
        isometry = all(
            metric[table[p]][table[q]] == metric[p][q] for p in range(m.size) for q in range(m.size))
    return MapAnalysis(True, len(targets) == m.size, injective, True, isometry)


def _invert_pl(m: PLMap) -> PLMap:
    images = []
    for index, (a, b) in enumerate(m.pieces):
        v0, v1 = m.piece_limits(index)
        images.append((min(v0, v1), max(v0, v1), (1 / a, -b / a)))
    preimage_of = {value: x for x, value in zip(m.breakpoints, m.point_values)}
    breakpoints = sorted({Fraction(0), Fraction(1)} | {low for low, _, _ in images} | {high for _, high, _ in images})
    by_span = {(low, high): affine for low, high, affine in images}
    pieces = tuple(by_span[(low, high)] for low, high in zip(breakpoints, breakpoints[1:]))
    values = tuple(preimage_of[y] for y in breakpoints)
    return PLMap(tuple(breakpoints), pieces, values)


def invert(m: MapSpec) -> MapSpec:
    """
    Exact inverse of a bijective map

    Raises:
        NotInvertible: With the failing flag when the map is not bijective
    """
    if isinstance(m, Inverse):
        return flatten(m.inner)
    m = flatten(m)
    if isinstance(m, Identity):
        return m
    if isinstance(m, Rotation):
        return Rotation(-m.step, -m.offset)
    if isinstance(m, Shift):
        return Shift(-m.power)
    flags = analyze(m)
    if not flags.injective:
        raise NotInvertible(f"{type(m).__name__} is not injective", 'injective')
    if not flags.surjective:
        raise NotInvertible(f"{type(m).__name__} is not surjective", 'surjective')
    if isinstance(m, FiniteMap):
        inverse = [0] * m.size
        for source, target in enumerate(m.table):
            inverse[target] = source
        return FiniteMap(tuple(inverse))
    return _invert_pl(m)


def uniformly_continuous(m: MapSpec) -> bool:
    """Every built-in map kind is uniformly continuous on its compact space"""
    if isinstance(m, Composite):
        return all(uniformly_continuous(inner) for inner in m.maps)
    if isinstance(m, Inverse):
        return uniformly_continuous(m.inner)
    return isinstance(m, (Identity, PLMap, Rotation, FiniteMap, Shift))
