"""
Spaces and Regions Module

Metric spaces and the exact region algebra used as the open-set surrogate:
- SpaceSpec: unit interval, circle, finite space or two-sided binary shift
- Interval: a rational (or alpha-valued, on the circle) interval with
  open/closed endpoint flags
- RegionSet: a canonical finite union of intervals, index sets or cylinders

Circle regions are stored inside [0,1) with 1 identified with 0. Shift
regions are pairwise disjoint cylinders, each a sorted tuple of
(coordinate, bit) constraints.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core_maps import (
    Composite,
    FiniteMap,
    Identity,
    Inverse,
    PLMap,
    Rotation,
    Shift,
    invert,
    space_kind,
)
from error_handler import BadParameter, SpaceMismatch, Unsupported
from models import fraction_text
from points import AlphaNumber, CirclePoint, FinitePoint, IntervalPoint, SeqPoint, point_kind

logger = logging.getLogger(__name__)

Real = Union[Fraction, AlphaNumber]
Cylinder = Tuple[Tuple[int, int], ...]

SPACE_KINDS = ('interval', 'circle', 'finite', 'shift')


def _real(value) -> Real:
    """Collapse rational AlphaNumbers to Fraction"""
    if isinstance(value, AlphaNumber):
        return value.rational if value.is_rational() else value
    return Fraction(value)


def real_text(value) -> str:
    value = _real(value)
    if isinstance(value, Fraction):
        return fraction_text(value)
    rational = '' if value.rational == 0 else fraction_text(value.rational)
    sign = '-' if value.steps < 0 else ('+' if rational else '')
    return f"{rational}{sign}{abs(value.steps)}*alpha"


@dataclass(frozen=True)
class SpaceSpec:
    """
    A compact metric space

    Attributes:
        kind (str): interval, circle, finite or shift
        size (int): number of points of a finite space
        labels (tuple): optional display labels of a finite space
        metric (tuple): optional distance table of a finite space; discrete when None
    """
    kind: str
    size: int = 0
    labels: Tuple[str, ...] = ()
    metric: Optional[Tuple[Tuple[Fraction, ...], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(str(label) for label in self.labels))
        if self.metric is not None:
            object.__setattr__(self, 'metric', tuple(tuple(Fraction(d) for d in row) for row in self.metric))
        self.validate()

    def validate(self) -> bool:
        if self.kind not in SPACE_KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind != 'finite':
            return True
        if self.size < 1:
            raise ValueError("finite space needs size >= 1")
        if self.labels and len(self.labels) != self.size:
            raise ValueError("finite space needs one label per point")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("finite space labels must be distinct")
        if self.metric is not None:
            n = self.size
            if len(self.metric) != n or any(len(row) != n for row in self.metric):
                raise ValueError("metric table must be size x size")
            for p in range(n):
                for q in range(n):
                    d = self.metric[p][q]
                    if d < 0 or (d == 0) != (p == q) or d != self.metric[q][p]:
                        raise ValueError("metric table violates the metric axioms")
                    if any(self.metric[p][r] + self.metric[r][q] < d for r in range(n)):
                        raise ValueError("metric table violates the triangle inequality")
        return True

    @classmethod
    def finite(cls, size: int, labels: Sequence[str] = (), metric=None) -> 'SpaceSpec':
        return cls('finite', size, tuple(labels), metric)

    @property
    def diameter(self) -> Fraction:
        if self.kind == 'circle':
            return Fraction(1, 2)
        if self.kind == 'finite':
            return max((self.finite_distance(p, q) for p in range(self.size) for q in range(self.size)),
                       default=Fraction(0))
        return Fraction(1)

    @property
    def has_isolated_points(self) -> bool:
        return self.kind == 'finite'

    def finite_distance(self, p: int, q: int) -> Fraction:
        if self.metric is None:
            return Fraction(0 if p == q else 1)
        return self.metric[p][q]

    def label(self, index: int) -> str:
        return self.labels[index] if self.labels else str(index)

    def index_of(self, label: str) -> int:
        if self.labels:
            if label not in self.labels:
                raise BadParameter(f"unknown point label {label!r}")
            return self.labels.index(label)
        index = int(label)
        if not 0 <= index < self.size:
            raise BadParameter(f"point {index} outside a finite space of size {self.size}")
        return index

    def check_point(self, x) -> None:
        if point_kind(x) != self.kind:
            raise SpaceMismatch(f"{point_kind(x)} point used on the {self.kind} space")
        if self.kind == 'finite' and x.index >= self.size:
            raise SpaceMismatch(f"point {x.index} outside a finite space of size {self.size}")

    def check_map(self, m) -> None:
        kind = space_kind(m)
        if kind is not None and kind != self.kind:
            raise SpaceMismatch(f"{type(m).__name__} acts on the {kind} space, not the {self.kind} space")
        table_maps = [m] if isinstance(m, FiniteMap) else []
        if isinstance(m, Composite):
            table_maps = [inner for inner in m.maps if isinstance(inner, FiniteMap)]
        for table_map in table_maps:
            if table_map.size != self.size:
                raise SpaceMismatch(f"finite map of size {table_map.size} on a space of size {self.size}")

    def to_dict(self) -> dict:
        data = {'kind': self.kind}
        if self.kind == 'finite':
            data['size'] = self.size
            if self.labels:
                data['labels'] = list(self.labels)
            if self.metric is not None:
                data['metric'] = [[fraction_text(d) for d in row] for row in self.metric]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'SpaceSpec':
        kind = data.get('kind')
        if kind != 'finite':
            return cls(kind)
        labels = tuple(data.get('labels', ()))
        size = int(data.get('size', len(labels)))
        metric = data.get('metric')
        if metric is not None:
            metric = tuple(tuple(Fraction(d) for d in row) for row in metric)
        return cls('finite', size, labels, metric)


UNIT_INTERVAL = SpaceSpec('interval')
CIRCLE = SpaceSpec('circle')
SHIFT_SPACE = SpaceSpec('shift')


@dataclass(frozen=True)
class Interval:
    """Interval between lo and hi with endpoint flags; empty when lo > hi"""
    lo: Real
    hi: Real
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def point(cls, value) -> 'Interval':
        return cls(value, value, True, True)

    def is_empty(self) -> bool:
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return self.hi < self.lo

    def is_point(self) -> bool:
        return self.lo == self.hi and not self.is_empty()

    def contains(self, value) -> bool:
        above = self.lo < value or (self.lo == value and self.lo_closed)
        below = value < self.hi or (value == self.hi and self.hi_closed)
        return above and below

    def intersect(self, other: 'Interval') -> 'Interval':
        if self.lo == other.lo:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        elif self.lo < other.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed
        if self.hi == other.hi:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        elif self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def shifted(self, amount) -> 'Interval':
        return Interval(self.lo + amount, self.hi + amount, self.lo_closed, self.hi_closed)

    def closed(self) -> 'Interval':
        return Interval(self.lo, self.hi, True, True)

    def __str__(self) -> str:
        if self.is_point():
            return f"{{{real_text(self.lo)}}}"
        left = '[' if self.lo_closed else '('
        right = ']' if self.hi_closed else ')'
        return f"{left}{real_text(self.lo)}, {real_text(self.hi)}{right}"


def merge_intervals(atoms: Iterable[Interval]) -> List[Interval]:
    """Sorted disjoint union of the given intervals, touching pieces merged"""
    atoms = sorted((a for a in atoms if not a.is_empty()), key=lambda a: (a.lo, 0 if a.lo_closed else 1))
    merged: List[Interval] = []
    for atom in atoms:
        if merged:
            last = merged[-1]
            if atom.lo < last.hi or (atom.lo == last.hi and (last.hi_closed or atom.lo_closed)):
                if last.hi < atom.hi:
                    hi, hi_closed = atom.hi, atom.hi_closed
                elif atom.hi == last.hi:
                    hi, hi_closed = last.hi, last.hi_closed or atom.hi_closed
                else:
                    hi, hi_closed = last.hi, last.hi_closed
                merged[-1] = Interval(last.lo, hi, last.lo_closed, hi_closed)
                continue
        merged.append(atom)
    return merged


def _wrap_arc(arc: Interval) -> List[Interval]:
    """Reduce an arc of length <= 1 on the real line to components in [0,1)"""
    if arc.is_empty():
        return []
    lo, hi = AlphaNumber.lift(arc.lo), AlphaNumber.lift(arc.hi)
    whole = lo.floor()
    lo, hi = lo - whole, hi - whole
    if hi < 1:
        return [Interval(lo, hi, arc.lo_closed, arc.hi_closed)]
    parts = [Interval(lo, AlphaNumber(1), arc.lo_closed, False)]
    if hi == 1:
        if arc.hi_closed:
            parts.append(Interval.point(AlphaNumber(0)))
    else:
        parts.append(Interval(AlphaNumber(0), hi - 1, True, arc.hi_closed))
    return parts


def _distance_to_integer(t: AlphaNumber) -> AlphaNumber:
    fractional = t.frac()
    other = 1 - fractional
    return other if other < fractional else fractional


def _contains_half_integer(lo: AlphaNumber, hi: AlphaNumber) -> bool:
    k = -((Fraction(1, 2) - lo).floor())
    return k + Fraction(1, 2) <= hi


def _contains_integer(lo: AlphaNumber, hi: AlphaNumber) -> bool:
    k = -((-lo).floor())
    return k <= hi


def _sup_distance(lo: AlphaNumber, hi: AlphaNumber) -> AlphaNumber:
    """sup of the circle distance to 0 over differences in [lo, hi]"""
    if hi - lo >= 1 or _contains_half_integer(lo, hi):
        return AlphaNumber(Fraction(1, 2))
    return max(_distance_to_integer(lo), _distance_to_integer(hi))


def _inf_distance(lo: AlphaNumber, hi: AlphaNumber) -> AlphaNumber:
    if hi - lo >= 1 or _contains_integer(lo, hi):
        return AlphaNumber(0)
    return min(_distance_to_integer(lo), _distance_to_integer(hi))


def _rational_between(lo: AlphaNumber, hi: AlphaNumber) -> Fraction:
    """A rational strictly inside (lo, hi), lo < hi"""
    digits = 8
    while True:
        guess = (lo.approximate(digits) + hi.approximate(digits)) / 2
        if lo < guess < hi:
            return guess
        digits *= 2


# Shift cylinders

def _cylinder(constraints) -> Cylinder:
    items = dict(constraints).items() if not isinstance(constraints, tuple) else constraints
    cylinder = tuple(sorted((int(c), int(b)) for c, b in items))
    for _, bit in cylinder:
        if bit not in (0, 1):
            raise ValueError("cylinder bits must be 0 or 1")
    return cylinder


def _meet(first: Cylinder, second: Cylinder) -> Optional[Cylinder]:
    merged = dict(first)
    for coord, bit in second:
        if merged.get(coord, bit) != bit:
            return None
        merged[coord] = bit
    return tuple(sorted(merged.items()))


def _subtract(first: Cylinder, second: Cylinder) -> List[Cylinder]:
    """first minus second as disjoint cylinders"""
    if _meet(first, second) is None:
        return [first]
    fixed = dict(first)
    pieces = []
    prefix = dict(first)
    for coord, bit in second:
        if coord in fixed:
            continue
        piece = dict(prefix)
        piece[coord] = 1 - bit
        pieces.append(tuple(sorted(piece.items())))
        prefix[coord] = bit
    return pieces


def _merge_siblings(cylinders: List[Cylinder]) -> List[Cylinder]:
    """Merge pairs that differ only in the bit of one shared coordinate"""
    current = set(cylinders)
    changed = True
    while changed:
        changed = False
        for cylinder in sorted(current):
            for position, (coord, bit) in enumerate(cylinder):
                sibling = cylinder[:position] + ((coord, 1 - bit),) + cylinder[position + 1:]
                if sibling in current:
                    current -= {cylinder, sibling}
                    current.add(cylinder[:position] + cylinder[position + 1:])
                    changed = True
                    break
            if changed:
                break
    return sorted(current, key=lambda c: (len(c), c))


def _disjoint_union(cylinders: Iterable[Cylinder]) -> List[Cylinder]:
    result: List[Cylinder] = []
    for cylinder in cylinders:
        pieces = [cylinder]
        for existing in result:
            pieces = [rest for piece in pieces for rest in _subtract(piece, existing)]
            if not pieces:
                break
        result.extend(pieces)
    return _merge_siblings(result)


def _first_free(first: Cylinder, second: Cylinder) -> int:
    """Least |i| at which points of the two cylinders may differ"""
    a, b = dict(first), dict(second)
    k = 0
    while True:
        for i in (k, -k):
            if not (i in a and i in b and a[i] == b[i]):
                return k
        k += 1


def shift_cell_coordinates(width: int) -> range:
    """Coordinates fixed by a width-r cell"""
    return range(-((width - 1) // 2), width // 2 + 1) if width > 0 else range(0)


def shift_width_for(scale: Fraction) -> int:
    """Least cell width whose cylinders have diameter <= scale"""
    if scale >= 1:
        return 0
    width = 1
    while Fraction(1, 2 ** ((width + 1) // 2)) > scale:
        width += 1
    return width


@dataclass(frozen=True)
class RegionSet:
    """
    Canonical finite union of basic regions of one space

    `parts` holds sorted disjoint Intervals (interval, circle), sorted
    indices (finite) or disjoint cylinders (shift).
    """
    space: SpaceSpec
    parts: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'parts', self._canonical(self.space, self.parts))

    @staticmethod
    def _canonical(space: SpaceSpec, parts) -> tuple:
        if space.kind == 'interval':
            unit = Interval(Fraction(0), Fraction(1))
            return tuple(merge_intervals(Interval(Fraction(p.lo), Fraction(p.hi), p.lo_closed, p.hi_closed)
                                         .intersect(unit) for p in parts))
        if space.kind == 'circle':
            pieces = []
            for p in parts:
                arc = Interval(AlphaNumber.lift(p.lo), AlphaNumber.lift(p.hi), p.lo_closed, p.hi_closed)
                length = arc.hi - arc.lo
                if length > 1 or (length == 1 and (arc.lo_closed or arc.hi_closed)):
                    return (Interval(AlphaNumber(0), AlphaNumber(1), True, False),)
                pieces.extend(_wrap_arc(arc))
            return tuple(merge_intervals(pieces))
        if space.kind == 'finite':
            indices = sorted(set(int(p) for p in parts))
            if indices and (indices[0] < 0 or indices[-1] >= space.size):
                raise SpaceMismatch(f"indices outside a finite space of size {space.size}")
            return tuple(indices)
        return tuple(_disjoint_union(_cylinder(p) for p in parts))

    # Constructors

    @classmethod
    def full(cls, space: SpaceSpec) -> 'RegionSet':
        if space.kind == 'interval':
            return cls(space, (Interval(Fraction(0), Fraction(1)),))
        if space.kind == 'circle':
            return cls(space, (Interval(AlphaNumber(0), AlphaNumber(1), True, False),))
        if space.kind == 'finite':
            return cls(space, tuple(range(space.size)))
        return cls(space, ((),))

    @classmethod
    def empty(cls, space: SpaceSpec) -> 'RegionSet':
        return cls(space, ())

    @classmethod
    def interval(cls, space: SpaceSpec, lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> 'RegionSet':
        return cls(space, (Interval(lo, hi, lo_closed, hi_closed),))

    @classmethod
    def cylinder(cls, constraints: Dict[int, int]) -> 'RegionSet':
        return cls(SHIFT_SPACE, (_cylinder(constraints),))

    @classmethod
    def singleton(cls, space: SpaceSpec, x) -> 'RegionSet':
        """The region {x}; not representable on the shift"""
        space.check_point(x)
        if space.kind == 'interval':
            return cls(space, (Interval.point(x.value),))
        if space.kind == 'circle':
            return cls(space, (Interval.point(x.position()),))
        if space.kind == 'finite':
            return cls(space, (x.index,))
        raise Unsupported("single points are not finite unions of cylinders")

    # Predicates

    def is_empty(self) -> bool:
        return not self.parts

    def is_full(self) -> bool:
        if self.space.kind == 'shift':
            return sum(Fraction(1, 2 ** len(c)) for c in self.parts) == 1
        return self == RegionSet.full(self.space)

    def contains(self, x) -> bool:
        self.space.check_point(x)
        kind = self.space.kind
        if kind == 'interval':
            return any(p.contains(x.value) for p in self.parts)
        if kind == 'circle':
            position = x.position()
            return any(p.contains(position) for p in self.parts)
        if kind == 'finite':
            return x.index in self.parts
        return any(all(x.at(c) == b for c, b in cylinder) for cylinder in self.parts)

    def _check_same_space(self, other: 'RegionSet') -> None:
        if self.space != other.space:
            raise SpaceMismatch(f"regions of the {self.space.kind} and {other.space.kind} spaces")

    # Boolean algebra

    def intersection(self, other: 'RegionSet') -> 'RegionSet':
        self._check_same_space(other)
        kind = self.space.kind
        if kind in ('interval', 'circle'):
            return RegionSet(self.space, tuple(a.intersect(b) for a in self.parts for b in other.parts))
        if kind == 'finite':
            return RegionSet(self.space, tuple(set(self.parts) & set(other.parts)))
        meets = (_meet(a, b) for a in self.parts for b in other.parts)
        return RegionSet(self.space, tuple(m for m in meets if m is not None))

    def union(self, other: 'RegionSet') -> 'RegionSet':
        self._check_same_space(other)
        return RegionSet(self.space, self.parts + other.parts)

    def intersects(self, other: 'RegionSet') -> bool:
        return not self.intersection(other).is_empty()

    def complement(self) -> 'RegionSet':
        kind = self.space.kind
        if kind == 'finite':
            return RegionSet(self.space, tuple(set(range(self.space.size)) - set(self.parts)))
        if kind == 'shift':
            pieces = [()]
            for cylinder in self.parts:
                pieces = [rest for piece in pieces for rest in _subtract(piece, cylinder)]
            return RegionSet(self.space, tuple(pieces))
        zero, one = (Fraction(0), Fraction(1)) if kind == 'interval' else (AlphaNumber(0), AlphaNumber(1))
        gaps = []
        cursor, cursor_closed = zero, True
        for part in self.parts:
            gaps.append(Interval(cursor, part.lo, cursor_closed, not part.lo_closed))
            cursor, cursor_closed = part.hi, not part.hi_closed
        gaps.append(Interval(cursor, one, cursor_closed, kind == 'interval'))
        return RegionSet(self.space, tuple(gaps))

    def difference(self, other: 'RegionSet') -> 'RegionSet':
        return self.intersection(other.complement())

    def issubset(self, other: 'RegionSet') -> bool:
        return self.difference(other).is_empty()

    def closure(self) -> 'RegionSet':
        if self.space.kind in ('finite', 'shift'):
            return self
        return RegionSet(self.space, tuple(p.closed() for p in self.parts))

    # Metric quantities

    def diam(self) -> Real:
        """Exact sup of pairwise distances (0 for empty regions)"""
        kind = self.space.kind
        if not self.parts:
            return Fraction(0)
        if kind == 'interval':
            return self.parts[-1].hi - self.parts[0].lo
        if kind == 'circle':
            return _real(max(_sup_distance(a.lo - b.hi, a.hi - b.lo) for a in self.parts for b in self.parts))
        if kind == 'finite':
            return max(self.space.finite_distance(p, q) for p in self.parts for q in self.parts)
        return max(Fraction(1, 2 ** _first_free(a, b)) for a in self.parts for b in self.parts)

    def gap(self, other: 'RegionSet') -> Real:
        """Infimum distance between the two regions"""
        self._check_same_space(other)
        if self.is_empty() or other.is_empty():
            raise BadParameter("gap needs two nonempty regions")
        if self.intersects(other):
            return Fraction(0)
        kind = self.space.kind
        if kind == 'interval':
            return min(max(b.lo - a.hi, a.lo - b.hi) for a in self.parts for b in other.parts)
        if kind == 'circle':
            return _real(min(_inf_distance(a.lo - b.hi, a.hi - b.lo) for a in self.parts for b in other.parts))
        if kind == 'finite':
            return min(self.space.finite_distance(p, q) for p in self.parts for q in other.parts)
        gaps = []
        for a in self.parts:
            for b in other.parts:
                fixed = dict(b)
                conflicts = [abs(c) for c, bit in a if fixed.get(c, bit) != bit]
                gaps.append(Fraction(1, 2 ** min(conflicts)))
        return min(gaps)

    # Representative points

    def center(self):
        """A point inside the first component"""
        if not self.parts:
            raise BadParameter("empty region has no center")
        kind = self.space.kind
        first = self.parts[0]
        if kind == 'interval':
            return IntervalPoint((first.lo + first.hi) / 2)
        if kind == 'circle':
            if first.is_point():
                return CirclePoint.at(first.lo)
            width = first.hi - first.lo
            if width.is_rational():
                return CirclePoint.at(first.lo + width.rational / 2)
            return CirclePoint(_rational_between(first.lo, first.hi))
        if kind == 'finite':
            return FinitePoint(first)
        return SeqPoint.from_constraints(first)

    def sample_points(self, depth: int = 2) -> list:
        """Deterministic points of the region on a dyadic grid of the given depth"""
        kind = self.space.kind
        points = []
        if kind == 'finite':
            return [FinitePoint(i) for i in self.parts]
        if kind == 'shift':
            for cylinder in self.parts:
                fixed = dict(cylinder)
                points.append(SeqPoint.from_constraints(cylinder, 0))
                points.append(SeqPoint.from_constraints(cylinder, 1))
                free, k = [], 0
                while len(free) < depth:
                    for i in sorted({k, -k}):
                        if i not in fixed and len(free) < depth:
                            free.append(i)
                    k += 1
                for i in free:
                    points.append(SeqPoint.from_constraints({**fixed, i: 1}, 0))
        else:
            steps = 2 ** depth
            for part in self.parts:
                if part.is_point():
                    values = [part.lo]
                else:
                    width = part.hi - part.lo
                    if isinstance(width, AlphaNumber) and not width.is_rational():
                        values = [self.center().position()] if part is self.parts[0] else []
                    else:
                        width = _real(width)
                        values = [part.lo + width * Fraction(j, steps) for j in range(steps + 1)]
                    values = [v for v in values if part.contains(v)]
                for v in values:
                    if kind == 'interval':
                        points.append(IntervalPoint(v))
                    else:
                        points.append(CirclePoint.at(v))
        unique = []
        for p in points:
            if p not in unique:
                unique.append(p)
        return unique

    def to_dict(self) -> dict:
        kind = self.space.kind
        if kind in ('interval', 'circle'):
            components = [str(p) for p in self.parts]
        elif kind == 'finite':
            components = [self.space.label(i) for i in self.parts]
        else:
            components = [{str(c): b for c, b in cylinder} for cylinder in self.parts]
        return {'space': kind, 'components': components}

    def __str__(self) -> str:
        if not self.parts:
            return '∅'
        kind = self.space.kind
        if kind in ('interval', 'circle'):
            return ' ∪ '.join(str(p) for p in self.parts)
        if kind == 'finite':
            return '{' + ', '.join(self.space.label(i) for i in self.parts) + '}'
        return ' ∪ '.join('[' + ' '.join(f"{c}:{b}" for c, b in cylinder) + ']' for cylinder in self.parts)


# Module-level operations

def distance(space: SpaceSpec, x, y) -> Real:
    """
    Exact distance between two points of a space

    Raises:
        SpaceMismatch: If either point is not in the space
    """
    space.check_point(x)
    space.check_point(y)
    if space.kind == 'interval':
        return abs(x.value - y.value)
    if space.kind == 'circle':
        return _real(_distance_to_integer(x.position() - y.position()))
    if space.kind == 'finite':
        return space.finite_distance(x.index, y.index)
    if x == y:
        return Fraction(0)
    bound = max(x.horizon(), y.horizon()) + len(x.left) * len(y.left) + len(x.right) * len(y.right)
    for k in range(bound + 1):
        if x.at(k) != y.at(k) or x.at(-k) != y.at(-k):
            return Fraction(1, 2 ** k)
    return Fraction(0)


def ball(space: SpaceSpec, x, radius) -> RegionSet:
    """
    Open ball B(x, radius)

    Raises:
        BadParameter: If radius <= 0
    """
    radius = Fraction(radius)
    if radius <= 0:
        raise BadParameter("ball radius must be positive")
    space.check_point(x)
    if space.kind == 'interval':
        lo, hi = x.value - radius, x.value + radius
        return RegionSet.interval(space, max(lo, Fraction(0)), min(hi, Fraction(1)), lo < 0, hi > 1)
    if space.kind == 'circle':
        if radius > Fraction(1, 2):
            return RegionSet.full(space)
        p = x.position()
        return RegionSet.interval(space, p - radius, p + radius, False, False)
    if space.kind == 'finite':
        return RegionSet(space, tuple(j for j in range(space.size) if space.finite_distance(x.index, j) < radius))
    if radius > 1:
        return RegionSet.full(space)
    k = 0
    while Fraction(1, 2 ** (k + 1)) >= radius:
        k += 1
    return RegionSet.cylinder({i: x.at(i) for i in range(-k, k + 1)})


def _pl_image(parts, m: PLMap) -> List[Interval]:
    images = []
    for part in parts:
        for index, (a, b) in enumerate(m.pieces):
            low, high = m.breakpoints[index], m.breakpoints[index + 1]
            piece = part.intersect(Interval(low, high, False, False))
            if piece.is_empty():
                continue
            if a == 0:
                images.append(Interval.point(b))
            elif a > 0:
                images.append(Interval(a * piece.lo + b, a * piece.hi + b, piece.lo_closed, piece.hi_closed))
            else:
                images.append(Interval(a * piece.hi + b, a * piece.lo + b, piece.hi_closed, piece.lo_closed))
        for x, value in zip(m.breakpoints, m.point_values):
            if part.contains(x):
                images.append(Interval.point(value))
    return images


def _pl_preimage(parts, m: PLMap) -> List[Interval]:
    pieces = []
    for index, (a, b) in enumerate(m.pieces):
        open_piece = Interval(m.breakpoints[index], m.breakpoints[index + 1], False, False)
        for part in parts:
            if a == 0:
                if part.contains(b):
                    pieces.append(open_piece)
                continue
            lo, hi = (part.lo - b) / a, (part.hi - b) / a
            if a > 0:
                solved = Interval(lo, hi, part.lo_closed, part.hi_closed)
            else:
                solved = Interval(hi, lo, part.hi_closed, part.lo_closed)
            pieces.append(solved.intersect(open_piece))
    for x, value in zip(m.breakpoints, m.point_values):
        if any(part.contains(value) for part in parts):
            pieces.append(Interval.point(x))
    return pieces


def image(region: RegionSet, m) -> RegionSet:
    """
    Exact forward image of a region

    Raises:
        SpaceMismatch: If the map does not act on the region's space
    """
    space = region.space
    space.check_map(m)
    if isinstance(m, Identity) or region.is_empty():
        return region
    if isinstance(m, Composite):
        for inner in reversed(m.maps):
            region = image(region, inner)
        return region
    if isinstance(m, Inverse):
        return image(region, invert(m.inner))
    if isinstance(m, PLMap):
        return RegionSet(space, tuple(_pl_image(region.parts, m)))
    if isinstance(m, Rotation):
        amount = AlphaNumber(m.offset, m.step)
        return RegionSet(space, tuple(p.shifted(amount) for p in region.parts))
    if isinstance(m, FiniteMap):
        return RegionSet(space, tuple(m.table[i] for i in region.parts))
    if isinstance(m, Shift):
        return RegionSet(space, tuple(tuple((c - m.power, b) for c, b in cyl) for cyl in region.parts))
    raise TypeError(f"not a map: {m!r}")


def preimage(region: RegionSet, m) -> RegionSet:
    """
    Exact preimage {x : m(x) in region}

    Raises:
        SpaceMismatch: If the map does not act on the region's space
    """
    space = region.space
    space.check_map(m)
    if isinstance(m, Identity):
        return region
    if isinstance(m, Composite):
        for inner in m.maps:
            region = preimage(region, inner)
        return region
    if isinstance(m, Inverse):
        return image(region, m.inner)
    if isinstance(m, PLMap):
        return RegionSet(space, tuple(_pl_preimage(region.parts, m)))
    if isinstance(m, Rotation):
        amount = -AlphaNumber(m.offset, m.step)
        return RegionSet(space, tuple(p.shifted(amount) for p in region.parts))
    if isinstance(m, FiniteMap):
        wanted = set(region.parts)
        return RegionSet(space, tuple(i for i, t in enumerate(m.table) if t in wanted))
    if isinstance(m, Shift):
        return RegionSet(space, tuple(tuple((c + m.power, b) for c, b in cyl) for cyl in region.parts))
    raise TypeError(f"not a map: {m!r}")


def basis_cells(space: SpaceSpec, scale) -> List[RegionSet]:
    """
    Cover of the space by basis cells of diameter <= scale

    Interval and circle cells are half-open dyadic-style intervals
    [j/m, (j+1)/m) with m = ceil(1/scale), the last interval cell closed;
    finite cells are singletons; shift cells are cylinders of a fixed width.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise BadParameter("cover scale must be positive")
    if space.kind in ('interval', 'circle'):
        m = -(-scale.denominator // scale.numerator)
        cells = []
        for j in range(m):
            last = j == m - 1 and space.kind == 'interval'
            cells.append(RegionSet.interval(space, Fraction(j, m), Fraction(j + 1, m), True, last))
        return cells
    if space.kind == 'finite':
        return [RegionSet(space, (i,)) for i in range(space.size)]
    width = shift_width_for(scale)
    coords = list(shift_cell_coordinates(width))
    return [RegionSet.cylinder(dict(zip(coords, bits))) for bits in product((0, 1), repeat=len(coords))]
