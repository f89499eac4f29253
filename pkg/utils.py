"""
Utility Functions Module

This module provides shared functionality including:
- "p/q" rational parsing (no floating-point input)
- Point and region literal parsing and formatting per space kind
- Canonical JSON rendering and document hashing
- CSV writers for orbits and separation curves
"""

import csv
import hashlib
import json
import logging
import re
from dataclasses import is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, TextIO

from error_handler import BadParameter
from points import CirclePoint, FinitePoint, IntervalPoint, SeqPoint
from spaces_regions import RegionSet

logger = logging.getLogger(__name__)

RATIONAL_PATTERN = re.compile(r'^\s*(-?\d+)(?:/(\d+))?\s*$')
INTERVAL_PATTERN = re.compile(r'^\s*([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])\s*$')


def parse_rational(text: Any) -> Fraction:
    """
    Parse an exact rational "p" or "p/q"

    Args:
        text (str | int | Fraction): the literal

    Returns:
        Fraction: the parsed value

    Raises:
        BadParameter: For decimals, floats or malformed text
    """
    if isinstance(text, bool):
        raise BadParameter(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise BadParameter(f"rationals must be given as \"p/q\" strings, got {text!r}")
    match = RATIONAL_PATTERN.match(text)
    if not match:
        raise BadParameter(f"not a rational \"p/q\": {text!r}")
    numerator, denominator = int(match.group(1)), int(match.group(2) or 1)
    if denominator == 0:
        raise BadParameter(f"zero denominator in {text!r}")
    return Fraction(numerator, denominator)


def _bits(text: str, allow_empty: bool) -> tuple:
    if (not text and not allow_empty) or any(c not in '01' for c in text):
        raise BadParameter(f"expected a binary word, got {text!r}")
    return tuple(int(c) for c in text)


def parse_point(space, text: str):
    """
    Parse a point literal for the given space

    Syntax:
        interval: "p/q"
        circle:   "p/q" or "p/q@m" for p/q + m*alpha
        finite:   a label (or the index when labels are absent)
        shift:    "L:C:R@start", L and R nonempty binary words repeated
                  to the left and right of the center word C

    Raises:
        BadParameter: If the literal does not parse or lies outside the space
    """
    text = str(text).strip()
    try:
        if space.kind == 'interval':
            return IntervalPoint(parse_rational(text))
        if space.kind == 'circle':
            base, _, steps = text.partition('@')
            return CirclePoint(parse_rational(base), int(steps) if steps else 0)
        if space.kind == 'finite':
            return FinitePoint(space.index_of(text))
        words, _, start = text.partition('@')
        parts = words.split(':')
        if len(parts) != 3:
            raise BadParameter(f"shift points read L:C:R@start, got {text!r}")
        left, center, right = parts
        return SeqPoint(_bits(left, False), _bits(center, True), _bits(right, False), int(start) if start else 0)
    except BadParameter:
        raise
    except (ValueError, KeyError) as e:
        raise BadParameter(f"invalid {space.kind} point {text!r}: {e}") from e


def format_point(space, x) -> str:
    """Inverse of parse_point"""
    kind = space.kind
    if kind == 'interval':
        return _fraction(x.value)
    if kind == 'circle':
        return _fraction(x.base) if x.irrational_steps == 0 else f"{_fraction(x.base)}@{x.irrational_steps}"
    if kind == 'finite':
        return space.label(x.index)
    word = lambda bits: ''.join(map(str, bits))
    return f"{word(x.left)}:{word(x.center)}:{word(x.right)}@{x.start}"


def _fraction(value) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_region(space, text: str):
    """
    Parse a single-component region literal

    Syntax:
        interval, circle: "[a,b]", "[a,b)", "(a,b]" or "(a,b)" with rational ends
        finite: "{l1,l2,...}" of labels
        shift: "[c:b c:b ...]" fixing coordinate c to bit b; "[]" is the full shift
        any kind: "full"

    Raises:
        BadParameter: If the literal does not parse
    """
    text = str(text).strip()
    if text == 'full':
        return RegionSet.full(space)
    if space.kind in ('interval', 'circle'):
        match = INTERVAL_PATTERN.match(text)
        if not match:
            raise BadParameter(f"invalid interval literal {text!r}")
        lo, hi = parse_rational(match.group(2)), parse_rational(match.group(3))
        if lo > hi:
            raise BadParameter(f"empty interval literal {text!r}")
        return RegionSet.interval(space, lo, hi, match.group(1) == '[', match.group(4) == ']')
    if space.kind == 'finite':
        if not (text.startswith('{') and text.endswith('}')):
            raise BadParameter(f"finite regions read {{a,b,...}}, got {text!r}")
        labels = [item.strip() for item in text[1:-1].split(',') if item.strip()]
        try:
            return RegionSet(space, tuple(space.index_of(label) for label in labels))
        except (ValueError, KeyError) as e:
            raise BadParameter(str(e)) from e
    if not (text.startswith('[') and text.endswith(']')):
        raise BadParameter(f"cylinders read [c:b c:b ...], got {text!r}")
    constraints = {}
    for item in text[1:-1].split():
        coordinate, _, bit = item.partition(':')
        try:
            constraints[int(coordinate)] = _bits(bit, False)[0]
        except (ValueError, IndexError) as e:
            raise BadParameter(f"invalid cylinder constraint {item!r}") from e
    return RegionSet.cylinder(constraints)


def to_jsonable(value: Any) -> Any:
    """Convert report values (Fractions, enums, dataclasses with to_dict) to JSON types"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return _fraction(value)
    if hasattr(value, 'to_dict') and (is_dataclass(value) or callable(value.to_dict)):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [to_jsonable(item) for item in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    return value


def canonical_json(data: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline"""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def document_hash(data: Any) -> str:
    """sha256 of the compact canonical JSON of a document"""
    compact = json.dumps(to_jsonable(data), sort_keys=True, separators=(',', ':'), ensure_ascii=False)
    return hashlib.sha256(compact.encode('utf-8')).hexdigest()


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """
    Write header and rows as CSV with '\\n' line endings

    Returns:
        int: Number of data rows written
    """
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([to_jsonable(cell) if not isinstance(cell, str) else cell for cell in row])
        count += 1
    return count


def optional_rational(text: Optional[str]) -> Optional[Fraction]:
    return None if text is None else parse_rational(text)
