"""
Point Types Module

Exact points of the four supported phase spaces:
- IntervalPoint: a rational in [0,1]
- CirclePoint: rational base plus an integer number of irrational rotation steps
- FinitePoint: an index into a finite space
- SeqPoint: an eventually periodic two-sided binary sequence

Circle quantities live in the group Q + Z*alpha. AlphaNumber carries a value
q + m*alpha and orders exactly through QuadraticIrrational.sign.
"""

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

import config

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int]


def _sign(value) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class QuadraticIrrational:
    """
    An irrational number u + v*sqrt(D)

    Attributes:
        name (str): Display name used in reports
        rational (Fraction): u
        coefficient (Fraction): v, nonzero
        radicand (int): D, a positive non-square
    """
    name: str
    rational: Fraction
    coefficient: Fraction
    radicand: int

    def __post_init__(self):
        """Validate data after initialization"""
        self.validate()

    def validate(self) -> bool:
        if not isinstance(self.radicand, int) or self.radicand < 2:
            raise ValueError("radicand must be an integer >= 2")
        root = math.isqrt(self.radicand)
        if root * root == self.radicand:
            raise ValueError("radicand must not be a perfect square")
        if self.coefficient == 0:
            raise ValueError("coefficient must be nonzero")
        return True

    def sign(self, a: Rational, b: Rational) -> int:
        """Exact sign of a + b*sqrt(D)"""
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            return _sign(a)
        if a == 0 or _sign(a) == _sign(b):
            return _sign(b) if a == 0 else _sign(a)
        # Opposite signs: compare a^2 with b^2 * D (never equal, D is not a square)
        if a * a > b * b * self.radicand:
            return _sign(a)
        return _sign(b)

    def approximate(self, digits: int) -> Fraction:
        """Rational approximation with absolute error below 10**-digits"""
        scale = 10 ** (digits + 2)
        root = Fraction(math.isqrt(self.radicand * scale * scale), scale)
        return self.rational + self.coefficient * root

    @classmethod
    def parse(cls, text: str, name: str = 'alpha') -> 'QuadraticIrrational':
        """Parse "u,v,D" as u + v*sqrt(D)"""
        parts = [part.strip() for part in text.split(',')]
        if len(parts) != 3:
            raise ValueError(f"expected 'u,v,D', got {text!r}")
        return cls(name, Fraction(parts[0]), Fraction(parts[1]), int(parts[2]))


ALPHA = QuadraticIrrational.parse(config.ALPHA_SPEC)


@functools.total_ordering
class AlphaNumber:
    """
    Exact real number q + m*alpha

    Equality is structural: since alpha is irrational, q + m*alpha equals
    q' + m'*alpha only when q == q' and m == m'.
    """

    __slots__ = ('rational', 'steps')

    def __init__(self, rational: Rational = 0, steps: int = 0):
        object.__setattr__(self, 'rational', Fraction(rational))
        object.__setattr__(self, 'steps', int(steps))

    def __setattr__(self, name, value):
        raise AttributeError("AlphaNumber is immutable")

    @classmethod
    def lift(cls, value) -> 'AlphaNumber':
        if isinstance(value, AlphaNumber):
            return value
        return cls(Fraction(value), 0)

    # Arithmetic over the group Q + Z*alpha

    def __add__(self, other):
        if not isinstance(other, (AlphaNumber, Fraction, int)):
            return NotImplemented
        other = AlphaNumber.lift(other)
        return AlphaNumber(self.rational + other.rational, self.steps + other.steps)

    __radd__ = __add__

    def __neg__(self):
        return AlphaNumber(-self.rational, -self.steps)

    def __sub__(self, other):
        if not isinstance(other, (AlphaNumber, Fraction, int)):
            return NotImplemented
        return self + (-AlphaNumber.lift(other))

    def __rsub__(self, other):
        if not isinstance(other, (AlphaNumber, Fraction, int)):
            return NotImplemented
        return AlphaNumber.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, int):
            return NotImplemented
        return AlphaNumber(self.rational * other, self.steps * other)

    __rmul__ = __mul__

    # Exact ordering

    def sign(self) -> int:
        return ALPHA.sign(self.rational + self.steps * ALPHA.rational, self.steps * ALPHA.coefficient)

    def __eq__(self, other):
        if isinstance(other, AlphaNumber):
            return self.rational == other.rational and self.steps == other.steps
        if isinstance(other, (Fraction, int)):
            return self.steps == 0 and self.rational == other
        return NotImplemented

    def __lt__(self, other):
        if not isinstance(other, (AlphaNumber, Fraction, int)):
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self.steps == 0:
            return hash(self.rational)
        return hash((self.rational, self.steps))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # Integer part

    def floor(self) -> int:
        if self.steps == 0:
            return math.floor(self.rational)
        guess = math.floor(self.approximate(12))
        while (self - guess).sign() < 0:
            guess -= 1
        while (self - (guess + 1)).sign() >= 0:
            guess += 1
        return guess

    def frac(self) -> 'AlphaNumber':
        """Representative of self mod 1 in [0,1)"""
        return self - self.floor()

    def is_rational(self) -> bool:
        return self.steps == 0

    def approximate(self, digits: int = None) -> Fraction:
        digits = config.ALPHA_DIGITS if digits is None else digits
        if self.steps == 0:
            return self.rational
        return self.rational + self.steps * ALPHA.approximate(digits + len(str(abs(self.steps))))

    def __float__(self):
        return float(self.approximate(20))

    def to_dict(self) -> dict:
        return {
            'rational': _fraction_text(self.rational),
            'alpha_steps': self.steps,
            'approx': decimal_text(self.approximate(), config.ALPHA_DIGITS),
        }

    def __repr__(self):
        if self.steps == 0:
            return f"AlphaNumber({self.rational})"
        return f"AlphaNumber({self.rational} + {self.steps}*{ALPHA.name})"


def _fraction_text(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def decimal_text(value: Fraction, digits: int) -> str:
    """Fixed-point decimal rendering of a rational, truncated toward zero"""
    value = Fraction(value)
    negative = value < 0
    scaled = abs(value) * 10 ** digits
    whole = scaled.numerator // scaled.denominator
    text = str(whole).rjust(digits + 1, '0')
    text = f"{text[:-digits]}.{text[-digits:]}" if digits else text
    return f"-{text}" if negative else text


@dataclass(frozen=True)
class IntervalPoint:
    """Point of the unit interval [0,1]"""
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'value', Fraction(self.value))
        if not 0 <= self.value <= 1:
            raise ValueError(f"interval point {self.value} outside [0,1]")

    def to_dict(self) -> dict:
        return {'kind': 'interval', 'value': _fraction_text(self.value)}


@dataclass(frozen=True)
class CirclePoint:
    """
    Point base + m*alpha (mod 1) of the circle R/Z

    Attributes:
        base (Fraction): rational part, normalized into [0,1)
        irrational_steps (int): m
    """
    base: Fraction
    irrational_steps: int = 0

    def __post_init__(self):
        base = Fraction(self.base)
        object.__setattr__(self, 'base', base - math.floor(base))
        object.__setattr__(self, 'irrational_steps', int(self.irrational_steps))

    def position(self) -> AlphaNumber:
        """The representative of the point in [0,1)"""
        return AlphaNumber(self.base, self.irrational_steps).frac()

    @classmethod
    def at(cls, value: AlphaNumber) -> 'CirclePoint':
        value = AlphaNumber.lift(value)
        return cls(value.rational, value.steps)

    def to_dict(self) -> dict:
        return {
            'kind': 'circle',
            'base': _fraction_text(self.base),
            'irrational_steps': self.irrational_steps,
        }


@dataclass(frozen=True)
class FinitePoint:
    """Point of a finite space, identified by index"""
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError("finite point index must be a natural number")

    def to_dict(self) -> dict:
        return {'kind': 'finite', 'index': self.index}


def _primitive_root(word: Tuple[int, ...]) -> Tuple[int, ...]:
    size = len(word)
    for period in range(1, size + 1):
        if size % period == 0 and word[:period] * (size // period) == word:
            return word[:period]
    return word


@dataclass(frozen=True)
class SeqPoint:
    """
    Eventually periodic two-sided binary sequence

    The sequence reads ... left left | center | right right ... where
    center[0] sits at coordinate `start`, the copy of `left` ending at
    coordinate start-1 is aligned on its last symbol, and the right word
    starts at coordinate start + len(center).

    The constructor canonicalizes: both periodic words are primitive, the
    center is as short as possible and a fully periodic sequence is stored
    with an empty center at start 0.
    """
    left: Tuple[int, ...]
    center: Tuple[int, ...]
    right: Tuple[int, ...]
    start: int = 0

    def __post_init__(self):
        left, center, right = tuple(self.left), tuple(self.center), tuple(self.right)
        if not left or not right:
            raise ValueError("periodic words must be nonempty")
        for bit in left + center + right:
            if bit not in (0, 1):
                raise ValueError("sequence symbols must be 0 or 1")
        left, right = _primitive_root(left), _primitive_root(right)
        start = int(self.start)
        end = start + len(center)
        p, q = len(left), len(right)

        def at(i: int) -> int:
            if i < start:
                return left[(i - start) % p]
            if i < end:
                return center[i - start]
            return right[(i - end) % q]

        full_period = p == q and all(at(i) == at(i + q) for i in range(start - p - q, end))
        if full_period:
            word = tuple(at(j) for j in range(q))
            canonical = (word, (), word, 0)
        else:
            # smallest r with x_i = x_{i+q} for all i >= r
            right_start = end
            while right_start > start - p - q and at(right_start - 1) == at(right_start - 1 + q):
                right_start -= 1
            # largest l with x_i = x_{i-p} for all i <= l
            left_end = start - 1
            while left_end < end + p + q and at(left_end + 1) == at(left_end + 1 - p):
                left_end += 1
            new_start = min(left_end + 1, right_start)
            canonical = (
                tuple(at(new_start - p + j) for j in range(p)),
                tuple(at(i) for i in range(new_start, right_start)),
                tuple(at(right_start + j) for j in range(q)),
                new_start,
            )
        for name, value in zip(('left', 'center', 'right', 'start'), canonical):
            object.__setattr__(self, name, value)

    def at(self, i: int) -> int:
        """Symbol at coordinate i"""
        end = self.start + len(self.center)
        if i < self.start:
            return self.left[(i - self.start) % len(self.left)]
        if i < end:
            return self.center[i - self.start]
        return self.right[(i - end) % len(self.right)]

    def shifted(self, power: int) -> 'SeqPoint':
        """sigma**power applied to the sequence: (sigma x)_i = x_{i+1}"""
        return SeqPoint(self.left, self.center, self.right, self.start - power)

    def horizon(self) -> int:
        """A radius beyond which the sequence agrees with its periodic tails"""
        return max(abs(self.start), abs(self.start + len(self.center))) + len(self.left) + len(self.right)

    @classmethod
    def from_constraints(cls, constraints, fill: int = 0) -> 'SeqPoint':
        """Sequence matching a cylinder's constraints, `fill` elsewhere"""
        constraints = dict(constraints)
        if not constraints:
            return cls((fill,), (), (fill,), 0)
        low, high = min(constraints), max(constraints)
        center = tuple(constraints.get(i, fill) for i in range(low, high + 1))
        return cls((fill,), center, (fill,), low)

    @classmethod
    def periodic(cls, word) -> 'SeqPoint':
        """Bi-infinite repetition of `word` with word[0] at coordinate 0"""
        word = tuple(word)
        return cls(word, (), word, 0)

    def to_dict(self) -> dict:
        return {
            'kind': 'shift',
            'left': ''.join(map(str, self.left)),
            'center': ''.join(map(str, self.center)),
            'right': ''.join(map(str, self.right)),
            'start': self.start,
        }


Point = Union[IntervalPoint, CirclePoint, FinitePoint, SeqPoint]

POINT_KINDS = {
    IntervalPoint: 'interval',
    CirclePoint: 'circle',
    FinitePoint: 'finite',
    SeqPoint: 'shift',
}


def point_kind(x: Point) -> str:
    kind = POINT_KINDS.get(type(x))
    if kind is None:
        raise TypeError(f"not a point: {x!r}")
    return kind
