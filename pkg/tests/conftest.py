"""Shared pytest fixtures and hypothesis profiles"""

import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from core_maps import FiniteMap, PLMap, Rotation  # noqa: E402
from schedules import Schedule  # noqa: E402
from window_cache import window_cache  # noqa: E402

settings.register_profile('default', max_examples=100, deadline=None)
settings.register_profile('ci', max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'default'))


def pl(breakpoints, pieces) -> PLMap:
    return PLMap.from_pieces([Fraction(x) for x in breakpoints],
                             [(Fraction(a), Fraction(b)) for a, b in pieces])


@pytest.fixture(autouse=True)
def fresh_window_cache():
    window_cache.clear()
    window_cache.reset_stats()
    yield


@pytest.fixture
def g1() -> PLMap:
    return pl([0, 1], [('1/2', 0)])


@pytest.fixture
def g2() -> PLMap:
    return pl([0, '1/2', 1], [(2, 0), (0, 1)])


@pytest.fixture
def g3() -> PLMap:
    return pl([0, '1/2', 1], [(2, 0), (2, -1)])


@pytest.fixture
def four_cycle() -> FiniteMap:
    return FiniteMap((1, 2, 3, 0))


@pytest.fixture
def alternating_rotation() -> Schedule:
    return Schedule.periodic([Rotation(1), Rotation(-1)], ['rot', 'rot_inv'])


@pytest.fixture
def nonsurjective_schedule(g1, g2, g3) -> Schedule:
    return Schedule.periodic([g1, g2, g3], ['g1', 'g2', 'g3'])
