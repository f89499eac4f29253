"""
Hitting Index Module

Hitting sets N(U,V) = {n : f_1^n(U) meets V}, sensitivity hit sets
N(U,delta) = {n : diam f_1^n(U) > delta}, and finite-horizon classifiers
for syndetic, thick, cofinite, thickly syndetic and dense index sets.

Region images are iterated one map at a time: U_n = f_n(U_{n-1}).
"""

import logging
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

import config
from error_handler import BadParameter, EmptyHorizon, SpaceMismatch
from models import ClassVerdict, IndexSample, Verdict
from spaces_regions import RegionSet, image

logger = logging.getLogger(__name__)

CLASS_KINDS = ('syndetic', 'thick', 'cofinite', 'thickly_syndetic', 'upper_density')


def window_images(region: RegionSet, s, horizon: int, start: int = 1) -> Iterator[Tuple[int, RegionSet]]:
    """Yield (n, f_start^n(region)) for n = 1..horizon"""
    if horizon < 0:
        raise BadParameter("horizon must be a natural number")
    current = region
    for n in range(1, horizon + 1):
        current = image(current, s.map_at(start + n - 1))
        yield n, current


def hitting_set(u: RegionSet, v: RegionSet, s, horizon: int) -> IndexSample:
    """
    N(U,V) restricted to [1, horizon]

    Raises:
        SpaceMismatch: If U and V live in different spaces
    """
    if u.space != v.space:
        raise SpaceMismatch(f"regions of the {u.space.kind} and {v.space.kind} spaces")
    members = tuple(n for n, current in window_images(u, s, horizon) if current.intersects(v))
    return IndexSample(horizon, members)


def sensitivity_hits(u: RegionSet, delta, s, horizon: int) -> IndexSample:
    """
    N(U,delta) = {n <= horizon : diam f_1^n(U) > delta}

    Raises:
        BadParameter: If delta < 0
    """
    delta = Fraction(delta)
    if delta < 0:
        raise BadParameter("delta must be nonnegative")
    members = tuple(n for n, current in window_images(u, s, horizon) if current.diam() > delta)
    return IndexSample(horizon, members)


def separation_curve(u: RegionSet, s, horizon: int) -> List[Tuple[int, object]]:
    """Rows (n, diam f_1^n(U)) for n = 1..horizon"""
    return [(n, current.diam()) for n, current in window_images(u, s, horizon)]


# Classifier statistics

def max_gap(members, t: int) -> int:
    """Largest gap in [0] + members within [1,t] + [t+1]"""
    marks = [0] + [n for n in members if n <= t] + [t + 1]
    return max(b - a for a, b in zip(marks, marks[1:]))


def longest_run(members, t: int) -> int:
    best = run = 0
    previous = None
    for n in members:
        if n > t:
            break
        run = run + 1 if previous is not None and n == previous + 1 else 1
        best = max(best, run)
        previous = n
    return best


def tail_start(members, t: int) -> int:
    """Least N with [N, t] inside the members; t+1 when t is not a member"""
    present = set(members)
    n = t
    while n >= 1 and n in present:
        n -= 1
    return n + 1


def internal_gap(members, t: int) -> Optional[int]:
    """Largest gap after the first member within [1,t], trailing gap to t+1 included; None without members"""
    marks = [n for n in members if n <= t]
    if not marks:
        return None
    marks.append(t + 1)
    return max(b - a for a, b in zip(marks, marks[1:]))


def _syndetic_rule(members, horizon: int, sub: int) -> Tuple[Verdict, dict]:
    tail = tail_start(members, horizon)
    if tail <= min(sub, horizon):
        return Verdict.HOLDS, {'tail_start': tail}
    inner_t, inner_s = internal_gap(members, horizon), internal_gap(members, sub)
    # the leading offset before the first member is not a trend
    if inner_s is not None and inner_t > inner_s:
        return Verdict.FAILS, {'gap_at_horizon': inner_t, 'gap_at_sub_horizon': inner_s}
    gap_t = max_gap(members, horizon)
    needed = -(-horizon // (2 * gap_t))
    if members and len(members) >= needed:
        return Verdict.HOLDS, {'max_gap': gap_t, 'members_needed': needed}
    return Verdict.INCONCLUSIVE, {'max_gap': gap_t, 'members_needed': needed}


def _thick_rule(members, horizon: int, sub: int) -> Tuple[Verdict, dict]:
    tail = tail_start(members, horizon)
    run_t, run_s = longest_run(members, horizon), longest_run(members, sub)
    if tail <= sub:
        return Verdict.HOLDS, {'tail_start': tail}
    if run_t > run_s:
        return Verdict.HOLDS, {'run_at_horizon': run_t, 'run_at_sub_horizon': run_s}
    if horizon not in set(members):
        return Verdict.FAILS, {'run_at_horizon': run_t, 'run_at_sub_horizon': run_s}
    return Verdict.INCONCLUSIVE, {'run_at_horizon': run_t, 'run_at_sub_horizon': run_s}


def _cofinite_rule(members, horizon: int, sub: int) -> Tuple[Verdict, dict]:
    tail = tail_start(members, horizon)
    if tail <= sub:
        return Verdict.HOLDS, {'tail_start': tail}
    present = set(members)
    middle = (sub + horizon) // 2
    early = [n for n in range(sub + 1, middle + 1) if n not in present]
    late = [n for n in range(middle + 1, horizon + 1) if n not in present]
    if early and late:
        return Verdict.FAILS, {'missing_early': early[-1], 'missing_late': late[-1]}
    return Verdict.INCONCLUSIVE, {'tail_start': tail}


def _verdict(kind, verdict, sample_members, horizon, sub, witness, density_members=None, density_horizon=None):
    members = tuple(sample_members)
    count_members = members if density_members is None else tuple(density_members)
    count_horizon = horizon if density_horizon is None else density_horizon
    return ClassVerdict(
        kind=kind,
        verdict=verdict,
        horizon=horizon,
        sub_horizon=sub,
        max_gap=max_gap(members, horizon),
        sub_max_gap=max_gap(members, sub),
        longest_run=longest_run(members, horizon),
        sub_longest_run=longest_run(members, sub),
        tail_start=tail_start(members, horizon),
        density=Fraction(len(count_members), count_horizon) if count_horizon else Fraction(0),
        member_count=len(count_members),
        witness=witness,
    )


def classify(sample: IndexSample, kind: str, k: Optional[int] = None,
             theta=None, sub_horizon: Optional[int] = None) -> ClassVerdict:
    """
    Classify a finite-horizon index sample

    Holds and Fails for the asymptotic classes come from comparing the
    statistics at the sub-horizon (default T//4) with those at T.

    Args:
        sample (IndexSample): the members within [1, T]
        kind (str): syndetic, thick, cofinite, thickly_syndetic or upper_density
        k (int): run length for thickly_syndetic
        theta (Fraction): density bar for upper_density (config default)
        sub_horizon (int): earlier horizon used for trend comparison

    Raises:
        EmptyHorizon: If T = 0
        BadParameter: For an unknown kind or invalid k, theta
    """
    horizon = sample.horizon
    if horizon == 0:
        raise EmptyHorizon("cannot classify a sample with horizon 0")
    if kind not in CLASS_KINDS:
        raise BadParameter(f"unknown classifier kind {kind!r}")
    sub = horizon // 4 if sub_horizon is None else sub_horizon
    if not 0 <= sub <= horizon:
        raise BadParameter("sub-horizon must lie in [0, T]")
    members = sample.members

    if kind == 'syndetic':
        verdict, witness = _syndetic_rule(members, horizon, sub)
    elif kind == 'thick':
        verdict, witness = _thick_rule(members, horizon, sub)
    elif kind == 'cofinite':
        verdict, witness = _cofinite_rule(members, horizon, sub)
    elif kind == 'upper_density':
        theta = config.DENSITY_THRESHOLD if theta is None else Fraction(theta)
        if theta <= 0:
            raise BadParameter("density threshold must be positive")
        density = Fraction(len(members), horizon)
        verdict = Verdict.HOLDS if density >= theta else Verdict.FAILS
        witness = {'density': f"{density.numerator}/{density.denominator}",
                   'theta': f"{theta.numerator}/{theta.denominator}"}
    else:
        if k is None or k < 1:
            raise BadParameter("thickly_syndetic needs k >= 1")
        reduced = horizon - k
        if reduced < 1:
            return _verdict(kind, Verdict.INCONCLUSIVE, (), max(reduced, 0), 0,
                            {'k': k, 'reason': 'horizon shorter than k'}, members, horizon)
        present = set(members)
        starts = tuple(n for n in range(1, reduced + 1) if all(n + j in present for j in range(k + 1)))
        verdict, witness = _syndetic_rule(starts, reduced, min(sub, reduced))
        witness = {'k': k, **witness}
        return _verdict(kind, verdict, starts, reduced, min(sub, reduced), witness, members, horizon)

    return _verdict(kind, verdict, members, horizon, sub, witness)
