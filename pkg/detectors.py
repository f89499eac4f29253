"""
Detectors Module

Three-valued property detectors. "For every nonempty open set" is read as
"for every cell of a finite cover", so every HoldsEvidence is stamped with
its cover scale and horizon.

Families of detectors:
- sensitivity: plain, cofinite, syndetic, thick, thickly syndetic,
  ergodic, multi and Li-Yorke sensitivity
- transitivity: transitive, weakly mixing, mixing and the chain replay
- accessibility and Kato chaos
- point checks: recurrence, almost periodicity, periodicity,
  equicontinuity, minimal points and fixed points
- Li-Yorke pair scans, minimality (M1/M2), preimage covers
- weak variants over generator words

`run_property` dispatches by property name; `replay_witness` re-checks a
FailsWitness report from its stored witness.
"""

import logging
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import config
from core_maps import Identity, PLMap, compile_window, compose, evaluate, flatten
from error_handler import BadParameter, Unsupported, log_system_event
from hitting_index import classify, hitting_set, sensitivity_hits, window_images
from models import IndexSample, PropertyReport, ReportVerdict, Verdict, fraction_text, join_verdicts
from points import CirclePoint, FinitePoint, IntervalPoint, SeqPoint
from spaces_regions import (
    UNIT_INTERVAL, Interval, RegionSet, SpaceSpec, ball, basis_cells, distance, image, preimage, real_text
)
from utils import format_point, parse_point, parse_rational

logger = logging.getLogger(__name__)

SENSITIVITY_CLASSES = {
    'sensitive': None,
    'cofinitely_sensitive': 'cofinite',
    'syndetically_sensitive': 'syndetic',
    'thickly_sensitive': 'thick',
    'thickly_syndetically_sensitive': 'thickly_syndetic',
    'ergodically_sensitive': 'upper_density',
}

TRANSITIVITY_VARIANTS = ('transitive', 'weakly_mixing', 'mixing')

EQUI_DELTA_GRID = tuple(Fraction(1, 2 ** j) for j in range(1, 11))


@dataclass(frozen=True)
class CoverSpec:
    """
    Finite cover by basis cells of diameter <= scale

    Attributes:
        space (SpaceSpec): the covered space
        scale (Fraction): w
        cells (tuple): the RegionSet cells, derived from space and scale
    """
    space: SpaceSpec
    scale: Fraction
    cells: Tuple[RegionSet, ...] = ()

    def __post_init__(self):
        scale = Fraction(self.scale)
        if scale <= 0:
            raise BadParameter("cover scale must be positive")
        object.__setattr__(self, 'scale', scale)
        if not self.cells:
            object.__setattr__(self, 'cells', tuple(basis_cells(self.space, scale)))

    def refined(self, scale) -> 'CoverSpec':
        """The same cover at scale min(w, scale)"""
        scale = Fraction(scale)
        if scale >= self.scale:
            return self
        return CoverSpec(self.space, scale)

    def to_dict(self) -> dict:
        return {'space': self.space.kind, 'scale': fraction_text(self.scale), 'cells': len(self.cells)}


def map_cells(func: Callable, items: Sequence) -> list:
    """Apply func to every item, in item order, on NDS_WORKERS threads"""
    if config.WORKERS > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=config.WORKERS) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _text(value) -> Any:
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, (list, tuple)):
        return [_text(v) for v in value]
    return value


def _params(**values) -> Dict[str, Any]:
    return {key: _text(value) for key, value in values.items() if value is not None}


def _provenance(s) -> Dict[str, Any]:
    return {'schedule': s.fingerprint, 'mode': 'exact'}


def _report(name: str, parameters: dict, verdict: Verdict, witnesses=None, evidence=None, s=None) -> PropertyReport:
    report = PropertyReport(
        property=name,
        parameters=parameters,
        verdict=ReportVerdict.from_verdict(verdict),
        witnesses=list(witnesses or []),
        evidence=list(evidence or []),
        provenance=_provenance(s) if s is not None else {'mode': 'exact'},
    )
    log_system_event(f"[DETECTOR] {name}", f"verdict={report.verdict.value}", 'DEBUG')
    return report


def _positive(name: str, value) -> Fraction:
    value = Fraction(value)
    if value <= 0:
        raise BadParameter(f"{name} must be positive")
    return value


def _horizon(horizon: int) -> int:
    if not isinstance(horizon, int) or horizon < 1:
        raise BadParameter("horizon must be an integer >= 1")
    return horizon


def orbit_points(space: SpaceSpec, x, s, horizon: int, start: int = 1) -> list:
    """[x, f_start^1(x), ..., f_start^horizon(x)]"""
    space.check_point(x)
    points = [x]
    for n in range(horizon):
        points.append(evaluate(s.map_at(start + n), points[-1]))
    return points


# Sensitivity

def _cell_sensitivity(s, cells, delta, horizon) -> List[IndexSample]:
    return map_cells(lambda cell: sensitivity_hits(cell, delta, s, horizon), cells)


def _cell_verdict(sample: IndexSample, kind: Optional[str], k: int, theta, sub_horizon) -> Tuple[Verdict, dict]:
    if kind is None:
        verdict = Verdict.HOLDS if sample.members else Verdict.FAILS
        return verdict, {'first_hit': sample.members[0] if sample.members else None}
    if kind == 'thickly_syndetic':
        results = [classify(sample, kind, k=j, sub_horizon=sub_horizon) for j in range(1, k + 1)]
        verdict = join_verdicts(r.verdict for r in results)
        worst = next((r for r in results if r.verdict is verdict), results[-1])
        return verdict, worst.to_dict()
    result = classify(sample, kind, theta=theta, sub_horizon=sub_horizon)
    return result.verdict, result.to_dict()


def check_sensitive(s, delta, cover: CoverSpec, horizon: int, variant: str = 'sensitive',
                    k: int = 1, theta=None, sub_horizon: Optional[int] = None) -> PropertyReport:
    """
    Sensitivity and its index-set variants over a cover

    Every cell U gets N(U, delta); the plain variant needs it nonempty,
    the others pass it through the matching classifier. Cells are taken at
    scale min(w, delta) so a cell's own diameter never counts.

    Raises:
        BadParameter: If delta <= 0 or the variant is unknown
    """
    delta = _positive('delta', delta)
    horizon = _horizon(horizon)
    if variant not in SENSITIVITY_CLASSES:
        raise BadParameter(f"unknown sensitivity variant {variant!r}")
    if k < 1:
        raise BadParameter("k must be >= 1")
    kind = SENSITIVITY_CLASSES[variant]
    cells = cover.refined(delta).cells
    samples = _cell_sensitivity(s, cells, delta, horizon)

    verdicts, evidence, witnesses = [], [], []
    for index, sample in enumerate(samples):
        verdict, detail = _cell_verdict(sample, kind, k, theta, sub_horizon)
        verdicts.append(verdict)
        evidence.append({'cell': index, 'verdict': verdict.value, **({'first_hit': detail['first_hit']}
                                                                     if kind is None else {})})
        if verdict is Verdict.FAILS and not witnesses:
            witnesses.append({
                'cell': index,
                'region': str(cells[index]),
                'hits': sample.to_dict(),
                'classifier': detail if kind is not None else None,
            })
    verdict = join_verdicts(verdicts)
    parameters = _params(delta=delta, T=horizon, w=cover.scale, cell_scale=min(cover.scale, delta),
                         k=k if kind == 'thickly_syndetic' else None,
                         theta=(config.DENSITY_THRESHOLD if theta is None else Fraction(theta))
                         if kind == 'upper_density' else None,
                         sub_horizon=sub_horizon)
    return _report(variant, parameters, verdict, witnesses, evidence, s)


def check_multi_sensitive(s, delta, m: int, cover: CoverSpec, horizon: int) -> PropertyReport:
    """
    Multi-sensitivity: every family of m cells has a common time in all N(U_i, delta)

    Raises:
        BadParameter: If delta <= 0 or m outside 1..NDS_MULTI_MAX_M
    """
    delta = _positive('delta', delta)
    horizon = _horizon(horizon)
    if not 1 <= m <= config.MULTI_MAX_M:
        raise BadParameter(f"m must lie in 1..{config.MULTI_MAX_M}")
    cells = cover.refined(delta).cells
    samples = _cell_sensitivity(s, cells, delta, horizon)
    size = min(m, len(cells))
    witnesses, checked = [], 0
    for family in combinations(range(len(cells)), size):
        common = set(samples[family[0]].members)
        for index in family[1:]:
            common &= set(samples[index].members)
        checked += 1
        if not common:
            witnesses.append({'cells': list(family), 'regions': [str(cells[i]) for i in family]})
            break
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    parameters = _params(delta=delta, m=m, T=horizon, w=cover.scale, cell_scale=min(cover.scale, delta))
    return _report('multi_sensitive', parameters, verdict, witnesses, [{'families_checked': checked}], s)


# Transitivity

def _pair_hits(s, cells, horizon) -> Dict[Tuple[int, int], IndexSample]:
    def images_of(cell):
        return [current for _, current in window_images(cell, s, horizon)]

    images = map_cells(images_of, cells)
    hits = {}
    for i, sequence in enumerate(images):
        for j, target in enumerate(cells):
            members = tuple(n + 1 for n, current in enumerate(sequence) if current.intersects(target))
            hits[(i, j)] = IndexSample(horizon, members)
    return hits


def _transitivity_verdict(variant: str, hits, cells) -> Tuple[Verdict, list, list]:
    pairs = sorted(hits)
    if variant == 'transitive':
        for pair in pairs:
            if not hits[pair].members:
                return Verdict.FAILS, [{'pair': list(pair), 'regions': [str(cells[p]) for p in pair],
                                        'hits': hits[pair].to_dict()}], []
        return Verdict.HOLDS, [], [{'pair': list(p), 'first_hit': hits[p].members[0]} for p in pairs]
    if variant == 'weakly_mixing':
        members = {pair: set(hits[pair].members) for pair in pairs}
        for first, second in combinations(pairs + [pairs[-1]] if len(pairs) == 1 else pairs, 2):
            if not members[first] & members[second]:
                return Verdict.FAILS, [{'pairs': [list(first), list(second)]}], []
        for pair in pairs:
            if not members[pair]:
                return Verdict.FAILS, [{'pairs': [list(pair), list(pair)]}], []
        return Verdict.HOLDS, [], [{'pairs_of_pairs': len(pairs) * (len(pairs) + 1) // 2}]
    verdicts, witnesses, evidence = [], [], []
    for pair in pairs:
        result = classify(hits[pair], 'cofinite')
        verdicts.append(result.verdict)
        evidence.append({'pair': list(pair), 'tail_start': result.tail_start})
        if result.verdict is Verdict.FAILS and not witnesses:
            witnesses.append({'pair': list(pair), 'hits': hits[pair].to_dict(), 'classifier': result.to_dict()})
    return join_verdicts(verdicts), witnesses, evidence


def check_transitive(s, cover: CoverSpec, horizon: int, variant: str = 'transitive') -> PropertyReport:
    """
    Transitivity, weak mixing or mixing over ordered cell pairs

    transitive: every N(U,V) nonempty; weakly_mixing: every two pairs share
    a time; mixing: every N(U,V) cofinite.
    """
    horizon = _horizon(horizon)
    if variant not in TRANSITIVITY_VARIANTS:
        raise BadParameter(f"unknown transitivity variant {variant!r}")
    hits = _pair_hits(s, cover.cells, horizon)
    verdict, witnesses, evidence = _transitivity_verdict(variant, hits, cover.cells)
    return _report(variant, _params(T=horizon, w=cover.scale), verdict, witnesses, evidence, s)


def check_transitivity_chain(s, cover: CoverSpec, horizon: int) -> PropertyReport:
    """
    Run mixing, weakly mixing and transitive on one set of hit sets

    Fails only when a stronger variant Holds while a weaker one does not.
    """
    horizon = _horizon(horizon)
    hits = _pair_hits(s, cover.cells, horizon)
    verdicts = {variant: _transitivity_verdict(variant, hits, cover.cells)[0] for variant in TRANSITIVITY_VARIANTS}
    violations = []
    for stronger, weaker in (('mixing', 'weakly_mixing'), ('weakly_mixing', 'transitive')):
        if verdicts[stronger] is Verdict.HOLDS and verdicts[weaker] is not Verdict.HOLDS:
            violations.append({'stronger': stronger, 'weaker': weaker, 'weaker_verdict': verdicts[weaker].value})
    evidence = [{variant: verdict.value for variant, verdict in verdicts.items()}]
    verdict = Verdict.FAILS if violations else Verdict.HOLDS
    return _report('transitivity_chain', _params(T=horizon, w=cover.scale), verdict, violations, evidence, s)


# Accessibility and Kato chaos

def _close_pair(space: SpaceSpec, u: RegionSet, v: RegionSet, s, n: int, epsilon):
    """Points x in u and y in v with d(f_1^n x, f_1^n y) < epsilon, or None"""
    window = compile_window(s, 1, n)
    for anchor_cell, other_cell, swapped in ((v, u, False), (u, v, True)):
        for anchor in anchor_cell.sample_points(depth=3):
            near = other_cell.intersection(preimage(ball(space, evaluate(window, anchor), epsilon), window))
            if not near.is_empty():
                return (anchor, near.center()) if swapped else (near.center(), anchor)
    return None


def check_accessible(s, epsilon, cover: CoverSpec, horizon: int) -> PropertyReport:
    """
    Every cell pair is brought within epsilon: gap(f_1^n U, f_1^n V) < epsilon for some n

    Evidence entries carry a point pair from the two cells whose images at
    time n are within epsilon, when one is found among the sample points.

    Raises:
        BadParameter: If epsilon <= 0
    """
    epsilon = _positive('epsilon', epsilon)
    horizon = _horizon(horizon)
    cells = cover.cells
    space = cover.space
    images = map_cells(lambda cell: [current for _, current in window_images(cell, s, horizon)], cells)
    witnesses, evidence = [], []
    for i, j in combinations(range(len(cells)), 2):
        hit, closest = None, None
        for n in range(horizon):
            separation = images[i][n].gap(images[j][n])
            closest = separation if closest is None or separation < closest else closest
            if separation < epsilon:
                hit = n + 1
                break
        if hit is None:
            witnesses.append({'pair': [i, j], 'regions': [str(cells[i]), str(cells[j])],
                              'closest_gap': real_text(closest)})
            break
        entry = {'pair': [i, j], 'n': hit}
        close = _close_pair(space, cells[i], cells[j], s, hit, epsilon)
        if close is not None:
            entry['points'] = [format_point(space, p) for p in close]
        evidence.append(entry)
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    return _report('accessible', _params(epsilon=epsilon, T=horizon, w=cover.scale), verdict, witnesses, evidence, s)


def check_kato(s, delta, epsilon, cover: CoverSpec, horizon: int) -> PropertyReport:
    """Kato chaos: sensitive and accessible, verdicts joined"""
    sensitive = check_sensitive(s, delta, cover, horizon)
    accessible = check_accessible(s, epsilon, cover, horizon)
    verdict = join_verdicts([sensitive.verdict.to_verdict(), accessible.verdict.to_verdict()])
    witnesses = [{'part': report.property, **w} for report in (sensitive, accessible) for w in report.witnesses]
    evidence = [{'sensitive': sensitive.verdict.value, 'accessible': accessible.verdict.value}]
    parameters = _params(delta=delta, epsilon=epsilon, T=horizon, w=cover.scale)
    return _report('kato', parameters, verdict, witnesses[:1] if verdict is Verdict.FAILS else [], evidence, s)


# Point checks

def _return_sample(space, x, s, epsilon, horizon) -> IndexSample:
    points = orbit_points(space, x, s, horizon)
    return IndexSample(horizon, tuple(n for n in range(1, horizon + 1) if distance(space, points[n], x) < epsilon))


def check_recurrent(space: SpaceSpec, x, s, epsilon, horizon: int) -> PropertyReport:
    """Some return d(f_1^n x, x) < epsilon with n <= horizon"""
    epsilon = _positive('epsilon', epsilon)
    sample = _return_sample(space, x, s, epsilon, _horizon(horizon))
    verdict = Verdict.HOLDS if sample.members else Verdict.FAILS
    witnesses = [] if sample.members else [{'point': format_point(space, x), 'returns': sample.to_dict()}]
    evidence = [{'first_return': sample.members[0]}] if sample.members else []
    return _report('recurrent', _params(epsilon=epsilon, T=horizon, point=format_point(space, x)),
                   verdict, witnesses, evidence, s)


def check_nonrecurrent(space: SpaceSpec, x, s, epsilon, horizon: int) -> PropertyReport:
    """No return within epsilon up to the horizon"""
    epsilon = _positive('epsilon', epsilon)
    sample = _return_sample(space, x, s, epsilon, _horizon(horizon))
    verdict = Verdict.FAILS if sample.members else Verdict.HOLDS
    witnesses = [{'point': format_point(space, x), 'return_time': sample.members[0]}] if sample.members else []
    return _report('nonrecurrent', _params(epsilon=epsilon, T=horizon, point=format_point(space, x)),
                   verdict, witnesses, [{'returns': sample.to_dict()}], s)


def check_almost_periodic(space: SpaceSpec, x, s, epsilon, horizon: int,
                          sub_horizon: Optional[int] = None) -> PropertyReport:
    """The epsilon-return set passes the syndetic classifier"""
    epsilon = _positive('epsilon', epsilon)
    sample = _return_sample(space, x, s, epsilon, _horizon(horizon))
    result = classify(sample, 'syndetic', sub_horizon=sub_horizon)
    witnesses = []
    if result.verdict is Verdict.FAILS:
        witnesses.append({'point': format_point(space, x), 'returns': sample.to_dict(), 'classifier': result.to_dict()})
    parameters = _params(epsilon=epsilon, T=horizon, point=format_point(space, x), sub_horizon=sub_horizon)
    return _report('almost_periodic', parameters, result.verdict, witnesses, [result.to_dict()], s)


def check_periodic(space: SpaceSpec, x, s, k: int, horizon: int) -> PropertyReport:
    """
    k-periodic point: f_i^{kn}(x) = x for every kn <= horizon

    Only i = 1 is checked unless NDS_PERIODIC_ALL_INDICES is set.
    """
    if k < 1:
        raise BadParameter("period k must be >= 1")
    horizon = _horizon(horizon)
    starts = range(1, max(horizon - k, 0) + 2) if config.PERIODIC_ALL_INDICES else (1,)
    witnesses, checked = [], 0
    for start in starts:
        points = orbit_points(space, x, s, horizon - start + 1, start)
        for n in range(k, len(points), k):
            checked += 1
            if points[n] != x:
                witnesses.append({'point': format_point(space, x), 'start': start, 'n': n,
                                  'image': format_point(space, points[n])})
                break
        if witnesses:
            break
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    parameters = _params(k=k, T=horizon, point=format_point(space, x))
    return _report('periodic', parameters, verdict, witnesses, [{'returns_checked': checked}], s)


def check_equicontinuity(space: SpaceSpec, x, s, epsilons: Sequence, horizon: int) -> PropertyReport:
    """
    Equicontinuity at x: for each epsilon find delta on the grid 1/2 .. 1/1024
    with d(f_1^n x, f_1^n y) < epsilon for n = 0..horizon and the sampled
    points y of B(x, delta)
    """
    horizon = _horizon(horizon)
    epsilons = [_positive('epsilon', e) for e in epsilons]
    if not epsilons:
        raise BadParameter("equicontinuity needs at least one epsilon")
    base = orbit_points(space, x, s, horizon)
    found, witnesses = [], []
    for epsilon in epsilons:
        chosen, violation = None, None
        for delta in EQUI_DELTA_GRID:
            violation = None
            for y in ball(space, x, delta).sample_points(config.EQUI_DEPTH):
                path = orbit_points(space, y, s, horizon)
                bad = next((n for n in range(horizon + 1) if distance(space, base[n], path[n]) >= epsilon), None)
                if bad is not None:
                    violation = {'epsilon': fraction_text(epsilon), 'delta': fraction_text(delta),
                                 'y': format_point(space, y), 'n': bad}
                    break
            if violation is None:
                chosen = delta
                break
        if chosen is None:
            witnesses.append(violation)
            break
        found.append({'epsilon': fraction_text(epsilon), 'delta': fraction_text(chosen)})
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    parameters = _params(epsilons=epsilons, T=horizon, point=format_point(space, x))
    return _report('equicontinuity', parameters, verdict, witnesses, found, s)


def _invariant(space: SpaceSpec, subset, maps) -> bool:
    region = RegionSet(space, tuple(subset)) if space.kind == 'finite' else None
    if region is not None:
        return all(image(region, m).issubset(region) for m in maps)
    return all(evaluate(m, p) in subset for m in maps for p in subset)


def check_minimal_point(space: SpaceSpec, x, s, horizon: int) -> PropertyReport:
    """
    Minimal point test for finite orbits

    The orbit must close up within the horizon, be invariant under every
    generator used, and contain no smaller invariant subset.
    """
    horizon = _horizon(horizon)
    points = orbit_points(space, x, s, horizon)
    orbit = []
    for p in points:
        if p not in orbit:
            orbit.append(p)
    maps = s.generators_used(horizon)
    parameters = _params(T=horizon, point=format_point(space, x))
    if len(orbit) > config.FINITE_M1_MAX:
        return _report('minimal_point', parameters, Verdict.INCONCLUSIVE, [], [{'orbit_size': len(orbit)}], s)
    for m in maps:
        for p in orbit:
            q = evaluate(m, p)
            if q not in orbit:
                return _report('minimal_point', parameters, Verdict.FAILS,
                               [{'orbit': [format_point(space, o) for o in orbit],
                                 'escape': format_point(space, q), 'from': format_point(space, p)}], [], s)
    for size in range(1, len(orbit)):
        for subset in combinations(orbit, size):
            if all(evaluate(m, p) in subset for m in maps for p in subset):
                return _report('minimal_point', parameters, Verdict.FAILS,
                               [{'invariant_subset': [format_point(space, p) for p in subset]}], [], s)
    return _report('minimal_point', parameters, Verdict.HOLDS, [],
                   [{'orbit': [format_point(space, o) for o in orbit]}], s)


def _pl_fixed(m: PLMap) -> List[Interval]:
    atoms = []
    for index, (a, b) in enumerate(m.pieces):
        piece = Interval(m.breakpoints[index], m.breakpoints[index + 1], False, False)
        if a == 1:
            if b == 0:
                atoms.append(piece)
        else:
            x = b / (1 - a)
            if piece.contains(x):
                atoms.append(Interval.point(x))
    atoms.extend(Interval.point(x) for x, v in zip(m.breakpoints, m.point_values) if x == v)
    return atoms


def fixed_points(s, space: Optional[SpaceSpec] = None) -> list:
    """
    Exact common fixed points of the generators the schedule uses

    Raises:
        Unsupported: For a continuum of fixed points, indexed families, or
            shift periods beyond NDS_SHIFT_PERIOD_BOUND
    """
    if not s.used_indices():
        raise Unsupported("fixed points of an indexed family are not decidable from finitely many maps")
    maps = [flatten(m) for m in s.generators_used()]
    maps = [m for m in maps if not isinstance(m, Identity)]
    kind = s.space_kind
    if not maps:
        raise Unsupported("every point is fixed")
    if kind == 'interval':
        common = RegionSet.full(UNIT_INTERVAL)
        for m in maps:
            common = common.intersection(RegionSet(UNIT_INTERVAL, tuple(_pl_fixed(m))))
        if any(not part.is_point() for part in common.parts):
            raise Unsupported("the common fixed set contains an interval")
        return [IntervalPoint(part.lo) for part in common.parts]
    if kind == 'finite':
        size = maps[0].size
        return [FinitePoint(i) for i in range(size) if all(m.table[i] == i for m in maps)]
    if kind == 'circle':
        if all(m.step == 0 and m.offset == 0 for m in maps):
            raise Unsupported("every point is fixed")
        return []
    period = 0
    for m in maps:
        period = gcd(period, abs(m.power))
    if period == 0:
        raise Unsupported("every point is fixed")
    if period > config.SHIFT_PERIOD_BOUND:
        raise Unsupported(f"shift period {period} exceeds NDS_SHIFT_PERIOD_BOUND")
    found = []
    for word in product((0, 1), repeat=period):
        point = SeqPoint.periodic(word)
        if point not in found:
            found.append(point)
    return found


def check_fixed_points(space: SpaceSpec, s) -> PropertyReport:
    points = fixed_points(s, space)
    listed = [format_point(space, p) for p in points]
    verdict = Verdict.HOLDS if points else Verdict.FAILS
    witnesses = [] if points else [{'fixed_points': []}]
    return _report('fixed_points', {}, verdict, witnesses, [{'fixed_points': listed}], s)


# Li-Yorke pairs

def _sample_point(space: SpaceSpec, rng: random.Random):
    if space.kind == 'interval':
        depth = rng.randint(1, 8)
        return IntervalPoint(Fraction(rng.randint(0, 2 ** depth), 2 ** depth))
    if space.kind == 'circle':
        return CirclePoint(Fraction(rng.randrange(64), 64), rng.randint(-3, 3))
    if space.kind == 'finite':
        return FinitePoint(rng.randrange(space.size))
    center = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 6)))
    return SeqPoint((rng.randint(0, 1),), center, (rng.randint(0, 1),), rng.randint(-3, 0))


def sample_pairs(space: SpaceSpec, budget: int, seed: Optional[int] = None) -> List[tuple]:
    """Deterministic distinct point pairs drawn with random.Random(seed)"""
    rng = random.Random(config.SAMPLE_SEED if seed is None else seed)
    pairs, attempts = [], 0
    while len(pairs) < budget and attempts < 20 * budget:
        attempts += 1
        x, y = _sample_point(space, rng), _sample_point(space, rng)
        if x != y:
            pairs.append((x, y))
    return pairs


def _li_yorke_pair(space, x, y, s, horizon, eta, delta) -> Optional[dict]:
    xs, ys = orbit_points(space, x, s, horizon), orbit_points(space, y, s, horizon)
    distances = [distance(space, a, b) for a, b in zip(xs, ys)]
    tail = distances[max(horizon // 2, 1):]
    low, high = min(tail), max(distances[1:])
    if low < eta and high > delta:
        return {'x': format_point(space, x), 'y': format_point(space, y),
                'tail_min': real_text(low), 'max': real_text(high)}
    return None


def li_yorke_scan(space: SpaceSpec, s, pair_budget: int, horizon: int, eta, delta,
                  seed: Optional[int] = None) -> PropertyReport:
    """
    Scan sampled pairs for Li-Yorke witnesses

    A pair is a witness when min over n in [T/2, T] of the distance is below
    eta and the max over n <= T exceeds delta. Evidence only.
    """
    eta, delta = _positive('eta', eta), _positive('delta', delta)
    horizon = _horizon(horizon)
    if pair_budget < 1:
        raise BadParameter("pair budget must be >= 1")
    seed = config.SAMPLE_SEED if seed is None else seed
    pairs = sample_pairs(space, pair_budget, seed)
    found = [w for w in map_cells(lambda pair: _li_yorke_pair(space, *pair, s, horizon, eta, delta), pairs) if w]
    verdict = Verdict.HOLDS if found else Verdict.FAILS
    witnesses = [] if found else [{'pairs_scanned': len(pairs), 'seed': seed}]
    parameters = _params(budget=pair_budget, T=horizon, eta=eta, delta=delta, seed=seed)
    evidence = [{'witness_count': len(found)}] + found[:5]
    return _report('li_yorke', parameters, verdict, witnesses, evidence, s)


def check_li_yorke_sensitive(s, epsilon, delta, eta, cover: CoverSpec, horizon: int) -> PropertyReport:
    """Every cell center has a Li-Yorke partner inside B(center, epsilon) and the cell"""
    epsilon, delta, eta = _positive('epsilon', epsilon), _positive('delta', delta), _positive('eta', eta)
    horizon = _horizon(horizon)
    space = cover.space

    def scan(cell):
        center = cell.center()
        near = ball(space, center, epsilon).intersection(cell)
        for y in near.sample_points(config.EQUI_DEPTH):
            if y != center:
                witness = _li_yorke_pair(space, center, y, s, horizon, eta, delta)
                if witness:
                    return witness
        return None

    results = map_cells(scan, cover.cells)
    witnesses, evidence = [], []
    for index, result in enumerate(results):
        if result is None:
            witnesses.append({'cell': index, 'region': str(cover.cells[index])})
            break
        evidence.append({'cell': index, **result})
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    parameters = _params(epsilon=epsilon, delta=delta, eta=eta, T=horizon, w=cover.scale)
    return _report('li_yorke_sensitive', parameters, verdict, witnesses, evidence, s)


# Minimality

def _minimality_m2(s, cover: CoverSpec, horizon: int, points: Sequence = ()) -> PropertyReport:
    space = cover.space
    starts = list(points) + [cell.center() for cell in cover.cells]
    witnesses, evidence = [], []
    for x in starts:
        orbit = orbit_points(space, x, s, horizon)
        missed = next((j for j, cell in enumerate(cover.cells) if not any(cell.contains(p) for p in orbit)), None)
        if missed is not None:
            witnesses.append({'point': format_point(space, x), 'missed_cell': missed,
                              'region': str(cover.cells[missed])})
            break
        evidence.append({'point': format_point(space, x)})
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    return _report('minimal_m2', _params(T=horizon, w=cover.scale), verdict, witnesses, evidence, s)


def _minimality_m1_finite(space: SpaceSpec, s, horizon: int) -> PropertyReport:
    maps = s.generators_used(horizon)
    for size in range(1, space.size):
        for subset in combinations(range(space.size), size):
            if _invariant(space, subset, maps):
                return _report('minimal_m1', _params(T=horizon, method='exhaustive'), Verdict.FAILS,
                               [{'invariant_subset': [space.label(i) for i in subset]}], [], s)
    evidence = [{'subsets_checked': 2 ** space.size - 1}]
    return _report('minimal_m1', _params(T=horizon, method='exhaustive'), Verdict.HOLDS, [], evidence, s)


def _minimality_m1_closure(s, cover: CoverSpec, horizon: int) -> PropertyReport:
    space = cover.space
    maps = s.generators_used(horizon)
    seeds = []
    for cell in cover.cells:
        if space.kind != 'shift':
            seeds.append(RegionSet.singleton(space, cell.center()))
        seeds.append(cell.closure())
    evidence = []
    for index, seed in enumerate(seeds):
        region, outcome = seed, 'bounded'
        for step in range(config.CLOSURE_STEPS):
            grown = region
            for m in maps:
                grown = grown.union(image(region, m))
            grown = grown.closure()
            if len(grown.parts) > config.CLOSURE_MAX_COMPONENTS:
                outcome = 'too_many_components'
                break
            if grown == region:
                outcome = 'stable'
                break
            region = grown
        if outcome == 'stable' and not region.is_full():
            return _report('minimal_m1', _params(T=horizon, w=cover.scale, method='seed_closure'), Verdict.FAILS,
                           [{'seed': index, 'invariant_region': str(region)}], evidence, s)
        evidence.append({'seed': index, 'outcome': 'full' if region.is_full() else outcome})
    return _report('minimal_m1', _params(T=horizon, w=cover.scale, method='seed_closure'),
                   Verdict.INCONCLUSIVE, [], evidence, s)


def minimality(s, mode: str, cover: CoverSpec, horizon: int, points: Sequence = (),
               exact_only: bool = False) -> PropertyReport:
    """
    Minimality in the M1 (no proper closed invariant set) or M2 (dense orbits) sense

    M2 tests the orbit of every cell center (and any extra points) against
    every cell. M1 is exhaustive on small finite spaces and otherwise grows
    seed regions under the generators until they stabilize.

    Raises:
        Unsupported: If exact_only is set and M1 cannot be decided exactly
    """
    horizon = _horizon(horizon)
    space = cover.space
    if mode == 'M2':
        return _minimality_m2(s, cover, horizon, points)
    if mode != 'M1':
        raise BadParameter("minimality mode must be M1 or M2")
    if space.kind == 'finite' and space.size <= config.FINITE_M1_MAX:
        return _minimality_m1_finite(space, s, horizon)
    if exact_only:
        raise Unsupported("exact M1 needs a finite space")
    return _minimality_m1_closure(s, cover, horizon)


def check_preimage_cover(s, cover: CoverSpec, horizon: int) -> PropertyReport:
    """
    For every cell U, X = U ∪ f_1^{-1}(U) ∪ ... ∪ f_1^{-n}(U) for some n <= horizon
    """
    horizon = _horizon(horizon)
    full = RegionSet.full(cover.space)

    def covering_time(cell):
        union = cell
        for n in range(1, horizon + 1):
            pulled = cell
            for j in range(n, 0, -1):
                pulled = preimage(pulled, s.map_at(j))
            union = union.union(pulled)
            if union.is_full():
                return n, None
        return None, str(full.difference(union))

    results = map_cells(covering_time, cover.cells)
    witnesses, evidence = [], []
    for index, (n, missing) in enumerate(results):
        if n is None:
            witnesses.append({'cell': index, 'region': str(cover.cells[index]), 'uncovered': missing})
            break
        evidence.append({'cell': index, 'n': n})
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    return _report('preimage_cover', _params(T=horizon, w=cover.scale), verdict, witnesses, evidence, s)


# Weak variants over generator words

WEAK_KINDS = ('weak_sensitive', 'weak_transitive', 'weak_li_yorke')


def generator_words(s, length: int, horizon: int):
    """
    Breadth-first distinct compositions of generator letters

    A word may use each generator at most as often as it occurs among the
    indices 1..horizon. The search expands every distinct (compiled map,
    letter counts) state, of any length up to `length`. Each compiled map
    is yielded once, with the first word found for it.

    Yields:
        (word, compiled map) with the first letter applied first
    """
    if not s.used_indices():
        raise Unsupported("weak scans need a finitely generated schedule")
    available = Counter(s.index_at(n) for n in range(1, horizon + 1))
    letters = sorted(available)
    yielded, expanded = set(), set()
    frontier = [((), None)]
    for _ in range(length):
        next_frontier = []
        for word, compiled in frontier:
            used = Counter(word)
            for letter in letters:
                if used[letter] >= available[letter]:
                    continue
                step = s.generators[letter]
                candidate = flatten(step) if compiled is None else compose(step, compiled)
                extended = word + (letter,)
                state = (candidate, tuple(sorted(Counter(extended).items())))
                if state in expanded:
                    continue
                expanded.add(state)
                next_frontier.append((extended, candidate))
                if candidate in yielded:
                    continue
                yielded.add(candidate)
                if len(yielded) > config.WEAK_MAX_WORDS:
                    return
                yield extended, candidate
        frontier = next_frontier


def weak_scan(s, kind: str, length: int, cover: CoverSpec, horizon: int,
              delta=None, eta=None, pair_budget: int = 50) -> PropertyReport:
    """
    Weak sensitivity, weak transitivity or weak Li-Yorke chaos via generator words

    weak_sensitive(delta): every cell has a word g with diam g(U) > delta
    (cells at scale min(w, delta)); weak_transitive: every ordered cell pair
    has a word g with g(U) meeting V; weak_li_yorke(eta, delta): some sampled
    pair is brought within eta by one word and beyond delta by another.
    """
    horizon = _horizon(horizon)
    if length < 1:
        raise BadParameter("word length must be >= 1")
    if kind not in WEAK_KINDS:
        raise BadParameter(f"unknown weak scan kind {kind!r}")
    names = s.names
    spell = lambda word: [names[letter] for letter in word]
    space = cover.space
    words = list(generator_words(s, length, horizon))

    if kind == 'weak_sensitive':
        delta = _positive('delta', delta)
        cells = cover.refined(delta).cells
        pending = dict(enumerate(cells))
        found = {}
        for word, compiled in words:
            for index in list(pending):
                if image(pending[index], compiled).diam() > delta:
                    found[index] = spell(word)
                    del pending[index]
            if not pending:
                break
        witnesses = [{'cell': min(pending), 'region': str(pending[min(pending)]), 'words_tried': len(words)}] \
            if pending else []
        evidence = [{'cell': index, 'word': found[index]} for index in sorted(found)]
        parameters = _params(delta=delta, L=length, T=horizon, w=cover.scale, cell_scale=min(cover.scale, delta))
    elif kind == 'weak_transitive':
        cells = cover.cells
        pending = {(i, j) for i in range(len(cells)) for j in range(len(cells))}
        found = {}
        for word, compiled in words:
            images = {}
            for i, j in sorted(pending):
                if i not in images:
                    images[i] = image(cells[i], compiled)
                if images[i].intersects(cells[j]):
                    found[(i, j)] = spell(word)
                    pending.discard((i, j))
            if not pending:
                break
        witnesses = [{'pair': list(min(pending)), 'words_tried': len(words)}] if pending else []
        evidence = [{'pair': list(pair), 'word': found[pair]} for pair in sorted(found)]
        parameters = _params(L=length, T=horizon, w=cover.scale)
    else:
        eta, delta = _positive('eta', eta), _positive('delta', delta)
        evidence = []
        for x, y in sample_pairs(space, pair_budget):
            separations = [(distance(space, evaluate(m, x), evaluate(m, y)), word) for word, m in words]
            close = next((w for d, w in separations if d < eta), None)
            far = next((w for d, w in separations if d > delta), None)
            if close is not None and far is not None:
                evidence.append({'x': format_point(space, x), 'y': format_point(space, y),
                                 'close_word': spell(close), 'far_word': spell(far)})
        witnesses = [] if evidence else [{'pairs_scanned': pair_budget, 'words_tried': len(words)}]
        parameters = _params(eta=eta, delta=delta, L=length, T=horizon, budget=pair_budget)
    verdict = Verdict.FAILS if witnesses else Verdict.HOLDS
    return _report(kind, parameters, verdict, witnesses, evidence, s)


# Dispatch and replay

def _fraction_param(params: dict, key: str, default=None) -> Optional[Fraction]:
    value = params.get(key, default)
    return None if value is None else parse_rational(value)


def _point_param(space: SpaceSpec, params: dict, key: str = 'point'):
    value = params.get(key)
    if value is None:
        raise BadParameter(f"property needs a {key!r} parameter")
    return value if not isinstance(value, str) else parse_point(space, value)


def run_property(name: str, space: SpaceSpec, s, params: Dict[str, Any]) -> PropertyReport:
    """
    Run a detector by property name

    Args:
        name (str): property name, see PROPERTY_NAMES
        space (SpaceSpec): the phase space
        s (Schedule): the map sequence
        params (dict): delta, epsilon, T, w, m, k, theta, L, eta, point, ...

    Raises:
        BadParameter: For an unknown property or missing parameters
    """
    horizon = int(params.get('T', 100))
    scale = _fraction_param(params, 'w', Fraction(1, 8))
    cover = CoverSpec(space, scale)
    delta = _fraction_param(params, 'delta')
    epsilon = _fraction_param(params, 'epsilon')
    sub_horizon = params.get('sub_horizon')
    log_system_event("[DETECTOR] run", f"property={name} T={horizon}")

    if name in SENSITIVITY_CLASSES:
        return check_sensitive(s, delta, cover, horizon, name, k=int(params.get('k', 1)),
                               theta=params.get('theta'), sub_horizon=sub_horizon)
    if name == 'multi_sensitive':
        return check_multi_sensitive(s, delta, int(params.get('m', 2)), cover, horizon)
    if name in TRANSITIVITY_VARIANTS:
        return check_transitive(s, cover, horizon, name)
    if name == 'transitivity_chain':
        return check_transitivity_chain(s, cover, horizon)
    if name == 'accessible':
        return check_accessible(s, epsilon, cover, horizon)
    if name == 'kato':
        return check_kato(s, delta, epsilon, cover, horizon)
    if name == 'recurrent':
        return check_recurrent(space, _point_param(space, params), s, epsilon, horizon)
    if name == 'nonrecurrent':
        return check_nonrecurrent(space, _point_param(space, params), s, epsilon, horizon)
    if name == 'almost_periodic':
        return check_almost_periodic(space, _point_param(space, params), s, epsilon, horizon, sub_horizon)
    if name == 'periodic':
        return check_periodic(space, _point_param(space, params), s, int(params.get('k', 1)), horizon)
    if name == 'equicontinuity':
        epsilons = params.get('epsilons') or [epsilon]
        return check_equicontinuity(space, _point_param(space, params), s, epsilons, horizon)
    if name == 'minimal_point':
        return check_minimal_point(space, _point_param(space, params), s, horizon)
    if name == 'fixed_points':
        return check_fixed_points(space, s)
    if name == 'li_yorke':
        return li_yorke_scan(space, s, int(params.get('budget', 200)), horizon,
                             _fraction_param(params, 'eta'), delta)
    if name == 'li_yorke_sensitive':
        return check_li_yorke_sensitive(s, epsilon, delta, _fraction_param(params, 'eta'), cover, horizon)
    if name in ('minimal_m1', 'minimal_m2'):
        points = [parse_point(space, p) if isinstance(p, str) else p for p in params.get('points', [])]
        return minimality(s, 'M1' if name == 'minimal_m1' else 'M2', cover, horizon, points)
    if name == 'preimage_cover':
        return check_preimage_cover(s, cover, horizon)
    if name in WEAK_KINDS:
        return weak_scan(s, name, int(params.get('L', 8)), cover, horizon, delta=delta,
                         eta=_fraction_param(params, 'eta'), pair_budget=int(params.get('budget', 50)))
    raise BadParameter(f"unknown property {name!r}")


PROPERTY_NAMES = tuple(SENSITIVITY_CLASSES) + (
    'multi_sensitive', 'transitive', 'weakly_mixing', 'mixing', 'transitivity_chain', 'accessible', 'kato',
    'recurrent', 'nonrecurrent', 'almost_periodic', 'periodic', 'equicontinuity', 'minimal_point',
    'fixed_points', 'li_yorke', 'li_yorke_sensitive', 'minimal_m1', 'minimal_m2', 'preimage_cover',
) + WEAK_KINDS


def _cell(space: SpaceSpec, report: PropertyReport, index: int, refine_by: Optional[str] = None) -> RegionSet:
    cover = CoverSpec(space, Fraction(report.parameters['w']))
    if refine_by:
        cover = cover.refined(Fraction(report.parameters[refine_by]))
    return cover.cells[index]


def replay_witness(report: PropertyReport, space: SpaceSpec, s) -> bool:
    """
    Re-verify a FailsWitness report from its stored witness

    Sensitivity, transitivity, accessibility, periodicity, recurrence and M2
    witnesses are re-checked with the primitives directly; other properties
    are re-run with the stored parameters.

    Returns:
        bool: True when the witness still demonstrates the failure
    """
    if not report.fails:
        raise BadParameter("only FailsWitness reports carry a replayable witness")
    witness = report.witnesses[0]
    params = report.parameters
    name = report.property
    horizon = int(params.get('T', 0))

    if name in SENSITIVITY_CLASSES:
        cell = _cell(space, report, witness['cell'], 'delta')
        sample = sensitivity_hits(cell, Fraction(params['delta']), s, horizon)
        if list(sample.members) != witness['hits']['members']:
            return False
        kind = SENSITIVITY_CLASSES[name]
        if kind is None:
            return not sample.members
        k = int(params.get('k', 1))
        verdict, _ = _cell_verdict(sample, kind, k, params.get('theta'), params.get('sub_horizon'))
        return verdict is Verdict.FAILS
    if name == 'multi_sensitive':
        cover = CoverSpec(space, Fraction(params['w'])).refined(Fraction(params['delta']))
        common = None
        for index in witness['cells']:
            members = set(sensitivity_hits(cover.cells[index], Fraction(params['delta']), s, horizon).members)
            common = members if common is None else common & members
        return not common
    if name == 'transitive':
        i, j = witness['pair']
        return not hitting_set(_cell(space, report, i), _cell(space, report, j), s, horizon).members
    if name == 'weakly_mixing':
        (a, b), (c, d) = witness['pairs']
        first = hitting_set(_cell(space, report, a), _cell(space, report, b), s, horizon)
        second = hitting_set(_cell(space, report, c), _cell(space, report, d), s, horizon)
        return not set(first.members) & set(second.members)
    if name == 'mixing':
        i, j = witness['pair']
        sample = hitting_set(_cell(space, report, i), _cell(space, report, j), s, horizon)
        return classify(sample, 'cofinite').verdict is Verdict.FAILS
    if name == 'accessible':
        i, j = witness['pair']
        u, v = _cell(space, report, i), _cell(space, report, j)
        epsilon = Fraction(params['epsilon'])
        return all(a.gap(b) >= epsilon for (_, a), (_, b) in zip(window_images(u, s, horizon),
                                                                 window_images(v, s, horizon)))
    if name == 'periodic':
        x = parse_point(space, witness['point'])
        points = orbit_points(space, x, s, witness['n'] + witness['start'] - 1, witness['start'])
        return points[witness['n']] != x
    if name == 'recurrent':
        x = parse_point(space, witness['point'])
        return not _return_sample(space, x, s, Fraction(params['epsilon']), horizon).members
    if name == 'minimal_m2':
        x = parse_point(space, witness['point'])
        cell = _cell(space, report, witness['missed_cell'])
        return not any(cell.contains(p) for p in orbit_points(space, x, s, horizon))
    rerun = run_property(name, space, s, params)
    return rerun.fails and rerun.witnesses[0] == witness
