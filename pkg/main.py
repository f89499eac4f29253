#!/usr/bin/env python3
"""
Non-autonomous Dynamics Toolkit - Command-Line Entry Point

Batch front end over the library: load a system document (or a gallery
fixture by name), run an operation, print a deterministic report.

Subcommands:
- eval: f_i^N(p) for one point
- orbit: the orbit as CSV rows n,point
- hits: a hitting set N(U,V) or N(U,delta), or a separation curve
- classify: classifier verdict on a hitting set
- check: a property detector report
- compare: period, shift or implication transfer cases
- example: list, run or show gallery fixtures
- schema: the published system JSON schema

Exit codes: 0 Holds/pass, 2 Fails, 3 Inconclusive, 1 usage or IO error.
"""

import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence

import config
from detectors import PROPERTY_NAMES, run_property
from error_handler import (
    ErrorContext, NDSError, error_summary, log_system_event, setup_logging
)
from gallery import get_fixture, list_fixtures, load_system, run_fixture
from hitting_index import CLASS_KINDS, classify, hitting_set, separation_curve, sensitivity_hits
from models import SYSTEM_SCHEMA, ReportVerdict, Verdict
from core_maps import compile_window, evaluate
from reductions import THEOREMS, implication_compare, shift_compare, transfer_compare
from utils import (
    canonical_json, document_hash, format_point, optional_rational, parse_point, parse_rational, parse_region,
    write_csv
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILS = 2

# Command-line flags that map onto detector parameters, with the document default key
PARAMETER_FLAGS = {
    'delta': 'delta',
    'epsilon': 'epsilon',
    'horizon': 'T',
    'cover': 'w',
    'theta': 'theta',
    'L': 'L',
    'eta': 'eta',
    'k': 'k',
    'm': 'm',
    'sub_horizon': 'sub_horizon',
    'budget': 'budget',
}
RATIONAL_PARAMETERS = ('delta', 'epsilon', 'w', 'theta', 'eta')


class UsageError(Exception):
    """Raised by the argument parser instead of exiting"""


class ToolkitArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _verdict_exit(verdict: Verdict) -> int:
    return ReportVerdict.from_verdict(verdict).exit_code


def _emit(payload: Any, stream) -> None:
    stream.write(canonical_json(payload))


def _envelope(command: str, source: str, document: dict, parameters: dict, result: Any) -> dict:
    return {
        'command': command,
        'system': source,
        'document_hash': document_hash(document),
        'parameters': parameters,
        'result': result,
    }


def _collect_parameters(args, document: dict) -> Dict[str, Any]:
    """Document defaults overridden by command-line flags; rationals stay "p/q" strings"""
    params = dict(document.get('defaults', {}))
    for flag, key in PARAMETER_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            params[key] = value
    for key in RATIONAL_PARAMETERS:
        if key in params:
            params[key] = str(parse_rational(params[key]))
    point = getattr(args, 'point', None)
    if point is not None:
        params['point'] = point
    return params


# Subcommand handlers

def cmd_eval(args, out) -> int:
    space, s, document = load_system(args.system)
    x = parse_point(space, args.point)
    image = evaluate(compile_window(s, args.start, args.n), x)
    parameters = {'point': args.point, 'start': args.start, 'n': args.n}
    _emit(_envelope('eval', args.system, document, parameters, {'image': format_point(space, image)}), out)
    return EXIT_OK


def cmd_orbit(args, out) -> int:
    space, s, document = load_system(args.system)
    x = parse_point(space, args.point)
    rows = []
    current = x
    for n in range(1, args.horizon + 1):
        current = evaluate(s.map_at(args.start + n - 1), current)
        rows.append((n, format_point(space, current)))
    write_csv(out, ('n', 'point'), rows)
    log_system_event("[CLI] orbit", f"document_hash={document_hash(document)} rows={len(rows)}")
    return EXIT_OK


def _hit_sample(args, space, s):
    u = parse_region(space, args.U)
    if args.V is not None:
        return hitting_set(u, parse_region(space, args.V), s, args.horizon)
    if args.delta is None:
        raise UsageError("hits needs --V or --delta")
    return sensitivity_hits(u, parse_rational(args.delta), s, args.horizon)


def cmd_hits(args, out) -> int:
    space, s, document = load_system(args.system)
    if args.emit_curve:
        rows = separation_curve(parse_region(space, args.U), s, args.horizon)
        write_csv(out, ('n', 'diam'), rows)
        log_system_event("[CLI] curve", f"document_hash={document_hash(document)} rows={len(rows)}")
        return EXIT_OK
    sample = _hit_sample(args, space, s)
    parameters = {'U': args.U, 'V': args.V, 'delta': args.delta, 'T': args.horizon}
    _emit(_envelope('hits', args.system, document, parameters, sample.to_dict()), out)
    return EXIT_OK


def cmd_classify(args, out) -> int:
    space, s, document = load_system(args.system)
    sample = _hit_sample(args, space, s)
    result = classify(sample, args.kind, k=args.k,
                      theta=optional_rational(args.theta),
                      sub_horizon=args.sub_horizon)
    parameters = {'U': args.U, 'V': args.V, 'delta': args.delta, 'T': args.horizon, 'kind': args.kind,
                  'k': args.k, 'theta': args.theta, 'sub_horizon': args.sub_horizon}
    _emit(_envelope('classify', args.system, document, parameters,
                    {'sample': sample.to_dict(), 'classifier': result.to_dict()}), out)
    return _verdict_exit(result.verdict)


def cmd_check(args, out) -> int:
    space, s, document = load_system(args.system)
    params = _collect_parameters(args, document)
    if args.points:
        params['points'] = args.points
    report = run_property(args.property, space, s, params)
    _emit(_envelope('check', args.system, document, params, report.to_dict()), out)
    return report.verdict.exit_code


def cmd_compare(args, out) -> int:
    space, s, document = load_system(args.system)
    params = _collect_parameters(args, document)
    system_id = args.system if args.system in list_fixtures() else document_hash(document)
    if args.mode == 'period':
        case = transfer_compare(s, space, args.property, params, system=system_id, period=args.period)
    elif args.mode == 'shift':
        case = shift_compare(s, space, args.n, args.property, params, system=system_id)
    else:
        if not args.tag:
            raise UsageError("compare --mode implication needs --tag")
        case = implication_compare(s, space, args.tag, params, system=system_id)
    _emit(_envelope('compare', args.system, document, params, case.to_dict()), out)
    return case.exit_code


def cmd_example(args, out) -> int:
    if args.action == 'list':
        _emit({'fixtures': list_fixtures()}, out)
        return EXIT_OK
    if not args.name:
        raise UsageError(f"example {args.action} needs a fixture name")
    fixture = get_fixture(args.name)
    if args.action == 'show':
        _emit(fixture.to_dict(), out)
        return EXIT_OK
    diff = run_fixture(args.name)
    _emit({'fixture': args.name, 'document_hash': document_hash(fixture.document),
           'entries': len(fixture.manifest), 'diff': diff}, out)
    return EXIT_OK if not diff else EXIT_FAILS


def cmd_schema(args, out) -> int:
    _emit(SYSTEM_SCHEMA, out)
    return EXIT_OK


def _add_system(parser) -> None:
    parser.add_argument('--system', required=True, help='fixture name or path to a system JSON document')


def _add_parameters(parser) -> None:
    parser.add_argument('--delta', help='separation threshold "p/q"')
    parser.add_argument('--epsilon', help='closeness threshold "p/q"')
    parser.add_argument('--horizon', type=int, help='finite horizon T')
    parser.add_argument('--cover', help='cover cell scale w "p/q"')
    parser.add_argument('--theta', help='density threshold "p/q"')
    parser.add_argument('--eta', help='proximality threshold "p/q"')
    parser.add_argument('--L', type=int, help='word length bound for weak scans')
    parser.add_argument('--k', type=int, help='period, run length or multiplier')
    parser.add_argument('--m', type=int, help='family size for multi-sensitivity')
    parser.add_argument('--sub-horizon', dest='sub_horizon', type=int, help='classifier trend horizon')
    parser.add_argument('--budget', type=int, help='pair budget for sampled scans')
    parser.add_argument('--point', help='point literal for point properties')


def _add_region_args(parser) -> None:
    _add_system(parser)
    parser.add_argument('--U', dest='U', required=True, help='source region literal')
    parser.add_argument('--V', dest='V', help='target region literal')
    parser.add_argument('--delta', help='diameter threshold "p/q"')
    parser.add_argument('--horizon', type=int, default=100)


def build_parser() -> ToolkitArgumentParser:
    parser = ToolkitArgumentParser(prog='nds', description='Exact experiments on non-autonomous dynamical systems')
    parser.add_argument('--log-level', default=config.LOG_LEVEL)
    parser.add_argument('--workers', type=int, help='thread workers for cell-level work')
    subparsers = parser.add_subparsers(dest='command', parser_class=ToolkitArgumentParser)

    s = subparsers.add_parser('eval', help='image of a point under a window')
    _add_system(s)
    s.add_argument('--point', required=True)
    s.add_argument('--n', type=int, required=True)
    s.add_argument('--start', type=int, default=1)
    s.set_defaults(handler=cmd_eval)

    s = subparsers.add_parser('orbit', help='orbit rows as CSV')
    _add_system(s)
    s.add_argument('--point', required=True)
    s.add_argument('--horizon', type=int, default=100)
    s.add_argument('--start', type=int, default=1)
    s.set_defaults(handler=cmd_orbit)

    s = subparsers.add_parser('hits', help='hitting set or separation curve')
    _add_region_args(s)
    s.add_argument('--emit-curve', dest='emit_curve', action='store_true', help='CSV rows n,diam')
    s.set_defaults(handler=cmd_hits)

    s = subparsers.add_parser('classify', help='classify a hitting set')
    _add_region_args(s)
    s.add_argument('--kind', required=True, choices=CLASS_KINDS)
    s.add_argument('--k', type=int)
    s.add_argument('--theta')
    s.add_argument('--sub-horizon', dest='sub_horizon', type=int)
    s.set_defaults(handler=cmd_classify)

    s = subparsers.add_parser('check', help='run a property detector')
    _add_system(s)
    s.add_argument('--property', required=True, choices=PROPERTY_NAMES)
    _add_parameters(s)
    s.add_argument('--points', nargs='*', help='extra points for minimality')
    s.set_defaults(handler=cmd_check)

    s = subparsers.add_parser('compare', help='transfer-theorem comparison')
    _add_system(s)
    s.add_argument('--mode', required=True, choices=('period', 'shift', 'implication'))
    s.add_argument('--property', help='property for period and shift modes')
    s.add_argument('--period', type=int, help='period k for the induced map')
    s.add_argument('--n', type=int, default=2, help='tail start for shift mode')
    s.add_argument('--tag', choices=[tag for tag, theorem in THEOREMS.items() if theorem.mode == 'implication'])
    _add_parameters(s)
    s.set_defaults(handler=cmd_compare)

    s = subparsers.add_parser('example', help='gallery fixtures')
    s.add_argument('action', choices=('list', 'run', 'show'))
    s.add_argument('name', nargs='?')
    s.set_defaults(handler=cmd_example)

    s = subparsers.add_parser('schema', help='print the system JSON schema')
    s.set_defaults(handler=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    """
    Run one subcommand

    Returns:
        int: the exit code
    """
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as e:
        err.write(f"{e}\n")
        return EXIT_USAGE

    setup_logging(args.log_level, config.LOG_FILE)
    if args.workers is not None:
        config.WORKERS = max(1, args.workers)
    if not getattr(args, 'handler', None):
        err.write(parser.format_usage())
        return EXIT_USAGE
    if args.command == 'compare' and args.mode != 'implication' and not args.property:
        err.write(f"compare --mode {args.mode} needs --property\n")
        return EXIT_USAGE

    context = ErrorContext(f"cli_{args.command}")
    try:
        with context:
            return args.handler(args, out)
    except UsageError as e:
        err.write(f"{e}\n")
    except (NDSError, OSError, ValueError) as e:
        err.write(f"{context.error_message or e}\n")
    logger.debug(f"[CLI] error counters: {error_summary()}")
    return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
