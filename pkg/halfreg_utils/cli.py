"""
Command line interface.

    halfreg check instance.json
    halfreg construct instance.json --out realization.csv
    halfreg sample instance.json --steps 1000 --seed 7 --out samples.ndjson --diagnostics diag.json
    halfreg enumerate instance.json --count-only
    halfreg path source.json target.json
    halfreg test-uniformity samples.ndjson --instance instance.json

Exit codes: 0 success, 1 invalid instance or failed check, 2 file or schema errors.
"""
import argparse
import json
import logging
import sys

from .adapter_utils import (JsonAdapter, NdjsonAdapter, RealizationAdapter,
                            parse_matrix_file, parse_realization_file,
                            sample_record)
from .config_utils import MODES, ChainConfig
from .construct_utils import construct_realization
from .errors import (DifferentInstances, HalfRegError, InvalidMatrix, IoError,
                     SchemaError)
from .mcmc_utils import ChainRunner, Diagnostics, run_chains
from .misc_utils import to_jsonable
from .model_utils import ColoredRealization
from .oracle_utils import enumerate_realizations
from .path_utils import transformation_path
from .stats_utils import tally_states, uniformity_test
from .version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f'{text} is negative')
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'{text} is not positive')
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only')

    parser = argparse.ArgumentParser(prog='halfreg', description='Half-regular degree matrix factorizations of complete bipartite graphs.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check', parents=[common], help='check the existence conditions of an instance')
    p.add_argument('instance', help='instance JSON file')

    p = sub.add_parser('construct', parents=[common], help='construct one realization')
    p.add_argument('instance', help='instance JSON file')
    p.add_argument('--out', help='output file (.json or .csv), stdout if omitted')

    p = sub.add_parser('sample', parents=[common], help='sample realizations with the Metropolis-Hastings chain')
    p.add_argument('instance', help='instance JSON file')
    p.add_argument('--steps', type=_non_negative, default=1000)
    p.add_argument('--burnin', type=_non_negative, default=0)
    p.add_argument('--thin', type=_positive, default=1)
    p.add_argument('--chains', type=_positive, default=1)
    p.add_argument('--seed', type=_non_negative, default=0)
    p.add_argument('--mode', choices=MODES, default='exactReplay')
    p.add_argument('--out', help='NDJSON sample stream, stdout if omitted')
    p.add_argument('--diagnostics', help='JSON file for chain diagnostics')

    p = sub.add_parser('enumerate', parents=[common], help='list every realization of a small instance')
    p.add_argument('instance', help='instance JSON file')
    p.add_argument('--count-only', action='store_true')
    p.add_argument('--out', help='output JSON file, stdout if omitted')

    p = sub.add_parser('path', parents=[common], help='transformation path between two realizations')
    p.add_argument('source', help='realization file (.json or .csv)')
    p.add_argument('target', help='realization file (.json or .csv)')
    p.add_argument('--k', type=_positive, default=None, help='number of colours of CSV realizations')
    p.add_argument('--out', help='output JSON file, stdout if omitted')

    p = sub.add_parser('test-uniformity', parents=[common], help='chi-square test of a sample stream against the uniform law')
    p.add_argument('samples', help="NDJSON sample stream, '-' for stdin")
    space = p.add_mutually_exclusive_group(required=True)
    space.add_argument('--states', type=_positive, help='size of the state space')
    space.add_argument('--instance', help='instance JSON file, the state space is enumerated')
    p.add_argument('--out', help='output JSON file, stdout if omitted')
    return parser


def configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('halfreg_utils').setLevel(level)


def _emit(obj, out=None):
    if out is None:
        sys.stdout.write(json.dumps(to_jsonable(obj)) + '\n')
    else:
        JsonAdapter().put(obj, out)


def _load_instance(path):
    M = parse_matrix_file(path)
    report = M.validate()
    if not report.ok:
        raise InvalidMatrix(report.describe())
    return M


def run_check(args):
    M = parse_matrix_file(args.instance)
    report = M.validate()
    _emit({**report.to_dict(), 'message': report.describe()})
    if not report.ok:
        logger.error(f'{args.instance}: {report.describe()}')
        return EXIT_INVALID
    logger.info(f'{args.instance}: {report.describe()}')
    return EXIT_OK


def run_construct(args):
    M = _load_instance(args.instance)
    R, history = construct_realization(M, return_history=True)
    logger.info(f'Exceed numbers: {history}')
    if args.out is None:
        _emit(R.to_dict())
    else:
        RealizationAdapter().put(R, args.out)
    return EXIT_OK


def run_sample(args):
    M = _load_instance(args.instance)
    config = ChainConfig(seed=args.seed, steps=args.steps, burnin=args.burnin, thin=args.thin, chains=args.chains, mode=args.mode)
    if config.chains == 1:
        runner = ChainRunner(M, config)
        NdjsonAdapter().put((sample_record(R, t) for t, R in runner.samples()), args.out)
        diagnostics = runner.diagnostics
    else:
        results = run_chains(M, config)
        NdjsonAdapter().put((sample_record(R, t, chain) for chain, samples, _ in results for t, R in samples), args.out)
        diagnostics = Diagnostics(M.m)
        for _, _, diag in results:
            diagnostics.merge(diag)
    assert diagnostics.is_consistent, 'step counters do not add up'
    if diagnostics.bound_violations or diagnostics.circuit_mismatches:
        logger.warning(f'{diagnostics.bound_violations} ratio bound violations, {diagnostics.circuit_mismatches} circuit mismatches.')
    if args.diagnostics is not None:
        JsonAdapter().put({**diagnostics.to_dict(), 'config': config.to_dict()}, args.diagnostics)
    return EXIT_OK


def run_enumerate(args):
    M = parse_matrix_file(args.instance)
    result = enumerate_realizations(M, count_only=args.count_only)
    logger.info(f'{result.count} realizations.')
    _emit(result.to_dict(), args.out)
    return EXIT_OK


def run_path(args):
    R1 = parse_realization_file(args.source, k=args.k)
    R2 = parse_realization_file(args.target, k=args.k)
    try:
        steps = transformation_path(R1, R2)
    except DifferentInstances as e:
        raise e.suggest(f'{args.source} and {args.target}')
    _emit({'length': len(steps), 'steps': [step.to_dict() for step in steps]}, args.out)
    return EXIT_OK


def run_test_uniformity(args):
    if args.instance is not None:
        size = enumerate_realizations(parse_matrix_file(args.instance), count_only=True).count
    else:
        size = args.states
    encodings = (ColoredRealization.from_dict(record).encode() for record in NdjsonAdapter().get(args.samples))
    counts = tally_states(encodings)
    stats = uniformity_test(counts, size)
    _emit({'chi2': stats.chi2, 'pValue': stats.p_value, 'tvDistance': stats.tv_distance,
           'degreesOfFreedom': stats.degrees_of_freedom, 'total': stats.total, 'distinctStates': len(counts),
           'stateSpaceSize': size}, args.out)
    return EXIT_OK


COMMANDS = {
    'check': run_check,
    'construct': run_construct,
    'sample': run_sample,
    'enumerate': run_enumerate,
    'path': run_path,
    'test-uniformity': run_test_uniformity,
}


def dispatch(args):
    """
    Runs a parsed command and maps errors onto exit codes.

    :param args: argparse.Namespace from build_parser
    :returns: exit code
    """
    try:
        return COMMANDS[args.command](args)
    except (IoError, SchemaError) as e:
        logger.error(f'{type(e).__name__}: {e}')
        return EXIT_IO
    except HalfRegError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return EXIT_INVALID


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)
    return dispatch(args)


if __name__ == '__main__':
    sys.exit(main())
