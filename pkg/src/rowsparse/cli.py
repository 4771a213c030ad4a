"""
Command line entry point.

::

    rowsparse simulate --config exp.json --out risks.csv
    rowsparse sweep --config exp.json --rate hard --out fit.svg --format svg
    rowsparse check oracle --config exp.json
    rowsparse check tail --n1 8 --n2 32 --K1 4 --trials 200
    rowsparse check pack --n1 4 --n2 16 --s 2 --budget 100000
    rowsparse rates --n1 8 --n2 64 --s 2 --q 1
    rowsparse estimate --input Y.csv --lambda 4 --output Mhat.csv --report report.json
    rowsparse pack --n1 4 --n2 16 --s 2 --dmin 1 --budget 1000 --seed 7 --out pack.json

Exit status is 0 on success, 2 when a check fails and 1 on usage errors.
"""

import argparse
import json
import math
import sys

from . import __version__
from .config import settings
from .core import RealMatrix
from .echo import Echo
from .emit import FORMATS, emit
from .estimator import PenaltyConfig, estimate_pls, rowwise_report
from .exceptions import EmitError, InvalidConfigError, RowSparseError
from .harness import (RATES, ExperimentConfig, grid_signal, mc_risk, oracle_gap, rate_sweep,
                      tail_check)
from .noise import FAMILIES, NoiseSpec
from .packing import (disagreement_violations, embed_pad_ones, embed_replicate, kl_violations,
                      required_distance, scale_pack, separation_violations, verify_pack, vg_pack)
from .rates import ProblemDims, rate_summary

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

PACK_CONSTRUCTIONS = ('greedy', 'replicate', 'pad')

echo = Echo()


class ArgumentParser(argparse.ArgumentParser):
    '''
    Usage errors exit with status 1.
    '''

    def error(self, message):

        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def _add_noise_flags(parser):

    parser.add_argument('--noise', choices=FAMILIES, default=None, help='noise family')
    parser.add_argument('--sigma', '--scale', dest='scale', type=float, default=None,
                        help='sigma for gaussian noise, the scale a otherwise')
    parser.add_argument('--seed', type=int, default=None, help='base seed (ROWSPARSE_SEED wins)')


def _add_experiment_flags(parser):

    parser.add_argument('--config', required=True, help='experiment config (JSON)')
    parser.add_argument('--trials', type=int, default=None)
    parser.add_argument('--workers', type=int, default=None)
    _add_noise_flags(parser)


def _add_output_flags(parser, default_format='json'):

    parser.add_argument('--out', default=None, help='write results to this file')
    parser.add_argument('--format', choices=FORMATS, default=default_format)


def _pack_flags(parser):

    parser.add_argument('--n1', type=int, required=True)
    parser.add_argument('--n2', type=int, required=True)
    parser.add_argument('--s', type=int, required=True)
    parser.add_argument('--dmin', type=int, default=None,
                        help='required distance, default ceil(n1 (s+1) / 16)')
    parser.add_argument('--budget', type=int, default=10 ** 5)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--max-size', dest='max_size', type=int, default=None)
    parser.add_argument('--construction', choices=PACK_CONSTRUCTIONS, default='greedy')
    parser.add_argument('--C-target', dest='C_target', type=float, default=1e-5)


def build_parser():

    parser = ArgumentParser(prog='rowsparse',
                            description='Row-sparse matrix estimation experiments.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--quiet', action='store_true', help='only print warnings and errors')
    commands = parser.add_subparsers(dest='command', parser_class=ArgumentParser)
    commands.required = True

    simulate = commands.add_parser('simulate', help='Monte Carlo risk at every grid point')
    _add_experiment_flags(simulate)
    simulate.add_argument('--rate', choices=RATES, default='hard')
    _add_output_flags(simulate, 'csv')

    sweep = commands.add_parser('sweep', help='fit mean risk against a rate formula')
    _add_experiment_flags(sweep)
    sweep.add_argument('--rate', choices=RATES, default='hard')
    sweep.add_argument('--min-slope', dest='min_slope', type=float, default=0.8)
    sweep.add_argument('--max-slope', dest='max_slope', type=float, default=1.2)
    sweep.add_argument('--min-r2', dest='min_r2', type=float, default=0.95)
    _add_output_flags(sweep, 'csv')

    check = commands.add_parser('check', help='verification suites')
    suites = check.add_subparsers(dest='suite', parser_class=ArgumentParser)
    suites.required = True

    oracle = suites.add_parser('oracle', help='oracle inequality coverage')
    _add_experiment_flags(oracle)
    oracle.add_argument('--a', type=float, default=None)
    oracle.add_argument('--truncation', type=int, action='append', default=[],
                        help="add truncate_rows(M, s') as a probe; repeatable")
    oracle.add_argument('--delta', type=float, default=0.0)
    oracle.add_argument('--rate', choices=RATES, default='hard')
    _add_output_flags(oracle)

    tail = suites.add_parser('tail', help='projected noise exceedance curve')
    tail.add_argument('--n1', type=int, required=True)
    tail.add_argument('--n2', type=int, required=True)
    tail.add_argument('--K1', type=float, default=None, help='default lambda / (2 a) for lambda = 4 K^2')
    tail.add_argument('--trials', type=int, default=200)
    tail.add_argument('--workers', type=int, default=None)
    _add_noise_flags(tail)
    _add_output_flags(tail)

    pack_check = suites.add_parser('pack', help='packing certificates')
    _pack_flags(pack_check)
    pack_check.add_argument('--gamma', type=float, default=0.3)
    pack_check.add_argument('--sigma', type=float, default=1.0)
    pack_check.add_argument('--p', type=float, default=2.0)
    _add_output_flags(pack_check)

    rates = commands.add_parser('rates', help='closed form rates as JSON')
    rates.add_argument('--n1', type=int, required=True)
    rates.add_argument('--n2', type=int, required=True)
    rates.add_argument('--s', type=float, required=True)
    rates.add_argument('--q', type=float, default=0.0)
    rates.add_argument('--sigma', type=float, default=1.0)
    rates.add_argument('--p', type=float, default=2.0)
    rates.add_argument('--K', type=float, default=None)
    rates.add_argument('--c-prime', dest='c_prime', type=float, default=1.0)

    estimate = commands.add_parser('estimate', help='run the estimator on a matrix file')
    estimate.add_argument('--input', required=True)
    estimate.add_argument('--lambda', dest='lam', type=float, required=True)
    estimate.add_argument('--rowwise', action='store_true')
    estimate.add_argument('--output', required=True)
    estimate.add_argument('--report', default=None)

    pack = commands.add_parser('pack', help='build a packing and its certificate')
    _pack_flags(pack)
    pack.add_argument('--out', required=True)

    return parser


def _noise_from_args(args, base=None):

    if args.noise is None and args.scale is None:
        return base
    family = args.noise or (base.family if base is not None else 'gaussian')
    scale = args.scale if args.scale is not None else (base.param if base is not None else 1.0)
    # a K override only holds for the family it was set for
    K = base.K if base is not None and base.family == family else None
    return NoiseSpec(family, scale, K=K)


def _load_config(args):

    with open(args.config) as f:
        try:
            data = json.load(f)
        except ValueError as e:
            raise InvalidConfigError("Config file '%s' is not valid JSON: %s" % (args.config, e))
    ExperimentConfig.validate_config(data)
    noise = _noise_from_args(args, NoiseSpec.from_dict(data['noise']) if 'noise' in data else None)
    if noise is not None:
        data['noise'] = noise.to_dict()
    for key, value in (('base_seed', args.seed), ('trials', args.trials), ('workers', args.workers)):
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def _finish(results, args):

    for result in results:
        result.print_summary()
    if args.out:
        emit(results, args.format, args.out)
        echo.info('wrote %s', args.out)


def cmd_simulate(args):

    cfg = _load_config(args)
    reports = []
    for g in range(len(cfg.grid)):
        M, _ = grid_signal(cfg, g, args.rate)
        reports.append(mc_risk(M, cfg, g, label=args.rate))
    _finish(reports, args)
    return EXIT_OK


def cmd_sweep(args):

    cfg = _load_config(args)
    fit = rate_sweep(cfg, rate=args.rate)
    _finish([fit], args)
    if not (args.min_slope <= fit.slope <= args.max_slope and fit.r_squared >= args.min_r2):
        echo.error('slope %.4f / R^2 %.4f outside [%g, %g] / >= %g', fit.slope, fit.r_squared,
                   args.min_slope, args.max_slope, args.min_r2)
        return EXIT_FAILED
    return EXIT_OK


def cmd_check_oracle(args):

    cfg = _load_config(args)
    M, _ = grid_signal(cfg, 0, args.rate)
    report = oracle_gap(M, cfg, a=args.a, truncations=args.truncation, delta=args.delta)
    _finish([report], args)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_check_tail(args):

    noise = _noise_from_args(args) or NoiseSpec.gaussian(1.0)
    K1 = args.K1
    if K1 is None:
        K1 = PenaltyConfig.for_noise(noise).K1
    curve = tail_check(noise, args.n1, args.n2, K1, args.trials, args.seed, workers=args.workers)
    _finish([curve], args)
    return EXIT_OK if curve.passed else EXIT_FAILED


def _build_pack(args):

    seed = settings.resolve_seed(args.seed)
    dmin = args.dmin if args.dmin is not None else int(math.ceil(required_distance(args.n1, args.s)))
    dmin = max(1, dmin)
    if args.construction == 'greedy':
        return vg_pack(args.n1, args.n2, args.s, dmin, args.budget, seed, args.max_size)
    if args.construction == 'replicate':
        base = vg_pack(args.n1, args.n2 // args.s, 1, max(1, int(math.ceil(dmin / float(args.s)))),
                       args.budget, seed, args.max_size)
        return embed_replicate(base, args.s, args.n2)
    half = max(1, args.s // 2)
    base = vg_pack(args.n1, args.n2 - (args.s - half), half, dmin, args.budget, seed, args.max_size)
    return embed_pad_ones(base, args.s, args.n2)


def cmd_check_pack(args):

    pack = _build_pack(args)
    certificate = verify_pack(pack, args.C_target)
    hypotheses = scale_pack(pack, args.gamma, args.sigma)
    disagreement = disagreement_violations(pack)
    kl = kl_violations(hypotheses, args.sigma, args.gamma, pack.n1, pack.n2, pack.s)
    separation = separation_violations(pack, hypotheses, args.p, args.sigma, args.gamma)
    _finish([certificate], args)
    echo.info('row disagreement violations: %d, KL violations: %d, separation violations: %d',
              len(disagreement), len(kl), len(separation))
    if certificate.passed and not (disagreement or kl or separation):
        return EXIT_OK
    return EXIT_FAILED


def cmd_rates(args):

    d = ProblemDims(args.n1, args.n2, args.s, args.q, args.sigma, args.p, args.K)
    print(json.dumps(rate_summary(d, args.c_prime), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_estimate(args):

    Y = RealMatrix.read(args.input)
    cfg = PenaltyConfig(args.lam)
    report = rowwise_report(Y, cfg) if args.rowwise else estimate_pls(Y, cfg)
    report.m_hat.write(args.output)
    report.print_summary()
    if args.report:
        emit(report, 'json', args.report)
    return EXIT_OK


def cmd_pack(args):

    pack = _build_pack(args)
    certificate = verify_pack(pack, args.C_target)
    certificate.print_summary()
    data = pack.to_dict()
    data['certificate'] = certificate.to_dict()
    try:
        with open(args.out, 'w') as f:
            json.dump(data, f, indent=2)
    except OSError as e:
        raise EmitError(args.out, e.strerror or str(e))
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    ('check', 'oracle'): cmd_check_oracle,
    ('check', 'tail'): cmd_check_tail,
    ('check', 'pack'): cmd_check_pack,
    'rates': cmd_rates,
    'estimate': cmd_estimate,
    'pack': cmd_pack,
}


def main(argv=None):

    args = build_parser().parse_args(argv)
    level = echo.logger.level
    if args.quiet:
        echo.logger.setLevel('WARNING')
    key = (args.command, args.suite) if args.command == 'check' else args.command
    try:
        return COMMANDS[key](args)
    except RowSparseError as e:
        echo.error('%s', e)
        return EXIT_USAGE
    except (IOError, OSError) as e:
        echo.error('%s', e)
        return EXIT_USAGE
    finally:
        echo.logger.setLevel(level)


if __name__ == '__main__':
    sys.exit(main())
