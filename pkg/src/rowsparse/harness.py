"""
Monte Carlo experiments around the penalized least squares estimator.

Every random draw in an experiment is addressed by ``(base_seed, stream)``
with the stream tuples below, so results do not depend on the number of
worker threads::

    noise of trial t at grid point g   (NOISE_STREAM, g, t)
    signal of grid point g             (SIGNAL_STREAM, g)
    noise of tail-check trial t        (TAIL_STREAM, t)

A typical run::

    cfg = ExperimentConfig(grid=[(2, 32, 2), (4, 32, 2), (8, 32, 2), (16, 32, 2)], trials=200)
    fit = rate_sweep(cfg, rate='hard')
    fit.print_summary()
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import numpy as np
from scipy.stats import linregress

from .config import settings
from .core import Base, RealMatrix, as_matrix, l0_count, norm_2p, norm_lq, truncate_rows
from .echo import Echo
from .estimator import PenaltyConfig, estimate_pls, estimate_rowwise, penalty
from .exceptions import (CapacityError, DegenerateGridError, InvalidConfigError,
                         ParameterDomainError, RowSparseError)
from .noise import NoiseSpec, make_generator, observe, sample_noise, subgaussian_K
from .packing import hard_amplitude, sample_pattern
from .rates import ProblemDims, psi_soft, rate_hard
from .result import OracleGapReport, RateFit, RiskReport, TailCurve

__all__ = [
    'ExperimentConfig', 'worst_case_signal', 'soft_signal', 'mc_risk', 'rate_sweep',
    'oracle_gap', 'projected_noise_stat', 'projected_noise_stat_bruteforce', 'tail_check',
    'compare_rowwise', 'grid_signal', 'tail_deltas', 'RATES',
]

NOISE_STREAM = 0
SIGNAL_STREAM = 1
TAIL_STREAM = 2

RATES = ('hard', 'soft')

ESTIMATORS = ('pls', 'rowwise')

# largest n1*n2 the exhaustive projected-noise oracle accepts
BRUTE_FORCE_STAT_CAP = 16

_echo = Echo()


class ExperimentConfig(Base):
    """
    Grid, noise, penalty and Monte Carlo settings of an experiment.

    ``ROWSPARSE_SEED`` in the environment replaces ``base_seed``.
    """

    params_map = {
        'grid': {'required': True},
        'noise': {'required': False},
        'penalty': {'required': False},
        'p': {'required': False},
        'q': {'required': False},
        'trials': {'required': False},
        'base_seed': {'required': False},
        'gamma': {'required': False},
        'workers': {'required': False},
        'estimator': {'required': False},
    }

    def __init__(self, grid, noise=None, penalty=None, p=2.0, trials=100, base_seed=None,
                 gamma=None, workers=None, q=0.0, estimator='pls'):

        super(ExperimentConfig, self).__init__()
        grid = [tuple(point) for point in grid]
        if not grid:
            raise ParameterDomainError("The experiment grid is empty.")
        for point in grid:
            if len(point) != 3:
                raise ParameterDomainError("Grid points are (n1, n2, s), got %r." % (point,))
        if int(trials) < 1:
            raise ParameterDomainError("trials must be >= 1, got %r." % trials)
        if not p > 0:
            raise ParameterDomainError("p must be positive, got %r." % p)
        if estimator not in ESTIMATORS:
            raise ParameterDomainError("estimator must be one of %s." % ', '.join(ESTIMATORS))
        self.grid = [(int(n1), int(n2), s) for n1, n2, s in grid]
        self.noise = noise if noise is not None else NoiseSpec.gaussian(1.0)
        self.penalty = penalty if penalty is not None else PenaltyConfig.for_noise(self.noise)
        self.p = float(p)
        self.q = float(q)
        self.trials = int(trials)
        self.base_seed = settings.resolve_seed(base_seed)
        self.gamma = float(gamma if gamma is not None else settings.DEFAULT_GAMMA)
        self.workers = int(workers if workers is not None else settings.WORKERS)
        self.estimator = estimator

    # scalar keys of a config file and how each is read
    converters = {
        'p': float,
        'q': float,
        'trials': int,
        'base_seed': int,
        'gamma': float,
        'workers': int,
    }

    @classmethod
    def validate_config(cls, config):
        '''
        Makes sure all the required fields are there and nothing unknown is.
        '''
        if not isinstance(config, dict):
            raise InvalidConfigError(
                "Invalid Configuration! Expected an object, got %s." % type(config).__name__)
        for key, key_config in cls.params_map.items():
            if key_config['required'] and key not in config:
                raise InvalidConfigError(
                    "Invalid Configuration! Required parameter '%s' was not provided." % key)
        for key in config.keys():
            if key not in cls.params_map:
                raise InvalidConfigError(
                    "Invalid Configuration! The parameter '%s' is not used by rowsparse." % key)

    @classmethod
    def from_dict(cls, config):

        cls.validate_config(config)
        config = dict(config)
        config['grid'] = _read_value('grid', config['grid'], _grid_points)
        for key, convert in cls.converters.items():
            if config.get(key) is not None:
                config[key] = _read_value(key, config[key], convert)
        if 'noise' in config:
            config['noise'] = NoiseSpec.from_dict(config['noise'])
        if 'penalty' in config:
            config['penalty'] = PenaltyConfig.from_dict(config['penalty'])
        try:
            return cls(**config)
        except RowSparseError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidConfigError("Invalid Configuration! %s" % e)

    @classmethod
    def load(cls, path):

        with open(path) as f:
            try:
                data = json.load(f)
            except ValueError as e:
                raise InvalidConfigError("Config file '%s' is not valid JSON: %s" % (path, e))
        return cls.from_dict(data)

    def to_dict(self):

        return {
            'grid': [list(point) for point in self.grid],
            'noise': self.noise.to_dict(),
            'penalty': self.penalty.to_dict(),
            'p': self.p,
            'q': self.q,
            'trials': self.trials,
            'base_seed': self.base_seed,
            'gamma': self.gamma,
            'workers': self.workers,
            'estimator': self.estimator,
        }

    def trial_noise(self, grid_index, trial_index):

        return self.noise.reseeded(self.base_seed, (NOISE_STREAM, grid_index, trial_index))


def _read_value(key, value, convert):

    try:
        return convert(value)
    except (TypeError, ValueError):
        raise InvalidConfigError(
            "Invalid Configuration! Parameter '%s' has an invalid value %r." % (key, value))


def _grid_points(grid):

    points = []
    for point in grid:
        n1, n2, s = (float(v) for v in point)
        if not (n1.is_integer() and n2.is_integer()):
            raise ValueError("n1 and n2 must be integers")
        points.append((int(n1), int(n2), int(s) if s.is_integer() else s))
    return points


def _map(func, items, workers):

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def worst_case_signal(n1, n2, s, sigma, gamma, seed, stream=()):
    """
    A uniform row ``s``-sparse pattern scaled by ``sigma gamma sqrt(log(e n2/s))``,
    the amplitude of the hard sparsity lower bound hypotheses.
    """
    if s != int(s) or not 1 <= s <= n2 / 2.0:
        raise ParameterDomainError("s must be an integer in [1, n2/2], got %r." % s)
    if not 0 < gamma < 1:
        raise ParameterDomainError("gamma must lie in (0, 1), got %r." % gamma)
    pattern = sample_pattern(n1, n2, int(s), make_generator(seed, stream))
    return pattern.to_matrix(hard_amplitude(n2, s, sigma, gamma))


def soft_signal(n1, n2, q, s, seed, stream=()):
    """
    A random matrix on the boundary of ``A(q, s)``.

    Each row has magnitudes proportional to ``j^(-1/q)`` on a random column
    order with random signs, scaled so that ``sum_j |m_ij|^q = s``.
    """
    if not 0 < q < 2:
        raise ParameterDomainError("q must lie in (0, 2), got %r." % q)
    if not s > 0:
        raise ParameterDomainError("s must be positive, got %r." % s)
    rng = make_generator(seed, stream)
    base = np.arange(1, n2 + 1, dtype=float) ** (-1.0 / q)
    # keeps rows inside B_q(s) after rounding
    scale = (s / np.sum(base ** q)) ** (1.0 / q) * (1.0 - 1e-12)
    rows = []
    for _ in range(n1):
        magnitudes = scale * base[rng.permutation(n2)]
        signs = rng.choice((-1.0, 1.0), size=n2)
        rows.append(signs * magnitudes)
    return RealMatrix(np.vstack(rows))


def _estimate(Y, cfg):

    if cfg.estimator == 'rowwise':
        return estimate_rowwise(Y, cfg.penalty)
    return estimate_pls(Y, cfg.penalty).m_hat


def mc_risk(M, cfg, grid_index=0, label=None):
    """
    Monte Carlo estimate of ``E ||M_hat - M||_{2,p}^2`` over ``cfg.trials``
    independent noise draws.
    """
    M = as_matrix(M)
    started = time.perf_counter()

    def trial(t):
        Y = observe(M, cfg.trial_noise(grid_index, t))
        return norm_2p(_estimate(Y, cfg) - M, cfg.p) ** 2

    values = _map(trial, range(cfg.trials), cfg.workers)
    report = RiskReport(values, label=label, n1=M.n1, n2=M.n2,
                        s=cfg.grid[grid_index][2] if grid_index < len(cfg.grid) else None,
                        p=cfg.p, elapsed=time.perf_counter() - started)
    _echo.debug('risk at %dx%d: mean=%g stderr=%g (%d trials, %.2fs)',
                M.n1, M.n2, report.mean, report.stderr, report.trials, report.elapsed)
    return report


def grid_signal(cfg, grid_index, rate):
    '''
    Signal of one grid point together with its rate value.
    '''
    n1, n2, s = cfg.grid[grid_index]
    K = subgaussian_K(cfg.noise)
    stream = (SIGNAL_STREAM, grid_index)
    if rate == 'hard':
        M = worst_case_signal(n1, n2, s, K, cfg.gamma, cfg.base_seed, stream)
        return M, rate_hard(ProblemDims(n1, n2, s, 0, K, cfg.p))
    M = soft_signal(n1, n2, cfg.q, s, cfg.base_seed, stream)
    return M, psi_soft(ProblemDims(n1, n2, s, cfg.q, K, 2.0, K))


def _grid_rates(cfg, rate):

    K = subgaussian_K(cfg.noise)
    if rate == 'hard':
        return [rate_hard(ProblemDims(n1, n2, s, 0, K, cfg.p)) for n1, n2, s in cfg.grid]
    return [psi_soft(ProblemDims(n1, n2, s, cfg.q, K, 2.0, K)) for n1, n2, s in cfg.grid]


def rate_sweep(cfg, rate='hard', min_points=4, min_range=4.0):
    """
    Mean risk at every grid point, regressed on the rate in log-log scale.

    ``rate='hard'`` uses worst case ``A(s)`` signals against ``rate_hard``;
    ``rate='soft'`` uses boundary ``A(q, s)`` signals against ``psi_soft``
    (``p = 2`` only).
    """
    if rate not in RATES:
        raise ParameterDomainError("rate must be one of %s, got %r." % (', '.join(RATES), rate))
    if not 0 < cfg.p <= 2:
        raise ParameterDomainError("Rate comparisons need 0 < p <= 2, got %r." % cfg.p)
    if rate == 'soft' and (cfg.p != 2 or not 0 < cfg.q < 2):
        raise ParameterDomainError("The soft sweep needs p=2 and 0 < q < 2.")
    if len(cfg.grid) < min_points:
        raise DegenerateGridError("A rate sweep needs at least %d grid points, got %d."
                                  % (min_points, len(cfg.grid)))
    rates = _grid_rates(cfg, rate)
    spread = max(rates) / min(rates)
    if spread < min_range:
        raise DegenerateGridError("The grid spans a rate range of %.3gx, need at least %gx."
                                  % (spread, min_range))

    risks = []
    for g in range(len(cfg.grid)):
        M, _ = grid_signal(cfg, g, rate)
        risks.append(mc_risk(M, cfg, g, label=rate))
    means = np.array([r.mean for r in risks])
    if np.any(means <= 0):
        raise DegenerateGridError("Zero mean risk at some grid point; nothing to fit in log scale.")
    fit = linregress(np.log(rates), np.log(means))
    return RateFit(fit.slope, fit.intercept, fit.rvalue ** 2, rates, risks, rate_name=rate)


def oracle_gap(M, cfg, a=None, probes=(), truncations=(), delta=0.0, level=None):
    """
    Per trial gaps of the oracle inequality.

    For every trial the left side is ``||M - M_hat||_2^2`` and, for each probe
    ``A``, the right side is::

        (a+1)/(a-1) ||M - A||_2^2 + C K^2 ||A||_0 log(e n1 n2 / (||A||_0 v 1)) + slack

    with ``slack = 2 a^2 / (a - 1) * delta``. The probes always include ``M``
    and the zero matrix; ``truncations`` adds ``truncate_rows(M, s')``.
    The report holds, per trial, the smallest ``C`` that makes the bound hold
    against every probe at once.
    """
    M = as_matrix(M)
    a = cfg.penalty.a if a is None else float(a)
    if not a > 1:
        raise ParameterDomainError("a must be > 1, got %r." % a)
    level = settings.COVERAGE_LEVEL if level is None else level
    K = subgaussian_K(cfg.noise)
    slack = 2.0 * a ** 2 / (a - 1.0) * delta

    candidates = [M, RealMatrix.zeros(M.n1, M.n2)]
    candidates += [as_matrix(A) for A in probes]
    candidates += [truncate_rows(M, s_prime) for s_prime in truncations]
    factor = (a + 1.0) / (a - 1.0)
    bias = np.array([factor * norm_lq(M - A, 2) ** 2 for A in candidates])
    complexity = np.array([penalty(l0_count(A), M.n1, M.n2, K ** 2) for A in candidates])

    def trial(t):
        Y = observe(M, cfg.trial_noise(0, t))
        lhs = norm_lq(M - estimate_pls(Y, cfg.penalty).m_hat, 2) ** 2
        excess = lhs - slack - bias
        needed = np.where(excess <= 0, 0.0,
                          np.where(complexity > 0, excess / np.where(complexity > 0, complexity, 1.0),
                                   np.inf))
        return lhs, float(needed.max())

    outcomes = _map(trial, range(cfg.trials), cfg.workers)
    lhs = [o[0] for o in outcomes]
    required = [o[1] for o in outcomes]
    return OracleGapReport(lhs, required, a, slack, level)


def projected_noise_stat(E, K1):
    """
    ``max_r (sum of the r largest squared entries of E - K1 r log(e n1 n2 / r))``.

    Projecting ``E`` on a support of size ``r`` keeps exactly those entries,
    so the best projection of size ``r`` is the top-``r`` sum and one sorted
    scan over ``r`` suffices.
    """
    if not K1 >= 0:
        raise ParameterDomainError("K1 must be non-negative, got %r." % K1)
    E = as_matrix(E)
    squares = np.sort(E.entries.ravel() ** 2)[::-1]
    size = squares.size
    r = np.arange(1, size + 1, dtype=float)
    return float(np.max(np.cumsum(squares) - K1 * r * np.log(math.e * size / r)))


def projected_noise_stat_bruteforce(E, K1):
    '''
    The same statistic with the maximum taken over every support explicitly.
    '''
    E = as_matrix(E)
    size = E.n1 * E.n2
    if size > BRUTE_FORCE_STAT_CAP:
        raise CapacityError("Exhaustive support enumeration is limited to n1*n2 <= %d."
                            % BRUTE_FORCE_STAT_CAP)
    flat = E.entries.ravel() ** 2
    r = np.arange(1, size + 1, dtype=float)
    penalty_r = K1 * r * np.log(math.e * size / r)
    best = -np.inf
    for k in range(1, size + 1):
        for support in combinations(range(size), k):
            # summed largest first, the order the sorted scan uses
            energy = np.cumsum(np.sort(flat[list(support)])[::-1])[-1]
            best = max(best, float(energy - penalty_r[k - 1]))
    return best


def tail_deltas(K):
    '''
    Log-spaced grid for ``tail_check``.
    '''
    low, high = settings.TAIL_GRID_RANGE
    return np.geomspace(low * K ** 2, high * K ** 2, settings.TAIL_GRID_POINTS)


def tail_check(noise, n1, n2, K1, trials, base_seed=None, deltas=None, workers=None):
    """
    Empirical exceedance curve of ``projected_noise_stat`` under ``noise``.
    """
    if trials < 100:
        raise ParameterDomainError("tail_check needs at least 100 trials, got %r." % trials)
    seed = settings.resolve_seed(base_seed)
    workers = settings.WORKERS if workers is None else workers
    deltas = tail_deltas(subgaussian_K(noise)) if deltas is None else deltas

    def trial(t):
        E = sample_noise(n1, n2, noise.reseeded(seed, (TAIL_STREAM, t)))
        return projected_noise_stat(E, K1)

    stats = _map(trial, range(int(trials)), workers)
    return TailCurve(deltas, stats, K1)


def compare_rowwise(M, cfg, grid_index=0):
    """
    Risks of the global and the row-wise estimator on the same noise draws.

    Returns ``(global_report, rowwise_report, agree)`` with ``agree`` true
    when the means are within two combined standard errors.
    """
    reports = []
    for estimator in ESTIMATORS:
        variant = ExperimentConfig(cfg.grid, cfg.noise, cfg.penalty, cfg.p, cfg.trials,
                                   cfg.base_seed, cfg.gamma, cfg.workers, cfg.q, estimator)
        # keep the caller's seed even when ROWSPARSE_SEED is set
        variant.base_seed = cfg.base_seed
        reports.append(mc_risk(M, variant, grid_index, label=estimator))
    whole, rowwise = reports
    spread = 2.0 * math.sqrt(whole.stderr ** 2 + rowwise.stderr ** 2)
    return whole, rowwise, abs(whole.mean - rowwise.mean) <= spread
