"""
Penalized least squares with the ``k log(e n1 n2 / k)`` complexity penalty.

The estimator minimizes::

    ||Y - A||_2^2 + lambda * ||A||_0 * log(e n1 n2 / (||A||_0 v 1))

over all ``n1 x n2`` matrices. For a fixed support size ``k`` the best
support is always the ``k`` largest entries of ``Y`` in magnitude, so the
global minimizer is found by sorting once and scanning ``k = 0 .. n1 n2``.
"""

import math

import numpy as np

from .config import settings
from .core import Base, RealMatrix, as_matrix
from .echo import Echo
from .exceptions import CapacityError, ParameterDomainError
from .noise import subgaussian_K
from .result import EstimateReport

__all__ = [
    'PenaltyConfig', 'penalty', 'penalties', 'threshold_schedule', 'printed_schedule',
    'keep_rule', 'estimate_pls', 'brute_force_pls', 'estimate_rowwise', 'rowwise_report',
]

# objectives closer than this (relative) are treated as ties
_TIE_RTOL = 1e-12

_echo = Echo()


class PenaltyConfig(Base):
    """
    The regularization ``lambda`` together with the oracle parameter ``a > 1``
    and the constant ``K0`` of ``lambda = 2 a K0 K^2``.
    """

    def __init__(self, lam, a=None, K0=None):

        super(PenaltyConfig, self).__init__()
        self.lam = float(lam)
        self.a = float(a if a is not None else settings.DEFAULT_A)
        self.K0 = float(K0 if K0 is not None else settings.DEFAULT_K0)
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ParameterDomainError("lambda must be positive, got %r." % self.lam)
        if not self.a > 1:
            raise ParameterDomainError("a must be > 1, got %r." % self.a)
        if not self.K0 > 0:
            raise ParameterDomainError("K0 must be positive, got %r." % self.K0)

    @classmethod
    def for_noise(cls, spec, factor=None):
        '''
        ``lambda = factor * K^2``; with the default factor this is ``4 sigma^2``
        for Gaussian noise.
        '''
        factor = settings.DEFAULT_LAMBDA_FACTOR if factor is None else factor
        return cls(factor * subgaussian_K(spec) ** 2)

    @classmethod
    def from_oracle(cls, a, K0, K):

        return cls(2.0 * a * K0 * K ** 2, a=a, K0=K0)

    @property
    def K1(self):
        '''
        ``K0 K^2`` expressed through lambda: ``lambda / (2 a)``.
        '''
        return self.lam / (2.0 * self.a)

    def __repr__(self):

        return 'PenaltyConfig(lam=%r, a=%r, K0=%r)' % (self.lam, self.a, self.K0)

    def to_dict(self):

        return {'lambda': self.lam, 'a': self.a, 'K0': self.K0}

    @classmethod
    def from_dict(cls, data):

        try:
            return cls(data['lambda'], data.get('a'), data.get('K0'))
        except ParameterDomainError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ParameterDomainError("Invalid penalty document: %r (%s)" % (data, e))


def penalty(k, n1, n2, lam):

    size = n1 * n2
    if k != int(k) or not 0 <= k <= size:
        raise ParameterDomainError("k must be an integer in [0, %d], got %r." % (size, k))
    if k == 0:
        return 0.0
    return lam * k * math.log(math.e * size / k)


def penalties(n1, n2, lam):
    '''
    ``penalty(k)`` for every ``k`` in ``0 .. n1 n2``.
    '''
    size = n1 * n2
    k = np.arange(size + 1, dtype=float)
    out = np.zeros(size + 1)
    out[1:] = lam * k[1:] * (1.0 + math.log(size) - np.log(k[1:]))
    return out


def threshold_schedule(n1, n2, lam):
    """
    The marginal penalty increments ``t_j = penalty(j) - penalty(j - 1)``.

    ``t_j = lambda (log(e n1 n2) - j log j + (j - 1) log(j - 1))``, which is
    non-increasing because ``x log x`` is convex. The entry ``y_(j)`` is worth
    keeping exactly when ``y_(j)^2 > t_j``.
    """
    size = n1 * n2
    j = np.arange(1, size + 1, dtype=float)
    jlogj = j * np.log(j)
    previous = np.concatenate(([0.0], jlogj[:-1]))
    return lam * (1.0 + math.log(size) - jlogj + previous)


def printed_schedule(n1, n2, lam):
    '''
    The alternating sum ``lambda (log(e n1 n2) + sum_{i=2}^{j} (-1)^(i+j+1) i log i)``.

    Agrees with ``threshold_schedule`` for ``j <= 3`` only.
    '''
    size = n1 * n2
    out = np.empty(size)
    alternating = 0.0
    for j in range(1, size + 1):
        if j >= 2:
            alternating = -j * math.log(j) - alternating
        out[j - 1] = lam * (1.0 + math.log(size) + alternating)
    return out


def keep_rule(sorted_squares, schedule):
    '''
    Returns ``(first_crossing, last_crossing)`` of ``y_(j)^2 > t_j``.
    '''
    above = np.asarray(sorted_squares) > np.asarray(schedule)
    if not above.any():
        return 0, 0
    below = np.flatnonzero(~above)
    first = int(below[0]) if below.size else int(above.size)
    last = int(np.flatnonzero(above)[-1]) + 1
    return first, last


def _ordering(values):

    return np.argsort(-np.abs(values), kind='stable')


def estimate_pls(Y, cfg):
    """
    Exact global minimizer of the penalized least squares criterion.

    Entries are ranked by magnitude (ties by row-major index); the kept set is
    the top ``k*`` entries, with ``k*`` the smallest minimizer of the scanned
    objective. Kept entries carry their observed values.
    """
    Y = as_matrix(Y)
    values = Y.entries.ravel()
    order = _ordering(values)
    squares = values[order] ** 2

    # tail[k] = sum_{j > k} y_(j)^2, accumulated from the smallest entry up
    tail = np.concatenate((np.cumsum(squares[::-1])[::-1], [0.0]))
    objective = tail + penalties(Y.n1, Y.n2, cfg.lam)
    best = objective.min()
    k_star = int(np.flatnonzero(objective <= best + _TIE_RTOL * max(1.0, abs(best)))[0])

    kept = np.zeros(values.size)
    kept[order[:k_star]] = values[order[:k_star]]
    schedule = threshold_schedule(Y.n1, Y.n2, cfg.lam)
    first, last = keep_rule(squares, schedule)
    if first != k_star or last != k_star:
        _echo.debug('keep-rule crossings (%d, %d) differ from k*=%d', first, last, k_star)

    return EstimateReport(
        RealMatrix(kept.reshape(Y.shape)),
        k_star,
        objective[k_star],
        squares[k_star - 1] if k_star > 0 else float('inf'),
        schedule=schedule,
        first_crossing=first,
        last_crossing=last,
    )


def _support_codes(size):

    codes = np.arange(2 ** size, dtype=np.int64)
    return ((codes[:, None] >> np.arange(size)) & 1).astype(bool)


def brute_force_pls(Y, cfg):
    """
    Exhaustive minimization over all ``2^(n1 n2)`` supports.

    Ties go to the smallest support, then the lexicographically smallest one.
    """
    Y = as_matrix(Y)
    size = Y.n1 * Y.n2
    cap = settings.BRUTE_FORCE_CAP
    if size > cap:
        raise CapacityError("Brute force is limited to n1*n2 <= %d, got %d." % (cap, size))

    values = Y.entries.ravel()
    masks = _support_codes(size)
    sizes = masks.sum(axis=1)
    objective = (~masks).astype(float).dot(values ** 2) + penalties(Y.n1, Y.n2, cfg.lam)[sizes]
    best = objective.min()
    candidates = np.flatnonzero(objective <= best + _TIE_RTOL * max(1.0, abs(best)))
    chosen = min(candidates, key=lambda c: (sizes[c], tuple(np.flatnonzero(masks[c]))))

    support = masks[chosen]
    k_star = int(sizes[chosen])
    kept = np.where(support, values, 0.0)
    squares = values[support] ** 2
    return EstimateReport(
        RealMatrix(kept.reshape(Y.shape)),
        k_star,
        objective[chosen],
        squares.min() if k_star > 0 else float('inf'),
    )


def _row_reports(Y, cfg):

    Y = as_matrix(Y)
    return [estimate_pls(RealMatrix(row[None, :]), cfg) for row in Y.entries]


def estimate_rowwise(Y, cfg):
    """
    Applies ``estimate_pls`` to every row separately (penalty with ``n1 = 1``).
    """
    reports = _row_reports(Y, cfg)
    return RealMatrix(np.vstack([r.m_hat.entries for r in reports]))


def rowwise_report(Y, cfg):
    '''
    The row-wise estimate with ``k*``, objective and keep-rule crossings
    summed over rows. The schedule is the one every row shares (``n1 = 1``).
    '''
    Y = as_matrix(Y)
    reports = _row_reports(Y, cfg)
    return EstimateReport(
        RealMatrix(np.vstack([r.m_hat.entries for r in reports])),
        sum(r.k_star for r in reports),
        math.fsum(r.objective_value for r in reports),
        min(r.kept_threshold for r in reports),
        schedule=threshold_schedule(1, Y.n2, cfg.lam),
        first_crossing=sum(r.first_crossing for r in reports),
        last_crossing=sum(r.last_crossing for r in reports),
    )
