"""
Constant-free minimax rates for row-sparse matrix estimation.

Hard sparsity (``q = 0``)::

    rate_hard = sigma^2 n1^(2/p) s log(e n2 / s)

Soft sparsity (``0 < q < 2``, squared Frobenius loss)::

    eta(s) = n1 s [sigma^2 log(1 + sigma^q n2 / s)]^(1 - q/2)  v  n1 s^(2/q)  v  n1 n2 sigma^2

``psi_soft`` is the same expression with the sub-Gaussian constant ``K`` in
place of ``sigma``. None of these carry the absolute constants of the bounds;
the harness fits those empirically.
"""

import math

import numpy as np
from scipy.special import gammaln

from .config import settings
from .core import Base
from .echo import Echo
from .exceptions import ParameterDomainError

__all__ = [
    'ProblemDims', 'rate_hard', 'eta_vect', 'eta_soft', 'psi_soft', 'dominant_term',
    'solve_k', 'solve_k_detail', 'balance_sprime', 'balance_sprime_detail',
    'log_model_count', 'soft_lower_plan', 'rate_summary',
]

TERM_LABELS = ('sparse', 'ball', 'dense')

_echo = Echo()


class ProblemDims(Base):
    """
    Dimensions and noise level of one problem instance.

    ``K`` defaults to ``sigma`` (the Gaussian convention).
    """

    def __init__(self, n1, n2, s, q=0.0, sigma=1.0, p=2.0, K=None):

        super(ProblemDims, self).__init__()
        if n1 < 1 or n2 < 1:
            raise ParameterDomainError("n1 and n2 must be >= 1, got %r, %r." % (n1, n2))
        if not 0 <= q < 2:
            raise ParameterDomainError("q must lie in [0, 2), got %r." % q)
        if not s > 0:
            raise ParameterDomainError("s must be positive, got %r." % s)
        if not sigma > 0 or not p > 0:
            raise ParameterDomainError("sigma and p must be positive.")
        if K is not None and not K > 0:
            raise ParameterDomainError("K must be positive, got %r." % K)
        self.n1, self.n2 = int(n1), int(n2)
        self.s = float(s)
        self.q = float(q)
        self.sigma = float(sigma)
        self.p = float(p)
        self.K = float(K) if K is not None else self.sigma

    def __repr__(self):

        return ('ProblemDims(n1=%d, n2=%d, s=%r, q=%r, sigma=%r, p=%r, K=%r)'
                % (self.n1, self.n2, self.s, self.q, self.sigma, self.p, self.K))


def rate_hard(d):
    """
    ``sigma^2 n1^(2/p) s log(e n2 / s)``.
    """
    if d.s < 1:
        raise ParameterDomainError("The hard rate needs s >= 1, got %r." % d.s)
    if d.s > d.n2 / 2.0:
        _echo.warn('s=%g exceeds n2/2=%g; the hard lower bound is not claimed there', d.s, d.n2 / 2.0)
    return d.sigma ** 2 * d.n1 ** (2.0 / d.p) * d.s * math.log(math.e * d.n2 / d.s)


def _soft_terms(n2, s, scale, q):

    sparse = s * (scale ** 2 * math.log(1.0 + scale ** q * n2 / s)) ** (1.0 - q / 2.0)
    ball = s ** (2.0 / q)
    dense = n2 * scale ** 2
    return sparse, ball, dense


def eta_vect(n2, s, sigma, q):
    """
    Minimax rate for one ``n2``-vector in ``B_q(s)``.
    """
    if not 0 <= q < 2:
        raise ParameterDomainError("q must lie in [0, 2), got %r." % q)
    if q == 0:
        return sigma ** 2 * s * math.log(math.e * n2 / s)
    return max(_soft_terms(n2, s, sigma, q))


def _check_soft(d):

    if d.q == 0:
        raise ParameterDomainError("q=0 is the hard sparsity case; use rate_hard.")
    if d.p != 2:
        raise ParameterDomainError(
            "Soft sparsity rates are only available for p=2, got p=%r." % d.p)


def eta_soft(d):

    _check_soft(d)
    return max(d.n1 * t for t in _soft_terms(d.n2, d.s, d.sigma, d.q))


def psi_soft(d):

    _check_soft(d)
    return max(d.n1 * t for t in _soft_terms(d.n2, d.s, d.K, d.q))


def dominant_term(d, use_K=False):
    '''
    Which of the three soft terms wins: ``'sparse'``, ``'ball'`` or ``'dense'``.
    '''
    _check_soft(d)
    terms = _soft_terms(d.n2, d.s, d.K if use_K else d.sigma, d.q)
    return TERM_LABELS[int(np.argmax(terms))]


def _solve_k_violates(k, n2, s, sigma, q):
    '''
    True when ``k > s sigma^(-q) log(1 + n2/k)^(-q/2)``.

    Written as ``k log(1 + n2/k)^(q/2) > s sigma^(-q)``, whose left side is
    increasing in ``k``.
    '''
    return k * math.log(1.0 + float(n2) / k) ** (q / 2.0) > s * sigma ** (-q)


def solve_k_detail(n2, s, sigma, q, cap=None):
    """
    Largest integer ``k >= 1`` with ``k <= s sigma^(-q) log(1 + n2/k)^(-q/2)``,
    or 0 if ``k = 1`` already fails. Returns ``(k, capped)``; when every ``k``
    up to the cap satisfies the inequality the cap is returned with
    ``capped=True``.
    """
    if not 0 < q < 2:
        raise ParameterDomainError("q must lie in (0, 2), got %r." % q)
    cap = max(int(n2), settings.SOLVE_K_CAP) if cap is None else int(cap)
    if _solve_k_violates(1, n2, s, sigma, q):
        return 0, False
    if not _solve_k_violates(cap, n2, s, sigma, q):
        _echo.warn('solve_k reached its cap %d', cap)
        return cap, True

    # invariant: lo satisfies, hi violates
    lo, hi = 1, cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _solve_k_violates(mid, n2, s, sigma, q):
            hi = mid
        else:
            lo = mid
    assert not _solve_k_violates(lo, n2, s, sigma, q) and _solve_k_violates(lo + 1, n2, s, sigma, q)
    return lo, False


def solve_k(n2, s, sigma, q):

    return solve_k_detail(n2, s, sigma, q)[0]


def balance_sprime_detail(n2, s, K, q, c_prime=1.0):
    """
    ``s' = floor(c' (s / K^q) log(1 + n2 K^q / s)^(-q/2))`` clamped to
    ``[1, floor(n2/2)]``. Returns ``(s', clamp)`` with clamp ``None``,
    ``'low'`` or ``'high'``.
    """
    if not 0 < q <= 2:
        raise ParameterDomainError("q must lie in (0, 2], got %r." % q)
    if not c_prime > 0:
        raise ParameterDomainError("c_prime must be positive, got %r." % c_prime)
    raw = c_prime * (s / K ** q) * math.log(1.0 + n2 * K ** q / s) ** (-q / 2.0)
    value = int(math.floor(raw))
    upper = max(1, n2 // 2)
    if value < 1:
        _echo.debug('balance_sprime clamped %g up to 1', raw)
        return 1, 'low'
    if value > upper:
        _echo.debug('balance_sprime clamped %g down to %d', raw, upper)
        return upper, 'high'
    return value, None


def balance_sprime(n2, s, K, q, c_prime=1.0):

    return balance_sprime_detail(n2, s, K, q, c_prime)[0]


def log_model_count(n1, n2, s):
    '''
    ``n1 log C(n2, s)``: log of the number of row ``s``-sparse supports.
    '''
    return n1 * float(gammaln(n2 + 1) - gammaln(s + 1) - gammaln(n2 - s + 1))


def soft_lower_plan(d):
    """
    Parameters of the soft sparsity lower bound construction.

    ``k`` comes from ``solve_k``; ``S = max(k, 1) ^ n2/2`` is the row weight
    of the packing, ``case`` is 1 (``k = 0``), 2 (``1 <= k <= n2/2``) or 3
    (``k > n2/2``), and ``delta_bar`` the radius handed to ``scale_pack``.
    """
    if not 0 < d.q < 2:
        raise ParameterDomainError("q must lie in (0, 2), got %r." % d.q)
    k, capped = solve_k_detail(d.n2, d.s, d.sigma, d.q)
    k_bar = max(k, 1)
    S = min(k_bar, d.n2 // 2) if d.n2 >= 2 else 1
    if k == 0:
        case, delta_bar = 1, d.s
    elif k <= d.n2 / 2.0:
        case, delta_bar = 2, d.s
    else:
        case, delta_bar = 3, min(d.s, d.n2 * d.sigma ** d.q / 2.0)
    return {'k': k, 'capped': capped, 'k_bar': k_bar, 'S': S, 'case': case, 'delta_bar': delta_bar}


def rate_summary(d, c_prime=1.0):
    '''
    Every rate and intermediate quantity for ``d``, as a JSON-ready dict.
    '''
    out = {
        'n1': d.n1, 'n2': d.n2, 's': d.s, 'q': d.q, 'sigma': d.sigma, 'p': d.p, 'K': d.K,
        'eta_vect': eta_vect(d.n2, d.s, d.sigma, d.q),
    }
    if d.q == 0:
        out['rate_hard'] = rate_hard(d)
        out['rate_hard_K'] = rate_hard(ProblemDims(d.n1, d.n2, d.s, 0, d.K, d.p))
        if d.s <= d.n2:
            out['log_model_count'] = log_model_count(d.n1, d.n2, int(d.s))
        return out

    if d.p == 2:
        out['eta_soft'] = eta_soft(d)
        out['psi_soft'] = psi_soft(d)
        out['dominant_term'] = dominant_term(d)
        out['dominant_term_psi'] = dominant_term(d, use_K=True)
    else:
        out['soft_rates'] = 'unsupported for p != 2'
    k, capped = solve_k_detail(d.n2, d.s, d.sigma, d.q)
    sprime, clamp = balance_sprime_detail(d.n2, d.s, d.K, d.q, c_prime)
    out.update({
        'k': k, 'k_capped': capped,
        's_prime': sprime, 's_prime_clamp': clamp,
        'lower_plan': soft_lower_plan(d),
    })
    return out
