"""
Binary row-sparse patterns, greedy Varshamov-Gilbert packings and the
certificates the lower bound argument needs.

A pattern is an ``n1 x n2`` 0/1 matrix with exactly ``s`` ones per row. A
packing is a family of patterns whose pairwise Hamming distance is at least
``d_min``. Three constructions are exposed::

    pack = vg_pack(4, 16, 2, d_min=1, budget=1000, seed=7)      # greedy
    wide = embed_replicate(base, s=3, n2=20)                     # copies of one-sparse rows
    full = embed_pad_ones(half, s=4, n2=18)                      # all-ones columns appended

Scaling a packing by ``sigma gamma sqrt(log(e n2/s))`` gives the hypotheses
of the hard-sparsity lower bound; ``scale_pack`` does that and the soft
variant.
"""

import json
import math

import numpy as np

from .config import settings
from .core import Base, RealMatrix, SparsityClass, as_matrix, in_class, norm_2p
from .echo import Echo
from .exceptions import DimensionMismatchError, ParameterDomainError
from .noise import make_generator
from .result import PackCertificate

__all__ = [
    'CONSTRUCTIONS', 'BinaryPattern', 'PackingSet', 'sample_pattern', 'hamming',
    'pairwise_distances', 'vg_pack', 'embed_replicate', 'embed_pad_ones',
    'row_disagreement', 'kl_gaussian', 'scale_pack', 'verify_pack', 'required_distance',
    'disagreement_violations', 'kl_violations', 'separation_violations',
]

CONSTRUCTIONS = ('greedy', 'replicate_embed', 'pad_ones_embed')

_echo = Echo()


class BinaryPattern(Base):
    """
    A 0/1 matrix with the same number ``s`` of ones in every row.
    """

    def __init__(self, entries):

        super(BinaryPattern, self).__init__()
        array = np.array(entries)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ParameterDomainError("A pattern needs a 2-d shape, got %s." % (array.shape,))
        if not np.all((array == 0) | (array == 1)):
            raise ParameterDomainError("Pattern entries must be 0 or 1.")
        array = array.astype(np.uint8)
        weights = array.sum(axis=1)
        if not np.all(weights == weights[0]):
            raise ParameterDomainError(
                "Every row must hold the same number of ones, got %s." % (weights.tolist(),))
        array.setflags(write=False)
        self.__entries = array

    @classmethod
    def from_supports(cls, supports, n2):
        '''
        Builds a pattern from one list of column indices per row.
        '''
        array = np.zeros((len(supports), n2), dtype=np.uint8)
        for i, columns in enumerate(supports):
            array[i, list(columns)] = 1
        return cls(array)

    @property
    def entries(self):

        return self.__entries

    @property
    def n1(self):

        return self.__entries.shape[0]

    @property
    def n2(self):

        return self.__entries.shape[1]

    @property
    def s(self):

        return int(self.__entries[0].sum())

    def supports(self):

        return [np.flatnonzero(row).tolist() for row in self.__entries]

    def to_matrix(self, amplitude=1.0):

        return RealMatrix(amplitude * self.__entries.astype(float))

    def __eq__(self, other):

        if not isinstance(other, BinaryPattern):
            return NotImplemented
        return bool(np.array_equal(self.__entries, other.entries))

    def __ne__(self, other):

        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):

        return 'BinaryPattern(%r)' % (self.supports(),)


def pairwise_distances(patterns):
    """
    Hamming distance matrix of a list of equally shaped patterns.
    """
    if len(patterns) == 0:
        return np.zeros((0, 0), dtype=int)
    X = np.vstack([p.entries.ravel() for p in patterns]).astype(np.int64)
    return X.dot(1 - X.T) + (1 - X).dot(X.T)


class PackingSet(Base):
    """
    A family of patterns with a required separation.

    ``d_min_achieved`` is the true pairwise minimum (``None`` for fewer than
    two patterns). ``stopped_by`` records why a greedy construction ended:
    ``'budget'`` after the run of rejections, ``'max_size'`` at the size cap.
    """

    def __init__(self, patterns, s, d_min_required, construction='greedy', stopped_by=None):

        super(PackingSet, self).__init__()
        if construction not in CONSTRUCTIONS:
            raise ParameterDomainError("Unknown construction '%s'." % construction)
        patterns = list(patterns)
        if not patterns:
            raise ParameterDomainError("A packing needs at least one pattern.")
        shape = (patterns[0].n1, patterns[0].n2)
        for p in patterns:
            if (p.n1, p.n2) != shape:
                raise DimensionMismatchError("Pattern shapes differ: %s vs %s." % (shape, (p.n1, p.n2)))
            if p.s != s:
                raise ParameterDomainError("Pattern has %d ones per row, expected %d." % (p.s, s))
        self.patterns = patterns
        self.s = int(s)
        self.d_min_required = int(d_min_required)
        self.construction = construction
        self.stopped_by = stopped_by
        self.distances = pairwise_distances(patterns)
        if len(patterns) > 1:
            off_diagonal = self.distances[~np.eye(len(patterns), dtype=bool)]
            self.d_min_achieved = int(off_diagonal.min())
        else:
            self.d_min_achieved = None

    @property
    def n1(self):

        return self.patterns[0].n1

    @property
    def n2(self):

        return self.patterns[0].n2

    @property
    def log_cardinality(self):

        return math.log(len(self.patterns))

    @property
    def is_valid(self):

        return self.d_min_achieved is None or self.d_min_achieved >= self.d_min_required

    def __len__(self):

        return len(self.patterns)

    def to_dict(self):

        return {
            'n1': self.n1,
            'n2': self.n2,
            's': self.s,
            'construction': self.construction,
            'd_min_required': self.d_min_required,
            'd_min_achieved': self.d_min_achieved,
            'log_cardinality': self.log_cardinality,
            'stopped_by': self.stopped_by,
            'patterns': [p.supports() for p in self.patterns],
        }

    @classmethod
    def from_dict(cls, data):

        patterns = [BinaryPattern.from_supports(rows, data['n2']) for rows in data['patterns']]
        return cls(patterns, data['s'], data['d_min_required'],
                   data.get('construction', 'greedy'), data.get('stopped_by'))

    def to_json(self):

        return json.dumps(self.to_dict())


def _check_same_shape(A, B):

    if A.entries.shape != B.entries.shape:
        raise DimensionMismatchError(
            "Shapes differ: %s vs %s." % (A.entries.shape, B.entries.shape))


def hamming(A, B):

    _check_same_shape(A, B)
    return int(np.count_nonzero(A.entries != B.entries))


def sample_pattern(n1, n2, s, rng):
    """
    Uniform pattern: each row an independent uniform ``s``-subset of columns.
    """
    columns = np.argsort(rng.random((n1, n2)), axis=1)[:, :s]
    array = np.zeros((n1, n2), dtype=np.uint8)
    np.put_along_axis(array, columns, 1, axis=1)
    return BinaryPattern(array)


def required_distance(n1, s):
    '''
    Minimum Hamming separation ``n1 (s + 1) / 16`` a packing must reach.
    '''
    return n1 * (s + 1) / 16.0


def vg_pack(n1, n2, s, d_min, budget, seed, max_size=None):
    """
    Greedy randomized Varshamov-Gilbert packing.

    Uniform patterns are drawn and accepted when they are at distance at least
    ``d_min`` from every accepted pattern. Drawing stops after ``budget``
    consecutive rejections or once ``max_size`` patterns are accepted.
    """
    if s != int(s) or not 1 <= s <= n2 / 2.0:
        raise ParameterDomainError("s must be an integer in [1, n2/2] = [1, %g], got %r." % (n2 / 2.0, s))
    if budget < 1 or d_min < 1:
        raise ParameterDomainError("budget and d_min must be positive.")
    max_size = settings.PACK_MAX_SIZE if max_size is None else max_size
    rng = make_generator(seed, (0,))

    accepted = [sample_pattern(n1, n2, s, rng)]
    flat = [accepted[0].entries.ravel()]
    stack = np.vstack(flat)
    rejections = 0
    stopped_by = 'budget'
    while rejections < budget:
        if len(accepted) >= max_size:
            stopped_by = 'max_size'
            break
        candidate = sample_pattern(n1, n2, s, rng)
        distances = np.count_nonzero(stack != candidate.entries.ravel(), axis=1)
        if distances.min() >= d_min:
            accepted.append(candidate)
            stack = np.vstack((stack, candidate.entries.ravel()))
            rejections = 0
        else:
            rejections += 1

    _echo.debug('greedy pack n1=%d n2=%d s=%d d_min=%d: %d patterns (stopped by %s)',
                n1, n2, s, d_min, len(accepted), stopped_by)
    return PackingSet(accepted, s, d_min, 'greedy', stopped_by)


def embed_replicate(base, s, n2):
    """
    Embeds a one-sparse packing of width ``floor(n2 / s)`` by writing each
    pattern ``s`` times side by side and padding with zero columns.

    Distances scale by ``s``.
    """
    if base.s != 1:
        raise ParameterDomainError("The base packing must have one 1 per row, got %d." % base.s)
    width = n2 // s if s >= 1 else 0
    if s < 1 or base.n2 != width:
        raise DimensionMismatchError(
            "Base width %d does not match floor(n2/s) = %d." % (base.n2, width))
    pad = np.zeros((base.n1, n2 - s * width), dtype=np.uint8)
    patterns = [BinaryPattern(np.hstack([p.entries] * s + [pad])) for p in base.patterns]
    return PackingSet(patterns, s, s * base.d_min_required, 'replicate_embed')


def embed_pad_ones(base, s, n2):
    """
    Raises the row weight of a packing from ``s'`` to ``s`` by appending
    ``s - s'`` all-ones columns. Distances are unchanged.
    """
    extra = s - base.s
    if extra < 0 or n2 != base.n2 + extra:
        raise DimensionMismatchError(
            "Widths do not add up: n2=%d, base width %d, s - s' = %d." % (n2, base.n2, extra))
    if base.s != s // 2:
        _echo.debug("pad-ones embedding with s'=%d, s=%d (s' = s // 2 is the usual choice)", base.s, s)
    ones = np.ones((base.n1, extra), dtype=np.uint8)
    patterns = [BinaryPattern(np.hstack((p.entries, ones))) for p in base.patterns]
    return PackingSet(patterns, s, base.d_min_required, 'pad_ones_embed')


def row_disagreement(A, B, s):
    '''
    Number of rows where ``A`` and ``B`` disagree in more than ``s / 32`` places.
    '''
    _check_same_shape(A, B)
    per_row = np.count_nonzero(A.entries != B.entries, axis=1)
    return int(np.count_nonzero(per_row > s / 32.0))


def kl_gaussian(B, B_prime, sigma):
    """
    ``KL(P_B, P_B') = ||B - B'||_2^2 / (2 sigma^2)`` for Gaussian noise.
    """
    B, B_prime = as_matrix(B), as_matrix(B_prime)
    if B.shape != B_prime.shape:
        raise DimensionMismatchError("Shapes differ: %s vs %s." % (B.shape, B_prime.shape))
    if not sigma > 0:
        raise ParameterDomainError("sigma must be positive, got %r." % sigma)
    diff = B.entries - B_prime.entries
    return float(np.sum(diff ** 2) / (2.0 * sigma ** 2))


def hard_amplitude(n2, s, sigma, gamma):

    return sigma * gamma * math.sqrt(math.log(math.e * n2 / s))


def scale_pack(pack, gamma, sigma, mode='hard', q=None, tau=None, delta_bar=None, S=None):
    """
    Turns a packing into hypothesis matrices.

    ``mode='hard'`` multiplies every pattern by ``sigma gamma sqrt(log(e n2/s))``.
    ``mode='soft'`` multiplies by ``tau (delta_bar / S)^(1/q)``; the result
    must lie in ``A(q, delta_bar)``. ``S`` defaults to the pattern weight.
    """
    if mode == 'hard':
        if not 0 < gamma < 1:
            raise ParameterDomainError("gamma must lie in (0, 1), got %r." % gamma)
        if not sigma > 0:
            raise ParameterDomainError("sigma must be positive, got %r." % sigma)
        amplitude = hard_amplitude(pack.n2, pack.s, sigma, gamma)
        return [p.to_matrix(amplitude) for p in pack.patterns]

    if mode != 'soft':
        raise ParameterDomainError("mode must be 'hard' or 'soft', got %r." % (mode,))
    if q is None or not 0 < q < 2:
        raise ParameterDomainError("soft mode needs q in (0, 2), got %r." % (q,))
    if tau is None or not 0 < tau <= 1:
        raise ParameterDomainError("tau must lie in (0, 1], got %r." % (tau,))
    if delta_bar is None or not delta_bar > 0:
        raise ParameterDomainError("delta_bar must be positive, got %r." % (delta_bar,))
    S = pack.s if S is None else S
    amplitude = tau * (float(delta_bar) / S) ** (1.0 / q)
    hypotheses = [p.to_matrix(amplitude) for p in pack.patterns]
    target = SparsityClass(q, delta_bar)
    for B in hypotheses:
        # row l_q sum is s * amplitude^q, allow rounding in the last place
        if not in_class(B * (1.0 - 1e-12), target):
            raise ParameterDomainError(
                "Soft hypotheses leave A(q=%g, s=%g); check tau, delta_bar and S." % (q, delta_bar))
    return hypotheses


def verify_pack(pack, C_target):
    """
    Recomputes the minimum distance exhaustively and checks it against the
    required separation ``n1 (s + 1) / 16``, and ``log|Omega|``
    against ``C_target n1 s log(e n2 / s)``.
    """
    distances = pairwise_distances(pack.patterns)
    if len(pack) > 1:
        d_min = int(distances[~np.eye(len(pack), dtype=bool)].min())
    else:
        d_min = None
    target = C_target * pack.n1 * pack.s * math.log(math.e * pack.n2 / pack.s)
    return PackCertificate(len(pack), d_min, required_distance(pack.n1, pack.s),
                           pack.log_cardinality, target, C_target)


def _pairs(count):

    for i in range(count):
        for j in range(i + 1, count):
            yield i, j


def disagreement_violations(pack):
    '''
    Pairs meeting ``d_H >= n1 (s + 1) / 16`` whose row disagreement count falls
    below ``n1 / 64``.
    '''
    floor = required_distance(pack.n1, pack.s)
    violations = []
    for i, j in _pairs(len(pack)):
        if pack.distances[i, j] >= floor:
            rows = row_disagreement(pack.patterns[i], pack.patterns[j], pack.s)
            if rows < pack.n1 / 64.0:
                violations.append((i, j))
    return violations


def kl_violations(hypotheses, sigma, gamma, n1, n2, s):
    '''
    Pairs whose divergence exceeds ``gamma^2 n1 s log(e n2 / s)``.
    '''
    bound = gamma ** 2 * n1 * s * math.log(math.e * n2 / s)
    return [(i, j) for i, j in _pairs(len(hypotheses))
            if kl_gaussian(hypotheses[i], hypotheses[j], sigma) > bound * (1 + 1e-12)]


def separation_violations(pack, hypotheses, p, sigma, gamma):
    '''
    Pairs meeting the separation premise whose ``||B - B'||_{2,p}^2`` falls below
    ``(gamma^2 sigma^2 / 64^(1 + 2/p)) n1^(2/p) s log(e n2 / s)``.
    '''
    n1, n2, s = pack.n1, pack.n2, pack.s
    floor = (gamma ** 2 * sigma ** 2 / 64.0 ** (1 + 2.0 / p)) * \
        n1 ** (2.0 / p) * s * math.log(math.e * n2 / s)
    premise = required_distance(n1, s)
    violations = []
    for i, j in _pairs(len(hypotheses)):
        if pack.distances[i, j] >= premise:
            if norm_2p(hypotheses[i] - hypotheses[j], p) ** 2 < floor * (1 - 1e-12):
                violations.append((i, j))
    return violations
