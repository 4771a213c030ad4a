"""
Seeded noise matrices and the observation model ``Y = M + E``.

Random streams follow one rule everywhere in the package: a generator is
``PCG64(SeedSequence(seed, spawn_key=stream))`` where ``stream`` is a tuple of
non-negative integers (for instance ``(grid_index, trial_index)``). The same
``(seed, stream)`` always gives the same numbers, whichever thread draws them.
Gaussian entries come from ``Generator.standard_normal`` (numpy's ziggurat).
"""

import json
import math

import numpy as np
from scipy.special import gammaln

from .core import Base, RealMatrix, as_matrix
from .exceptions import ParameterDomainError

__all__ = [
    'FAMILIES', 'NoiseSpec', 'make_generator', 'sample_noise', 'observe',
    'subgaussian_K', 'gaussian_moment', 'empirical_moment',
]

GENERATOR_VERSION = 'numpy-PCG64-SeedSequence-v1'

FAMILIES = ('gaussian', 'rademacher', 'uniform')

_UINT64 = 2 ** 64


def make_generator(seed, stream=()):
    """
    Builds the generator for ``(seed, stream)``.
    """
    seed = int(seed)
    if not 0 <= seed < _UINT64:
        raise ParameterDomainError("seed must be a 64-bit unsigned integer, got %r." % seed)
    stream = tuple(int(i) for i in stream)
    if any(i < 0 for i in stream):
        raise ParameterDomainError("stream indices must be non-negative, got %r." % (stream,))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


class NoiseSpec(Base):
    """
    A noise family with its scale, seed and optional stream.

    ``param`` is sigma for ``gaussian``, the scale ``a`` for ``rademacher``
    (entries are ``+-a``) and the half width ``a`` for ``uniform`` (entries in
    ``[-a, a]``). ``K`` overrides the sub-Gaussian constant reported by
    ``subgaussian_K``.
    """

    def __init__(self, family='gaussian', param=1.0, seed=0, stream=(), K=None):

        super(NoiseSpec, self).__init__()
        if family not in FAMILIES:
            raise ParameterDomainError(
                "Unknown noise family '%s'; expected one of %s." % (family, ', '.join(FAMILIES)))
        param = float(param)
        if not (param > 0 and math.isfinite(param)):
            raise ParameterDomainError("The noise scale must be positive, got %r." % param)
        if K is not None and not float(K) > 0:
            raise ParameterDomainError("K must be positive, got %r." % K)
        self.family = family
        self.param = param
        self.seed = int(seed)
        self.stream = tuple(int(i) for i in stream)
        self.K = float(K) if K is not None else None
        # validates seed and stream
        make_generator(self.seed, self.stream)

    @classmethod
    def gaussian(cls, sigma=1.0, seed=0):

        return cls('gaussian', sigma, seed)

    @classmethod
    def rademacher(cls, a=1.0, seed=0):

        return cls('rademacher', a, seed)

    @classmethod
    def uniform(cls, a=1.0, seed=0):

        return cls('uniform', a, seed)

    def reseeded(self, seed, stream=()):
        '''
        Same family and scale, drawing from ``(seed, stream)``.
        '''
        return NoiseSpec(self.family, self.param, seed, stream, self.K)

    def generator(self):

        return make_generator(self.seed, self.stream)

    def __eq__(self, other):

        if not isinstance(other, NoiseSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __ne__(self, other):

        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):

        return 'NoiseSpec(%r, %r, seed=%r)' % (self.family, self.param, self.seed)

    def to_dict(self):

        data = {'family': self.family, 'param': self.param, 'seed': self.seed}
        if self.stream:
            data['stream'] = list(self.stream)
        if self.K is not None:
            data['K'] = self.K
        return data

    @classmethod
    def from_dict(cls, data):

        try:
            return cls(data['family'], data['param'], data.get('seed', 0),
                       data.get('stream', ()), data.get('K'))
        except ParameterDomainError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ParameterDomainError("Invalid noise document: %r (%s)" % (data, e))

    def to_json(self):

        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):

        return cls.from_dict(json.loads(text))


def _draw(rng, spec, size):

    if spec.family == 'gaussian':
        return spec.param * rng.standard_normal(size)
    if spec.family == 'rademacher':
        return spec.param * (2.0 * rng.integers(0, 2, size=size) - 1.0)
    return rng.uniform(-spec.param, spec.param, size=size)


def sample_noise(n1, n2, spec):
    """
    Draws an ``n1 x n2`` matrix of i.i.d. entries from ``spec``.
    """
    if n1 < 1 or n2 < 1:
        raise ParameterDomainError("Dimensions must be >= 1, got %dx%d." % (n1, n2))
    return RealMatrix(_draw(spec.generator(), spec, (n1, n2)))


def observe(M, spec):

    M = as_matrix(M)
    return M + sample_noise(M.n1, M.n2, spec)


def subgaussian_K(spec):
    '''
    The moment constant ``K`` with ``(E|xi|^p)^(1/p) <= K sqrt(p)`` for all
    ``p >= 1``: sigma for Gaussian noise, ``a`` for the bounded families,
    unless the spec carries an explicit override.
    '''
    if spec.K is not None:
        return spec.K
    return spec.param


def gaussian_moment(p, sigma=1.0):
    '''
    ``(E|xi|^p)^(1/p)`` for ``xi ~ N(0, sigma^2)``.
    '''
    if not p > 0:
        raise ParameterDomainError("p must be positive, got %r." % p)
    log_moment = 0.5 * p * math.log(2.0) + gammaln((p + 1) / 2.0) - 0.5 * math.log(math.pi)
    return float(sigma * math.exp(log_moment / p))


def empirical_moment(samples, p):

    samples = np.abs(np.asarray(samples, dtype=float))
    return float(np.mean(samples ** p) ** (1.0 / p))
