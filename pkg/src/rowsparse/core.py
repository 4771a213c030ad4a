"""
Dense real matrices, the (quasi-)norms used to measure estimation error and
the row-sparsity classes the signals live in.

Every row of a matrix in ``A(q, s)`` belongs to the l_q ball ``B_q(s)``; for
``q = 0`` this means at most ``s`` non-zero entries per row::

    from rowsparse.core import RealMatrix, SparsityClass, in_class, norm_2p

    A = RealMatrix([[3, 4], [0, 0]])
    norm_2p(A, 1)                       # 5.0
    in_class(A, SparsityClass(0, 2))    # True
"""

import json
import math
import os

import numpy as np

from .exceptions import DimensionMismatchError, ParameterDomainError

__all__ = [
    'Base', 'RealMatrix', 'SparsityClass', 'as_matrix', 'norm_lq', 'l0_count',
    'norm_2p', 'in_class', 'truncate_rows', 'truncation_bound',
    'norm_transfer_factor',
]


class Base(object):
    pass


class RealMatrix(Base):
    """
    An immutable dense ``n1 x n2`` matrix of finite reals.

    The entries are held in a read-only float64 array, so a matrix can be
    shared between worker threads without copying.
    """

    def __init__(self, entries):

        super(RealMatrix, self).__init__()
        array = np.array(entries, dtype=float)
        if array.ndim != 2:
            raise ParameterDomainError(
                "A matrix needs 2 dimensions, got shape %s." % (array.shape,))
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ParameterDomainError(
                "A matrix needs at least one row and one column, got shape %s." % (array.shape,))
        if not np.all(np.isfinite(array)):
            raise ParameterDomainError("Matrix entries must be finite.")
        array.setflags(write=False)
        self.__entries = array

    @classmethod
    def zeros(cls, n1, n2):

        return cls(np.zeros((n1, n2)))

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
    def shape(self):

        return self.__entries.shape

    def __add__(self, other):

        other = as_matrix(other)
        _check_same_shape(self, other)
        return RealMatrix(self.__entries + other.entries)

    def __sub__(self, other):

        other = as_matrix(other)
        _check_same_shape(self, other)
        return RealMatrix(self.__entries - other.entries)

    def __neg__(self):

        return RealMatrix(-self.__entries)

    def __mul__(self, scalar):

        return RealMatrix(float(scalar) * self.__entries)

    __rmul__ = __mul__

    def __eq__(self, other):

        if not isinstance(other, RealMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.__entries, other.entries))

    def __ne__(self, other):

        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):

        return 'RealMatrix(%r)' % (self.__entries.tolist(),)

    def to_dict(self):

        return {
            'n1': self.n1,
            'n2': self.n2,
            'entries': [float(x) for x in self.__entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data):

        try:
            n1, n2, entries = int(data['n1']), int(data['n2']), data['entries']
        except (KeyError, TypeError, ValueError) as e:
            raise ParameterDomainError("Invalid matrix document: %s" % e)
        if len(entries) != n1 * n2:
            raise DimensionMismatchError(
                "Matrix document declares %dx%d but carries %d entries." % (n1, n2, len(entries)))
        return cls(np.array(entries, dtype=float).reshape(n1, n2))

    def to_json(self):

        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):

        return cls.from_dict(json.loads(text))

    def write(self, path):
        '''
        Writes the matrix as CSV or JSON, chosen by the file extension.
        '''
        if os.path.splitext(path)[1].lower() == '.json':
            with open(path, 'w') as f:
                f.write(self.to_json())
        else:
            np.savetxt(path, self.__entries, fmt='%.17g', delimiter=',')

    @classmethod
    def read(cls, path):
        '''
        Reads a matrix written by ``write`` (or any comma separated file).
        '''
        if os.path.splitext(path)[1].lower() == '.json':
            with open(path) as f:
                return cls.from_json(f.read())
        return cls(np.loadtxt(path, delimiter=',', ndmin=2, dtype=float))


class SparsityClass(Base):
    """
    The class ``A(q, s)`` of matrices whose rows lie in ``B_q(s)``.
    """

    def __init__(self, q, s):

        super(SparsityClass, self).__init__()
        q, s = float(q), float(s)
        if not 0 <= q < 2:
            raise ParameterDomainError("q must lie in [0, 2), got %r." % q)
        if not s > 0:
            raise ParameterDomainError("s must be positive, got %r." % s)
        if q == 0 and (s != math.floor(s) or s < 1):
            raise ParameterDomainError("With q=0, s must be an integer >= 1, got %r." % s)
        self.q = q
        self.s = int(s) if q == 0 else s

    @property
    def hard(self):

        return self.q == 0

    def __repr__(self):

        return 'SparsityClass(q=%r, s=%r)' % (self.q, self.s)


def as_matrix(A):

    return A if isinstance(A, RealMatrix) else RealMatrix(A)


def _check_same_shape(A, B):

    if A.shape != B.shape:
        raise DimensionMismatchError("Shapes differ: %s vs %s." % (A.shape, B.shape))


def norm_lq(A, q):
    """
    Elementwise l_q (quasi-)norm ``(sum |a_ij|^q)^(1/q)``.
    """
    if not q > 0:
        raise ParameterDomainError("q must be positive, got %r." % q)
    A = as_matrix(A)
    if q == 2:
        return float(np.sqrt(np.sum(A.entries ** 2)))
    return float(np.sum(np.abs(A.entries) ** q) ** (1.0 / q))


def l0_count(A):

    return int(np.count_nonzero(as_matrix(A).entries))


def row_norms(A):

    return np.sqrt(np.sum(as_matrix(A).entries ** 2, axis=1))


def norm_2p(A, p):
    """
    The mixed norm ``||A||_{2,p}``: l_2 over each row, then l_p over rows.

    A norm for ``p >= 1`` and a quasi-norm for ``0 < p < 1``.
    """
    if not p > 0:
        raise ParameterDomainError("p must be positive, got %r." % p)
    A = as_matrix(A)
    if p == 2:
        return norm_lq(A, 2)
    return float(np.sum(row_norms(A) ** p) ** (1.0 / p))


def norm_transfer_factor(n1, p):
    '''
    ``n1^(1/p - 1/2)``, so that ``norm_2p(A, p) <= factor * norm_lq(A, 2)``
    whenever ``0 < p <= 2``.
    '''
    if not p > 0:
        raise ParameterDomainError("p must be positive, got %r." % p)
    return float(n1) ** (1.0 / p - 0.5)


def in_class(A, c):
    """
    True iff every row of ``A`` lies in ``B_q(s)``.
    """
    A = as_matrix(A)
    if c.hard:
        if c.s > A.n2:
            raise ParameterDomainError(
                "s=%d exceeds the row length n2=%d." % (c.s, A.n2))
        return bool(np.all(np.count_nonzero(A.entries, axis=1) <= c.s))
    return bool(np.all(np.sum(np.abs(A.entries) ** c.q, axis=1) <= c.s))


def truncate_rows(M, s_prime):
    """
    Keeps the ``s_prime`` largest magnitudes in each row and zeroes the rest.

    Ties are broken towards the lowest column index.
    """
    M = as_matrix(M)
    if s_prime != int(s_prime) or not 1 <= s_prime <= M.n2:
        raise ParameterDomainError(
            "s_prime must be an integer in [1, %d], got %r." % (M.n2, s_prime))
    s_prime = int(s_prime)
    order = np.argsort(-np.abs(M.entries), axis=1, kind='stable')
    keep = np.zeros(M.shape, dtype=bool)
    np.put_along_axis(keep, order[:, :s_prime], True, axis=1)
    return RealMatrix(np.where(keep, M.entries, 0.0))


def truncation_bound(n1, s, q, s_prime):
    '''
    Upper bound ``s^(2/q) * s_prime^(1 - 2/q) * n1`` on the squared error of
    ``truncate_rows`` over ``A(q, s)``, valid for ``0 < q <= 2``.
    '''
    if not 0 < q <= 2:
        raise ParameterDomainError("q must lie in (0, 2], got %r." % q)
    return float(s) ** (2.0 / q) * float(s_prime) ** (1.0 - 2.0 / q) * n1
