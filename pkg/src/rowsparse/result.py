import math

import numpy as np

from rowsparse.core import Base
from rowsparse.echo import Echo


def _number(value):

    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _json_float(value):
    '''
    JSON has no infinity; it travels as null.
    '''
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class Result(Base):
    """
    Base class for everything the estimators and the harness report.
    """

    title = 'RESULT'

    def __init__(self, echo=None):

        super(Result, self).__init__()
        self.__echo = echo if echo is not None else Echo()

    def to_dict(self):

        raise NotImplementedError

    def rows(self):
        '''
        Flat records for CSV output; one row by default.
        '''
        return [dict((k, v) for k, v in self.to_dict().items()
                     if not isinstance(v, (list, dict)))]

    def summary_lines(self):

        return ['%s: %s' % (k, v) for k, v in sorted(self.to_dict().items())
                if not isinstance(v, (list, dict))]

    def __format_line(self, msg):

        return '| %s' % msg

    def print_summary(self):
        '''
        Prints the summary to the console.
        '''
        head = "--{ %s }" % self.title
        self.__echo.info(head + "-" * max(3, 100 - len(head)))
        for line in self.summary_lines():
            self.__echo.info(self.__format_line(line))
        self.__echo.info("-" * 100)


class EstimateReport(Result):
    """
    Output of the penalized least squares estimator.

    ``kept_threshold`` is the squared magnitude of the smallest kept entry,
    ``inf`` when nothing is kept. ``first_crossing`` and ``last_crossing``
    are the two readings of the threshold keep-rule: the number of leading
    order statistics that beat their threshold, and the largest ``j`` with
    ``y_(j)^2 > t_j``.
    """

    title = 'ESTIMATE'

    def __init__(self, m_hat, k_star, objective_value, kept_threshold,
                 schedule=None, first_crossing=None, last_crossing=None, echo=None):

        super(EstimateReport, self).__init__(echo)
        self.m_hat = m_hat
        self.k_star = int(k_star)
        self.objective_value = float(objective_value)
        self.kept_threshold = float(kept_threshold)
        self.schedule = schedule
        self.first_crossing = first_crossing
        self.last_crossing = last_crossing

    def to_dict(self, schedule_head=10):

        data = {
            'n1': self.m_hat.n1,
            'n2': self.m_hat.n2,
            'k_star': self.k_star,
            'objective_value': self.objective_value,
            'kept_threshold': _json_float(self.kept_threshold),
            'first_crossing': self.first_crossing,
            'last_crossing': self.last_crossing,
        }
        if self.schedule is not None:
            data['schedule_head'] = [float(t) for t in self.schedule[:schedule_head]]
        return data


class RiskReport(Result):
    """
    Monte Carlo summary of ``||M_hat - M||_{2,p}^2`` at one grid point.

    Equality ignores ``elapsed``.
    """

    title = 'RISK'

    def __init__(self, values, label=None, n1=None, n2=None, s=None, p=2.0,
                 elapsed=0.0, echo=None):

        super(RiskReport, self).__init__(echo)
        values = np.asarray(values, dtype=float)
        self.values = values
        self.label = label
        self.n1, self.n2, self.s, self.p = n1, n2, s, float(p)
        self.trials = int(values.size)
        self.mean = math.fsum(values) / values.size
        self.stderr = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
        self.q05, self.q95 = (float(x) for x in np.quantile(values, [0.05, 0.95]))
        self.minimum = float(values.min())
        self.maximum = float(values.max())
        self.elapsed = float(elapsed)

    def __eq__(self, other):

        if not isinstance(other, RiskReport):
            return NotImplemented
        return (self.label, self.n1, self.n2, self.s, self.p) == \
            (other.label, other.n1, other.n2, other.s, other.p) and \
            bool(np.array_equal(self.values, other.values))

    def __ne__(self, other):

        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def to_dict(self):

        return {
            'label': self.label,
            'n1': _number(self.n1),
            'n2': _number(self.n2),
            's': _number(self.s),
            'p': self.p,
            'trials': self.trials,
            'mean': self.mean,
            'stderr': self.stderr,
            'q05': self.q05,
            'q95': self.q95,
            'min': self.minimum,
            'max': self.maximum,
            'elapsed': self.elapsed,
        }


class RateFit(Result):
    """
    Least squares fit of ``log(mean risk)`` against ``log(rate)``.
    """

    title = 'RATE FIT'

    CSV_COLUMNS = ('rate_name', 'n1', 'n2', 's', 'rate', 'mean', 'stderr', 'q05', 'q95', 'trials')

    def __init__(self, slope, intercept, r_squared, rates, risks, rate_name='hard', label=None,
                 echo=None):

        super(RateFit, self).__init__(echo)
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.r_squared = float(min(1.0, max(0.0, r_squared)))
        self.rates = [float(r) for r in rates]
        self.risks = list(risks)
        self.rate_name = rate_name
        self.label = label or rate_name

    @property
    def constant(self):

        return math.exp(self.intercept)

    def rows(self):

        return [dict((
            ('rate_name', self.rate_name),
            ('n1', _number(risk.n1)),
            ('n2', _number(risk.n2)),
            ('s', _number(risk.s)),
            ('rate', rate),
            ('mean', risk.mean),
            ('stderr', risk.stderr),
            ('q05', risk.q05),
            ('q95', risk.q95),
            ('trials', risk.trials),
        )) for rate, risk in zip(self.rates, self.risks)]

    def to_dict(self):

        return {
            'label': self.label,
            'rate_name': self.rate_name,
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'constant': self.constant,
            'table': self.rows(),
        }

    def summary_lines(self):

        lines = ['slope=%.4f intercept=%.4f R^2=%.4f constant=%.4g'
                 % (self.slope, self.intercept, self.r_squared, self.constant)]
        for row in self.rows():
            lines.append('n1=%(n1)s n2=%(n2)s s=%(s)s rate=%(rate).4g mean=%(mean).4g '
                         '+/- %(stderr).2g' % row)
        return lines


class PackCertificate(Result):
    """
    Exhaustive certificate for a packing: minimum distance and cardinality.
    """

    title = 'PACK CERTIFICATE'

    def __init__(self, size, d_min_achieved, d_min_target, log_cardinality,
                 cardinality_target, C_target, echo=None):

        super(PackCertificate, self).__init__(echo)
        self.size = int(size)
        self.d_min_achieved = d_min_achieved
        self.d_min_target = float(d_min_target)
        self.log_cardinality = float(log_cardinality)
        self.cardinality_target = float(cardinality_target)
        self.C_target = float(C_target)

    @property
    def distance_pass(self):

        return self.d_min_achieved is None or self.d_min_achieved >= self.d_min_target

    @property
    def cardinality_pass(self):

        return self.log_cardinality >= self.cardinality_target

    @property
    def achieved_ratio(self):
        '''
        The constant actually achieved, ``log|Omega| / (n1 s log(e n2/s))``.
        '''
        if self.C_target == 0 or self.cardinality_target == 0:
            return None
        return self.log_cardinality * self.C_target / self.cardinality_target

    @property
    def passed(self):

        return self.distance_pass and self.cardinality_pass

    def to_dict(self):

        return {
            'size': self.size,
            'd_min_achieved': self.d_min_achieved,
            'd_min_target': self.d_min_target,
            'distance_pass': self.distance_pass,
            'log_cardinality': self.log_cardinality,
            'cardinality_target': self.cardinality_target,
            'C_target': self.C_target,
            'achieved_ratio': self.achieved_ratio,
            'cardinality_pass': self.cardinality_pass,
            'passed': self.passed,
        }


class OracleGapReport(Result):
    """
    Per-trial oracle inequality gaps.

    For every trial, ``required[t]`` is the smallest constant ``C`` for which
    ``lhs[t] <= min_A RHS(A; C)`` holds (``inf`` when a probe with
    ``||A||_0 = 0`` sits below the left side).
    """

    title = 'ORACLE GAP'

    def __init__(self, lhs, required, a, slack, level, echo=None):

        super(OracleGapReport, self).__init__(echo)
        self.lhs = np.asarray(lhs, dtype=float)
        self.required = np.asarray(required, dtype=float)
        self.a = float(a)
        self.slack = float(slack)
        self.level = float(level)

    def coverage(self, c_fit):
        '''
        Fraction of trials where the oracle bound holds with constant ``c_fit``.
        '''
        return float(np.mean(self.required <= c_fit))

    @property
    def c_fit(self):
        '''
        Smallest constant reaching ``level`` coverage.
        '''
        ordered = np.sort(self.required)
        index = int(math.ceil(self.level * ordered.size)) - 1
        return float(ordered[max(0, index)])

    @property
    def passed(self):

        return math.isfinite(self.c_fit)

    def to_dict(self):

        return {
            'trials': int(self.lhs.size),
            'a': self.a,
            'slack': self.slack,
            'level': self.level,
            'c_fit': _json_float(self.c_fit),
            'mean_lhs': float(np.mean(self.lhs)),
            'passed': self.passed,
        }


class TailCurve(Result):
    """
    Empirical exceedance curve ``P[stat >= delta]`` of the projected noise
    statistic.
    """

    title = 'TAIL CURVE'

    def __init__(self, deltas, stats, K1, echo=None):

        super(TailCurve, self).__init__(echo)
        self.deltas = np.asarray(deltas, dtype=float)
        self.stats = np.asarray(stats, dtype=float)
        self.K1 = float(K1)
        self.exceedance = np.array([np.mean(self.stats >= d) for d in self.deltas])

    @property
    def mean_positive_part(self):

        return math.fsum(np.maximum(self.stats, 0.0)) / self.stats.size

    @property
    def monotone(self):

        return bool(np.all(np.diff(self.exceedance) <= 0))

    @property
    def passed(self):

        return self.monotone and math.isfinite(self.mean_positive_part)

    def rows(self):

        return [{'delta': float(d), 'exceedance': float(e)}
                for d, e in zip(self.deltas, self.exceedance)]

    def to_dict(self):

        return {
            'trials': int(self.stats.size),
            'K1': self.K1,
            'mean_positive_part': self.mean_positive_part,
            'monotone': self.monotone,
            'passed': self.passed,
            'curve': self.rows(),
        }
