"""
Writes results to disk as CSV, JSON or SVG.

CSV and JSON carry Python's shortest round-tripping float representation,
so parsing a file back gives the exact values. SVG output draws one log-log
panel with, for every RateFit, its measured points and its fitted line. The
line of the k-th fit is the single path in the group with id ``fit-k``; its
points are marker uses in the group ``points-k``. Axes, ticks and marker
definitions are paths of their own outside the ``fit-k`` groups.
"""

import csv
import json

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .exceptions import EmitError, ParameterDomainError  # noqa: E402
from .result import RateFit, Result  # noqa: E402

__all__ = ['FORMATS', 'emit']

FORMATS = ('csv', 'json', 'svg')


def _as_list(results):

    if isinstance(results, Result):
        return [results]
    results = list(results)
    if not results:
        raise ParameterDomainError("Nothing to emit.")
    return results


def _columns(rows):

    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def _write_csv(results, f):

    rows = [row for result in results for row in result.rows()]
    if all(isinstance(r, RateFit) for r in results):
        columns = list(RateFit.CSV_COLUMNS)
    else:
        columns = _columns(rows)
    writer = csv.DictWriter(f, fieldnames=columns, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(dict((k, repr(v) if isinstance(v, float) else v) for k, v in row.items()))


def _write_json(results, f):

    data = [r.to_dict() for r in results]
    json.dump(data[0] if len(data) == 1 else data, f, indent=2, sort_keys=True)
    f.write('\n')


def _write_svg(results, f):

    for r in results:
        if not isinstance(r, RateFit):
            raise ParameterDomainError("SVG output only draws rate fits, got %s." % type(r).__name__)
    plt.rcParams['svg.hashsalt'] = 'rowsparse'
    figure, ax = plt.subplots(figsize=(6, 4.5))
    try:
        for k, fit in enumerate(results):
            rates = np.asarray(fit.rates)
            means = np.array([risk.mean for risk in fit.risks])
            points, = ax.plot(rates, means, 'o', label='%s (slope %.3f)' % (fit.label, fit.slope))
            points.set_gid('points-%d' % k)
            xs = np.geomspace(rates.min(), rates.max(), 50)
            line, = ax.plot(xs, fit.constant * xs ** fit.slope, '-', color=points.get_color())
            line.set_gid('fit-%d' % k)
        ax.set_xscale('log')
        ax.set_yscale('log')
        ax.set_xlabel('rate')
        ax.set_ylabel('mean risk')
        ax.legend(loc='best')
        figure.savefig(f, format='svg', metadata={'Date': None})
    finally:
        plt.close(figure)


_WRITERS = {'csv': _write_csv, 'json': _write_json, 'svg': _write_svg}


def emit(results, fmt, path):
    """
    Writes ``results`` (one Result or a non-empty list of them) to ``path``.
    """
    if fmt not in FORMATS:
        raise ParameterDomainError("Unknown format '%s'; expected one of %s." % (fmt, ', '.join(FORMATS)))
    results = _as_list(results)
    try:
        with open(path, 'w', newline='' if fmt == 'csv' else None) as f:
            _WRITERS[fmt](results, f)
    except OSError as e:
        raise EmitError(path, e.strerror or str(e))
    return path
