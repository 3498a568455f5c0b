"""
Utilities for half-regular degree matrices and their coloured realizations.
"""
import logging
from collections import namedtuple

import numpy as np

from .errors import (BadDefectShape, DimensionMismatch, InvalidMatrix,
                     NotNearRealization, SchemaError)
from .misc_utils import FieldDict

logger = logging.getLogger(__name__)

CONDITIONS = {
    1: 'condition 1 (colour degree sums agree: n*d[i] == sum_j f[i][j])',
    2: 'condition 2 (row capacity: sum_i d[i] <= m)',
    3: 'condition 3 (column capacity: sum_i f[i][j] <= n)',
}

Deficiency = namedtuple('Deficiency', ['row', 'plus', 'minus'])


def _check_positive_int(name, value):
    if not isinstance(value, (int, np.integer)) or isinstance(value, (bool, np.bool_)) or value < 1:
        raise SchemaError(f'"{name}" must be a positive integer, got {value!r}')
    return int(value)


def _leaves(values):
    if isinstance(values, (list, tuple)):
        for value in values:
            yield from _leaves(value)
    else:
        yield values


def _as_int_array(values, shape, name):
    """
    Integer array of the given shape; floats, booleans and strings are rejected, not cast.
    """
    try:
        arr = np.array(values)
    except (TypeError, ValueError) as e:
        raise SchemaError(f'"{name}" must contain integers: {e}')
    if arr.size and arr.dtype.kind not in 'iu':
        raise SchemaError(f'"{name}" must contain integers, got {arr.dtype.name} entries')
    if any(isinstance(v, (bool, np.bool_)) for v in _leaves(values)):
        raise SchemaError(f'"{name}" must contain integers, got a boolean')
    arr = arr.astype(np.int64)
    if arr.shape != shape:
        raise SchemaError(f'"{name}" has shape {arr.shape}, expected {shape}')
    if (arr < 0).any():
        raise SchemaError(f'"{name}" must be non-negative')
    arr.setflags(write=False)
    return arr


def color_counts(matrix, k):
    """
    Per-row and per-column colour counts of a colour matrix.

    :param matrix: (n x m) integer colour matrix
    :param k: number of colours
    :returns: (n x k) row counts, (k x m) column counts
    """
    one_hot = np.asarray(matrix)[..., None] == np.arange(k)
    return one_hot.sum(axis=1), one_hot.sum(axis=0).T


class ValidationReport:
    """
    Outcome of checking the existence conditions of a degree matrix.
    """
    def __init__(self, violations, equality):
        self._violations = violations
        self._equality = equality

    @property
    def ok(self):
        return len(self._violations) == 0

    @property
    def violations(self):
        return self._violations

    @property
    def equality(self):
        return self._equality

    @property
    def failed_conditions(self):
        return sorted({v.condition for v in self._violations})

    def describe(self):
        if self.ok:
            return 'ok, equality case' if self.equality else 'ok'
        return '; '.join(v.message for v in self._violations)

    def to_dict(self):
        return {'ok': self.ok, 'equality': self.equality, 'violations': [dict(v) for v in self._violations]}


class DegreeMatrix:
    """
    Half-regular bipartite degree matrix (D, F): every U-vertex has d[i] edges
    of colour i and V-vertex j has f[i][j] edges of colour i.
    """
    def __init__(self, n: int, m: int, k: int, d, f):
        """
        :param n: number of U-vertices (rows)
        :param m: number of V-vertices (columns)
        :param k: number of colours
        :param d: length k, U-side degree of each colour
        :param f: k x m, V-side degree of each colour at each column
        """
        self._n, self._m, self._k = (_check_positive_int(name, value) for name, value in (('n', n), ('m', m), ('k', k)))
        self._d = _as_int_array(d, (self._k,), 'd')
        if not isinstance(f, (list, tuple, np.ndarray)):
            raise SchemaError(f'"f" must be a k x m nested list, got {type(f).__name__}')
        if len(f) != self._k:
            raise SchemaError(f'"f" has {len(f)} rows, expected k={self._k}')
        for i, row in enumerate(f):
            if not isinstance(row, (list, tuple, np.ndarray)) or len(row) != self._m:
                size = len(row) if isinstance(row, (list, tuple, np.ndarray)) else "no"
                raise SchemaError(f'"f" row {i} has length {size}, expected m={self._m}')
        self._f = _as_int_array(f, (self._k, self._m), 'f')

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return self._m

    @property
    def k(self):
        return self._k

    @property
    def d(self):
        return self._d

    @property
    def f(self):
        return self._f

    @classmethod
    def latin(cls, n):
        """
        All-ones n x n x n instance whose realizations are the Latin squares of order n.
        """
        return cls(n, n, n, [1] * n, [[1] * n for _ in range(n)])

    @classmethod
    def from_dict(cls, data):
        missing = [key for key in ('n', 'm', 'k', 'd', 'f') if key not in data]
        if missing:
            raise SchemaError(f'missing field(s): {missing}')
        return cls(data['n'], data['m'], data['k'], data['d'], data['f'])

    def to_dict(self):
        return {'n': self.n, 'm': self.m, 'k': self.k, 'd': self.d.tolist(), 'f': self.f.tolist()}

    def validate(self):
        """
        Checks the three existence conditions, collecting every violation.

        :returns: ValidationReport
        """
        violations = []
        sums = self.f.sum(axis=1)
        for i in range(self.k):
            if self.n * self.d[i] != sums[i]:
                violations.append(FieldDict(condition=1, index=i, lhs=int(self.n * self.d[i]), rhs=int(sums[i]),
                    message=f'{CONDITIONS[1]} fails for colour {i}: {self.n * self.d[i]} != {sums[i]}'))
        total = int(self.d.sum())
        if total > self.m:
            violations.append(FieldDict(condition=2, index=None, lhs=total, rhs=self.m,
                message=f'{CONDITIONS[2]} fails: {total} > {self.m}'))
        col_sums = self.f.sum(axis=0)
        for j in range(self.m):
            if col_sums[j] > self.n:
                violations.append(FieldDict(condition=3, index=j, lhs=int(col_sums[j]), rhs=self.n,
                    message=f'{CONDITIONS[3]} fails for column {j}: {col_sums[j]} > {self.n}'))
        return ValidationReport(violations, equality=total == self.m)

    @property
    def is_equality_form(self):
        report = self.validate()
        return report.ok and report.equality

    def fix_row(self, colors):
        """
        Instance left after deleting a U-vertex whose edges have the given colours.

        :param colors: length m colour row, must contain colour i exactly d[i] times
        :returns: DegreeMatrix on n - 1 rows
        """
        colors = np.asarray(colors)
        assert self.n > 1, 'cannot delete the only row'
        assert len(colors) == self.m, f'row has length {len(colors)}, expected {self.m}'
        indicator = (colors[None, :] == np.arange(self.k)[:, None]).astype(np.int64)
        assert (indicator.sum(axis=1) == self.d).all(), 'row does not match the colour degrees'
        return DegreeMatrix(self.n - 1, self.m, self.k, self.d, self.f - indicator)

    def __eq__(self, other):
        if not isinstance(other, DegreeMatrix):
            return NotImplemented
        return (self.n, self.m, self.k) == (other.n, other.m, other.k) and np.array_equal(self.d, other.d) \
            and np.array_equal(self.f, other.f)

    def __hash__(self):
        return hash((self.n, self.m, self.k, self.d.tobytes(), self.f.tobytes()))

    def __repr__(self):
        return f'DegreeMatrix(n={self.n}, m={self.m}, k={self.k}, d={self.d.tolist()}, f={self.f.tolist()})'


def validate(M):
    return M.validate()


def extend_with_nonedge_color(M):
    """
    Appends the non-edge colour (id k) so that the instance becomes an equality case.

    :param M: DegreeMatrix passing validate
    :returns: DegreeMatrix with k+1 colours, or M itself if it already is an equality case
    """
    report = M.validate()
    if not report.ok:
        raise InvalidMatrix(report.describe())
    if report.equality:
        return M
    d = np.append(M.d, M.m - M.d.sum())
    f = np.vstack([M.f, M.n - M.f.sum(axis=0)])
    logger.debug(f'Extended instance with non-edge colour {M.k} of degree {d[-1]}.')
    return DegreeMatrix(M.n, M.m, M.k + 1, d, f)


class ColoredRealization:
    """
    Edge colouring of K_{n,m} stored as a dense n x m colour matrix.
    """
    def __init__(self, matrix, k: int, col_counts=None):
        """
        :param matrix: (n x m) colour ids in [0, k)
        :param k: number of colours
        :param col_counts: optional cached (k x m) column counts
        """
        k = _check_positive_int('k', k)
        try:
            arr = np.array(matrix)
        except (TypeError, ValueError) as e:
            raise SchemaError(f'matrix must be a 2D array of colour ids: {e}')
        if arr.ndim != 2 or 0 in arr.shape:
            raise SchemaError(f'matrix must be a non-empty 2D array, got shape {arr.shape}')
        if arr.dtype.kind not in 'iu' or any(isinstance(v, (bool, np.bool_)) for v in _leaves(matrix)):
            raise SchemaError(f'colour ids must be integers, got {arr.dtype.name} entries')
        matrix = arr.astype(np.int64)
        if (matrix < 0).any() or (matrix >= k).any():
            raise SchemaError(f'colour ids must lie in [0, {k - 1}]')
        self._matrix = matrix
        self._k = k
        self._col_counts = np.array(col_counts, dtype=np.int64) if col_counts is not None else self.recount()

    @property
    def matrix(self):
        return self._matrix

    @property
    def col_counts(self):
        return self._col_counts

    @property
    def n(self):
        return self._matrix.shape[0]

    @property
    def m(self):
        return self._matrix.shape[1]

    @property
    def k(self):
        return self._k

    def recount(self):
        """
        Column counts recomputed from the matrix.
        """
        return color_counts(self._matrix, self._k)[1]

    def row_counts(self):
        return color_counts(self._matrix, self._k)[0]

    def copy(self):
        return self.__class__(self._matrix.copy(), self._k, col_counts=self._col_counts.copy())

    def swap(self, u1, u2, labels):
        """
        Exchanges the colours of rows u1 and u2 at the given columns in place.
        Column counts do not change.
        """
        assert u1 != u2, 'swap rows must differ'
        labels = list(labels)
        upper = self._matrix[u1, labels].copy()
        self._matrix[u1, labels] = self._matrix[u2, labels]
        self._matrix[u2, labels] = upper
        return self

    def encode(self):
        """
        Canonical row-major encoding, rows separated by '|'.
        """
        return '|'.join(','.join(str(c) for c in row) for row in self._matrix.tolist())

    @classmethod
    def decode(cls, text, k):
        return cls([[int(c) for c in row.split(',')] for row in text.split('|')], k)

    def to_dict(self):
        return {'n': self.n, 'm': self.m, 'k': self.k, 'matrix': self._matrix.tolist()}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise SchemaError(f'expected an object with fields n, m, k, matrix, got {type(data).__name__}')
        missing = [key for key in ('n', 'm', 'k', 'matrix') if key not in data]
        if missing:
            raise SchemaError(f'missing field(s): {missing}')
        n, m = _check_positive_int('n', data['n']), _check_positive_int('m', data['m'])
        matrix = data['matrix']
        if not isinstance(matrix, (list, tuple)):
            raise SchemaError(f'"matrix" must be an n x m nested list, got {type(matrix).__name__}')
        if len(matrix) != n:
            raise SchemaError(f'"matrix" has {len(matrix)} rows, expected n={n}')
        for u, row in enumerate(matrix):
            if not isinstance(row, (list, tuple)):
                raise SchemaError(f'"matrix" row {u} must be a list, got {type(row).__name__}')
            if len(row) != m:
                raise SchemaError(f'"matrix" row {u} has length {len(row)}, expected m={m}')
        return cls(matrix, data['k'])

    def __eq__(self, other):
        if not isinstance(other, ColoredRealization):
            return NotImplemented
        return self.k == other.k and np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash(self.encode())

    def __repr__(self):
        return f'ColoredRealization(n={self.n}, m={self.m}, k={self.k})'


def check_realization(M, R):
    """
    True iff R realizes the equality-form instance M: row colour counts equal d
    and column colour counts equal f.
    """
    if (R.n, R.m) != (M.n, M.m) or R.k != M.k:
        raise DimensionMismatch(f'realization is {R.n}x{R.m} with {R.k} colours, instance is {M.n}x{M.m} with {M.k}')
    rows, cols = color_counts(R.matrix, R.k)
    if not np.array_equal(cols, R.col_counts):
        return False
    return bool((rows == M.d[None, :]).all() and np.array_equal(cols, M.f))


def swap_cells(R, u1, u2, labels):
    """
    Copy of R with the colours of rows u1 and u2 exchanged at the given columns.
    """
    assert len(set(labels)) == len(labels), 'labels must be distinct'
    return R.copy().swap(u1, u2, labels)


def deficiencies(M, matrix):
    """
    Deficiency records of a matrix whose column counts match M.

    :param M: equality-form DegreeMatrix
    :param matrix: (n x m) colour matrix
    :returns: list of Deficiency(row, plus, minus) in row order
    """
    matrix = np.asarray(matrix)
    rows, cols = color_counts(matrix, M.k)
    if not np.array_equal(cols, M.f):
        raise NotNearRealization('column colour counts do not match the instance')
    found = []
    for u, diff in enumerate(rows - M.d[None, :]):
        if not diff.any():
            continue
        plus, minus = np.flatnonzero(diff == 1), np.flatnonzero(diff == -1)
        if len(plus) != 1 or len(minus) != 1 or np.abs(diff).sum() != 2:
            raise NotNearRealization(f'row {u} deviates by {diff.tolist()}')
        found.append(Deficiency(u, int(plus[0]), int(minus[0])))
    return found


def _order_cycle(defects):
    # start at the smallest row and follow minus -> plus
    by_plus = {d.plus: d for d in defects}
    ordered = [min(defects, key=lambda d: d.row)]
    while len(ordered) < len(defects):
        nxt = by_plus.get(ordered[-1].minus)
        if nxt is None or nxt in ordered:
            raise BadDefectShape(f'defects {defects} do not form a colour cycle')
        ordered.append(nxt)
    return ordered


def check_defect_shape(defects):
    """
    Raises BadDefectShape unless the records are empty, a complementary pair or a
    colour 3-cycle (u1,+a,-b), (u2,+b,-c), (u3,+c,-a) in the given order.
    """
    if len(defects) not in (0, 2, 3):
        raise BadDefectShape(f'expected 0, 2 or 3 defects, got {len(defects)}')
    if len({d.row for d in defects}) != len(defects):
        raise BadDefectShape('defect rows must be distinct')
    for i, defect in enumerate(defects):
        if defects[i - 1].minus != defect.plus:
            raise BadDefectShape(f'defects {defects} are not cyclic')


class NearRealization:
    """
    Colour matrix with exact column counts whose rows are exact except for
    0, 2 or 3 deficiencies.
    """
    def __init__(self, M, matrix, defects=None):
        """
        :param M: equality-form DegreeMatrix
        :param matrix: (n x m) colour matrix
        :param defects: optional ordering of the deficiency records, must match the
            records computed from the matrix
        """
        self._M = M
        self._matrix = np.array(matrix, dtype=np.int64)
        computed = deficiencies(M, self._matrix)
        if defects is None:
            defects = _order_cycle(computed) if len(computed) == 3 else computed
        else:
            defects = [Deficiency(*d) for d in defects]
            if sorted(defects) != sorted(computed):
                raise BadDefectShape(f'given defects {defects} differ from the matrix defects {computed}')
        check_defect_shape(defects)
        self._defects = list(defects)

    @property
    def M(self):
        return self._M

    @property
    def matrix(self):
        return self._matrix

    @property
    def col_counts(self):
        return self._M.f

    @property
    def defects(self):
        return self._defects

    def to_realization(self):
        if self._defects:
            raise BadDefectShape(f'{len(self._defects)} defects remain')
        return ColoredRealization(self._matrix.copy(), self._M.k)


def realization_to_factors(R):
    """
    Colour layers of a realization.

    :returns: (k x n x m) 0/1 array, layer i marks the edges of colour i
    """
    return (R.matrix[None, :, :] == np.arange(R.k)[:, None, None]).astype(np.int64)


def drop_nonedge_color(M, R):
    """
    Realization of the original (possibly non-equality) instance M: cells carrying
    the non-edge colour are replaced by -1.

    :param M: instance before extend_with_nonedge_color
    :param R: realization of the extended instance
    :returns: (n x m) integer array
    """
    matrix = R.matrix.copy()
    if R.k == M.k:
        return matrix
    assert R.k == M.k + 1, f'realization has {R.k} colours, expected {M.k} or {M.k + 1}'
    matrix[matrix == M.k] = -1
    return matrix


def instance_of(R):
    """
    Equality-form DegreeMatrix realized by R, read off its first row and its columns.
    """
    rows, cols = color_counts(R.matrix, R.k)
    return DegreeMatrix(R.n, R.m, R.k, rows[0], cols)
