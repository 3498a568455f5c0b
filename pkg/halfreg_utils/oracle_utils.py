"""
Brute-force oracles for small instances: enumeration of realizations, the
existence sweep and connectivity of restricted move relations.
"""
import logging
from collections import defaultdict
from itertools import combinations, product

import numpy as np

from .config_utils import size_guard
from .errors import TooLarge
from .misc_utils import FieldDict
from .model_utils import DegreeMatrix, color_counts

logger = logging.getLogger(__name__)


class EnumerationResult:
    """
    Realizations of an instance as sorted canonical encodings, or their count only.
    """
    def __init__(self, M, count, states=None):
        self._M = M
        self._count = count
        self._states = states

    @property
    def M(self):
        return self._M

    @property
    def count(self):
        return self._count

    @property
    def states(self):
        return self._states

    def to_dict(self):
        out = {'instance': self._M.to_dict(), 'count': self._count}
        if self._states is not None:
            out['states'] = self._states
        return out

    def __len__(self):
        return self._count


def _closing_instance(M):
    # non-edge colour appended without validation; infeasible residues clip to 0
    d_extra = M.m - int(M.d.sum())
    if d_extra == 0 and (M.f.sum(axis=0) == M.n).all():
        return M.d.tolist(), M.f.tolist(), M.k
    f_extra = np.maximum(M.n - M.f.sum(axis=0), 0)
    return M.d.tolist() + [max(d_extra, 0)], M.f.tolist() + [f_extra.tolist()], M.k + 1


def enumerate_realizations(M, count_only=False, guard=None):
    """
    Every matrix meeting the row and column colour counts of M, by backtracking
    over cells in row-major order with residual count pruning. Instances that are
    not in equality form are closed with a non-edge colour first.

    :param M: DegreeMatrix
    :param count_only: skip collecting the states
    :param guard: maximum n*m, defaults to config_utils.size_guard()
    :returns: EnumerationResult
    """
    guard = size_guard() if guard is None else guard
    if M.n * M.m > guard:
        raise TooLarge(f'{M.n}x{M.m} instance has {M.n * M.m} cells, guard is {guard}')
    d, f, k = _closing_instance(M)
    n, m = M.n, M.m
    if any(n * d[c] != sum(f[c]) for c in range(k)):
        return EnumerationResult(M, 0, None if count_only else [])

    row_left = [list(d) for _ in range(n)]
    col_left = [list(row) for row in f]
    matrix = [[0] * m for _ in range(n)]
    states = []
    count = 0

    def place(cell):
        nonlocal count
        if cell == n * m:
            count += 1
            if not count_only:
                states.append('|'.join(','.join(str(c) for c in row) for row in matrix))
            return
        u, v = divmod(cell, m)
        for c in range(k):
            if row_left[u][c] and col_left[c][v]:
                row_left[u][c] -= 1
                col_left[c][v] -= 1
                matrix[u][v] = c
                place(cell + 1)
                row_left[u][c] += 1
                col_left[c][v] += 1

    if sum(d) == m:
        place(0)
    logger.debug(f'Enumerated {count} realizations of {M}.')
    return EnumerationResult(M, count, None if count_only else sorted(states))


def random_instance(n, m, k, rng, equality=True):
    """
    Feasible half-regular instance obtained from a random colouring with identical
    row colour counts.

    :param rng: numpy.random.Generator
    :param equality: if False some cells are left uncoloured (non-edges)
    :returns: DegreeMatrix with k colours
    """
    total = m if equality else int(rng.integers(0, m + 1))
    cuts = np.sort(rng.integers(0, total + 1, size=k - 1))
    d = np.diff(np.concatenate([[0], cuts, [total]]))
    row = np.concatenate([np.repeat(np.arange(k), d), np.full(m - total, k)])
    matrix = np.stack([rng.permutation(row) for _ in range(n)])
    _, cols = color_counts(matrix, k + 1)
    return DegreeMatrix(n, m, k, d, cols[:k])


def _compositions(total, parts, cap):
    for combo in product(range(cap + 1), repeat=parts):
        if sum(combo) == total:
            yield combo


def valid_instances(n, m, k, max_entry):
    """
    Half-regular instances with entries <= max_entry passing the existence conditions,
    as (d, f) tuples.
    """
    found = set()
    for d in product(range(max_entry + 1), repeat=k):
        if sum(d) > m:
            continue
        rows = [list(_compositions(n * d[i], m, max_entry)) for i in range(k)]
        for f in product(*rows):
            if all(sum(col) <= n for col in zip(*f)):
                found.add((tuple(d), tuple(f)))
    return found


def realizable_instances(n, m, k, max_entry):
    """
    Half-regular instances with entries <= max_entry that occur as the colour counts of
    some colouring of the n x m grid with k colours plus a non-edge colour.
    """
    colourings = np.array(list(product(range(k + 1), repeat=n * m)), dtype=np.int64).reshape(-1, n, m)
    one_hot = colourings[..., None] == np.arange(k + 1)
    rows = one_hot.sum(axis=2)
    cols = one_hot.sum(axis=1).transpose(0, 2, 1)
    regular = (rows == rows[:, :1, :]).all(axis=(1, 2))
    d, f = rows[regular, 0, :k], cols[regular, :k, :]
    small = (d <= max_entry).all(axis=1) & (f <= max_entry).all(axis=(1, 2))
    return {(tuple(a), tuple(tuple(r) for r in b)) for a, b in zip(d[small].tolist(), f[small].tolist())}


def verify_existence_equivalence(max_n=3, max_m=3, max_k=3, max_entry=3, method='colourings'):
    """
    Checks that validate(M).ok holds exactly for the realizable instances, over every
    half-regular instance within the bounds.

    :param method: 'direct' enumerates every instance with enumerate_realizations,
        'colourings' collects the realizable instances from all colourings of each grid
    :returns: FieldDict(checked, valid, discrepancies)
    """
    discrepancies = []
    checked = 0
    valid_total = 0
    for n, m, k in product(range(1, max_n + 1), range(1, max_m + 1), range(1, max_k + 1)):
        valid = valid_instances(n, m, k, max_entry)
        valid_total += len(valid)
        if method == 'direct':
            for d in product(range(max_entry + 1), repeat=k):
                for flat in product(range(max_entry + 1), repeat=k * m):
                    f = tuple(tuple(flat[i * m:(i + 1) * m]) for i in range(k))
                    M = DegreeMatrix(n, m, k, d, f)
                    ok = M.validate().ok
                    assert ok == ((tuple(d), f) in valid)
                    realizable = enumerate_realizations(M, count_only=True, guard=n * m).count >= 1
                    checked += 1
                    if ok != realizable:
                        discrepancies.append(FieldDict(n=n, m=m, k=k, d=list(d), f=[list(r) for r in f], valid=ok, realizable=realizable))
        elif method == 'colourings':
            realizable = realizable_instances(n, m, k, max_entry)
            checked += (max_entry + 1) ** (k * (m + 1))
            for d, f in sorted(valid ^ realizable):
                discrepancies.append(FieldDict(n=n, m=m, k=k, d=list(d), f=[list(r) for r in f],
                                               valid=(d, f) in valid, realizable=(d, f) in realizable))
        else:
            raise ValueError(f'method {method} not recognized.')
        logger.debug(f'Existence sweep n={n}, m={m}, k={k}: {len(valid)} valid instances.')
    logger.info(f'Existence sweep over {checked} instances: {len(discrepancies)} discrepancies.')
    return FieldDict(checked=checked, valid=valid_total, discrepancies=discrepancies)


def move_components(states, rows_per_move):
    """
    Classes of states connected by moves that change at most rows_per_move rows.

    :param states: canonical encodings (rows separated by '|')
    :param rows_per_move: number of rows a single move may change
    :returns: list of components, each a sorted list of encodings
    """
    states = list(states)
    parent = list(range(len(states)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    split = [s.split('|') for s in states]
    n = len(split[0]) if split else 0
    for rows in combinations(range(n), min(rows_per_move, n)):
        groups = defaultdict(list)
        for i, row_strs in enumerate(split):
            groups[tuple(r for j, r in enumerate(row_strs) if j not in rows)].append(i)
        for members in groups.values():
            root = find(members[0])
            for i in members[1:]:
                parent[find(i)] = root

    components = defaultdict(list)
    for i, s in enumerate(states):
        components[find(i)].append(s)
    return sorted((sorted(c) for c in components.values()), key=lambda c: c[0])
