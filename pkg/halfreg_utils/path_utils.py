"""
Perturbations touching at most three rows: deficiency repairs, cyclic permutation
of one row's colours and transformation paths between realizations.
"""
import logging

import numpy as np

from .errors import (BadDefectShape, DifferentInstances, NotACyclicPermutation,
                     PreconditionViolated)
from .misc_utils import digest
from .model_utils import (ColoredRealization, Deficiency, NearRealization,
                          check_realization, deficiencies, instance_of)
from .trail_utils import (ColorMultigraph, Edge, build_aux,
                          eulerian_cycle_decomposition, find_trail_deterministic)

logger = logging.getLogger(__name__)


def matrix_hash(matrix):
    return digest('|'.join(','.join(str(c) for c in row) for row in np.asarray(matrix).tolist()))


class PerturbationStep:
    """
    Move from one realization to the next: swaps of (row, row, columns) applied in order.
    """
    def __init__(self, script, result_hash):
        self._script = [(int(a), int(b), [int(v) for v in labels]) for a, b, labels in script]
        self._touched_rows = sorted({row for a, b, _ in self._script for row in (a, b)})
        self._result_hash = result_hash

    @property
    def script(self):
        return self._script

    @property
    def touched_rows(self):
        return self._touched_rows

    @property
    def result_hash(self):
        return self._result_hash

    def apply(self, R):
        """
        Successor of R under this step; the result is checked against the recorded hash.
        """
        R = R.copy()
        for a, b, labels in self._script:
            R.swap(a, b, labels)
        assert matrix_hash(R.matrix) == self._result_hash, 'step does not start from this realization'
        return R

    def to_dict(self):
        return {
            'touchedRows': self._touched_rows,
            'script': [{'rows': [a, b], 'columns': labels} for a, b, labels in self._script],
            'hash': self._result_hash,
        }

    def __repr__(self):
        return f'PerturbationStep(rows={self._touched_rows}, swaps={len(self._script)})'


def apply_steps(R, steps):
    """
    Yields the realizations visited by a list of PerturbationSteps starting from R.
    """
    for step in steps:
        R = step.apply(R)
        yield R


def _swap(matrix, u1, u2, labels):
    upper = matrix[u1, labels].copy()
    matrix[u1, labels] = matrix[u2, labels]
    matrix[u2, labels] = upper


def repair_two(N, return_swap=False):
    """
    Cancels a complementary pair of deficiencies (u1,+a,-b), (u2,+b,-a) by swapping
    rows u1 and u2 along a trail from a to b in K(N, u1, u2).

    :param N: NearRealization with two defects
    :param return_swap: also return the swap (u1, u2, columns)
    :returns: ColoredRealization
    """
    if len(N.defects) != 2:
        raise BadDefectShape(f'repair_two needs 2 defects, got {len(N.defects)}')
    first, second = N.defects
    K = build_aux(N.matrix, first.row, second.row, k=N.M.k)
    trail = find_trail_deterministic(K, first.plus, first.minus)
    swap = (first.row, second.row, list(trail.labels))
    matrix = N.matrix.copy()
    _swap(matrix, *swap)
    R = ColoredRealization(matrix, N.M.k)
    assert check_realization(N.M, R), 'repair left a deficiency'
    return (R, swap) if return_swap else R


def repair_three(N, return_swap=False):
    """
    Turns a colour 3-cycle of deficiencies (u1,+a,-b), (u2,+b,-c), (u3,+c,-a) into the
    pair (u1,+a,-b), (u2,+b,-a) by swapping rows u3 and u2 along a trail from c to a
    in K(N, u3, u2). Row u1 is left untouched.

    :param N: NearRealization with three defects in cyclic order
    :returns: NearRealization with two defects
    """
    if len(N.defects) != 3:
        raise BadDefectShape(f'repair_three needs 3 defects, got {len(N.defects)}')
    first, second, third = N.defects
    K = build_aux(N.matrix, third.row, second.row, k=N.M.k)
    # c is the only colour with an outgoing surplus, a trail to a exists even though b has an incoming surplus
    trail = find_trail_deterministic(K, third.plus, third.minus, check_balance=False)
    swap = (third.row, second.row, list(trail.labels))
    matrix = N.matrix.copy()
    _swap(matrix, *swap)
    result = NearRealization(N.M, matrix, defects=[first, Deficiency(second.row, second.plus, first.plus)])
    return (result, swap) if return_swap else result


def _check_cycle(R, u, cycle, target):
    r = len(cycle)
    if r == 0 or len(set(cycle)) != r:
        raise NotACyclicPermutation(f'cycle columns {cycle} must be distinct and non-empty')
    colors = [int(R.matrix[u, v]) for v in cycle]
    if r > 1 and len(set(colors)) != r:
        raise NotACyclicPermutation(f'row {u} repeats colours {colors} on the cycle')
    for a, v in enumerate(cycle):
        following = cycle[(a + 1) % r]
        if target.matrix[u, following] != colors[a]:
            raise NotACyclicPermutation(f'target colour at ({u}, {following}) is {target.matrix[u, following]}, expected {colors[a]}')
    return colors


def apply_cycle(R, u, cycle, target, rows=None):
    """
    Moves the colours of row u along a cyclic permutation of columns: the colour at
    cycle[a] ends up at cycle[a+1] (cyclically) and the rest of row u is kept.

    Single-column swaps between u and a partner row create deficiencies, which are
    cancelled with repair_three/repair_two. The intermediate states are compressed
    into realization-to-realization steps touching at most three rows.

    :param R: ColoredRealization
    :param u: row to permute
    :param cycle: ordered columns
    :param target: ColoredRealization whose row u holds the permuted colours on the cycle
    :param rows: rows allowed to change (default all); rows outside must agree with target
    :returns: list of PerturbationStep
    """
    cycle = [int(v) for v in cycle]
    colors = _check_cycle(R, u, cycle, target)
    r = len(cycle)
    if r == 1:
        return []

    M = instance_of(R)
    allowed = sorted(set(range(R.n) if rows is None else rows) - {u})
    H = R.matrix.copy()
    anchor = R.matrix.copy()
    script = []
    steps = []

    def swap(u1, u2, labels):
        _swap(H, u1, u2, labels)
        script.append((u1, u2, list(labels)))

    def partner_for(color, v):
        for w in allowed:
            if H[w, v] == color:
                return w
        raise PreconditionViolated(f'no allowed row carries colour {color} at column {v}')

    def emit(matrix):
        nonlocal anchor
        if np.array_equal(matrix, anchor):
            return
        step = PerturbationStep(script, matrix_hash(matrix))
        assert len(step.touched_rows) <= 3, f'step touches rows {step.touched_rows}'
        assert check_realization(M, ColoredRealization(matrix, M.k)), 'step does not end on a realization'
        steps.append(step)
        anchor = matrix.copy()

    last = colors[-1]
    partner = partner_for(last, cycle[0])
    swap(u, partner, [cycle[0]])
    for s in range(1, r):
        wanted = colors[s - 1]
        other = partner_for(wanted, cycle[s])
        swap(u, other, [cycle[s]])
        if other == partner or s == r - 1:
            continue
        N = NearRealization(M, H, defects=[(u, last, colors[s]), (other, colors[s], wanted), (partner, wanted, last)])
        N, swap3 = repair_three(N, return_swap=True)
        H[...] = N.matrix
        script.append(swap3)
        repaired, swap2 = repair_two(N, return_swap=True)
        script.append(swap2)
        emit(repaired.matrix)
        # continue from the near-realization: undo the repair relative to the new anchor
        script = [swap2]
        partner = other

    if deficiencies(M, H):
        repaired, swap2 = repair_two(NearRealization(M, H), return_swap=True)
        H[...] = repaired.matrix
        script.append(swap2)
    emit(H)

    for a, v in enumerate(cycle):
        assert H[u, cycle[(a + 1) % r]] == colors[a], f'row {u} does not match the target on column {cycle[(a + 1) % r]}'
    logger.debug(f'Cycle of length {r} on row {u} applied in {len(steps)} steps.')
    return steps


def transformation_path(R1, R2):
    """
    Steps from R1 to R2, each touching at most three rows. Rows are fixed in index
    order: the colours of row u are permuted onto R2's along the cycles of the
    K(R2, R1) decomposition, after which row u is never touched again.

    :returns: list of PerturbationStep
    """
    if (R1.n, R1.m, R1.k) != (R2.n, R2.m, R2.k):
        raise DifferentInstances(f'shapes differ: {(R1.n, R1.m, R1.k)} vs {(R2.n, R2.m, R2.k)}')
    M = instance_of(R1)
    if M != instance_of(R2) or not check_realization(M, R1) or not check_realization(M, R2):
        raise DifferentInstances('realizations do not realize the same degree matrix')

    current = R1.copy()
    reduced = M
    steps = []
    for u in range(R1.n - 1):
        K = ColorMultigraph(M.k, [Edge(int(a), int(b), v) for v, (a, b) in enumerate(zip(R2.matrix[u], current.matrix[u]))])
        for cycle in eulerian_cycle_decomposition(K):
            if len(cycle) == 1:
                continue
            new_steps = apply_cycle(current, u, [e.label for e in cycle], R2, rows=range(u, R1.n))
            for step in new_steps:
                current = step.apply(current)
            steps.extend(new_steps)
        assert np.array_equal(current.matrix[u], R2.matrix[u]), f'row {u} was not fixed'
        reduced = reduced.fix_row(current.matrix[u])
        assert reduced.validate().ok, f'reduced instance after fixing row {u} is invalid'
    assert current == R2, 'last row is not forced'
    logger.info(f'Transformation path of {len(steps)} steps.')
    return steps
