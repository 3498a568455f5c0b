"""
Constructive existence: realize each colour factor on its own, take the union
and drive its exceed number down to zero by pairwise edge exchanges.
"""
import logging
from collections import Counter

import numpy as np

from .errors import AlreadySimple, CoverNotFound, Infeasible, InvalidMatrix
from .model_utils import ColoredRealization, extend_with_nonedge_color

logger = logging.getLogger(__name__)


def realize_factor(n, d_i, f_row):
    """
    Simple bipartite graph with every row of degree d_i and column j of degree f_row[j].

    Rows are filled in index order, each taking the d_i columns with the largest
    remaining demand (ties to the smallest column index).

    :param n: number of rows
    :param d_i: row degree
    :param f_row: length m column degrees
    :returns: (n x m) 0/1 array
    """
    f_row = np.asarray(f_row, dtype=np.int64)
    m = len(f_row)
    if n * d_i != f_row.sum() or d_i > m or (f_row > n).any() or (f_row < 0).any() or d_i < 0:
        raise Infeasible(f'degrees n={n}, d={d_i}, f={f_row.tolist()} are not graphical')
    factor = np.zeros((n, m), dtype=np.int64)
    residual = f_row.copy()
    for u in range(n):
        picks = np.lexsort((np.arange(m), -residual))[:d_i]
        if (residual[picks] == 0).any():
            raise Infeasible(f'row {u} cannot place {d_i} edges, residual demand {residual.tolist()}')
        factor[u, picks] = 1
        residual[picks] -= 1
    return factor


class MultiUnion:
    """
    Union of the colour factors as a (k x n x m) 0/1 tensor: layer i holds the
    edges of colour i, each layer a simple graph.
    """
    def __init__(self, tensor):
        self._tensor = np.array(tensor, dtype=np.int8)
        assert self._tensor.ndim == 3, 'tensor must be (k x n x m)'
        assert ((self._tensor == 0) | (self._tensor == 1)).all(), 'layers must be simple'

    @classmethod
    def from_instance(cls, M):
        return cls(np.stack([realize_factor(M.n, int(M.d[i]), M.f[i]) for i in range(M.k)]))

    @property
    def tensor(self):
        return self._tensor

    @property
    def k(self):
        return self._tensor.shape[0]

    @property
    def multiplicity(self):
        return self._tensor.sum(axis=0)

    def row_degrees(self):
        """(k x n) per-colour row degrees"""
        return self._tensor.sum(axis=2)

    def col_degrees(self):
        """(k x m) per-colour column degrees"""
        return self._tensor.sum(axis=1)

    def to_realization(self):
        mult = self.multiplicity
        assert (mult == 1).all(), 'union must cover every cell exactly once'
        return ColoredRealization(self._tensor.argmax(axis=0), self.k)


def exceed_number(MU):
    """
    Sum over cells of max(multiplicity - 1, 0); zero iff the union is simple.
    """
    return int(np.maximum(MU.multiplicity - 1, 0).sum())


class CaseSearchState:
    """
    Bookkeeping of one reduction step: the anchor cell (u, v), the partner row,
    the column levels V_1..V_j grown in the third case and the colour multisets
    C_0..C_{j-1} they cover.
    """
    def __init__(self, u, v, partner):
        self.u = u
        self.v = v
        self.partner = partner
        self.levels = []
        self.colors = []
        self.case = None

    @property
    def used(self):
        return {self.v}.union(*self.levels) if self.levels else {self.v}

    def __repr__(self):
        return f'CaseSearchState(anchor=({self.u}, {self.v}), partner={self.partner}, levels={self.levels}, case={self.case})'


def _witness(tensor, colors, u, partner, w):
    # smallest colour of the current multiset present at (partner, w) and absent at (u, w)
    for c in sorted(colors):
        if tensor[c, partner, w] and not tensor[c, u, w]:
            return c
    return None


def _cover(tensor, colors, u, partner, candidates):
    # candidates hold exactly one colour in the partner row
    level = []
    for c in sorted(colors):
        pool = [w for w in candidates if tensor[c, partner, w] and not tensor[c, u, w] and w not in level]
        if len(pool) < colors[c]:
            return None
        level.extend(pool[:colors[c]])
    return sorted(level)


def reduce_exceed_step(MU, return_state=False):
    """
    One reduction of the exceed number by at least one.

    :param MU: MultiUnion with a cell of multiplicity >= 2
    :param return_state: also return the CaseSearchState of the step
    :returns: new MultiUnion with identical per-colour margins (and CaseSearchState if return_state)
    """
    mult = MU.multiplicity
    if not (mult > 1).any():
        raise AlreadySimple('exceed number is already 0')
    tensor = MU.tensor.copy()
    m = tensor.shape[2]
    u, v = (int(x) for x in np.argwhere(mult > 1)[0])
    partner = int(np.flatnonzero(mult[:, v] == 0)[0])
    state = CaseSearchState(u, v, partner)
    colors = Counter(int(c) for c in np.flatnonzero(tensor[:, u, v]))

    while True:
        used = state.used
        candidates = [w for w in range(m) if w not in used and _witness(tensor, colors, u, partner, w) is not None]
        hit = None
        for w in candidates:
            if mult[partner, w] >= 2:
                hit, state.case = w, 1
                break
            if mult[partner, w] == 1 and mult[u, w] == 0:
                hit, state.case = w, 2
                break
        if hit is not None:
            break
        state.case = 3
        level = _cover(tensor, colors, u, partner, candidates)
        if level is None:
            raise CoverNotFound(f'no column subset covers colours {dict(colors)} at {state}')
        state.levels.append(level)
        state.colors.append(colors)
        colors = Counter(int(c) for w in level for c in np.flatnonzero(tensor[:, u, w]))

    logger.debug(f'Resolving {state} at column {hit}.')
    carry = _witness(tensor, colors, u, partner, hit)
    tensor[carry, partner, hit] = 0
    tensor[carry, u, hit] = 1
    for level in reversed(state.levels):
        w = next(w for w in level if tensor[carry, u, w])
        (prev,) = np.flatnonzero(tensor[:, partner, w])
        tensor[carry, u, w] = 0
        tensor[carry, partner, w] = 1
        tensor[prev, partner, w] = 0
        tensor[prev, u, w] = 1
        carry = int(prev)
    assert tensor[carry, u, v] and not tensor[carry, partner, v], 'chain must end on the anchor column'
    tensor[carry, u, v] = 0
    tensor[carry, partner, v] = 1
    if return_state:
        return MultiUnion(tensor), state
    return MultiUnion(tensor)


def construct_realization(M, return_history=False):
    """
    Realization of a valid instance. Non-equality instances are extended with
    the non-edge colour first and the result is reported against the extension.

    :param M: DegreeMatrix
    :param return_history: also return the sequence of exceed numbers
    :returns: ColoredRealization (and list of ints if return_history)
    """
    report = M.validate()
    if not report.ok:
        raise InvalidMatrix(report.describe())
    extended = extend_with_nonedge_color(M)
    MU = MultiUnion.from_instance(extended)
    history = [exceed_number(MU)]
    while history[-1] > 0:
        MU = reduce_exceed_step(MU)
        history.append(exceed_number(MU))
        assert history[-1] < history[-2], f'exceed number did not decrease: {history[-2:]}'
        logger.debug(f'Exceed number {history[-2]} -> {history[-1]}')
    assert (MU.row_degrees() == extended.d[:, None]).all() and (MU.col_degrees() == extended.f).all(), 'factor margins changed'
    logger.info(f'Constructed realization of {extended.n}x{extended.m} instance with {extended.k} colours in {len(history) - 1} reduction steps.')
    R = MU.to_realization()
    if return_history:
        return R, history
    return R
