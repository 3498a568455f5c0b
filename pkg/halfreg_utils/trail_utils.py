"""
Auxiliary colour multigraphs K(G, u, u') and trails in them.

K(G, u, u') has one vertex per colour and one directed edge per column v, from
the colour of (u, v) to the colour of (u', v), labelled v.
"""
import logging
from collections import namedtuple
from fractions import Fraction

import numpy as np

from .errors import (InvalidTrail, NoNonLoopEdge, NotBalanced,
                     PreconditionViolated, SameRow)

logger = logging.getLogger(__name__)

Edge = namedtuple('Edge', ['tail', 'head', 'label'])


class ColorMultigraph:
    """
    Directed edge-labelled multigraph on colours 0..k-1.
    """
    def __init__(self, k, edges):
        """
        :param k: number of colours
        :param edges: Edge records, one per label
        """
        self._k = k
        self._edges = tuple(sorted((Edge(*e) for e in edges), key=lambda e: e.label))
        self._by_label = {e.label: e for e in self._edges}
        assert len(self._by_label) == len(self._edges), 'labels must be distinct'
        self._out = [[] for _ in range(k)]
        self._out_degree = np.zeros(k, dtype=np.int64)
        self._in_degree = np.zeros(k, dtype=np.int64)
        for e in self._edges:
            self._out[e.tail].append(e)
            self._out_degree[e.tail] += 1
            self._in_degree[e.head] += 1

    @property
    def k(self):
        return self._k

    @property
    def m(self):
        return len(self._edges)

    @property
    def edges(self):
        return self._edges

    def edge(self, label):
        return self._by_label[label]

    def out_edges(self, c):
        """outgoing edges of colour c in label order"""
        return self._out[c]

    def available(self, c, used=()):
        """outgoing non-loop edges of c whose labels are not in used"""
        return [e for e in self._out[c] if e.head != c and e.label not in used]

    @property
    def out_degree(self):
        return self._out_degree

    @property
    def in_degree(self):
        return self._in_degree

    @property
    def imbalance(self):
        """out-degree minus in-degree per colour"""
        return self._out_degree - self._in_degree

    @property
    def is_balanced(self):
        return not self.imbalance.any()

    def __repr__(self):
        return f'ColorMultigraph(k={self.k}, m={self.m})'


def build_aux(R, u, u_prime, k=None):
    """
    K(R, u, u').

    :param R: ColoredRealization, NearRealization or (n x m) colour matrix
    :param u: row of the edge tails
    :param u_prime: row of the edge heads
    :param k: number of colours, required when R is a bare matrix
    :returns: ColorMultigraph
    """
    if u == u_prime:
        raise SameRow(f'auxiliary multigraph needs two different rows, got {u} twice')
    matrix = getattr(R, 'matrix', R)
    k = k if k is not None else getattr(R, 'k', None)
    if k is None:
        k = getattr(R, 'M').k
    tails, heads = matrix[u].tolist(), matrix[u_prime].tolist()
    return ColorMultigraph(k, [Edge(a, b, v) for v, (a, b) in enumerate(zip(tails, heads))])


class Trail:
    """
    Edge sequence of a multigraph with the probability the trail generator
    assigns to it.
    """
    def __init__(self, edges, start, end, prob=None):
        self._edges = tuple(Edge(*e) for e in edges)
        self._start = start
        self._end = end
        self._prob = prob

    @property
    def edges(self):
        return self._edges

    @property
    def labels(self):
        return tuple(e.label for e in self._edges)

    @property
    def colors(self):
        """start colour followed by the colour entered at each step"""
        return (self._start,) + tuple(e.head for e in self._edges)

    @property
    def start(self):
        return self._start

    @property
    def end(self):
        return self._end

    @property
    def prob(self):
        return self._prob

    @property
    def is_circuit(self):
        return len(self._edges) > 0 and self._start == self._end

    def reversed_edges(self):
        """the trail read backwards in the multigraph where its labels were swapped"""
        return tuple(Edge(e.head, e.tail, e.label) for e in reversed(self._edges))

    def __len__(self):
        return len(self._edges)

    def __eq__(self, other):
        if not isinstance(other, Trail):
            return NotImplemented
        return (self._edges, self._start, self._end) == (other._edges, other._start, other._end)

    def __hash__(self):
        return hash((self._edges, self._start, self._end))

    def __repr__(self):
        return f'Trail({" -> ".join(str(c) for c in self.colors)}, labels={list(self.labels)}, prob={self._prob})'


def walk(K, c_s, c_e, choose, max_steps=None):
    """
    Trail generator core: from c_s repeatedly take one of the available edges
    (non-loop, unused label) until c_e is entered or max_steps edges were taken.

    :param choose: callable receiving the list of available edges, returns one of them
    :returns: (edges, denominator, arrived) where the generation probability is 1/denominator
    """
    used = set()
    edges = []
    denominator = 1
    current = c_s
    while max_steps is None or len(edges) < max_steps:
        options = K.available(current, used)
        if not options:
            if not edges:
                raise NoNonLoopEdge(f'colour {c_s} has no non-loop outgoing edge')
            raise PreconditionViolated(f'trail from {c_s} to {c_e} is stuck at colour {current}')
        e = choose(options)
        denominator *= len(options)
        used.add(e.label)
        edges.append(e)
        current = e.head
        if current == c_e:
            return edges, denominator, True
    return edges, denominator, False


def check_trail_precondition(K, c_s, c_e):
    """
    Every colour but c_e has out-degree >= in-degree and c_s has strictly more
    out than in when c_s != c_e.
    """
    imbalance = K.imbalance
    bad = [c for c in range(K.k) if c != c_e and imbalance[c] < 0]
    if bad:
        raise PreconditionViolated(f'colours {bad} have more incoming than outgoing edges')
    if c_s != c_e and imbalance[c_s] <= 0:
        raise PreconditionViolated(f'start colour {c_s} has no surplus of outgoing edges')


def find_trail_deterministic(K, c_s, c_e, check_balance=True):
    """
    Trail from c_s to c_e, preferring the smallest available label at every step
    and backtracking only when stuck. With the degree precondition the first
    attempt never backtracks.

    :param check_balance: enforce the degree precondition
    :returns: Trail (prob not computed)
    """
    if check_balance:
        check_trail_precondition(K, c_s, c_e)
    if not K.available(c_s):
        raise PreconditionViolated(f'colour {c_s} has no non-loop outgoing edge')

    stack = [(c_s, [], iter(K.available(c_s)))]
    while stack:
        current, path, options = stack[-1]
        e = next(options, None)
        if e is None:
            stack.pop()
            continue
        new_path = path + [e]
        if e.head == c_e:
            return Trail(new_path, c_s, c_e)
        used = {x.label for x in new_path}
        stack.append((e.head, new_path, iter(K.available(e.head, used))))
    raise PreconditionViolated(f'no trail from {c_s} to {c_e}')


def sample_trail(K, c_s, c_e, rng):
    """
    Random trail from c_s to c_e with its exact generation probability.

    :param rng: numpy.random.Generator
    :returns: Trail
    """
    check_trail_precondition(K, c_s, c_e)
    edges, denominator, arrived = walk(K, c_s, c_e, lambda options: options[int(rng.integers(len(options)))])
    assert arrived
    return Trail(edges, c_s, c_e, Fraction(1, denominator))


def trail_probability_replay(K, edge_seq, c_e=None):
    """
    Probability that the trail generator emits the given edge sequence.

    :param edge_seq: Edges or labels in trail order
    :param c_e: end colour, when given the sequence must enter it only at its last step
    :returns: Fraction
    """
    if len(edge_seq) == 0:
        raise InvalidTrail('empty edge sequence')
    labels = [e.label if isinstance(e, tuple) else int(e) for e in edge_seq]
    for e, label in zip(edge_seq, labels):
        if label not in K._by_label:
            raise InvalidTrail(f'label {label} is not an edge')
        if isinstance(e, tuple) and Edge(*e) != K.edge(label):
            raise InvalidTrail(f'edge {tuple(e)} differs from {tuple(K.edge(label))} in the multigraph')
    current = K.edge(labels[0]).tail
    used = set()
    denominator = 1
    for i, label in enumerate(labels):
        e = K.edge(label)
        options = K.available(current, used)
        if e not in options:
            raise InvalidTrail(f'step {i} with label {label} is not available at colour {current}')
        denominator *= len(options)
        used.add(label)
        current = e.head
        if c_e is not None and current == c_e and i != len(labels) - 1:
            raise InvalidTrail(f'trail enters end colour {c_e} before its last step')
    if c_e is not None and current != c_e:
        raise InvalidTrail(f'trail ends at {current}, expected {c_e}')
    return Fraction(1, denominator)


def enumerate_trails(K, c_s, c_e):
    """
    Every trail the generator can emit from c_s to c_e, with probabilities.

    :returns: list of Trail
    """
    found = []

    def extend(current, path, used, denominator):
        options = K.available(current, used)
        if not options:
            raise PreconditionViolated(f'trail from {c_s} to {c_e} can get stuck at colour {current}')
        for e in options:
            if e.head == c_e:
                found.append(Trail(path + [e], c_s, c_e, Fraction(1, denominator * len(options))))
            else:
                extend(e.head, path + [e], used | {e.label}, denominator * len(options))

    extend(c_s, [], frozenset(), 1)
    return found


def eulerian_cycle_decomposition(K):
    """
    Partition of the edges of a balanced multigraph into directed cycles. Loops
    come out as one-edge cycles; every longer cycle visits each colour once.

    :returns: list of tuples of Edges
    """
    if not K.is_balanced:
        raise NotBalanced(f'imbalance {K.imbalance.tolist()}')
    cycles = [(e,) for e in K.edges if e.tail == e.head]
    used = {e.label for e in K.edges if e.tail == e.head}
    for first in K.edges:
        if first.label in used:
            continue
        path = []
        positions = {first.tail: 0}
        current = first.tail
        while True:
            e = next(x for x in K.out_edges(current) if x.label not in used and x.head != x.tail)
            used.add(e.label)
            path.append(e)
            current = e.head
            if current in positions:
                start = positions[current]
                cycles.append(tuple(path[start:]))
                for x in path[start:]:
                    positions.pop(x.tail, None)
                path = path[:start]
                if not path:
                    break
                positions[current] = start
            else:
                positions[current] = len(path)
    return cycles
