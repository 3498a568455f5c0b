from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from halfreg_utils.errors import (InvalidTrail, NoNonLoopEdge, NotBalanced,
                                  PreconditionViolated, SameRow)
from halfreg_utils.model_utils import ColoredRealization
from halfreg_utils.stats_utils import binomial_deviations
from halfreg_utils.trail_utils import (ColorMultigraph, Edge, build_aux,
                                       check_trail_precondition,
                                       enumerate_trails,
                                       eulerian_cycle_decomposition,
                                       find_trail_deterministic, sample_trail,
                                       trail_probability_replay, walk)


@pytest.fixture
def balanced():
    # every colour has two edges out and two in
    return ColorMultigraph(3, [Edge(0, 1, 0), Edge(0, 2, 1), Edge(1, 0, 2), Edge(1, 2, 3), Edge(2, 0, 4), Edge(2, 1, 5)])


@pytest.fixture
def surplus():
    # colour 0 has one outgoing edge too many, colour 2 one incoming edge too many
    return ColorMultigraph(3, [Edge(0, 1, 0), Edge(1, 2, 1), Edge(0, 2, 2), Edge(2, 0, 3)])


def test_build_aux(latin3_square):
    K = build_aux(latin3_square, 0, 1)
    assert K.edges == (Edge(0, 1, 0), Edge(1, 2, 1), Edge(2, 0, 2))
    assert K.is_balanced
    assert build_aux(latin3_square.matrix, 1, 0, k=3).edge(0) == Edge(1, 0, 0)
    with pytest.raises(SameRow):
        build_aux(latin3_square, 2, 2)


def test_aux_of_a_realization_is_balanced(random663):
    from halfreg_utils.construct_utils import construct_realization
    R = construct_realization(random663)
    for u in range(R.n):
        for w in range(R.n):
            if u != w:
                assert build_aux(R, u, w).is_balanced


def test_enumerated_circuit_law(balanced):
    trails = enumerate_trails(balanced, 0, 0)
    assert len(trails) == 6
    assert sum(t.prob for t in trails) == 1
    probs = {t.labels: t.prob for t in trails}
    assert probs[(0, 2)] == Fraction(1, 4)
    assert probs[(0, 3, 5, 2)] == Fraction(1, 8)
    assert all(t.is_circuit for t in trails)


def test_replay_matches_enumeration(balanced):
    for t in enumerate_trails(balanced, 0, 0):
        assert trail_probability_replay(balanced, t.edges, c_e=0) == t.prob
        assert trail_probability_replay(balanced, list(t.labels)) == t.prob


def test_reversed_circuit_replay_is_within_a_factor_m():
    R = ColoredRealization([[0, 0, 1, 1, 2, 2], [1, 2, 0, 2, 0, 1]], 3)
    K = build_aux(R, 0, 1)
    trails = enumerate_trails(K, 0, 0)
    assert len(trails) == 6
    for trail in trails:
        swapped = build_aux(R.copy().swap(0, 1, trail.labels), 0, 1)
        back = trail_probability_replay(swapped, trail.reversed_edges(), c_e=0)
        assert Fraction(1, R.m) <= back / trail.prob <= R.m, f'{trail}: reverse probability {back}'
    (trail,) = [t for t in trails if t.labels == (0, 3, 5, 2)]
    swapped = build_aux(R.copy().swap(0, 1, trail.labels), 0, 1)
    assert trail_probability_replay(swapped, trail.reversed_edges(), c_e=0) == Fraction(1, 8)


def test_replay_rejects_illegal_sequences(balanced):
    with pytest.raises(InvalidTrail):
        trail_probability_replay(balanced, [])
    with pytest.raises(InvalidTrail):
        trail_probability_replay(balanced, [0, 0])
    with pytest.raises(InvalidTrail):
        trail_probability_replay(balanced, [99])
    with pytest.raises(InvalidTrail):
        trail_probability_replay(balanced, [0, 4])
    with pytest.raises(InvalidTrail):
        trail_probability_replay(balanced, [Edge(1, 0, 0)])
    with pytest.raises(InvalidTrail, match='before its last step'):
        trail_probability_replay(balanced, [0, 2, 1, 4], c_e=0)


def test_trail_to_another_colour(surplus):
    check_trail_precondition(surplus, 0, 2)
    trail = find_trail_deterministic(surplus, 0, 2)
    assert trail.labels == (0, 1)
    assert trail.colors == (0, 1, 2)
    assert {t.labels: t.prob for t in enumerate_trails(surplus, 0, 2)} == {(0, 1): Fraction(1, 2), (2,): Fraction(1, 2)}
    with pytest.raises(PreconditionViolated):
        check_trail_precondition(surplus, 1, 2)


def test_sample_trail(surplus, rng):
    trail = sample_trail(surplus, 0, 2, rng)
    assert trail.start == 0 and trail.end == 2
    assert trail.prob == Fraction(1, 2)
    assert trail_probability_replay(surplus, trail.edges, c_e=2) == trail.prob


def test_loop_only_start_colour():
    K = ColorMultigraph(2, [Edge(0, 0, 0), Edge(1, 1, 1)])
    with pytest.raises(NoNonLoopEdge):
        walk(K, 0, 1, lambda options: options[0])
    with pytest.raises(PreconditionViolated):
        find_trail_deterministic(K, 0, 0)


def test_walk_stops_at_max_steps(balanced):
    edges, denominator, arrived = walk(balanced, 0, 0, lambda options: options[-1], max_steps=1)
    assert edges == [Edge(0, 2, 1)]
    assert denominator == 2
    assert not arrived


def test_trail_reversal():
    K = ColorMultigraph(3, [Edge(0, 1, 0), Edge(1, 2, 1), Edge(2, 0, 2)])
    trail = find_trail_deterministic(K, 0, 0)
    assert trail.labels == (0, 1, 2)
    assert trail.reversed_edges() == (Edge(0, 2, 2), Edge(2, 1, 1), Edge(1, 0, 0))
    assert len(trail) == 3


def test_eulerian_cycle_decomposition(balanced):
    K = ColorMultigraph(3, list(balanced.edges) + [Edge(1, 1, 6)])
    cycles = eulerian_cycle_decomposition(K)
    labels = sorted(e.label for cycle in cycles for e in cycle)
    assert labels == list(range(7))
    assert (Edge(1, 1, 6),) in cycles
    for cycle in cycles:
        assert cycle[-1].head == cycle[0].tail
        assert all(a.head == b.tail for a, b in zip(cycle, cycle[1:]))
        assert len({e.tail for e in cycle}) == len(cycle)


def test_eulerian_cycle_decomposition_needs_balance(surplus):
    with pytest.raises(NotBalanced):
        eulerian_cycle_decomposition(surplus)


def _trail_law_deviations(K, draws, seed):
    rng = np.random.default_rng(seed)
    exact = {t.labels: t.prob for t in enumerate_trails(K, 0, 0)}
    counts = Counter(sample_trail(K, 0, 0, rng).labels for _ in range(draws))
    return binomial_deviations(counts, exact, draws)


def test_trail_law(balanced):
    z = _trail_law_deviations(balanced, 20000, seed=3)
    assert max(abs(x) for x in z.values()) < 4


@pytest.mark.slow
def test_trail_law_full(balanced):
    z = _trail_law_deviations(balanced, 100000, seed=5)
    assert max(abs(x) for x in z.values()) < 3
