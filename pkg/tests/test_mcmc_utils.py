from fractions import Fraction

import numpy as np
import pytest

from halfreg_utils.config_utils import ChainConfig
from halfreg_utils.construct_utils import construct_realization
from halfreg_utils.errors import InvalidMatrix, NotReversible
from halfreg_utils.mcmc_utils import (IDENTITY_BAIL, LAZY, PAIRED,
                                      ChainRunner, Diagnostics, ProposalTrace,
                                      acceptance_ratio, mh_step, propose,
                                      ratio_bounds, reverse_trace, run_chain,
                                      run_chains)
from halfreg_utils.model_utils import (ColoredRealization, DegreeMatrix,
                                       check_realization)
from halfreg_utils.oracle_utils import enumerate_realizations
from halfreg_utils.stats_utils import tally_states, uniformity_test


def _walk_proposals(M, count, seed):
    """
    Proposals along a chain, with every move checked for validity and reversibility.
    """
    rng = np.random.default_rng(seed)
    R = construct_realization(M)
    low, high = ratio_bounds(M.m)
    moves = 0
    for _ in range(count):
        t = propose(R, rng)
        if not t.is_move:
            assert np.array_equal(t.proposal, R.matrix)
            continue
        moves += 1
        assert check_realization(M, t.proposed), f'invalid proposal {t}'
        rt = reverse_trace(t)
        assert rt.branch == PAIRED[t.branch]
        assert np.array_equal(rt.proposal, t.source)
        if t.is_circuit:
            assert rt.p_fwd == t.p_fwd
        else:
            assert low <= rt.p_fwd / t.p_fwd <= high, f'ratio {rt.p_fwd / t.p_fwd} of {t}'
        if acceptance_ratio(t) == 1 or rng.random() < acceptance_ratio(t):
            R = t.proposed
    return moves


def test_proposals_latin4(latin4):
    assert _walk_proposals(latin4, 1500, seed=1) > 0


def test_proposals_random_instance(random663):
    assert _walk_proposals(random663, 1500, seed=2) > 0


@pytest.mark.slow
@pytest.mark.parametrize('name', ['latin5', 'random663'])
def test_proposals_full(name, request):
    M = request.getfixturevalue(name)
    assert _walk_proposals(M, 100000, seed=3) > 0


def test_reverse_is_an_involution(latin4, rng):
    R = construct_realization(latin4)
    checked = 0
    for _ in range(400):
        t = propose(R, rng)
        if not t.is_move:
            continue
        rt = reverse_trace(t)
        rr = reverse_trace(rt)
        assert rr.branch == t.branch
        assert rr.decisions == t.decisions
        assert rr.p_fwd == t.p_fwd
        assert np.array_equal(rr.proposal, t.proposal)
        checked += 1
        R = t.proposed
    assert checked > 0


def test_lazy_probability(latin3_square, rng):
    lazy = sum(propose(latin3_square, rng).branch == LAZY for _ in range(4000))
    assert abs(lazy / 4000 - 0.5) < 0.05


def test_single_row_only_bails(rng):
    R = ColoredRealization([[0, 1, 2]], 3)
    for _ in range(50):
        nxt, accepted, trace = mh_step(R, rng)
        assert trace.branch in (LAZY, IDENTITY_BAIL)
        assert nxt is R and not accepted


def test_unique_realization_never_moves(two_color, rng):
    R = construct_realization(two_color)
    assert R.matrix.tolist() == [[0, 1], [0, 1]]
    for _ in range(50):
        t = propose(R, rng)
        assert not t.is_move
        if t.branch == IDENTITY_BAIL:
            assert t.reason


def test_identity_bails_have_no_reverse(latin3_square):
    t = ProposalTrace(LAZY, latin3_square.matrix, 3)
    assert acceptance_ratio(t) == 1
    with pytest.raises(NotReversible):
        reverse_trace(t)


def test_ratio_bounds():
    assert ratio_bounds(4) == (Fraction(2, 4096), Fraction(1024))


def test_diagnostics_round_trip(latin4):
    _, diag = run_chain(latin4, ChainConfig(seed=5, steps=300))
    assert diag.is_consistent
    assert diag.total_steps == 300
    assert diag.circuit_mismatches == 0 and diag.bound_violations == 0
    data = diag.to_dict()
    assert data['lazyProbability'] == '1/2' and data['branchProbability'] == '1/4'
    restored = Diagnostics.from_dict(data, m=4)
    assert restored.to_dict() == data
    merged = Diagnostics(4).merge(diag).merge(restored)
    assert merged.total_steps == 600
    assert merged.min_ratio == diag.min_ratio


def test_chain_is_reproducible(latin3):
    config = ChainConfig(seed=7, steps=200, burnin=20, thin=5)
    first, _ = run_chain(latin3, config)
    second, _ = run_chain(latin3, config)
    assert [t for t, _ in first] == list(range(5, 201, 5))
    assert [R.encode() for _, R in first] == [R.encode() for _, R in second]
    assert all(check_realization(latin3, R) for _, R in first)


def test_chain_without_steps_yields_the_start(latin3):
    samples, diag = run_chain(latin3, ChainConfig(seed=1, steps=0, burnin=10))
    assert len(samples) == 1 and samples[0][0] == 0
    assert diag.total_steps == 10


def test_chain_of_non_equality_instance():
    M = DegreeMatrix(3, 4, 2, [1, 1], [[1, 1, 1, 0], [0, 1, 1, 1]])
    samples, _ = run_chain(M, ChainConfig(seed=3, steps=100))
    assert all(R.k == 3 for _, R in samples)


def test_chain_rejects_invalid_instance():
    with pytest.raises(InvalidMatrix):
        ChainRunner(DegreeMatrix(2, 2, 2, [1, 1], [[1, 0], [1, 1]]), ChainConfig())


def test_parallel_chains(latin3):
    results = run_chains(latin3, ChainConfig(seed=9, steps=50, thin=10, chains=2), max_workers=2)
    assert [chain for chain, _, _ in results] == [0, 1]
    for chain, samples, diag in results:
        assert len(samples) == 5
        assert diag.total_steps == 50
        single, _ = run_chain(latin3, ChainConfig(seed=9, steps=50, thin=10, chains=2), chain=chain)
        assert [R.encode() for _, R in samples] == [R.encode() for _, R in single]


def test_uniformity_latin3(latin3):
    samples, diag = run_chain(latin3, ChainConfig(seed=11, steps=60000, burnin=1000, thin=50))
    counts = tally_states(R.encode() for _, R in samples)
    space = enumerate_realizations(latin3)
    assert set(counts) == set(space.states)
    stats = uniformity_test(counts, space.count)
    assert stats.p_value >= 0.001
    assert stats.tv_distance <= 0.1
    assert diag.move_frequency >= Fraction(1, 2 * 3 ** 5)


@pytest.mark.slow
def test_waiting_time_latin4(latin4):
    _, diag = run_chain(latin4, ChainConfig(seed=13, steps=10 ** 6, thin=10 ** 6))
    assert diag.bound_violations == 0 and diag.circuit_mismatches == 0
    assert diag.move_frequency >= Fraction(1, 2 * 4 ** 5)


@pytest.mark.slow
def test_uniformity_latin4(latin4):
    samples, _ = run_chain(latin4, ChainConfig(seed=19, steps=10 ** 6, burnin=10 ** 4, thin=10))
    space = enumerate_realizations(latin4, count_only=True)
    assert space.count == 576
    stats = uniformity_test(tally_states(R.encode() for _, R in samples), space.count)
    assert stats.p_value >= 0.001
    assert stats.tv_distance <= 0.05
