import numpy as np
import pytest

from halfreg_utils.construct_utils import construct_realization
from halfreg_utils.errors import (BadDefectShape, DifferentInstances,
                                  NotACyclicPermutation)
from halfreg_utils.model_utils import (ColoredRealization, Deficiency,
                                       DegreeMatrix, NearRealization,
                                       check_realization)
from halfreg_utils.path_utils import (PerturbationStep, apply_cycle,
                                      apply_steps, matrix_hash, repair_three,
                                      repair_two, transformation_path)

LATIN3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


def _check_path(M, R1, R2, steps):
    current = R1
    for step in steps:
        assert len(step.touched_rows) <= 3
        current = step.apply(current)
        assert check_realization(M, current)
    assert current == R2


def test_repair_two(latin3, latin3_square):
    matrix = np.array(LATIN3)
    matrix[[0, 1], 0] = matrix[[1, 0], 0]
    R, swap = repair_two(NearRealization(latin3, matrix), return_swap=True)
    assert check_realization(latin3, R)
    assert R == latin3_square
    assert swap == (0, 1, [0])


def test_repair_three(latin3):
    matrix = np.array(LATIN3)
    matrix[:, 0] = [1, 2, 0]
    N, swap = repair_three(NearRealization(latin3, matrix), return_swap=True)
    assert swap == (1, 2, [0, 2])
    assert N.defects == [Deficiency(0, 1, 0), Deficiency(2, 0, 1)]
    assert (N.matrix[0] == matrix[0]).all()
    assert check_realization(latin3, repair_two(N))


def test_repairs_check_the_defect_count(latin3):
    N = NearRealization(latin3, LATIN3)
    with pytest.raises(BadDefectShape):
        repair_two(N)
    with pytest.raises(BadDefectShape):
        repair_three(N)


def test_apply_cycle_on_latin_square(latin3, latin3_square):
    target = ColoredRealization([[2, 0, 1], [0, 1, 2], [1, 2, 0]], 3)
    steps = apply_cycle(latin3_square, 0, [0, 1, 2], target)
    assert steps
    R = latin3_square
    for R in apply_steps(latin3_square, steps):
        assert check_realization(latin3, R)
    assert R.matrix[0].tolist() == [2, 0, 1]
    assert all(len(step.touched_rows) <= 3 for step in steps)


def test_apply_cycle_rejects_non_cycles(latin3_square):
    with pytest.raises(NotACyclicPermutation):
        apply_cycle(latin3_square, 0, [0, 0], latin3_square)
    with pytest.raises(NotACyclicPermutation):
        apply_cycle(latin3_square, 0, [0, 1], latin3_square)


def test_transformation_path_latin3(latin3, latin3_square):
    target = ColoredRealization([[0, 2, 1], [1, 0, 2], [2, 1, 0]], 3)
    steps = transformation_path(latin3_square, target)
    _check_path(latin3, latin3_square, target, steps)
    assert transformation_path(latin3_square, latin3_square) == []


def test_transformation_path_row_permutations(random663, rng):
    M = random663
    R1 = construct_realization(M)
    for _ in range(10):
        R2 = ColoredRealization(R1.matrix[rng.permutation(M.n)], M.k)
        _check_path(M, R1, R2, transformation_path(R1, R2))


def _random_latin_square(n, rng):
    cyclic = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    square = cyclic[rng.permutation(n)][:, rng.permutation(n)]
    return ColoredRealization(rng.permutation(n)[square], n)


def test_transformation_path_latin5(latin5, rng):
    for _ in range(10):
        R1, R2 = _random_latin_square(5, rng), _random_latin_square(5, rng)
        _check_path(latin5, R1, R2, transformation_path(R1, R2))


def test_transformation_path_rejects_different_instances(latin3_square):
    other = ColoredRealization([[0, 1], [1, 0]], 2)
    with pytest.raises(DifferentInstances):
        transformation_path(latin3_square, other)
    not_latin = ColoredRealization([[0, 0, 1], [1, 1, 0], [2, 2, 2]], 3)
    with pytest.raises(DifferentInstances):
        transformation_path(latin3_square, not_latin)


def test_step_serialisation(latin3_square):
    step = PerturbationStep([(0, 1, [0, 1, 2])], matrix_hash([[1, 2, 0], [0, 1, 2], [2, 0, 1]]))
    assert step.touched_rows == [0, 1]
    assert step.to_dict() == {'touchedRows': [0, 1], 'script': [{'rows': [0, 1], 'columns': [0, 1, 2]}], 'hash': step.result_hash}
    assert step.apply(latin3_square).matrix.tolist() == [[1, 2, 0], [0, 1, 2], [2, 0, 1]]
    with pytest.raises(AssertionError):
        step.apply(step.apply(latin3_square))


@pytest.mark.slow
def test_transformation_path_random_pairs(latin5, random663):
    from halfreg_utils.config_utils import ChainConfig
    from halfreg_utils.mcmc_utils import run_chain
    for M in (latin5, random663):
        samples, _ = run_chain(M, ChainConfig(seed=17, steps=20000, thin=100))
        states = [R for _, R in samples]
        rng = np.random.default_rng(23)
        for _ in range(100):
            i, j = rng.choice(len(states), size=2, replace=False)
            _check_path(M, states[i], states[j], transformation_path(states[i], states[j]))
