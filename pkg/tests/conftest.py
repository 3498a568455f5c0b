import json

import numpy as np
import pytest

from halfreg_utils.model_utils import ColoredRealization, DegreeMatrix
from halfreg_utils.oracle_utils import random_instance

LATIN3 = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


@pytest.fixture
def latin2():
    return DegreeMatrix.latin(2)


@pytest.fixture
def latin3():
    return DegreeMatrix.latin(3)


@pytest.fixture
def latin4():
    return DegreeMatrix.latin(4)


@pytest.fixture
def latin5():
    return DegreeMatrix.latin(5)


@pytest.fixture
def latin3_square():
    return ColoredRealization(LATIN3, 3)


@pytest.fixture
def two_color():
    # columns are monochromatic, the only realization is [[0, 1], [0, 1]]
    return DegreeMatrix(2, 2, 2, [1, 1], [[2, 0], [0, 2]])


@pytest.fixture
def random663():
    return random_instance(6, 6, 3, np.random.default_rng(2024))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def write_json(tmp_path):
    def write(obj, name='instance.json'):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return path
    return write
