import json

import numpy as np
import pytest

from tasks.examples import (
    diag_pencil_example,
    leslie_system,
    nilpotent_compound_system,
    periodic_system,
    singular_diag_system,
)
from tests.oracles import SEED
from utils import write_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def periodic():
    return periodic_system()


@pytest.fixture
def leslie():
    return leslie_system()


@pytest.fixture
def singular_diag():
    return singular_diag_system()


@pytest.fixture
def nilpotent_compound():
    return nilpotent_compound_system()


@pytest.fixture
def diag_pencil():
    return diag_pencil_example()


@pytest.fixture
def matrix_file(tmp_path):
    """Write a matrix to a JSON file and return its path"""
    counter = {'n': 0}

    def _write(a):
        counter['n'] += 1
        path = tmp_path / f'm{counter["n"]}.json'
        write_matrix(str(path), a)
        return str(path)
    return _write


@pytest.fixture
def raw_file(tmp_path):
    def _write(text, name='raw.json'):
        path = tmp_path / name
        path.write_text(text if isinstance(text, str) else json.dumps(text))
        return str(path)
    return _write
