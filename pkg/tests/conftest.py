import random

import pytest

from apnlab.corpus import gold_function, inverse_function


@pytest.fixture(scope="session")
def x3():
    return gold_function(6)


@pytest.fixture(scope="session")
def x3_m4():
    return gold_function(4)


@pytest.fixture(scope="session")
def inv62():
    return inverse_function(6)


@pytest.fixture()
def rng():
    return random.Random(0xA9A1)
