import random

import pytest

from votesim.group import TINY_GROUP, default_group


@pytest.fixture
def tiny():
    return TINY_GROUP


@pytest.fixture(scope="session")
def big():
    return default_group()


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
