import random

import pytest

from memsig.group import Secp256k1Group, ToyGroup
from memsig.oracles import OracleConfig, Oracles


@pytest.fixture
def toy():
    return ToyGroup.default()


@pytest.fixture
def oracles(toy):
    return Oracles(toy, OracleConfig())


@pytest.fixture(scope="session")
def production():
    return Secp256k1Group()


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
