import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from rcteams.enumeration import ModelClass, enumerate_models, sample_models
from rcteams.io import load_fixture
from rcteams.model import Signature

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = ("coin", "annbob", "annbob_b", "twocoin", "game")


@pytest.fixture(scope="session")
def sig22():
    return Signature.uniform(2, 2)


@pytest.fixture(scope="session")
def models22(sig22):
    return list(enumerate_models(sig22, ModelClass.parse("all")))


@pytest.fixture(scope="session")
def sig32():
    return Signature.uniform(3, 2)


@pytest.fixture(scope="session")
def sample32(sig32):
    return list(sample_models(sig32, 300, ModelClass.parse("all"), seed=11))


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}
