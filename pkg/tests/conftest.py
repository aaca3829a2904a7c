import pytest
from hypothesis import settings

from primbordism.prim_map import builtin_model

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def figure_eight():
    return builtin_model("figure_eight")


@pytest.fixture(scope="session")
def round_circle():
    return builtin_model("round_circle")


@pytest.fixture(scope="session")
def round_torus():
    return builtin_model("round_torus")


@pytest.fixture(scope="session")
def tilted_torus():
    return builtin_model("tilted_torus")


@pytest.fixture(scope="session")
def boy():
    return builtin_model("boy_surface")
