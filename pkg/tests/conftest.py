import pytest
from typer.testing import CliRunner

from backend.feynman import phi_k_model
from backend.generator import OmegaGenerator
from backend.graph import canonicalize_ordered


@pytest.fixture
def gen():
    with OmegaGenerator() as generator:
        yield generator


@pytest.fixture
def phi3():
    return phi_k_model(3, 3)


@pytest.fixture
def phi4():
    return phi_k_model(4, 2)


@pytest.fixture
def symbolic_phi3():
    return phi_k_model(3, 4, propagator="G")


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def double_edge():
    return canonicalize_ordered(2, [(1, 2), (1, 2)])


@pytest.fixture
def edge_and_loop():
    return canonicalize_ordered(2, [(1, 2), (2, 2)])
