import pytest

from monadlab import StateMonadCtx, enumerate_algebras
from monadlab.finset import FinSet


@pytest.fixture(scope="session")
def ctx1():
    return StateMonadCtx(1)


@pytest.fixture(scope="session")
def ctx2():
    return StateMonadCtx(2)


@pytest.fixture(scope="session")
def ctx3():
    return StateMonadCtx(3)


@pytest.fixture(scope="session")
def twelve(ctx2):
    """The complete set of algebra structures on a 4-element carrier with
    2 states, by the transport oracle."""
    return enumerate_algebras(ctx2, FinSet(4), method="transport")
