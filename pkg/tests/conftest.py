import hypothesis
import pytest

from gpme1d import barenblatt as bb
from gpme1d.nonlinearity import Pme

# deterministic suite: no wall-clock deadlines, fixed example order
hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("suite")


@pytest.fixture(scope="session")
def pme2() -> Pme:
    return Pme(2.0)


@pytest.fixture(scope="session")
def hat() -> bb.BarenblattParams:
    """Left reference patch: pressure 2/3 at the center, support [-2, 2] at t=0."""
    return bb.BarenblattParams(m=2.0, C=4.0 / 6.0, x0=0.0, t0=1.0)


@pytest.fixture(scope="session")
def check() -> bb.BarenblattParams:
    """Right reference patch: support [3*2^(1/3) - 1, 3*2^(1/3) + 1] at t=0."""
    return bb.BarenblattParams(m=2.0, C=1.0 / 6.0, x0=3.0 * 2.0 ** (1.0 / 3.0), t0=1.0)
