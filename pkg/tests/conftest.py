import hypothesis
import pytest

from cotorsionlab.fixtures import (FIXTURES, fixture_subcategories,
                                   paper_context)
from cotorsionlab.heartcat import heart_context
from cotorsionlab.pairs import compute_hearts, verify_cotorsion, verify_twin
from cotorsionlab.subcat import SearchBounds

hypothesis.settings.register_profile(
    "suite", max_examples=40, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("suite")


@pytest.fixture(scope="session")
def ctx():
    return paper_context()


@pytest.fixture(scope="session")
def bounds():
    return SearchBounds()


class FixtureSetup:
    def __init__(self, ctx, name, bounds):
        self.name = name
        self.subs = fixture_subcategories(ctx, name)
        self.st = verify_cotorsion(ctx, self.subs["S"], self.subs["T"], bounds)
        self.uv = verify_cotorsion(ctx, self.subs["U"], self.subs["V"], bounds)
        self.tp = verify_twin(ctx, self.st, self.uv)
        self.hearts = compute_hearts(ctx, self.tp, bounds)
        self.hctx = heart_context(ctx, self.tp, self.hearts, bounds)


@pytest.fixture(scope="session")
def setups(ctx, bounds):
    return {name: FixtureSetup(ctx, name, bounds) for name in FIXTURES}


@pytest.fixture(scope="session")
def ex_nonintegral(setups):
    return setups["ex-nonintegral"]


@pytest.fixture(scope="session")
def ex_abelian(setups):
    return setups["ex-abelian"]


@pytest.fixture(scope="session")
def ex_nonabelian(setups):
    return setups["ex-nonabelian"]
