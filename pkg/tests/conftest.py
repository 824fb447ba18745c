import numpy as np
import pytest

from gconv.measures import RngStream


@pytest.fixture
def rng(request):
    # one stream per test so results do not depend on test order
    stream = abs(hash(request.node.name)) % (2**31)
    return RngStream(20240601, stream).generator()


def pytest_configure(config):
    np.seterr(over="ignore")
