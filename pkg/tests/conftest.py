import pytest

from cgpkit.qscalars import ScalarContext


@pytest.fixture(scope="session")
def ctx4():
    return ScalarContext(4)


@pytest.fixture(scope="session")
def ctx6():
    return ScalarContext(6)


@pytest.fixture(scope="session", params=[4, 6])
def ctx(request):
    return ScalarContext(request.param)
