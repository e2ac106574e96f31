import pytest

from heckedyn.ssgraph import build_ssgraph


@pytest.fixture(scope="session")
def g_11_5_1():
    return build_ssgraph(11, 5, 1)


@pytest.fixture(scope="session")
def g_13_5_1():
    return build_ssgraph(13, 5, 1)


@pytest.fixture(scope="session")
def g_11_3_1():
    return build_ssgraph(11, 3, 1)


@pytest.fixture(scope="session")
def g_11_3_4():
    return build_ssgraph(11, 3, 4)
