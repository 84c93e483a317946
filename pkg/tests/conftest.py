import pytest

import gigadc as g


@pytest.fixture(scope="session")
def prov():
    return g.provision(100e9, 0.7, g.NVL72)


@pytest.fixture(scope="session")
def dense_plan(prov):
    return g.plan(g.DENSE_100T, g.DEFAULT_PRECISION, g.DEFAULT_CATALOG, prov)


@pytest.fixture(scope="session")
def moe_plan(prov):
    return g.plan(g.MOE_8X17T, g.DEFAULT_PRECISION, g.DEFAULT_CATALOG, prov)


def rel_err(value, target):
    return abs(value - target) / abs(target)
