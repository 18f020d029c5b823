import numpy as np
import pytest

from covertkey.channel import CovertConfig, table1_channel
from covertkey.sim import fixed_plan, sample_codebooks

RHO_STAR = (0.28, 0.72)
TINY_SEED = 20240611


@pytest.fixture(scope="session")
def ch1():
    return table1_channel(1)


@pytest.fixture(scope="session")
def ch2():
    return table1_channel(2)


@pytest.fixture(scope="session")
def cfg_quarter():
    return CovertConfig(RHO_STAR, 0.25)


@pytest.fixture(scope="session")
def tiny(ch1, cfg_quarter):
    """n = 4, (G, M, N) = (2, 2, 2) per user on the first reference channel."""
    plan = fixed_plan(ch1, cfg_quarter, 4, [(2, 2, 2), (2, 2, 2)])
    return ch1, cfg_quarter, plan, sample_codebooks(plan, cfg_quarter, TINY_SEED)


def binary_rows(n):
    return np.array([[(i >> (n - 1 - t)) & 1 for t in range(n)] for i in range(2 ** n)])
