import functools

import pytest

from kpip.random_instances import potts_suite, table_suite


@functools.lru_cache(maxsize=None)
def _tables():
    return tuple(table_suite(seed=0, count=200))


@functools.lru_cache(maxsize=None)
def _potts():
    return tuple(potts_suite(seed=1, count=100))


@pytest.fixture(scope="session")
def tables():
    return _tables()


@pytest.fixture(scope="session")
def potts_instances():
    return _potts()

