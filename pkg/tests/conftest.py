import numpy as np
import pytest

from alloc_adapt import admire_benchmark, admire_preset, run


@pytest.fixture(scope="session")
def admire():
    return admire_preset()


@pytest.fixture(scope="session")
def benchmark_config():
    return admire_benchmark()


@pytest.fixture(scope="session")
def benchmark_trace(benchmark_config):
    return run(benchmark_config)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
