import numpy as np
import pytest

from multirank import backend


@pytest.fixture(params=backend.available())
def kernel_backend(request):
    """Run a test under every importable kernel backend."""
    previous = backend.name()
    backend.use(request.param)
    yield request.param
    backend.use(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)
