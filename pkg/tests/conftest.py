import numpy as np
import pytest

from modspace.grid import GridSpec, sample_builtin
from modspace.norms import ModParams


@pytest.fixture(scope="session")
def g512():
    return GridSpec(1, 512, 32.0)


@pytest.fixture(scope="session")
def g256():
    return GridSpec(1, 256, 16.0)


@pytest.fixture(scope="session")
def gaussian512(g512):
    return sample_builtin("gaussian", g512)


@pytest.fixture(scope="session")
def gaussian256(g256):
    return sample_builtin("gaussian", g256)


@pytest.fixture(scope="session")
def p110():
    return ModParams(1, 1, 0)


@pytest.fixture(scope="session")
def small_battery(g256):
    from modspace.verify import make_battery

    return make_battery(g256, seed=7, size=8)


def assert_close(a, b, tol, what=""):
    err = np.abs(np.asarray(a) - np.asarray(b)).max()
    assert err <= tol, f"{what}: max error {err:.3e} > {tol:.1e}"
