import numpy as np
import pytest

import fracvexp as fx


@pytest.fixture(scope="session")
def spec_1d():
    # s p+ = 0.883 < 1: fully valid in 1-d
    return fx.make_spec("example_ii", dimension=1, order=0.3, m=0.5)


@pytest.fixture(scope="session")
def spec_2d():
    return fx.make_spec("example_ii", dimension=2, order=0.5, m=0.5)


@pytest.fixture(scope="session")
def spec_model():
    # the model-problem configuration: s p+ > 1 in 1-d (reported, not enforced)
    return fx.make_spec("example_ii", dimension=1, order=0.5, m=0.5)


@pytest.fixture(scope="session")
def const3_1d():
    return fx.make_spec("constant", dimension=1, order=0.3, m=0.5, value=3.0)


@pytest.fixture(scope="session")
def const3_2d():
    return fx.make_spec("constant", dimension=2, order=0.5, m=0.5, value=3.0)


def bump(power=3):
    def fn(p):
        return np.maximum(0.0, 1.0 - (np.atleast_2d(p) ** 2).sum(1)) ** power
    return fn


@pytest.fixture(scope="session")
def u_bump_1d():
    return fx.SampledFunction.from_function(bump(3), extent=1.5, n=401, dim=1)


@pytest.fixture(scope="session")
def u_bump_2d():
    return fx.SampledFunction.from_function(bump(2), extent=1.5, n=61, dim=2)


@pytest.fixture(scope="session")
def qcfg():
    return fx.QuadratureConfig()
