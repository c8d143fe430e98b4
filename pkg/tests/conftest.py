import numpy as np
import pytest

from cplab import ModelParams, build_lattice, make_gaussian_profile

# constraint-passing sets (e, nu0, xi) spanning the admissible region;
# the first is the documented default
PARAM_SETS = [
    (0.5, 2.0, 1.0),
    (0.5, 3.0, 0.25),
    (0.8, 2.5, 0.5),
    (1.2, 1.5, 1.5),
    (0.3, 4.0, 0.35),
]


@pytest.fixture(scope="session")
def default_params():
    return ModelParams(e=0.5, nu0=2.0)


@pytest.fixture(scope="session")
def gaussian():
    return make_gaussian_profile(1.0)


@pytest.fixture(scope="session")
def small_lattice():
    return build_lattice(1.0, 1.0)


@pytest.fixture(scope="session")
def medium_lattice():
    return build_lattice(2.0, 1.0)


@pytest.fixture(scope="session")
def strong_setup():
    """Parameters with a visible coupling on the unit lattice."""
    return (ModelParams(e=0.5, nu0=3.0), make_gaussian_profile(0.25),
            build_lattice(1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20200426)
