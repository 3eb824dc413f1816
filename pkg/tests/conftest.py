import pytest

import symdyn as sd
from symdyn import library


@pytest.fixture(scope="session")
def bench_torus():
    return sd.MappingTorus(library.perturbed_twist(), 1, 10.0)


@pytest.fixture(scope="session")
def bench_db(bench_torus):
    return sd.find_periodic_points(bench_torus, n=1)


@pytest.fixture(scope="session")
def twist25_torus():
    return sd.MappingTorus(library.radial_twist_25(), 1, 10.0)


@pytest.fixture(scope="session")
def twist25_db(twist25_torus):
    return sd.find_periodic_points(twist25_torus, n=1)


@pytest.fixture(scope="session")
def golden_torus():
    return sd.MappingTorus(library.golden_rotation(), 1, 10.0)
