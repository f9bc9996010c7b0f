import pytest

from slowbeams.constants import get_molecule


@pytest.fixture(scope="session")
def n7():
    return get_molecule("perfluoroC60-n7")
