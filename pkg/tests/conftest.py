import pytest

from boolrank.algebraic import algebraic_family
from boolrank.crown import crown_matrix


@pytest.fixture(scope="session")
def family_3_3():
    """The 18-member every-3-cover family over the 6859-crown (built once)."""
    return algebraic_family(3, 3)


@pytest.fixture(scope="session")
def crown_6859():
    return crown_matrix(6859)
