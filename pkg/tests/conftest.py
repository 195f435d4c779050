import numpy as np
import pytest

from weinorman.adjoint_exponential import AdjointExponentialTable
from weinorman.algebra_core import builtin_basis, compute_structure_tensor
from weinorman.golden import printed_su3_tensor
from weinorman.wei_norman import ChartSequence, WeiNormanContext


@pytest.fixture(scope="session")
def su2_basis():
    return builtin_basis("su2_pauli_half")


@pytest.fixture(scope="session")
def su3_basis():
    return builtin_basis("su3_cartan")


@pytest.fixture(scope="session")
def su2(su2_basis):
    return compute_structure_tensor(su2_basis)


@pytest.fixture(scope="session")
def su3(su3_basis):
    return compute_structure_tensor(su3_basis)


@pytest.fixture(scope="session")
def su3_printed():
    return printed_su3_tensor()


@pytest.fixture(scope="session")
def su2_table(su2):
    return AdjointExponentialTable(su2)


@pytest.fixture(scope="session")
def su3_table(su3):
    return AdjointExponentialTable(su3)


@pytest.fixture(scope="session")
def su3_printed_table(su3_printed):
    return AdjointExponentialTable(su3_printed)


@pytest.fixture(scope="session")
def su2_canonical(su2, su2_table):
    return WeiNormanContext(su2, ChartSequence.canonical(3), table=su2_table)


@pytest.fixture(scope="session")
def su2_zyz(su2, su2_table):
    return WeiNormanContext(su2, ChartSequence.zyz(), table=su2_table)


@pytest.fixture(scope="session")
def su3_canonical(su3, su3_table):
    return WeiNormanContext(su3, ChartSequence.canonical(8), table=su3_table)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
