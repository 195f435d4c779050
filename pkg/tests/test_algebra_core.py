import numpy as np
import pytest

from weinorman.algebra_core import (
    LieBasis,
    StructureTensor,
    adjoint_action,
    adjoint_generator,
    adjoint_matrix,
    algebra_coordinates,
    algebra_element,
    builtin_basis,
    closure_residuals,
    compute_structure_tensor,
    gellmann_matrices,
    jacobi_residual,
)
from weinorman.errors import BasisValidationError, ClosureError, UnsupportedBasisError


def test_su2_builtin_basis(su2_basis):
    assert su2_basis.dim_algebra == 3
    assert su2_basis.dim_defining == 2
    assert su2_basis.is_full_algebra
    assert np.allclose(su2_basis.generators[2], 0.5 * np.diag([1j, -1j]))


def test_su3_builtin_basis(su3_basis):
    assert su3_basis.dim_algebra == 8
    x12 = su3_basis.generators[2]
    expected = np.zeros((3, 3), dtype=complex)
    expected[0, 1], expected[1, 0] = 1.0, -1.0
    assert np.array_equal(x12, expected)


def test_generators_are_read_only(su2_basis):
    with pytest.raises(ValueError):
        su2_basis.generators[0, 0, 0] = 1.0


def test_unknown_label():
    with pytest.raises(UnsupportedBasisError) as excinfo:
        builtin_basis("so5_weird")
    assert "so5_weird" in str(excinfo.value)


@pytest.mark.parametrize("label", ["su1_gellmann", "su5_gellmann"])
def test_gellmann_dimension_limits(label):
    with pytest.raises(UnsupportedBasisError, match=label):
        builtin_basis(label)


def test_gellmann_ordering():
    lambdas = gellmann_matrices(3)
    assert lambdas.shape == (8, 3, 3)
    assert np.allclose(lambdas[1], [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]])
    assert np.allclose(lambdas[7], np.diag([1, 1, -2]) / np.sqrt(3))
    gram = np.einsum("aij,bji->ab", lambdas, lambdas)
    assert np.allclose(gram, 2.0 * np.eye(8))


def test_rejects_non_skew_generator():
    hermitian = np.array([[[0, 1], [1, 0]]], dtype=complex)
    with pytest.raises(BasisValidationError, match="skew-Hermitian"):
        LieBasis("bad", hermitian)


def test_rejects_trace():
    with pytest.raises(BasisValidationError, match="traceless"):
        LieBasis("bad", np.array([1j * np.eye(2)]))


def test_rejects_dependent_generators(su2_basis):
    generators = np.array([su2_basis.generators[0], 2.0 * su2_basis.generators[0]])
    with pytest.raises(BasisValidationError, match="linearly dependent"):
        LieBasis("bad", generators)


def test_rejects_bad_shape():
    with pytest.raises(BasisValidationError):
        LieBasis("bad", np.zeros((2, 2, 3)))


def test_su2_structure_constants(su2):
    assert su2.constant(3, 1, 2) == 1.0
    assert su2.constant(1, 2, 3) == 1.0
    assert su2.constant(2, 3, 1) == 1.0
    assert su2.constant(3, 2, 1) == -1.0
    assert len(su2.nonzero_triplets(upper_only=True)) == 3
    assert len(su2.nonzero_triplets()) == 6


def test_su3_structure_constants(su3):
    assert su3.constant(4, 1, 3) == 2.0
    assert su3.constant(8, 4, 5) == 1.0
    assert su3.constant(8, 1, 7) == -1.0
    assert su3.constant(1, 7, 8) == 0.0
    assert su3.constant(6, 1, 5) == 1.0
    assert su3.constant(1, 5, 6) == 2.0
    assert su3.constant(2, 5, 6) == 2.0
    assert len(su3.nonzero_triplets(upper_only=True)) == 28


def test_nonzero_triplets_sorted(su3):
    triplets = su3.nonzero_triplets(upper_only=True)
    keys = [(i, j, k) for k, i, j, _ in triplets]
    assert keys == sorted(keys)
    assert all(i < j for _, i, j, _ in triplets)


def test_constant_index_range(su2):
    with pytest.raises(IndexError):
        su2.constant(4, 1, 2)
    with pytest.raises(IndexError):
        su2.constant(0, 1, 2)


def test_structure_tensor_requires_antisymmetry():
    array = np.zeros((2, 2, 2))
    array[0, 0, 1] = 1.0
    with pytest.raises(ValueError, match="antisymmetric"):
        StructureTensor(array)


@pytest.mark.parametrize("label", ["su2_pauli_half", "su3_cartan", "su3_gellmann", "su4_gellmann"])
def test_closure_and_jacobi(label):
    basis = builtin_basis(label)
    tensor = compute_structure_tensor(basis)
    assert np.max(closure_residuals(basis, tensor)) <= 1e-10
    assert jacobi_residual(tensor) <= 1e-10
    assert np.array_equal(tensor.array, -tensor.array.transpose(0, 2, 1))


def test_gellmann_constants_are_f_abc():
    tensor = compute_structure_tensor(builtin_basis("su3_gellmann"))
    assert tensor.constant(3, 1, 2) == 1.0
    assert np.isclose(tensor.constant(8, 4, 5), np.sqrt(3) / 2, atol=1e-12)
    assert np.isclose(tensor.constant(6, 1, 5), -0.5, atol=1e-12)


def test_printed_su3_table_violates_jacobi(su3_printed, su3):
    assert jacobi_residual(su3_printed) > 0.5
    assert jacobi_residual(su3) <= 1e-10


def test_non_integer_constants_are_kept(su2_basis):
    scaled = LieBasis("scaled", 0.3 * su2_basis.generators)
    tensor = compute_structure_tensor(scaled)
    assert np.isclose(tensor.constant(3, 1, 2), 0.3, atol=1e-12)
    assert np.max(closure_residuals(scaled, tensor)) <= 1e-10


def test_non_orthogonal_basis(su2_basis):
    a1, a2, a3 = su2_basis.generators
    skewed = LieBasis("skewed", np.array([a1 + a2, a2, a3]))
    tensor = compute_structure_tensor(skewed)
    # [A1 + A2, A3] = A1 - A2 = (A1 + A2) - 2 A2
    assert tensor.constant(1, 1, 3) == 1.0
    assert tensor.constant(2, 1, 3) == -2.0
    assert jacobi_residual(tensor) <= 1e-10


def test_open_subset_is_not_closed(su3_basis):
    subset = LieBasis("subset", su3_basis.generators[[0, 2, 4]])
    with pytest.raises(ClosureError) as excinfo:
        compute_structure_tensor(subset)
    assert excinfo.value.residual > 1e-8
    assert all(1 <= index <= 3 for index in excinfo.value.pair)


def test_nearly_closed_basis_is_rejected():
    # su(2) in the upper-left block of 3x3, with generator 1 tilted towards index 3
    eps = 1e-8
    a1 = np.zeros((3, 3), dtype=complex)
    a1[0, 1] = a1[1, 0] = 0.5j
    a1[0, 2] = a1[2, 0] = 0.5j * eps
    a2 = np.zeros((3, 3), dtype=complex)
    a2[0, 1], a2[1, 0] = -0.5, 0.5
    a3 = np.diag([0.5j, -0.5j, 0.0])
    with pytest.raises(ClosureError) as excinfo:
        compute_structure_tensor(LieBasis("tilted", np.array([a1, a2, a3])))
    assert 1e-10 < excinfo.value.residual <= 1e-8


def test_su2_adjoint_generator(su2):
    M1 = adjoint_generator(su2, 1).matrix
    expected = np.zeros((3, 3))
    expected[1, 2], expected[2, 1] = -1.0, 1.0
    assert np.array_equal(M1, expected)


def test_su3_adjoint_generator_sparsity(su3):
    M1 = adjoint_generator(su3, 1).matrix
    nonzero = {(int(k) + 1, int(j) + 1) for k, j in zip(*np.nonzero(M1))}
    assert nonzero == {(3, 4), (4, 3), (5, 6), (6, 5), (7, 8), (8, 7)}


def test_zero_tensor_adjoint_generator():
    tensor = StructureTensor(np.zeros((3, 3, 3)))
    assert np.array_equal(adjoint_generator(tensor, 2).matrix, np.zeros((3, 3)))


def test_adjoint_generator_index(su2):
    with pytest.raises(IndexError):
        adjoint_generator(su2, 4)


def test_adjoint_action_examples(su2, su3):
    e = np.eye(3)
    assert np.array_equal(adjoint_action(su2, e[0], e[1]), e[2])
    assert np.array_equal(adjoint_action(su2, e[1], e[1]), np.zeros(3))
    f = np.eye(8)
    assert np.array_equal(adjoint_action(su3, f[3], f[4]), f[7])


def test_adjoint_action_matches_generator(su3):
    for i in range(1, 9):
        d = np.eye(8)[i - 1]
        assert np.array_equal(adjoint_matrix(su3, d), adjoint_generator(su3, i).matrix)


@pytest.mark.parametrize("tensor_name", ["su2", "su3"])
def test_adjoint_action_antisymmetry(tensor_name, request, rng):
    tensor = request.getfixturevalue(tensor_name)
    for _ in range(100):
        d, b = rng.normal(size=(2, tensor.n))
        assert np.max(np.abs(adjoint_action(tensor, d, b) + adjoint_action(tensor, b, d))) <= 1e-12


@pytest.mark.parametrize("basis_name, tensor_name", [("su2_basis", "su2"), ("su3_basis", "su3")])
def test_adjoint_action_is_the_bracket(basis_name, tensor_name, request, rng):
    basis = request.getfixturevalue(basis_name)
    tensor = request.getfixturevalue(tensor_name)
    for _ in range(20):
        d, b = rng.normal(size=(2, tensor.n))
        D, B = algebra_element(basis, d), algebra_element(basis, b)
        bracket = algebra_element(basis, adjoint_action(tensor, d, b))
        assert np.max(np.abs(bracket - (D @ B - B @ D))) <= 1e-12


def test_algebra_coordinates_round_trip(su3_basis, rng):
    b = rng.normal(size=8)
    coordinates, residual = algebra_coordinates(su3_basis, algebra_element(su3_basis, b))
    assert np.allclose(coordinates, b, atol=1e-12)
    assert residual <= 1e-12


def test_algebra_coordinates_residual_outside_span(su3_basis):
    _, residual = algebra_coordinates(su3_basis, np.eye(3, dtype=complex))
    assert residual > 1.0


def test_adjoint_action_shape(su2):
    with pytest.raises(ValueError):
        adjoint_action(su2, [1.0, 0.0], [0.0, 1.0, 0.0])
