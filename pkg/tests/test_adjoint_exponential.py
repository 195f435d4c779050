import numpy as np
import pytest

from weinorman.adjoint_exponential import (
    AdjointExponentialTable,
    ConfluentSolver,
    Spectrum,
    adjoint_power,
    beta_coefficients,
    beta_from_recurrence,
    characteristic_polynomial,
    confluent_vandermonde,
    exp_adjoint,
    exp_adjoint_product,
    spectrum,
)
from weinorman.algebra_core import adjoint_action, adjoint_generator, builtin_basis, compute_structure_tensor
from weinorman.errors import BetaSolveError, SpectrumError
from weinorman.golden import SU3_BETA, SU3_CHAR_POLY, SU3_EIGENVALUES, SU3_FAMILIES
from weinorman.propagation import matrix_exp_oracle

BETA_GRID = (0.1, 0.5, 1.0, 2.5)


def test_su3_printed_char_poly_generator_1(su3_printed):
    a = characteristic_polynomial(adjoint_generator(su3_printed, 1))
    assert np.array_equal(a, [0, 0, -16, 0, -24, 0, -9, 0])


def test_su3_printed_char_poly_generator_5(su3_printed):
    spec = spectrum(adjoint_generator(su3_printed, 5))
    assert np.array_equal(spec.monic, [0, 0, 6, 0, 13, 0, 8, 0])


@pytest.mark.parametrize("i", range(1, 9))
def test_su3_derived_char_poly(su3, i):
    spec = spectrum(adjoint_generator(su3, i))
    assert np.array_equal(spec.monic, SU3_CHAR_POLY["B"])


def test_zero_matrix_char_poly():
    assert np.array_equal(characteristic_polynomial(np.zeros((4, 4))), np.zeros(4))
    spec = spectrum(np.zeros((4, 4)))
    assert spec.roots == ((0j, 4),)


def test_char_poly_rejects_non_square():
    with pytest.raises(ValueError):
        characteristic_polynomial(np.zeros((2, 3)))


@pytest.mark.parametrize("i", [1, 2, 3])
def test_su2_spectrum(su2_table, i):
    spec = su2_table.spectrum(i)
    assert np.array_equal(spec.monic, [0, 1, 0])
    assert [m for _, m in spec.roots] == [1, 1, 1]
    assert spec.roots[0][0] == 0
    assert np.isclose(spec.roots[1][0], 1j, atol=1e-12)
    assert np.isclose(spec.roots[2][0], -1j, atol=1e-12)


@pytest.mark.parametrize("i", range(1, 9))
def test_su3_printed_spectra(su3_printed_table, i):
    spec = su3_printed_table.spectrum(i)
    expected = SU3_EIGENVALUES[SU3_FAMILIES[i]]
    assert sum(m for _, m in spec.roots) == 8
    assert len(spec.roots) == len(expected)
    for root, multiplicity in spec.roots:
        match = min(expected, key=lambda z: abs(z - root))
        assert abs(match - root) <= 1e-9
        assert expected[match] == multiplicity
    assert max(spec.residuals()) <= 1e-8


def test_spectrum_roots_are_imaginary_pairs(su3_table):
    for i in range(1, 9):
        spec = su3_table.spectrum(i)
        assert all(root.real == 0.0 for root, _ in spec.roots)
        imaginary = sorted(root.imag for root, _ in spec.roots)
        assert np.allclose(imaginary, [-v for v in reversed(imaginary)], atol=0)


def test_spectrum_rejects_real_eigenvalues():
    with pytest.raises(SpectrumError):
        spectrum(np.diag([1.0, -1.0, 0.0]))


def test_spectrum_general_matrix():
    spec = spectrum(np.diag([1.0, -1.0, 0.0]), adjoint=False)
    assert sorted(root.real for root, _ in spec.roots) == [-1.0, 0.0, 1.0]


def test_spectrum_evaluate():
    spec = Spectrum(char_poly=np.array([0.0, -1.0, 0.0]), roots=((0j, 1), (1j, 1), (-1j, 1)))
    assert spec.evaluate(2.0) == 10.0
    assert spec.evaluate(2.0, derivative=1) == 13.0
    assert spec.eigenvalues() == [0j, 1j, -1j]


def test_confluent_vandermonde_rows():
    spec = Spectrum(char_poly=np.zeros(3), roots=((0j, 1), (2j, 2)))
    matrix = confluent_vandermonde(spec)
    assert np.allclose(matrix[0], [1, 0, 0])
    assert np.allclose(matrix[1], [1, 2j, -4])
    assert np.allclose(matrix[2], [0, 1, 4j])


def test_confluent_solver_detects_wrong_multiplicities():
    # a repeated root listed twice as simple makes the system singular
    spec = Spectrum(char_poly=np.zeros(2), roots=((1j, 1), (1j, 1)))
    with pytest.raises(BetaSolveError) as excinfo:
        ConfluentSolver(spec)
    assert excinfo.value.condition is not None


def test_beta_at_zero_is_identity(su3_table):
    for i in range(1, 9):
        assert np.array_equal(su3_table.beta(i, 0.0).beta, np.eye(8)[0])


@pytest.mark.parametrize("i", range(1, 9))
def test_printed_beta_families(su3_printed_table, i):
    family = SU3_BETA[SU3_FAMILIES[i]]
    for g in BETA_GRID:
        beta = su3_printed_table.beta(i, g).beta
        assert abs(beta[0] - 1.0) <= 1e-9
        assert abs(beta[1] - g) <= 1e-9
        assert np.max(np.abs(beta[2:] - [formula(g) for formula in family])) <= 1e-9


def test_printed_beta_2_generator_1(su3_printed_table):
    for g in BETA_GRID:
        expected = (54 - 64 * np.cos(g) + 10 * np.cos(2 * g) + 3 * g * np.sin(2 * g)) / 36
        assert abs(su3_printed_table.beta(1, g).beta[2] - expected) <= 1e-9


@pytest.mark.parametrize("i", range(1, 9))
def test_derived_betas_follow_family_b(su3_table, i):
    for g in BETA_GRID:
        beta = su3_table.beta(i, g).beta
        expected = [1.0, g] + [formula(g) for formula in SU3_BETA["B"]]
        assert np.max(np.abs(beta - expected)) <= 1e-9


@pytest.mark.parametrize("i", range(1, 9))
def test_beta_recurrence_oracle(su3_table, i):
    char_poly = su3_table.spectrum(i).char_poly
    for g in BETA_GRID:
        assert np.max(np.abs(su3_table.beta(i, g).beta - beta_from_recurrence(char_poly, g))) <= 1e-9


def test_beta_coefficients_function(su2_table):
    spec = su2_table.spectrum(1)
    g = 0.7
    beta = beta_coefficients(spec, g).beta
    # e^{g M} = I + sin(g) M + (1 - cos g) M^2 for M^3 = -M
    assert np.allclose(beta, [1.0, np.sin(g), 1.0 - np.cos(g)], atol=1e-12)


def test_su2_exponential_is_rotation(su2_table):
    for g in (-2.0, 0.3, 1.7):
        c, s = np.cos(g), np.sin(g)
        expected = np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
        assert np.max(np.abs(su2_table.exp(1, g) - expected)) <= 1e-12


def test_exp_at_zero_is_identity(su3_table):
    for i in range(1, 9):
        assert np.array_equal(su3_table.exp(i, 0.0), np.eye(8))


def test_printed_su3_generator_5_entries(su3_printed_table):
    root6 = np.sqrt(6)
    for g in (-1.3, 0.4, 2.2):
        E = su3_printed_table.exp(5, g)
        assert abs(E[0, 0] - (1 + 2 * np.cos(root6 * g)) / 3) <= 1e-10
        assert abs(E[0, 5] - np.sqrt(2 / 3) * np.sin(root6 * g)) <= 1e-10


def test_exp_adjoint_function_matches_table(su3, su3_table):
    generator = adjoint_generator(su3, 4)
    spec = spectrum(generator)
    assert np.allclose(exp_adjoint(generator, spec, 1.1), su3_table.exp(4, 1.1), atol=1e-13)


@pytest.mark.parametrize("label", ["su2_pauli_half", "su3_cartan"])
def test_exp_matches_pade_oracle(label):
    table = AdjointExponentialTable(compute_structure_tensor(builtin_basis(label)))
    for i in range(1, table.n + 1):
        M = table.generator(i).matrix
        for g in (-3.0, -1.0, -0.1, 0.1, 1.0, 3.0):
            assert np.max(np.abs(table.exp(i, g) - matrix_exp_oracle(g * M))) <= 1e-10


def test_exp_matches_oracle_at_random_gammas(su3_table, rng):
    for g in rng.uniform(-3.0, 3.0, size=20):
        i = int(rng.integers(1, 9))
        oracle = matrix_exp_oracle(g * su3_table.generator(i).matrix)
        assert np.max(np.abs(su3_table.exp(i, g) - oracle)) <= 1e-10


@pytest.mark.parametrize("table_name", ["su2_table", "su3_table"])
def test_one_parameter_group_law(table_name, request, rng):
    table = request.getfixturevalue(table_name)
    for _ in range(100):
        i = int(rng.integers(1, table.n + 1))
        g1, g2 = rng.uniform(-3.0, 3.0, size=2)
        assert np.max(np.abs(table.exp(i, g1) @ table.exp(i, g2) - table.exp(i, g1 + g2))) <= 1e-10


@pytest.mark.parametrize("table_name", ["su2_table", "su3_table"])
def test_automorphism_property(table_name, request, rng):
    table = request.getfixturevalue(table_name)
    tensor = table.tensor
    for _ in range(100):
        i = int(rng.integers(1, table.n + 1))
        g = rng.uniform(-3.0, 3.0)
        d, b = rng.normal(size=(2, table.n))
        E = table.exp(i, g)
        lhs = E @ adjoint_action(tensor, d, b)
        rhs = adjoint_action(tensor, E @ d, E @ b)
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


@pytest.mark.parametrize("table_name", ["su2_table", "su3_table"])
def test_exponentials_are_unimodular(table_name, request, rng):
    table = request.getfixturevalue(table_name)
    for i in range(1, table.n + 1):
        E = table.exp(i, rng.uniform(-3.0, 3.0))
        assert abs(np.linalg.det(E) - 1.0) <= 1e-12


def test_product_of_exponentials(su2_table):
    assert np.array_equal(exp_adjoint_product(su2_table, []), np.eye(3))
    g1, g2 = 0.4, 1.2
    product = exp_adjoint_product(su2_table, [(1, g1), (2, g2)])
    assert np.allclose(product, su2_table.exp(1, g1) @ su2_table.exp(2, g2), atol=1e-14)
    assert abs(product[0, 2] - np.sin(g2)) <= 1e-12


def test_product_inverse(su3_table, rng):
    for i in range(1, 9):
        g = rng.uniform(-3.0, 3.0)
        assert np.max(np.abs(su3_table.product([(i, g), (i, -g)]) - np.eye(8))) <= 1e-12


@pytest.mark.parametrize("l", [0, 1, 2, 5])
def test_adjoint_power_contraction(su3, l):
    M = adjoint_generator(su3, 5).matrix
    assert np.allclose(adjoint_power(su3, 5, l), np.linalg.matrix_power(M, l), atol=1e-12)


def test_adjoint_power_rejects_negative(su2):
    with pytest.raises(ValueError):
        adjoint_power(su2, 1, -1)


def test_table_index_range(su2_table):
    with pytest.raises(IndexError):
        su2_table.exp(4, 0.1)


def test_confluent_rows_in_taylor_form():
    spec = Spectrum(char_poly=np.zeros(4), roots=((0j, 4),))
    assert np.array_equal(confluent_vandermonde(spec), np.eye(4))
    solver = ConfluentSolver(spec)
    assert solver.condition <= 1.0 + 1e-12
    g = 0.7
    assert np.allclose(solver.solve(g).beta, [1.0, g, g ** 2 / 2, g ** 3 / 6], atol=1e-15)


def test_largest_gellmann_table_matches_oracle():
    table = AdjointExponentialTable(compute_structure_tensor(builtin_basis("su4_gellmann")))
    assert table.n == 15
    for i in (1, 8, 15):
        M = table.generator(i).matrix
        for g in (-2.5, 0.4, 3.0):
            assert np.max(np.abs(table.exp(i, g) - matrix_exp_oracle(g * M))) <= 1e-9
