import numpy as np
import pytest

from weinorman.algebra_core import algebra_element
from weinorman.errors import ChartOriginError, ChartSingularityError, ControlSignalError
from weinorman.propagation import (
    ABORTED,
    COMPLETED,
    ControlSignal,
    compare_paths,
    convergence_study,
    integrate_gamma,
    matrix_exp_oracle,
    reconstruct_unitary,
    reference_propagator,
    regular_random_controls,
    time_grid,
    verify_equivalence,
)
from weinorman.wei_norman import ChartSequence, chart_coordinates


def _unitarity(U):
    return np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0]))


# controls

def test_sampled_controls_left_hold():
    controls = ControlSignal.from_samples([0.0, 0.5, 1.0], [[1.0, 0.0], [2.0, 0.0], [3.0, 1.0]])
    assert np.array_equal(controls(-1.0), [1.0, 0.0])
    assert np.array_equal(controls(0.0), [1.0, 0.0])
    assert np.array_equal(controls(0.49), [1.0, 0.0])
    assert np.array_equal(controls(0.5), [2.0, 0.0])
    assert np.array_equal(controls(7.0), [3.0, 1.0])


def test_sampled_controls_validation():
    with pytest.raises(ControlSignalError, match="increasing"):
        ControlSignal.from_samples([0.0, 0.0], [[1.0], [2.0]])
    with pytest.raises(ControlSignalError):
        ControlSignal.from_samples([0.0, 1.0], [[1.0]])
    with pytest.raises(ControlSignalError, match="finite"):
        ControlSignal.from_samples([0.0, 1.0], [[1.0], [np.nan]])


def test_presets():
    u = ControlSignal.su2_three_harmonic()
    for t in (0.0, 0.4, 1.0):
        assert np.allclose(u(t), [np.cos(t), np.sin(t), 0.3], atol=1e-15)
    assert np.array_equal(ControlSignal.zero(8)(0.3), np.zeros(8))
    assert np.array_equal(ControlSignal.constant([1.0, 2.0, 3.0])(5.0), [1.0, 2.0, 3.0])


def test_random_harmonic_is_seeded_and_bounded():
    first = ControlSignal.random_harmonic(8, seed=3)
    second = ControlSignal.random_harmonic(8, seed=3)
    other = ControlSignal.random_harmonic(8, seed=4)
    times = np.linspace(0.0, 5.0, 101)
    assert np.array_equal(first.sample(times), second.sample(times))
    assert not np.array_equal(first.sample(times), other.sample(times))
    assert np.max(np.abs(first.sample(times))) <= 0.5 + 1e-12


def test_harmonic_shape_validation():
    with pytest.raises(ControlSignalError):
        ControlSignal.harmonic([[1.0], [1.0]], [[1.0]], [[0.0], [0.0]])


# oracle

def test_oracle_examples(su2, rng):
    assert np.array_equal(matrix_exp_oracle(np.zeros((3, 3))), np.eye(3))
    assert np.array_equal(matrix_exp_oracle(np.zeros((2, 2), dtype=complex)), np.eye(2))
    M1 = su2.array[:, 0, :]
    g = 0.8
    expected = np.array([[1, 0, 0], [0, np.cos(g), -np.sin(g)], [0, np.sin(g), np.cos(g)]])
    assert np.max(np.abs(matrix_exp_oracle(g * M1) - expected)) <= 1e-14
    for _ in range(20):
        X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        G = 3.0 * (X - X.conj().T)
        assert _unitarity(matrix_exp_oracle(G)) <= 1e-12


def test_oracle_matches_eigendecomposition(rng):
    X = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    H = X + X.conj().T
    values, vectors = np.linalg.eigh(H)
    expected = (vectors * np.exp(1j * values)) @ vectors.conj().T
    assert np.max(np.abs(matrix_exp_oracle(1j * H) - expected)) <= 1e-11


def test_oracle_rejects_bad_input():
    with pytest.raises(ValueError):
        matrix_exp_oracle(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        matrix_exp_oracle(np.array([[np.inf]]))


# grid

def test_time_grid():
    grid = time_grid(0.0, 1.0, 1e-3)
    assert len(grid) == 1001
    assert grid[0] == 0.0 and abs(grid[-1] - 1.0) <= 1e-15
    assert len(time_grid(0.0, 1.0, 0.3)) == 5
    with pytest.raises(ValueError):
        time_grid(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        time_grid(1.0, 1.0, 0.1)


# Wei-Norman route

def test_single_generator_flow(su2):
    trajectory = integrate_gamma(ControlSignal.constant([1.0, 0.0, 0.0]), ChartSequence.canonical(3), su2,
                                 (0.0, 1.0), 1e-3)
    assert trajectory.status == COMPLETED
    assert np.max(np.abs(trajectory.gammas - np.outer(trajectory.times, [1.0, 0.0, 0.0]))) <= 1e-10
    assert np.max(np.abs(trajectory.dets - 1.0)) <= 1e-14


def test_last_factor_absorbs_flow(su2):
    c = 0.7
    trajectory = integrate_gamma(ControlSignal.constant([0.0, 0.0, c]), ChartSequence.canonical(3), su2,
                                 (0.0, 1.0), 1e-2)
    assert np.max(np.abs(trajectory.gammas - np.outer(trajectory.times, [0.0, 0.0, c]))) <= 1e-10


def test_singularity_abort(su2):
    trajectory = integrate_gamma(ControlSignal.constant([0.0, 1.0, 0.0]), ChartSequence.canonical(3), su2,
                                 (0.0, 2.0), 1e-3)
    assert trajectory.status == ABORTED
    assert not trajectory.completed
    assert abs(trajectory.abort_time - np.pi / 2) <= 1e-2
    assert trajectory.times[-1] < np.pi / 2
    status = trajectory.status_dict()
    assert status["status"] == ABORTED
    assert abs(status["t_abort"] - np.pi / 2) <= 1e-2


def test_zyz_cannot_start_at_origin(su2):
    with pytest.raises(ChartOriginError):
        integrate_gamma(ControlSignal.zero(3), ChartSequence.zyz(), su2, (0.0, 1.0), 1e-2)


def test_restart_from_singular_state(su2):
    with pytest.raises(ChartSingularityError):
        integrate_gamma(ControlSignal.zero(3), ChartSequence.zyz(), su2, (0.0, 1.0), 1e-2,
                        start=(0.0, [0.3, 0.0, 0.1]))


def test_controls_dimension_mismatch(su2):
    with pytest.raises(ControlSignalError):
        integrate_gamma(ControlSignal.zero(2), ChartSequence.canonical(3), su2, (0.0, 1.0), 1e-2)


def test_rates_reproduce_controls(su3, su3_canonical):
    controls, _ = regular_random_controls(su3_canonical, (0.0, 1.0), 1e-2, seed=11)
    trajectory = integrate_gamma(controls, su3_canonical.chart, su3, (0.0, 1.0), 1e-2, context=su3_canonical)
    for gamma, rate, u in zip(trajectory.gammas, trajectory.rates, trajectory.controls):
        assert np.max(np.abs(su3_canonical.forward(gamma, rate) - u)) <= 1e-8


# reference route

def test_reference_zero_controls(su3_basis):
    path = reference_propagator(ControlSignal.zero(8), su3_basis, (0.0, 1.0), 1e-2)
    assert np.array_equal(path.unitaries[-1], np.eye(3))


def test_reference_constant_controls(su2_basis):
    u = np.array([0.3, -0.5, 0.8])
    path = reference_propagator(ControlSignal.constant(u), su2_basis, (0.0, 1.0), 1e-2)
    G = algebra_element(su2_basis, u)
    for t, U in zip(path.times[::10], path.unitaries[::10]):
        assert np.max(np.abs(U - matrix_exp_oracle(t * G))) <= 1e-9
    assert path.unitarity_drift() <= 1e-9
    assert path.special_drift() <= 1e-9


def test_reconstruct_unitary(su2_basis, su3_basis, rng):
    chart = ChartSequence.canonical(3)
    assert np.array_equal(reconstruct_unitary(su2_basis, chart, np.zeros(3)), np.eye(2))
    sigma1 = np.array([[0, 1], [1, 0]])
    for g in rng.uniform(-3.0, 3.0, size=10):
        expected = np.cos(g / 2) * np.eye(2) + 1j * np.sin(g / 2) * sigma1
        assert np.max(np.abs(reconstruct_unitary(su2_basis, chart, [g, 0.0, 0.0]) - expected)) <= 1e-12
    for g in rng.uniform(-3.0, 3.0, size=(10, 8)):
        U = reconstruct_unitary(su3_basis, ChartSequence.canonical(8), g)
        assert _unitarity(U) <= 1e-10
        assert abs(np.linalg.det(U) - 1.0) <= 1e-10


# equivalence

@pytest.mark.parametrize("dt", [1e-2, 1e-3])
def test_equivalence_zero_controls(su2_basis, su2, dt):
    report = verify_equivalence(ControlSignal.zero(3), su2_basis, ChartSequence.canonical(3), su2, (0.0, 1.0), dt)
    assert report.discrepancy <= 1e-13
    path = reference_propagator(ControlSignal.zero(3), su2_basis, (0.0, 1.0), dt)
    assert all(np.array_equal(U, np.eye(2)) for U in path.unitaries)
    assert report.status == COMPLETED


def test_equivalence_su2_three_harmonic(su2_basis, su2):
    report = verify_equivalence(ControlSignal.su2_three_harmonic(), su2_basis, ChartSequence.canonical(3), su2,
                                (0.0, 1.0), 1e-3)
    assert report.discrepancy <= 1e-6
    assert report.product_unitarity_drift <= 1e-9
    assert report.reference_unitarity_drift <= 1e-9
    assert report.samples == 1001


def test_equivalence_su3_random_controls(su3_basis, su3, su3_canonical):
    controls, seed = regular_random_controls(su3_canonical, (0.0, 1.0), 1e-3, seed=0)
    assert seed >= 0
    assert np.max(np.abs(controls.sample(np.linspace(0.0, 1.0, 201)))) <= 1.0
    report = verify_equivalence(controls, su3_basis, su3_canonical.chart, su3, (0.0, 1.0), 1e-3,
                                context=su3_canonical)
    assert report.status == COMPLETED
    assert report.discrepancy <= 1e-5
    assert report.product_unitarity_drift <= 1e-9


def test_second_order_convergence(su2_basis, su2):
    study = convergence_study(ControlSignal.su2_three_harmonic(), su2_basis, ChartSequence.canonical(3), su2,
                              (0.0, 1.0), [0.05, 0.025, 0.0125, 0.00625])
    assert len(study.rows()) == 4
    for ratio in study.ratios:
        assert 3.4 <= ratio <= 4.6


def test_unitarity_independent_of_step(su2_basis, su2):
    for dt in (0.1, 0.01):
        report = verify_equivalence(ControlSignal.su2_three_harmonic(), su2_basis, ChartSequence.canonical(3), su2,
                                    (0.0, 1.0), dt)
        assert report.product_unitarity_drift <= 1e-9


def test_aborted_run_gives_partial_report(su2_basis, su2):
    report = verify_equivalence(ControlSignal.constant([0.0, 1.0, 0.0]), su2_basis, ChartSequence.canonical(3), su2,
                                (0.0, 2.0), 1e-3)
    assert report.status == ABORTED
    assert abs(report.abort_time - np.pi / 2) <= 1e-2
    assert report.samples < 2001
    assert report.discrepancy <= 1e-6


def test_chart_independence(su2_basis, su2, su2_canonical, su2_zyz):
    controls = ControlSignal.su2_three_harmonic()
    t_switch, t_end, dt = 0.5, 1.0, 1e-3
    canonical = integrate_gamma(controls, su2_canonical.chart, su2, (0.0, t_end), dt, context=su2_canonical)

    switch_index = int(round(t_switch / dt))
    U_switch = reconstruct_unitary(su2_basis, su2_canonical.chart, canonical.gammas[switch_index])
    gamma_zyz = chart_coordinates(su2_basis, su2_zyz, U_switch)
    restarted = integrate_gamma(controls, su2_zyz.chart, su2, (0.0, t_end), dt,
                                start=(canonical.times[switch_index], gamma_zyz), context=su2_zyz)
    assert restarted.status == COMPLETED

    U_canonical = reconstruct_unitary(su2_basis, su2_canonical.chart, canonical.gammas[-1])
    U_zyz = reconstruct_unitary(su2_basis, su2_zyz.chart, restarted.gammas[-1])
    assert np.max(np.abs(U_canonical - U_zyz)) <= 1e-6


def test_compare_paths_rejects_other_grid(su2_basis, su2):
    controls = ControlSignal.zero(3)
    trajectory = integrate_gamma(controls, ChartSequence.canonical(3), su2, (0.0, 1.0), 0.1)
    reference = reference_propagator(controls, su2_basis, (0.0, 1.0), 0.05)
    with pytest.raises(ValueError):
        compare_paths(su2_basis, trajectory, reference)
