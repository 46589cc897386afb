import math

import numpy as np
import pytest

from zenolab.dynamics import (
    SurvivalUnderflowError,
    Trajectory,
    energy_series,
    observable_trajectory,
    zeno_blocked_trajectory,
    zeno_relaxation,
)
from zenolab.gibbs import compress_state, gibbs_state, zeno_gibbs_state
from zenolab.lattice import (
    EMPTY,
    ChainGeometry,
    annihilation,
    build_site_projection,
    build_xy_hamiltonian,
    creation,
    number,
)
from zenolab.linalg import tensor
from zenolab.zeno import two_level_model


class TestTrajectory:
    def test_rejects_unsorted_times(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.0], [1.0, 2.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0], [1.0, np.nan])

    def test_window_average(self):
        tr = Trajectory(np.arange(5.0), np.array([0, 1, 2, 3, 4.0]))
        assert tr.window_average(2.0) == 3.0
        assert tr.second_half_average() == 3.0
        with pytest.raises(ValueError):
            tr.window_average(10.0)


class TestObservableTrajectory:
    def test_identity(self, xy, chain5, rng):
        H = build_xy_hamiltonian(xy, chain5)
        rho = compress_state(gibbs_state(H, 1.0), build_site_projection(EMPTY, 0, chain5))
        tr = observable_trajectory(rho, H, np.eye(32), np.linspace(0, 5, 11))
        assert np.allclose(tr.values, 1.0, atol=1e-12)

    def test_gibbs_is_stationary(self, xy, chain5):
        H = build_xy_hamiltonian(xy, chain5)
        A = creation(-1, chain5) @ annihilation(1, chain5)
        tr = observable_trajectory(gibbs_state(H, 0.8), H, A, np.linspace(0, 9, 19))
        assert np.max(np.abs(tr.values - tr.values[0])) < 1e-10

    def test_two_level_oracle(self):
        H, E = two_level_model()
        times = np.linspace(0, 3, 7)
        tr = observable_trajectory(E, H, E, times)
        assert np.allclose(tr.values, np.cos(times) ** 2, atol=1e-12)

    def test_return_to_equilibrium(self, xy):
        g = ChainGeometry(-4, 4)
        H = build_xy_hamiltonian(xy, g)
        left = gibbs_state(build_xy_hamiltonian(xy, ChainGeometry(-4, -1)), 1.0)
        right = gibbs_state(build_xy_hamiltonian(xy, ChainGeometry(1, 4)), 1.0)
        initial = tensor(left, np.diag([1.0, 0.0]), right)
        A = number(0, g)
        tr = observable_trajectory(initial, H, A, np.linspace(0, 20, 201))
        target = np.trace(gibbs_state(H, 1.0) @ A).real
        late = np.abs(tr.values[tr.times >= 10] - target).mean()
        assert late * 2 <= abs(tr.values[0] - target)

    def test_energy_conserved(self, xy, chain5, rng):
        H = build_xy_hamiltonian(xy, chain5)
        rho = compress_state(gibbs_state(H, 1.0), build_site_projection(EMPTY, 0, chain5))
        tr = energy_series(rho, H, np.linspace(0, 10, 21))
        assert np.max(np.abs(tr.values - tr.values[0])) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            observable_trajectory(np.eye(2) / 2, np.eye(3), np.eye(3), [0.0])


class TestBlocking:
    def test_commuting(self):
        H = np.diag([0.5, -0.3, 1.0, 2.0]).astype(complex)
        E = np.diag([1, 1, 0, 0]).astype(complex)
        rho = np.diag([0.6, 0.4, 0, 0]).astype(complex)
        A = np.array([[0.2, 1, 0, 0], [1, -1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 1]], dtype=complex)
        blocked = zeno_blocked_trajectory(rho, H, E, 2.0, 10, A)
        free = observable_trajectory(rho, H, A, blocked.times)
        assert np.max(np.abs(blocked.values - free.values)) < 1e-12
        assert np.allclose(blocked.metadata["weights"], 1.0, atol=1e-12)

    def test_two_level_survival(self):
        H, E = two_level_model()
        for n in (10, 100):
            tr = zeno_blocked_trajectory(E, H, E, 1.0, n, E)
            assert abs(tr.metadata["survival"] - math.cos(1 / n) ** (2 * n)) < 1e-12
        assert abs(tr.metadata["survival"] - 0.990050) < 1e-6

    def test_xy_blocking_deficit(self, xy, chain5, plus_state):
        H = build_xy_hamiltonian(xy, chain5)
        E = build_site_projection(plus_state, 0, chain5)
        initial = compress_state(gibbs_state(H, 1.0), E)
        deficits = []
        for n in (64, 128, 256):
            tr = zeno_blocked_trajectory(initial, H, E, 1.0, n, E)
            deficit = 1 - tr.metadata["survival"]
            assert deficit <= 10 / n
            deficits.append(deficit)
        for a, b in zip(deficits, deficits[1:]):
            assert 1.6 <= a / b <= 2.4

    def test_state_stays_in_subspace(self, xy, chain5, plus_state):
        H = build_xy_hamiltonian(xy, chain5)
        E = build_site_projection(plus_state, 0, chain5)
        initial = compress_state(gibbs_state(H, 1.0), E)
        rho = zeno_blocked_trajectory(initial, H, E, 1.0, 16, E).metadata["final_state"]
        assert np.max(np.abs(E @ rho @ E - rho)) < 1e-12
        assert abs(np.trace(rho) - 1) < 1e-12

    def test_underflow(self):
        # one measurement at t = pi/2 empties the two-level range completely
        H, E = two_level_model()
        with pytest.raises(SurvivalUnderflowError) as info:
            zeno_blocked_trajectory(E, H, E, math.pi / 2, 1, E)
        assert info.value.step == 1

    def test_initial_outside_range(self):
        H, E = two_level_model()
        with pytest.raises(ValueError):
            zeno_blocked_trajectory(np.eye(2) / 2, H, E, 1.0, 4, E)


class TestZenoRelaxation:
    def test_zeno_gibbs_stationary(self, xy, chain5, plus_state):
        H = build_xy_hamiltonian(xy, chain5)
        E = build_site_projection(plus_state, 0, chain5)
        A_E = E @ number(1, chain5) @ E
        tr = zeno_relaxation(zeno_gibbs_state(H, 1.0, E), H, E, 1.0, A_E, np.linspace(0, 10, 21))
        assert np.max(np.abs(tr.values - tr.metadata["reference"])) < 1e-10

    def test_projection_observable(self, xy, chain5, plus_state):
        H = build_xy_hamiltonian(xy, chain5)
        E = build_site_projection(plus_state, 0, chain5)
        initial = compress_state(gibbs_state(H, 1.0), E)
        tr = zeno_relaxation(initial, H, E, 1.0, E, np.linspace(0, 4, 9))
        assert np.allclose(tr.values, 1.0, atol=1e-12)

    def test_finite_size_approach(self, xy):
        g = ChainGeometry(-3, 3)
        H = build_xy_hamiltonian(xy, g)
        E = build_site_projection(EMPTY, 0, g)
        initial = compress_state(gibbs_state(H, 1.0), E)
        A_E = E @ number(1, g) @ E
        tr = zeno_relaxation(initial, H, E, 1.0, A_E, np.linspace(0, 30, 301))
        assert tr.metadata["late_distance"] < tr.metadata["initial_distance"]
