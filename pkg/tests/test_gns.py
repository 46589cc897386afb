import numpy as np
import pytest

from zenolab.gibbs import gibbs_state, random_operator
from zenolab.gns import (
    azc_sup,
    complex_zeno_cauchy,
    gns_construct,
    vector_azc_check,
    vector_leakage,
    zeno_vector,
)
from zenolab.lattice import ChainGeometry, build_site_projection, build_xy_hamiltonian
from zenolab.linalg import hermitian_evolution, operator_norm
from zenolab.zeno import azc_constant, leakage, zeno_product

G3 = ChainGeometry(-1, 1)


@pytest.fixture
def setup(xy, plus_state):
    H = build_xy_hamiltonian(xy, G3)
    space = gns_construct(gibbs_state(H, 1.0), H)
    E = build_site_projection(plus_state, 0, G3)
    return space, E


@pytest.fixture
def commuting():
    H = np.diag([0.2, -0.5, 1.1, 0.4]).astype(complex)
    E = np.diag([1, 0, 1, 0]).astype(complex)
    return gns_construct(gibbs_state(H, 1.0), H), E


class TestConstruction:
    def test_expectations(self, setup, rng):
        space, _ = setup
        for _ in range(10):
            A = random_operator(8, rng)
            assert abs(space.expectation(A) - np.trace(space.rho @ A)) < 1e-10

    def test_cyclic_vector(self, setup):
        space, _ = setup
        assert abs(space.norm(space.omega_vector) - 1) < 1e-10
        assert operator_norm(space.omega_vector @ space.omega_vector - space.rho) < 1e-10

    def test_evolution_fixes_omega(self, setup):
        space, _ = setup
        for z in (0.7, -2.0, 0.3 + 0.5j):
            assert np.max(np.abs(space.evolve(space.omega_vector, z) - space.omega_vector)) < 1e-10

    def test_vector_norm_trace_identity(self, setup, rng):
        space, _ = setup
        for _ in range(5):
            A = random_operator(8, rng)
            expected = np.sqrt(np.trace(space.rho @ A.conj().T @ A).real)
            assert abs(space.norm(space.vector(A)) - expected) < 1e-10

    def test_covariance(self, setup, rng):
        # U(t) A Omega = tau_t(A) Omega
        space, _ = setup
        A = random_operator(8, rng)
        U = hermitian_evolution(space.H, 0.4)
        lhs = space.evolve(space.vector(A), 0.4)
        assert np.max(np.abs(lhs - space.vector(U @ A @ U.conj().T))) < 1e-10

    def test_rejects_non_faithful(self):
        with pytest.raises(ValueError, match="faithful"):
            gns_construct(np.diag([1.0, 0.0]), np.zeros((2, 2)))

    def test_rejects_non_stationary(self, rng):
        with pytest.raises(ValueError, match="stationary"):
            gns_construct(np.diag([0.7, 0.3]), np.array([[0, 1], [1, 0]]))


class TestVectorAzc:
    def test_commuting(self, commuting, rng):
        space, E = commuting
        for z in (0.1, 0.05 + 0.05j, 0.2j):
            check = vector_azc_check(space, E, random_operator(4, rng), z, 1.0, 1.0)
            assert check.ratio < 1e-12 and check.passed

    def test_real_time_submultiplicative(self, setup, rng):
        space, E = setup
        tau = 0.1
        for _ in range(5):
            A = random_operator(8, rng)
            bound = leakage(space.H, E, tau) * space.norm(space.vector(A))
            assert vector_leakage(space, E, A, tau) <= bound + 1e-12

    def test_complex_time_vs_real_constant(self, setup, rng):
        space, E = setup
        C = azc_constant(space.H, E, 0.1, 6).constant
        A = random_operator(8, rng)
        check = vector_azc_check(space, E, A, 0.05 * (1 + 1j), C, 1.0)
        assert check.ratio <= 1.5

    def test_preconditions(self, setup):
        space, E = setup
        A = np.eye(8)
        with pytest.raises(ValueError):
            vector_azc_check(space, E, A, 0.1 - 0.1j, 1.0, 1.0)
        with pytest.raises(ValueError):
            vector_azc_check(space, E, A, 2.0, 1.0, 1.0)

    def test_sup_stabilizes(self, setup, rng):
        space, E = setup
        A = random_operator(8, rng)
        coarse, fine = azc_sup(space, E, A, 0.2, 6), azc_sup(space, E, A, 0.2, 7)
        assert np.isfinite(fine)
        assert abs(fine - coarse) <= 0.1 * fine


class TestComplexCauchy:
    def test_commuting(self, commuting, rng):
        space, E = commuting
        assert complex_zeno_cauchy(space, E, random_operator(4, rng), 0.5, 1.0, 3, 7) < 1e-11

    def test_first_order_decay(self, setup, rng):
        space, E = setup
        A = random_operator(8, rng)
        ratio = complex_zeno_cauchy(space, E, A, 0.5, 1.0, 16, 32) / complex_zeno_cauchy(space, E, A, 0.5, 1.0, 32, 64)
        assert 1.6 <= ratio <= 2.4

    def test_real_axis_limit(self, setup, rng):
        # for real t the right-hand factors are unitary and drop out of the norm
        space, E = setup
        A = random_operator(8, rng)
        X = space.vector(A)
        H, t = space.H, 0.5
        oracle = np.linalg.norm((zeno_product(H, E, t, 8) - zeno_product(H, E, t, 16)) @ X)
        assert abs(complex_zeno_cauchy(space, E, A, t, 1e-6, 8, 16) - oracle) < 1e-6

    def test_uniform_bound(self, setup, rng):
        space, E = setup
        A = random_operator(8, rng)
        beta = 1.0
        bound = np.exp(beta * operator_norm(space.H)) * space.norm(space.vector(A))
        for n in (1, 4, 16, 64):
            assert space.norm(zeno_vector(space, E, space.vector(A), complex(0.5, beta / 2), n)) <= bound

    def test_order_precondition(self, setup):
        space, E = setup
        with pytest.raises(ValueError):
            complex_zeno_cauchy(space, E, np.eye(8), 0.5, 1.0, 4, 4)
