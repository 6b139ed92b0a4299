import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchan.linalg import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    assert_density_matrix,
    binary_entropy,
    bloch_vector,
    hermitian_eigensystem,
    partial_trace,
    pauli_block_decompose,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    relative_entropy,
    schatten_p_norm,
    state_from_bloch,
    tensor_product,
    von_neumann_entropy,
)

RNG = np.random.default_rng(1234)


def test_pauli_algebra():
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        np.testing.assert_allclose(s @ s, I2, atol=1e-15)
    np.testing.assert_allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z, atol=1e-15)
    np.testing.assert_allclose(SIGMA_Y @ SIGMA_Z, 1j * SIGMA_X, atol=1e-15)
    np.testing.assert_allclose(SIGMA_Z @ SIGMA_X, 1j * SIGMA_Y, atol=1e-15)


class TestTensorProduct:
    def test_identity(self):
        np.testing.assert_array_equal(tensor_product(I2, I2), np.eye(4))

    def test_sigma_z_squared(self):
        np.testing.assert_array_equal(tensor_product(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))

    def test_eigenvalues_multiply(self):
        # oracle: brute-force eigensolve of both factors and the product
        a = RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2))
        b = RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2))
        products = sorted(
            (la * lb for la in np.linalg.eigvals(a) for lb in np.linalg.eigvals(b)),
            key=lambda z: (z.real, z.imag),
        )
        direct = sorted(np.linalg.eigvals(tensor_product(a, b)), key=lambda z: (z.real, z.imag))
        np.testing.assert_allclose(direct, products, atol=1e-10)

    def test_mixed_product_rule(self):
        mats = [RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2)) for _ in range(4)]
        a, b, c, d = mats
        lhs = tensor_product(a, b) @ tensor_product(c, d)
        np.testing.assert_allclose(lhs, tensor_product(a @ c, b @ d), atol=1e-12)


class TestPartialTrace:
    def test_product_state(self):
        sigma = random_density_matrix(3, seed=5)
        tau = random_density_matrix(2, seed=6)
        joint = tensor_product(sigma, tau)
        np.testing.assert_allclose(partial_trace(joint, (3, 2), keep=0), sigma, atol=1e-12)
        np.testing.assert_allclose(partial_trace(joint, (3, 2), keep=1), tau, atol=1e-12)

    def test_maximally_entangled(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 1 / np.sqrt(2)
        rho = np.outer(v, v.conj())
        np.testing.assert_allclose(partial_trace(rho, (2, 2), keep=1), I2 / 2, atol=1e-12)

    def test_trace_preserved(self):
        rho = random_density_matrix(4, seed=7)
        reduced = partial_trace(rho, (2, 2), keep=0)
        assert abs(np.trace(reduced) - 1) < 1e-12
        assert np.linalg.eigvalsh(reduced)[0] > -1e-12

    def test_dimension_mismatch(self):
        rho = random_density_matrix(4, seed=8)
        with pytest.raises(ValueError):
            partial_trace(rho, (3, 2), keep=0)


class TestEigensystem:
    def test_sigma_z(self):
        w, v = hermitian_eigensystem(SIGMA_Z)
        np.testing.assert_allclose(w, [1, -1])
        np.testing.assert_allclose(v @ v.conj().T, I2, atol=1e-12)

    def test_maximally_mixed(self):
        w, _ = hermitian_eigensystem(I2 / 2)
        np.testing.assert_allclose(w, [0.5, 0.5])

    def test_reconstruction(self):
        g = RNG.standard_normal((6, 6)) + 1j * RNG.standard_normal((6, 6))
        h = g + g.conj().T
        w, v = hermitian_eigensystem(h)
        np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=1e-10)
        assert np.all(np.diff(w) <= 1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eigensystem(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_deterministic_phases(self):
        h = random_density_matrix(4, seed=11)
        _, v1 = hermitian_eigensystem(h)
        _, v2 = hermitian_eigensystem(h.copy())
        np.testing.assert_array_equal(v1, v2)


class TestSchattenNorm:
    def test_trace_normalization_at_p1(self):
        for d in (2, 3, 4):
            rho = random_density_matrix(d, seed=d)
            assert abs(schatten_p_norm(rho, 1) - 1) < 1e-12

    def test_pure_state_any_p(self):
        rho = random_pure_state(3, seed=2)
        for p in (1, 1.5, 2, 7):
            assert abs(schatten_p_norm(rho, p) - 1) < 1e-10

    def test_maximally_mixed_qubit(self):
        assert abs(schatten_p_norm(I2 / 2, 2) - 2 ** (-0.5)) < 1e-14

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            schatten_p_norm(I2 / 2, 0.5)

    def test_monotone_in_p(self):
        rho = random_density_matrix(4, seed=3)
        values = [schatten_p_norm(rho, p) for p in (1, 1.3, 2, 3, 5, 10)]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


class TestEntropy:
    def test_pure(self):
        assert von_neumann_entropy(random_pure_state(4, seed=1)) < 1e-10

    def test_maximally_mixed(self):
        assert abs(von_neumann_entropy(I2 / 2) - np.log(2)) < 1e-12

    def test_two_level_example(self):
        # -0.75 ln 0.75 - 0.25 ln 0.25 = 0.56233514...
        rho = np.diag([0.75, 0.25]).astype(complex)
        assert abs(von_neumann_entropy(rho) - 0.5623351446188083) < 1e-12

    def test_range(self):
        for d in (2, 3, 4):
            s = von_neumann_entropy(random_density_matrix(d, seed=20 + d))
            assert -1e-12 <= s <= np.log(d) + 1e-12

    def test_derivative_relation(self):
        # (|rho|_{1+h} - 1)/h approximates -S(rho)
        h = 1e-5
        for seed in range(5):
            rho = random_density_matrix(4, seed=seed)
            fd = (schatten_p_norm(rho, 1 + h) - 1.0) / h
            assert abs(fd + von_neumann_entropy(rho)) < 1e-3


class TestRelativeEntropy:
    def test_self_is_zero(self):
        rho = random_density_matrix(3, seed=9)
        assert relative_entropy(rho, rho) < 1e-10

    def test_pure_vs_mixed(self):
        ket0 = np.diag([1.0, 0.0]).astype(complex)
        assert abs(relative_entropy(ket0, I2 / 2) - np.log(2)) < 1e-12

    def test_diagonal_example(self):
        rho = np.diag([0.9, 0.1]).astype(complex)
        omega = np.diag([0.5, 0.5]).astype(complex)
        expected = 0.9 * np.log(1.8) + 0.1 * np.log(0.2)
        assert abs(relative_entropy(rho, omega) - expected) < 1e-12

    def test_support_violation_is_infinite(self):
        ket0 = np.diag([1.0, 0.0]).astype(complex)
        ket1 = np.diag([0.0, 1.0]).astype(complex)
        assert relative_entropy(ket1, ket0) == np.inf

    def test_klein_inequality_fuzz(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            d = int(rng.integers(2, 5))
            rho = random_density_matrix(d, seed=rng)
            omega = random_density_matrix(d, seed=rng)
            assert relative_entropy(rho, omega) >= -1e-12


class TestPauliBlocks:
    def test_product_with_maximally_mixed(self):
        sigma = random_density_matrix(3, seed=12)
        blocks = pauli_block_decompose(tensor_product(sigma, I2 / 2))
        np.testing.assert_allclose(blocks.x, sigma / 2, atol=1e-12)
        for y in (blocks.y1, blocks.y2, blocks.y3):
            np.testing.assert_allclose(y, 0, atol=1e-12)

    def test_product_with_ket0(self):
        sigma = random_density_matrix(2, seed=13)
        ket0 = np.diag([1.0, 0.0]).astype(complex)
        blocks = pauli_block_decompose(tensor_product(sigma, ket0))
        np.testing.assert_allclose(blocks.x, sigma / 2, atol=1e-12)
        np.testing.assert_allclose(blocks.y3, sigma / 2, atol=1e-12)
        np.testing.assert_allclose(blocks.y1, 0, atol=1e-12)
        np.testing.assert_allclose(blocks.y2, 0, atol=1e-12)

    def test_round_trip(self):
        for k in (1, 2, 3, 4):
            rho = random_density_matrix(2 * k, seed=30 + k)
            blocks = pauli_block_decompose(rho)
            np.testing.assert_allclose(blocks.assemble(), rho, atol=1e-12)
            assert abs(np.trace(blocks.x) - 0.5) < 1e-12

    def test_diagonal_blocks_psd(self):
        rho = random_density_matrix(6, rank=2, seed=14)
        blocks = pauli_block_decompose(rho)
        assert np.linalg.eigvalsh(blocks.x + blocks.y3)[0] >= -1e-10
        assert np.linalg.eigvalsh(blocks.x - blocks.y3)[0] >= -1e-10

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            pauli_block_decompose(np.eye(3) / 3)


class TestRandomStates:
    def test_rank_one_is_pure(self):
        rho = random_density_matrix(4, rank=1, seed=0)
        assert abs(np.trace(rho @ rho).real - 1) < 1e-10

    def test_seed_determinism(self):
        np.testing.assert_array_equal(random_density_matrix(3, seed=42), random_density_matrix(3, seed=42))
        np.testing.assert_array_equal(random_pure_state(5, seed=42), random_pure_state(5, seed=42))

    def test_full_rank_mean_approaches_maximally_mixed(self):
        rng = np.random.default_rng(77)
        mean = sum(random_density_matrix(3, seed=rng) for _ in range(3000)) / 3000
        assert np.max(np.abs(mean - np.eye(3) / 3)) < 0.02

    def test_validation(self):
        assert_density_matrix(random_density_matrix(4, rank=2, seed=3))
        with pytest.raises(ValueError):
            random_density_matrix(3, rank=5, seed=0)

    def test_random_unitary(self):
        u = random_unitary(4, seed=9)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


@given(st.floats(0.0, 1.0))
def test_binary_entropy_bounds(q):
    h = binary_entropy(q)
    assert -1e-12 <= h <= np.log(2) + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(1.0, 8.0), st.floats(1.0, 8.0))
def test_schatten_monotone_property(seed, p1, p2):
    rho = random_density_matrix(3, seed=seed)
    lo, hi = sorted((p1, p2))
    assert schatten_p_norm(rho, hi) <= schatten_p_norm(rho, lo) + 1e-12


def test_bloch_round_trip():
    w = np.array([0.3, -0.2, 0.4])
    np.testing.assert_allclose(bloch_vector(state_from_bloch(w)), w, atol=1e-12)
