import json

import numpy as np
import pytest
from scipy.optimize import nnls

from qchan import channels as chn
from qchan.linalg import (
    I2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_vector,
    pauli_block_decompose,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    state_from_bloch,
    tensor_product,
)

QUBIT_BASIS = (I2 / 2, (I2 + SIGMA_X) / 2, (I2 + SIGMA_Y) / 2, (I2 + SIGMA_Z) / 2)


def channels_agree(a, b, atol=1e-10):
    return all(np.max(np.abs(a.apply(s) - b.apply(s))) <= atol for s in QUBIT_BASIS)


class TestApply:
    def test_identity(self):
        rho = random_density_matrix(2, seed=0)
        np.testing.assert_allclose(chn.identity().apply(rho), rho, atol=1e-12)

    def test_phase_damping_action(self):
        # diagonal preserved, off-diagonal scaled
        rho = random_density_matrix(2, seed=1)
        out = chn.phase_damping(0.3).apply(rho)
        np.testing.assert_allclose(np.diag(out), np.diag(rho), atol=1e-12)
        assert abs(out[0, 1] - 0.3 * rho[0, 1]) < 1e-12

    def test_depolarizing_on_pure(self):
        # Bloch contraction by lam gives output eigenvalues (1 +- lam)/2
        rho = random_pure_state(2, seed=2)
        out = chn.depolarizing(0.5).apply(rho)
        np.testing.assert_allclose(np.linalg.eigvalsh(out), [0.25, 0.75], atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            chn.identity().apply(random_density_matrix(4, seed=3))


class TestHalfNoisy:
    def test_lambda_one_is_identity(self):
        rho = random_density_matrix(6, seed=4)
        np.testing.assert_allclose(chn.apply_half_noisy(chn.phase_damping(1.0), rho), rho, atol=1e-12)

    def test_lambda_zero_block_diagonal(self):
        rho = random_density_matrix(4, seed=5)
        b = pauli_block_decompose(rho)
        out = chn.apply_half_noisy(chn.phase_damping(0.0), rho)
        r = out.reshape(2, 2, 2, 2)
        np.testing.assert_allclose(r[:, 0, :, 0], b.x + b.y3, atol=1e-12)
        np.testing.assert_allclose(r[:, 1, :, 1], b.x - b.y3, atol=1e-12)
        np.testing.assert_allclose(r[:, 0, :, 1], 0, atol=1e-12)

    def test_product_locality(self):
        sigma = random_density_matrix(3, seed=6)
        tau = random_density_matrix(2, seed=7)
        psi = chn.phase_damping(0.4)
        lhs = chn.apply_half_noisy(psi, tensor_product(sigma, tau))
        np.testing.assert_allclose(lhs, tensor_product(sigma, psi.apply(tau)), atol=1e-12)

    def test_kraus_and_transfer_routes_match(self):
        rho = random_density_matrix(6, seed=8)
        phi = chn.random_unital_qubit_channel(9)
        a = chn.apply_half_noisy(phi, rho)
        b = chn.apply_half_noisy(chn.kraus_from_transfer(phi), rho)
        np.testing.assert_allclose(a, b, atol=1e-10)


class TestTensorAndCompose:
    def test_identity_tensor_identity(self):
        joint = chn.tensor(chn.KrausChannel.identity(2), chn.KrausChannel.identity(2))
        rho = random_density_matrix(4, seed=10)
        np.testing.assert_allclose(joint.apply(rho), rho, atol=1e-12)

    def test_product_covariance(self):
        dep = chn.depolarizing(0.6)
        psi = chn.phase_damping(0.3)
        joint = chn.tensor(dep, psi)
        sigma = random_density_matrix(2, seed=11)
        tau = random_density_matrix(2, seed=12)
        lhs = joint.apply(tensor_product(sigma, tau))
        np.testing.assert_allclose(lhs, tensor_product(dep.apply(sigma), psi.apply(tau)), atol=1e-10)

    def test_joint_kraus_completeness(self):
        a = chn.random_kraus_channel(2, 2, 3, seed=13)
        b = chn.random_kraus_channel(2, 2, 2, seed=14)
        joint = chn.tensor(a, b)
        comp = sum(k.conj().T @ k for k in joint.kraus)
        np.testing.assert_allclose(comp, np.eye(4), atol=1e-10)

    def test_compose_transfer_multiplication(self):
        a = chn.depolarizing(0.5)
        b = chn.phase_damping(0.4)
        np.testing.assert_allclose(chn.compose(a, b).t, a.t @ b.t, atol=1e-14)


class TestConjugation:
    def test_identity_rotation(self):
        np.testing.assert_allclose(chn.conjugation_channel(I2).t, np.eye(3), atol=1e-14)

    def test_coordinate_permutation_unitary(self):
        # the cyclic unitary sends x -> z, y -> x, z -> y under conjugation
        v = 0.5 * (I2 + 1j * (SIGMA_X + SIGMA_Y + SIGMA_Z))
        np.testing.assert_allclose(v @ SIGMA_X @ v.conj().T, SIGMA_Z, atol=1e-12)
        np.testing.assert_allclose(v @ SIGMA_Y @ v.conj().T, SIGMA_X, atol=1e-12)
        np.testing.assert_allclose(v @ SIGMA_Z @ v.conj().T, SIGMA_Y, atol=1e-12)

    def test_sigma_x_rotation(self):
        np.testing.assert_allclose(chn.conjugation_channel(SIGMA_X).t, np.diag([1.0, -1.0, -1.0]), atol=1e-14)

    def test_inverse_composes_to_identity(self):
        u = random_unitary(2, seed=15)
        r = chn.compose(chn.conjugation_channel(u), chn.conjugation_channel(u.conj().T))
        np.testing.assert_allclose(r.t, np.eye(3), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            chn.conjugation_channel(np.array([[1, 1], [0, 1]], dtype=complex))

    def test_sign_flip_symmetry(self):
        # conjugating the domain by sigma_x flips the signs of the y and z factors
        lams = np.array([0.5, 0.3, 0.6])
        phi = chn.UnitalQubitChannel(np.diag(lams))
        flipped = chn.compose(phi, chn.conjugation_channel(SIGMA_X))
        np.testing.assert_allclose(np.diag(flipped.t), [0.5, -0.3, -0.6], atol=1e-14)


class TestCompletePositivity:
    CORNERS = np.array([(1, 1, 1), (1, -1, -1), (-1, -1, 1), (-1, 1, -1)], dtype=float)

    def hull_oracle(self, point):
        # brute-force barycentric membership in the corner hull
        a = np.vstack([self.CORNERS.T, np.ones(4)])
        _, resid = nnls(a, np.append(point, 1.0))
        return resid < 1e-9

    def test_corners(self):
        for corner in self.CORNERS:
            assert chn.is_completely_positive(corner)

    def test_outside_point(self):
        assert not chn.is_completely_positive((1, 1, -1))

    def test_centroid(self):
        assert chn.is_completely_positive((0, 0, 0))

    def test_half_spaces_match_hull_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(2000):
            point = rng.uniform(-1.2, 1.2, size=3)
            assert chn.is_completely_positive(point, atol=1e-9) == self.hull_oracle(point)


class TestNamedChannels:
    def test_phase_damping_one_is_identity(self):
        np.testing.assert_allclose(chn.phase_damping(1.0).t, np.eye(3), atol=1e-14)

    def test_phase_damping_transfer(self):
        np.testing.assert_allclose(chn.phase_damping(0.7).t, np.diag([0.7, 0.7, 1.0]), atol=1e-14)

    def test_corner_map_transfer(self):
        np.testing.assert_allclose(chn.corner_map(1, 0.4).t, np.diag([1.0, 0.4, 0.4]), atol=1e-14)
        np.testing.assert_allclose(chn.corner_map(4, 0.4).t, np.diag([-0.4, -1.0, 0.4]), atol=1e-14)
        with pytest.raises(ValueError):
            chn.corner_map(5, 0.4)

    def test_depolarizing_range(self):
        chn.depolarizing(1 / 3)
        chn.depolarizing(-1 / 3)
        with pytest.raises(ValueError, match="not completely positive"):
            chn.depolarizing(-0.5)

    def test_two_pauli_domain(self):
        np.testing.assert_allclose(np.diag(chn.two_pauli(0.5).t), [0.0, 0.5, 0.5], atol=1e-14)
        for bad in (0.2, 1.1):
            with pytest.raises(ValueError):
                chn.two_pauli(bad)


class TestKrausExtraction:
    def test_identity_single_kraus(self):
        kr = chn.kraus_from_transfer(chn.identity())
        assert len(kr.kraus) == 1

    def test_phase_damping_two_kraus_action(self):
        lam = 0.6
        kr = chn.kraus_from_transfer(chn.phase_damping(lam))
        assert len(kr.kraus) == 2
        # action must match the explicit pair sqrt((1+lam)/2) I, sqrt((1-lam)/2) sz
        explicit = chn.KrausChannel((np.sqrt((1 + lam) / 2) * I2, np.sqrt((1 - lam) / 2) * SIGMA_Z))
        assert channels_agree(kr, explicit)

    def test_depolarizing_four_kraus(self):
        kr = chn.kraus_from_transfer(chn.depolarizing(0.5))
        assert len(kr.kraus) == 4
        assert channels_agree(kr, chn.depolarizing(0.5))

    def test_round_trip_on_basis_fuzz(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            phi = chn.random_unital_qubit_channel(rng)
            assert channels_agree(chn.kraus_from_transfer(phi), phi)


class TestChannelInvariants:
    def test_outputs_are_states(self):
        rng = np.random.default_rng(18)
        cases = [
            chn.depolarizing(0.4),
            chn.phase_damping(-0.5),
            chn.two_pauli(0.7),
            chn.random_unital_qubit_channel(19),
            chn.random_kraus_channel(3, 3, 4, seed=20),
        ]
        for ch in cases:
            for _ in range(200):
                rho = random_density_matrix(ch.in_dim, seed=rng)
                out = ch.apply(rho)  # apply re-validates the output state
                assert abs(np.trace(out) - 1) < 1e-10

    def test_unitality_fuzz(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            phi = chn.random_unital_qubit_channel(rng)
            np.testing.assert_allclose(phi.apply(I2 / 2), I2 / 2, atol=1e-12)

    def test_transfer_from_kraus_round_trip(self):
        phi = chn.random_unital_qubit_channel(22)
        t = chn.transfer_from_kraus(chn.kraus_from_transfer(phi))
        np.testing.assert_allclose(t, phi.t, atol=1e-10)

    def test_incomplete_kraus_rejected(self):
        with pytest.raises(ValueError, match="completeness"):
            chn.KrausChannel((0.5 * I2,))


class TestSerialization:
    def test_unital_round_trip(self):
        phi = chn.random_unital_qubit_channel(23)
        again = chn.channel_from_json(json.loads(json.dumps(chn.channel_to_json(phi))))
        np.testing.assert_allclose(again.t, phi.t, atol=1e-15)

    def test_kraus_round_trip(self):
        ch = chn.random_kraus_channel(2, 3, 2, seed=24)
        again = chn.channel_from_json(json.loads(json.dumps(chn.channel_to_json(ch))))
        assert again.in_dim == 2 and again.out_dim == 3
        for a, b in zip(ch.kraus, again.kraus):
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            chn.channel_from_json({"kind": "mystery", "data": {}})


def test_bloch_action_consistency():
    # transfer matrix action agrees with direct Kraus conjugation
    phi = chn.random_unital_qubit_channel(25)
    kr = chn.kraus_from_transfer(phi)
    w = np.array([0.2, -0.5, 0.1])
    rho = state_from_bloch(w)
    np.testing.assert_allclose(bloch_vector(kr.apply(rho)), phi.t @ w, atol=1e-10)
