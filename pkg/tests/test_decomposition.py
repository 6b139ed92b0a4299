import json

import numpy as np
import pytest

from qchan import channels as chn
from qchan.decomposition import (
    V_CYCLIC,
    CrossSectionDecomposition,
    PhaseDampingDecomposition,
    PhaseDampingTerm,
    cross_section_decompose,
    decomposition_from_json,
    decomposition_to_json,
    phase_damping_apply,
    phase_damping_decompose,
    standard_form,
    su2_from_so3,
    verify_decomposition,
)
from qchan.linalg import (
    I2,
    PAULIS,
    SIGMA_X,
    bloch_vector,
    random_density_matrix,
    random_unitary,
    state_from_bloch,
)


def conjugation_matches(u, r, atol=1e-10):
    for j in range(3):
        lhs = u @ PAULIS[j] @ u.conj().T
        rhs = sum(r[i, j] * PAULIS[i] for i in range(3))
        if np.max(np.abs(lhs - rhs)) > atol:
            return False
    return True


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


class TestSu2Lift:
    def test_identity(self):
        u = su2_from_so3(np.eye(3))
        assert conjugation_matches(u, np.eye(3))

    def test_cyclic_permutation_gives_v(self):
        r = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        u = su2_from_so3(r)
        sign = min(np.max(np.abs(u - V_CYCLIC)), np.max(np.abs(u + V_CYCLIC)))
        assert sign < 1e-12
        assert conjugation_matches(u, r)

    def test_half_turn_about_x(self):
        u = su2_from_so3(np.diag([1.0, -1.0, -1.0]))
        # up to global phase this is sigma_x
        phase = u[0, 1]
        np.testing.assert_allclose(u, phase * SIGMA_X, atol=1e-12)
        assert conjugation_matches(u, np.diag([1.0, -1.0, -1.0]))

    def test_random_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            r = random_rotation(rng)
            assert conjugation_matches(su2_from_so3(r), r)

    def test_rejects_improper(self):
        with pytest.raises(ValueError):
            su2_from_so3(np.diag([1.0, 1.0, -1.0]))
        with pytest.raises(ValueError):
            su2_from_so3(np.eye(3) * 1.01)


class TestStandardForm:
    def test_reorders_diagonal(self):
        sf = standard_form(chn.UnitalQubitChannel(np.diag([0.3, 0.5, 0.4])))
        np.testing.assert_allclose(sf.lambdas, [0.4, 0.3, 0.5], atol=1e-12)

    def test_already_standard_passthrough(self):
        sf = standard_form(chn.UnitalQubitChannel(np.diag([-0.2, -0.2, 0.7])))
        np.testing.assert_allclose(sf.lambdas, [-0.2, -0.2, 0.7], atol=1e-14)
        np.testing.assert_allclose(sf.u_pre, I2, atol=1e-14)
        np.testing.assert_allclose(sf.u_post, I2, atol=1e-14)

    def test_unitary_channel_hits_the_corner(self):
        rot = chn.conjugation_channel(random_unitary(2, seed=1))
        sf = standard_form(rot)
        np.testing.assert_allclose(sf.lambdas, [1.0, 1.0, 1.0], atol=1e-10)

    def test_recomposition_fuzz(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            phi = chn.random_unital_qubit_channel(rng)
            sf = standard_form(phi)
            l1, l2, l3 = sf.lambdas
            assert l3 >= max(abs(l1), abs(l2)) - 1e-12
            assert l3 <= 1 + 1e-10
            assert chn.is_completely_positive(sf.lambdas, atol=1e-9)
            rebuilt = sf.to_channel()
            for basis in (I2 / 2, (I2 + SIGMA_X) / 2):
                np.testing.assert_allclose(rebuilt.apply(basis), phi.apply(basis), atol=1e-10)


class TestCrossSection:
    def test_depolarizing_point_is_a_vertex(self):
        cs = cross_section_decompose((0.5, 0.5, 0.5))
        assert len(cs.vertices) == 1
        w, v = cs.vertices[0]
        assert abs(w - 1) < 1e-12
        np.testing.assert_allclose(v, [0.5, 0.5])

    def test_centre_of_small_square(self):
        # any valid convex combination is acceptable; assert recomposition
        cs = cross_section_decompose((0.0, 0.0, 0.2))
        total = sum(w for w, _ in cs.vertices)
        rec = sum(w * v for w, v in cs.vertices)
        assert abs(total - 1) < 1e-12
        np.testing.assert_allclose(rec, [0.0, 0.0], atol=1e-12)

    def test_recomposition_fuzz(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            lams = rng.uniform(-1, 1, size=3)
            lams[2] = max(abs(lams[0]), abs(lams[1]), abs(lams[2]))
            if not chn.is_completely_positive(lams, atol=0.0):
                continue
            cs = cross_section_decompose(lams)
            assert len(cs.vertices) <= 3
            assert all(w > 0 for w, _ in cs.vertices)
            assert abs(sum(w for w, _ in cs.vertices) - 1) < 1e-12
            rec = sum(w * v for w, v in cs.vertices)
            np.testing.assert_allclose(rec, lams[:2], atol=1e-12)

    def test_degenerate_heights(self):
        # lam = 1 collapses the section to a segment, lam = 0 to a point
        cs = cross_section_decompose((0.4, 0.4, 1.0))
        rec = sum(w * v for w, v in cs.vertices)
        np.testing.assert_allclose(rec, [0.4, 0.4], atol=1e-12)
        cs0 = cross_section_decompose((0.0, 0.0, 0.0))
        assert len(cs0.vertices) == 1

    def test_rejections(self):
        with pytest.raises(ValueError, match="standard order"):
            cross_section_decompose((0.6, 0.5, 0.5))
        with pytest.raises(ValueError, match="not completely positive"):
            cross_section_decompose((0.9, -0.9, 0.95))


class TestPhaseDampingDecomposition:
    def test_phase_damping_with_equatorial_state_is_single_term(self):
        r = state_from_bloch([0.3, 0.4, 0.0])  # no z component
        d = phase_damping_decompose(chn.phase_damping(0.6), r)
        assert len(d.terms) == 1
        c, w, u = d.terms[0]
        assert abs(c - 1) < 1e-14
        np.testing.assert_allclose(w, I2, atol=1e-12)
        np.testing.assert_allclose(u, I2, atol=1e-12)
        assert abs(d.lam - 0.6) < 1e-12

    def test_depolarizing_at_maximally_mixed(self):
        # four rectangle-corner terms, diagonalizing unitary is the identity
        dep = chn.depolarizing(0.5)
        d = phase_damping_decompose(dep, I2 / 2)
        assert len(d.terms) == 4
        rep = verify_decomposition(d, dep)
        assert rep.passed
        assert rep.trace_condition_error < 1e-12

    def test_two_pauli_generic_state(self):
        tp = chn.two_pauli(0.5)
        r = random_density_matrix(2, seed=4)
        d = phase_damping_decompose(tp, r)
        rep = verify_decomposition(d, tp)
        assert rep.passed, rep

    def test_lambda_matches_standard_form(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            phi = chn.random_unital_qubit_channel(rng)
            r = random_density_matrix(2, seed=rng)
            d = phase_damping_decompose(phi, r)
            sf = standard_form(phi)
            if sf.lambdas[2] < 1 - 1e-12:  # conjugated dampers keep their own parameter
                assert abs(d.lam - sf.lambdas[2]) < 1e-12

    def test_invariant_fuzz(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            phi = chn.random_unital_qubit_channel(rng)
            r = random_density_matrix(2, rank=int(rng.integers(1, 3)), seed=rng)
            d = phase_damping_decompose(phi, r)
            rep = verify_decomposition(d, phi)
            assert rep.passed, rep
            assert rep.n_terms <= 24

    def test_special_channels(self):
        r = random_density_matrix(2, seed=7)
        for ch in (
            chn.identity(),
            chn.depolarizing(0.0),
            chn.depolarizing(-1 / 3),
            chn.corner_map(2, 0.8),
            chn.phase_damping(-0.4),
            chn.two_pauli(1 / 3),
            chn.two_pauli(1.0),
        ):
            rep = verify_decomposition(phase_damping_decompose(ch, r), ch)
            assert rep.passed, (ch.t, rep)

    def test_negative_control(self):
        # a tampered weight must be flagged by the recomposition metric
        dep = chn.depolarizing(0.5)
        d = phase_damping_decompose(dep, I2 / 2)
        bad_terms = (PhaseDampingTerm(d.terms[0].weight * 1.5, d.terms[0].post, d.terms[0].pre),) + d.terms[1:]
        bad = PhaseDampingDecomposition(lam=d.lam, terms=bad_terms, source_state=d.source_state)
        rep = verify_decomposition(bad, dep)
        assert not rep.passed
        assert rep.recomposition_error > 1e-3

    def test_apply_matches_term_sum(self):
        phi = chn.random_unital_qubit_channel(8)
        r = random_density_matrix(2, seed=9)
        d = phase_damping_decompose(phi, r)
        rho = random_density_matrix(2, seed=10)
        expected = sum(
            c * (w @ phase_damping_apply(d.lam, u @ rho @ u.conj().T) @ w.conj().T)
            for c, w, u in d.terms
        )
        np.testing.assert_allclose(d.apply(rho), expected, atol=1e-14)

    def test_trace_condition_states_sit_on_equator(self):
        phi = chn.random_unital_qubit_channel(11)
        r = random_density_matrix(2, seed=12)
        d = phase_damping_decompose(phi, r)
        for _, _, u in d.terms:
            assert abs(bloch_vector(u @ r @ u.conj().T)[2]) < 1e-12


def test_json_round_trip():
    phi = chn.random_unital_qubit_channel(13)
    r = random_density_matrix(2, seed=14)
    d = phase_damping_decompose(phi, r)
    again = decomposition_from_json(json.loads(json.dumps(decomposition_to_json(d))))
    assert abs(again.lam - d.lam) < 1e-15
    assert len(again.terms) == len(d.terms)
    rep = verify_decomposition(again, phi)
    assert rep.passed


def test_cross_section_type_fields():
    cs = cross_section_decompose((0.2, 0.1, 0.4))
    assert isinstance(cs, CrossSectionDecomposition)
    assert cs.lam == 0.4
