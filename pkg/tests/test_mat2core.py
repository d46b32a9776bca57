import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqsforge.errors import ContractViolation, UnsupportedInput
from aqsforge.mat2core import (
    I2,
    SIGMA,
    canonical_ket,
    common_eigenvector,
    commutator_det,
    eigenpairs,
    is_unitary,
    phase_equal_ops,
    phase_equal_states,
)
from aqsforge.pauliparam import haar_unitary

from conftest import KET0, KET1, PLUS, SX, SY, SZ


class TestPhaseEqualStates:
    def test_global_phase_only(self):
        m = phase_equal_states(KET0, 1j * KET0, 1e-9)
        assert m.equivalent
        assert m.theta == pytest.approx(np.pi / 2)

    def test_orthogonal(self):
        m = phase_equal_states(KET0, KET1, 1e-9)
        assert not m.equivalent
        assert m.gap == pytest.approx(1.0)

    def test_partial_overlap(self):
        # <+|0> = 1/sqrt2
        m = phase_equal_states(PLUS, KET0, 1e-9)
        assert not m.equivalent
        assert m.gap == pytest.approx(1 - 1 / np.sqrt(2), abs=1e-15)
        assert m.gap == pytest.approx(0.2929, abs=1e-4)

    def test_rejects_unnormalized(self):
        with pytest.raises(ContractViolation):
            phase_equal_states(KET0, 2 * KET0)

    def test_equivalence_relation_on_sample(self, rng):
        tol = 1e-12
        base = [canonical_ket(v / np.linalg.norm(v)) for v in rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))]
        sample = base + [np.exp(1j * t) * v for v, t in zip(base, rng.uniform(0, 2 * np.pi, 6))]
        eq = [[phase_equal_states(a, b, tol).equivalent for b in sample] for a in sample]
        n = len(sample)
        for i in range(n):
            assert eq[i][i]
            for j in range(n):
                assert eq[i][j] == eq[j][i]
                for k in range(n):
                    if eq[i][j] and eq[j][k]:
                        assert phase_equal_states(sample[i], sample[k], 3 * tol).equivalent


class TestPhaseEqualOps:
    def test_phase_multiple(self):
        m = phase_equal_ops(SX, 1j * SX)
        assert m.equivalent and m.theta == pytest.approx(np.pi / 2)

    def test_distinct_paulis(self):
        m = phase_equal_ops(SX, SZ)
        assert not m.equivalent and m.gap == pytest.approx(1.0)

    def test_conjugated_sign_flip(self):
        # sigma_3 sigma_1 sigma_3 = -sigma_1
        assert np.allclose(SZ @ SX @ SZ, -SX)
        m = phase_equal_ops(SZ @ SX @ SZ, SX)
        assert m.equivalent
        assert abs(abs(m.theta) - np.pi) < 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ContractViolation):
            phase_equal_ops(2 * I2, I2)

    def test_operator_phase_implies_state_phase(self, rng):
        tol = 1e-9
        for _ in range(200):
            A = haar_unitary(rng)
            theta = rng.uniform(-np.pi, np.pi)
            B = np.exp(1j * theta) * A
            op = phase_equal_ops(A, B, tol)
            assert op.equivalent
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v /= np.linalg.norm(v)
            st_ = phase_equal_states(A @ v, B @ v, tol)
            assert st_.equivalent
            assert abs(np.angle(np.exp(1j * (st_.theta - op.theta)))) <= 2 * tol


class TestEigenpairs:
    def test_sigma_z(self):
        pairs = eigenpairs(SZ)
        got = {round(p.value.real): p.vector for p in pairs}
        assert np.allclose(got[1], KET0) and np.allclose(got[-1], KET1)

    def test_sigma_x(self):
        pairs = eigenpairs(SX)
        got = {round(p.value.real): p.vector for p in pairs}
        assert np.allclose(got[1], PLUS)
        assert np.allclose(got[-1], np.array([1, -1]) / np.sqrt(2))

    def test_minus_identity_degenerate(self):
        pairs = eigenpairs(-I2)
        assert len(pairs) == 1 and pairs[0].degenerate
        assert pairs[0].value == pytest.approx(-1)
        assert np.allclose(pairs[0].vector, KET0)

    def test_non_normal_rejected(self):
        with pytest.raises(UnsupportedInput):
            eigenpairs(np.array([[1, 1], [0, 1]]))

    @pytest.mark.slow
    def test_residual_haar(self, rng):
        worst = 0.0
        for _ in range(100_000):
            A = haar_unitary(rng)
            for p in eigenpairs(A):
                worst = max(worst, np.linalg.norm(A @ p.vector - p.value * p.vector))
                assert abs(abs(p.value) - 1) < 1e-12
        assert worst <= 1e-9

    def test_near_degenerate_residual(self):
        eps = 1e-7
        A = np.diag([1.0, np.exp(1j * eps)])
        V = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
        A = V @ A @ V.conj().T
        for p in eigenpairs(A):
            assert np.linalg.norm(A @ p.vector - p.value * p.vector) <= 1e-9


def brute_force_common(A, B, tol=1e-6):
    """Independent check: numpy eigenvectors of A (or B), tested against the other."""
    for X, Y in ((A, B), (B, A)):
        if np.allclose(X, X[0, 0] * np.eye(2), atol=1e-12):
            continue
        _, V = np.linalg.eig(X)
        for v in V.T:
            v = v / np.linalg.norm(v)
            for M in (X, Y):
                pass
            Yv = Y @ v
            if np.linalg.norm(Yv - np.vdot(v, Yv) * v) <= tol:
                return True
        return False
    return True


def _pair_with_common_vector(rng):
    P = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Pi = np.linalg.inv(P)
    A = P @ np.array([[rng.normal(), rng.normal()], [0, rng.normal()]]) @ Pi
    B = P @ np.array([[rng.normal(), rng.normal()], [0, rng.normal()]]) @ Pi
    return A, B


class TestCommonEigenvector:
    def test_commuting_pair(self):
        assert np.allclose(common_eigenvector(SZ, 2 * SZ), KET0)

    def test_anticommuting_paulis(self):
        C = SX @ SZ - SZ @ SX
        assert np.allclose(C, [[0, -2], [2, 0]])
        assert commutator_det(SX, SZ) == pytest.approx(4)
        assert common_eigenvector(SX, SZ) is None

    def test_identity_commutes(self):
        assert np.allclose(common_eigenvector(SZ, I2), KET0)

    def test_diagonal_with_scalar(self):
        v = common_eigenvector(np.diag([2.0, 5.0]), 3 * I2)
        assert np.allclose(np.abs(v), [1, 0]) or np.allclose(np.abs(v), [0, 1])

    def test_agrees_with_brute_force(self, rng):
        disagreements = 0
        for i in range(1000):
            if i % 2:
                A, B = _pair_with_common_vector(rng)
            else:
                A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            v = common_eigenvector(A, B, 1e-9)
            if (v is not None) != brute_force_common(A, B):
                disagreements += 1
            if v is not None:
                for M in (A, B):
                    Mv = M @ v
                    assert np.linalg.norm(Mv - np.vdot(v, Mv) * v) <= 1e-6
        assert disagreements == 0


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 2 * np.pi)
)
def test_canonical_ket_phase(a, b, c, d, phase):
    v = np.array([a + 1j * b, c + 1j * d])
    n = np.linalg.norm(v)
    if n < 1e-3:
        return
    v = np.exp(1j * phase) * v / n
    w = canonical_ket(v)
    first = next(x for x in w if abs(x) > 1e-9)
    assert first.imag == 0.0 and first.real >= 0
    assert phase_equal_states(v, w, 1e-12).equivalent


def test_paulis_unitary():
    for s in SIGMA:
        assert is_unitary(s)
    assert np.allclose(SX @ SY, 1j * SZ)
