import numpy as np
import pytest

from aqsforge.errors import ContractViolation
from aqsforge.forgery import (
    ForgeryWitness,
    SchemeSpec,
    classify_three_rotation,
    deviation,
    find_two_rotation_witness,
)
from aqsforge.mat2core import SIGMA
from aqsforge.pauliparam import PRESETS, haar_sample, haar_unitary
from aqsforge.protocol import (
    SecretKey,
    SignedPair,
    all_keys,
    encryption_identity_check,
    keygen,
    random_ket,
    run_attack,
    sign,
    swap_accept_probability,
    swap_test_verify,
    verify,
)

from conftest import KET0, KET1, SX, SY, SZ, three_pauli


def _random_scheme(rng):
    w = haar_sample(rng, 1)[0]
    if rng.random() < 0.5:
        return SchemeSpec.two_general(w, haar_unitary(rng), haar_unitary(rng))
    return SchemeSpec.three_pauli(w, tuple(int(x) for x in rng.permutation([1, 2, 3])))


def _perturbed(Q, target_dev, scheme, message):
    """Q times a small rotation about sigma_2, tuned by bisection to the target deviation."""
    lo, hi = 0.0, np.pi / 2
    for _ in range(80):
        eps = 0.5 * (lo + hi)
        P = np.cos(eps) * SIGMA[0] + 1j * np.sin(eps) * SY
        if deviation(scheme, Q @ P, message) < target_dev:
            lo = eps
        else:
            hi = eps
    return Q @ (np.cos(hi) * SIGMA[0] + 1j * np.sin(hi) * SY)


class TestKeygen:
    def test_ranges(self, identity_sx_sz):
        seen = {(k.j, k.k) for k in (keygen(identity_sx_sz, s) for s in range(400))}
        assert seen == set(identity_sx_sz.keys()) and len(seen) == 8

    def test_three_pauli_has_twelve(self):
        s = three_pauli("T")
        seen = {(k.j, k.k) for k in (keygen(s, seed) for seed in range(600))}
        assert len(seen) == 12 and len(all_keys(s)) == 12

    def test_reproducible(self, identity_sx_sz):
        assert keygen(identity_sx_sz, 5) == keygen(identity_sx_sz, 5)

    def test_roughly_uniform(self):
        s = three_pauli("H")
        rng = np.random.default_rng(1)
        counts = np.zeros(12)
        keys = s.keys()
        for _ in range(12_000):
            k = keygen(s, rng)
            counts[keys.index((k.j, k.k))] += 1
        # binomial sd for p = 1/12, n = 12000 is about 30
        assert np.abs(counts - 1000).max() < 5 * 30


class TestSign:
    def test_sigma1(self, identity_sx_sz):
        assert np.allclose(sign(identity_sx_sz, KET0, SecretKey(0, 0)), KET1)

    def test_sigma3(self, identity_sx_sz):
        assert np.allclose(sign(identity_sx_sz, KET1, SecretKey(1, 0)), -KET1)

    def test_unit_norm(self, rng):
        s = three_pauli("T")
        for key in all_keys(s):
            assert abs(np.linalg.norm(sign(s, random_ket(rng), key)) - 1) <= 1e-12

    def test_bad_key(self, identity_sx_sz):
        with pytest.raises(ContractViolation):
            sign(identity_sx_sz, KET0, SecretKey(2, 0))


class TestVerify:
    def test_round_trip(self, rng):
        for _ in range(1000):
            s = _random_scheme(rng)
            M = random_ket(rng)
            key = keygen(s, rng)
            assert verify(s, SignedPair(M, sign(s, M, key)), key, 1e-9).valid

    def test_orthogonal_rejected(self, identity_sx_sz):
        v = verify(identity_sx_sz, SignedPair(KET0, KET0), SecretKey(0, 0))
        assert not v.valid and v.gap == pytest.approx(1.0)

    def test_signature_phase_free(self, rng):
        s = three_pauli("H")
        M = random_ket(rng)
        key = SecretKey(2, 3)
        S = np.exp(1j * 0.77) * sign(s, M, key)
        assert verify(s, SignedPair(M, S), key).valid

    def test_pair_must_be_normalised(self):
        with pytest.raises(ContractViolation):
            SignedPair(2 * KET0, KET0)


def _pair_with_overlap(overlap):
    # W = I, key (0, 0): the recovered message is sigma_1 |S>
    v = np.array([overlap, np.sqrt(1 - overlap**2)], dtype=complex)
    return SignedPair(KET0, SX @ v)


class TestSwapTest:
    def test_identical_always_accepts(self, identity_sx_sz):
        out = swap_test_verify(_pair_with_overlap(1.0), SecretKey(0, 0), identity_sx_sz, 500, 1)
        assert out.accept_probability == 1.0 and out.accept_count == 500 and out.valid

    def test_orthogonal_half(self, identity_sx_sz):
        out = swap_test_verify(_pair_with_overlap(0.0), SecretKey(0, 0), identity_sx_sz, 10, 1)
        assert out.accept_probability == pytest.approx(0.5)

    @pytest.mark.parametrize("overlap", [0.0, 0.5, 1 / np.sqrt(2), 1.0])
    def test_calibration(self, identity_sx_sz, overlap):
        n = 100_000
        out = swap_test_verify(_pair_with_overlap(overlap), SecretKey(0, 0), identity_sx_sz, n, 17)
        p = (1 + overlap**2) / 2
        assert out.accept_probability == pytest.approx(p, abs=1e-12)
        sd = np.sqrt(n * p * (1 - p))
        assert abs(out.accept_count - n * p) <= 3 * sd + 1e-9

    def test_single_reject_invalidates(self, identity_sx_sz):
        out = swap_test_verify(_pair_with_overlap(0.99), SecretKey(0, 0), identity_sx_sz, 10_000, 2)
        assert out.accept_count < 10_000 and not out.valid

    def test_copies_positive(self, identity_sx_sz):
        with pytest.raises(ContractViolation):
            swap_test_verify(_pair_with_overlap(1.0), SecretKey(0, 0), identity_sx_sz, 0, 1)

    def test_probability_closed_form(self):
        assert swap_accept_probability(1 / np.sqrt(2)) == pytest.approx(0.75)


class TestEncryptionIdentity:
    @pytest.mark.parametrize("name", ["I", "T", "H", "Wa"])
    def test_presets(self, name):
        assert encryption_identity_check(PRESETS[name], 100, 3) <= 1e-12

    def test_haar(self):
        rng = np.random.default_rng(8)
        worst = max(encryption_identity_check(w, 10, rng) for w in haar_sample(rng, 1000))
        assert worst <= 1e-12


class TestRunAttack:
    def test_h_three_pauli(self):
        s = three_pauli("H")
        r = run_attack(s, classify_three_rotation(s).witness)
        assert r.all_keys_fooled and len(r.verdicts) == 12
        assert r.swap_test_stats is None

    def test_identity_sx_sz(self, identity_sx_sz):
        w = ForgeryWitness(KET0, SX, KET1, 0.0)
        r = run_attack(identity_sx_sz, w)
        assert r.all_keys_fooled and len(r.verdicts) == 8

    def test_perturbed_negative_control(self, identity_sx_sz):
        w = find_two_rotation_witness(identity_sx_sz)
        Qp = _perturbed(w.q_op, 0.1, identity_sx_sz, w.message)
        assert deviation(identity_sx_sz, Qp, w.message) == pytest.approx(0.1, abs=1e-9)
        bad = ForgeryWitness(w.message, Qp, w.target, 0.1)
        with pytest.raises(ContractViolation):
            run_attack(identity_sx_sz, bad)
        r = run_attack(identity_sx_sz, bad, require_sound=False)
        assert not r.all_keys_fooled

    def test_soundness_random(self, rng):
        for _ in range(200):
            s = SchemeSpec.two_general(haar_sample(rng, 1)[0], haar_unitary(rng), haar_unitary(rng))
            assert run_attack(s, find_two_rotation_witness(s)).all_keys_fooled

    def test_detectability(self, rng):
        trials = 0
        while trials < 100:
            s = _random_scheme(rng)
            Q, M = haar_unitary(rng), random_ket(rng)
            d = deviation(s, Q, M)
            if d < 0.1:
                continue
            trials += 1
            target = SIGMA[0] @ (Q @ M)  # any direction: no single one can satisfy every key
            r = run_attack(s, ForgeryWitness(M, Q, target, d), require_sound=False)
            assert not r.all_keys_fooled

    def test_swap_test_mode(self):
        s = three_pauli("Wa")
        w = classify_three_rotation(s).witness
        r = run_attack(s, w, mode="swap_test", copies=200, seed=3)
        assert r.all_keys_fooled
        assert r.swap_test_stats == [(200, 200)] * 12

    def test_swap_test_deterministic(self, identity_sx_sz):
        w = find_two_rotation_witness(identity_sx_sz)
        bad = ForgeryWitness(w.message, _perturbed(w.q_op, 0.1, identity_sx_sz, w.message), w.target, 0.1)
        a = run_attack(identity_sx_sz, bad, mode="swap_test", copies=50, seed=9, require_sound=False)
        b = run_attack(identity_sx_sz, bad, mode="swap_test", copies=50, seed=9, require_sound=False)
        assert a.swap_test_stats == b.swap_test_stats
        assert not a.all_keys_fooled

    def test_unknown_mode(self, identity_sx_sz):
        with pytest.raises(ContractViolation):
            run_attack(identity_sx_sz, find_two_rotation_witness(identity_sx_sz), mode="magic")
