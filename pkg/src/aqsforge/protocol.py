"""Executable AQS protocol: signing, verification, swap test, attack replay.

Signing under key ``(j, k)`` is ``|S> = sigma_k W R_j |M>``; a pair
``(M', S')`` verifies when ``R_j^+ W^+ sigma_k^+ |S'>`` equals ``|M'>`` up to
global phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import ContractViolation
from .forgery import ForgeryWitness, SchemeSpec, deviation
from .mat2core import SIGMA, TOL_ANALYTIC, adjoint, as_ket, canonical_ket, phase_equal_states
from .pauliparam import PauliCoeffs, coeffs_to_matrix

__all__ = [
    "AttackReport",
    "KeyVerdict",
    "SecretKey",
    "SignedPair",
    "SwapTestOutcome",
    "all_keys",
    "encryption_identity_check",
    "keygen",
    "random_ket",
    "run_attack",
    "sign",
    "swap_test_verify",
    "verify",
]


@dataclass(frozen=True)
class SecretKey:
    j: int
    k: int


@dataclass(frozen=True, eq=False)
class SignedPair:
    message: np.ndarray
    signature: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "message", as_ket(self.message))
        object.__setattr__(self, "signature", as_ket(self.signature))


@dataclass(frozen=True)
class Verdict:
    valid: bool
    gap: float

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class SwapTestOutcome:
    accept_count: int
    copies: int
    accept_probability: float

    @property
    def valid(self) -> bool:
        # a single rejection certifies the states differ
        return self.accept_count == self.copies

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class KeyVerdict:
    key: SecretKey
    accepted: bool
    overlap_gap: float
    swap: SwapTestOutcome | None = None


@dataclass(frozen=True)
class AttackReport:
    verdicts: list[KeyVerdict]
    all_keys_fooled: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "all_keys_fooled", all(v.accepted for v in self.verdicts))

    @property
    def swap_test_stats(self) -> list[tuple[int, int]] | None:
        if any(v.swap is None for v in self.verdicts):
            return None
        return [(v.swap.copies, v.swap.accept_count) for v in self.verdicts]


def all_keys(scheme: SchemeSpec) -> list[SecretKey]:
    return [SecretKey(j, k) for j, k in scheme.keys()]


def keygen(scheme: SchemeSpec, seed: int | np.random.Generator) -> SecretKey:
    rng = np.random.default_rng(seed)
    return SecretKey(int(rng.integers(scheme.n_rotations)), int(rng.integers(4)))


def random_ket(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def _check_key(scheme: SchemeSpec, key: SecretKey) -> None:
    if not (0 <= key.j < scheme.n_rotations and 0 <= key.k < 4):
        raise ContractViolation(f"key {key} out of range for this scheme")


def _encoder(scheme: SchemeSpec, key: SecretKey) -> np.ndarray:
    _check_key(scheme, key)
    return SIGMA[key.k] @ scheme.W @ scheme.rotations[key.j]


def sign(scheme: SchemeSpec, M: ArrayLike, key: SecretKey) -> np.ndarray:
    return _encoder(scheme, key) @ as_ket(M)


def recover(scheme: SchemeSpec, signature: ArrayLike, key: SecretKey) -> np.ndarray:
    """``R_j^+ E_k^+ |S>``, the message a signature decodes to."""
    return adjoint(_encoder(scheme, key)) @ as_ket(signature)


def verify(scheme: SchemeSpec, pair: SignedPair, key: SecretKey, tol: float = TOL_ANALYTIC) -> Verdict:
    match = phase_equal_states(pair.message, recover(scheme, pair.signature, key), tol)
    return Verdict(match.equivalent, match.gap)


def swap_test_verify(
    pair: SignedPair,
    key: SecretKey,
    scheme: SchemeSpec,
    copies: int,
    seed: int | np.random.Generator,
) -> SwapTestOutcome:
    """Swap-test each of ``copies`` copies; accept probability ``(1 + |overlap|^2) / 2``."""
    if copies < 1:
        raise ContractViolation("copies must be >= 1")
    overlap = np.vdot(pair.message, recover(scheme, pair.signature, key))
    p = swap_accept_probability(abs(overlap))
    rng = np.random.default_rng(seed)
    accepts = int(np.count_nonzero(rng.random(copies) < p))
    return SwapTestOutcome(accepts, copies, p)


def swap_accept_probability(abs_overlap: float) -> float:
    return float(min(1.0, (1.0 + abs_overlap * abs_overlap) / 2.0))


def encryption_identity_check(W: PauliCoeffs, samples: int, seed: int | np.random.Generator) -> float:
    """Max entrywise deviation from I/2 of the Pauli-twirled channels.

    Checks both the four-operator average of ``E_k rho E_k^+`` and the
    eight-operator average that also runs over the rotations sigma_x,
    sigma_z, for random pure states ``rho``.
    """
    if samples < 1:
        raise ContractViolation("samples must be >= 1")
    rng = np.random.default_rng(seed)
    Wm = coeffs_to_matrix(W)
    E = [s @ Wm for s in SIGMA]
    rotations = (SIGMA[1], SIGMA[3])
    half = np.eye(2) / 2
    worst = 0.0
    for _ in range(samples):
        v = random_ket(rng)
        rho = np.outer(v, v.conj())
        one = sum(Ek @ rho @ adjoint(Ek) for Ek in E) / 4
        two = sum(Ek @ R @ rho @ adjoint(R) @ adjoint(Ek) for Ek in E for R in rotations) / 8
        worst = max(worst, float(np.abs(one - half).max()), float(np.abs(two - half).max()))
    return worst


def run_attack(
    scheme: SchemeSpec,
    witness: ForgeryWitness,
    mode: str = "deterministic",
    *,
    copies: int = 100,
    seed: int = 0,
    tol: float = TOL_ANALYTIC,
    require_sound: bool = True,
) -> AttackReport:
    """Replay the receiver's forgery against every key.

    For each key the honest pair ``(M0, sign(M0))`` is turned into
    ``(target, Q sign(M0))`` and checked with ``verify`` (``mode =
    "deterministic"``) or ``swap_test_verify`` (``mode = "swap_test"``).
    With ``require_sound`` a witness whose recomputed deviation exceeds
    ``tol`` is refused; switch it off to replay deliberately broken
    witnesses as negative controls.
    """
    if mode not in ("deterministic", "swap_test"):
        raise ContractViolation(f"unknown mode {mode!r}")
    if require_sound:
        actual = deviation(scheme, witness.q_op, witness.message)
        if actual > tol:
            raise ContractViolation(f"witness deviation {actual:.3g} exceeds tolerance {tol:.3g}")
    forged_message = canonical_ket(witness.target)
    verdicts = []
    seeds = np.random.SeedSequence(seed).spawn(len(scheme.keys()))
    for key, child in zip(all_keys(scheme), seeds):
        forged = SignedPair(forged_message, witness.q_op @ sign(scheme, witness.message, key))
        check = verify(scheme, forged, key, tol)
        if mode == "swap_test":
            swap = swap_test_verify(forged, key, scheme, copies, np.random.default_rng(child))
            verdicts.append(KeyVerdict(key, swap.valid, check.gap, swap))
        else:
            verdicts.append(KeyVerdict(key, check.valid, check.gap))
    return AttackReport(verdicts)
