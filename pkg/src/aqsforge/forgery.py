"""Forgery witnesses for arbitrated quantum signature schemes.

A scheme signs ``|M>`` under key ``(j, k)`` as ``sigma_k W R_j |M>``. A
receiver holding a valid pair can apply an operator ``Q`` to the signature;
the result still verifies for every key exactly when all the conjugates

    C_jk(Q) = R_j^+ W^+ sigma_k^+ Q sigma_k W R_j

send ``|M0>`` to one common direction (up to phase). ``deviation`` measures
how far a candidate ``(Q, M0)`` is from that, and the constructors below
produce pairs where it is zero:

* ``find_two_rotation_witness``: any two rotations, any assistant; always
  succeeds with ``Q = sigma_1``.
* ``classify_three_rotation`` / ``construct_three_rotation_witness``: three
  Pauli rotations; a witness exists iff the assistant lies on one of the
  ``alpha*beta*gamma = 0`` strata (see ``pauliparam``).
* ``brute_force_search``: multi-start numerical minimisation of the
  deviation, used as an independent check on the classification.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from . import _search
from .errors import ContractViolation, InconsistencyError
from .mat2core import (
    SIGMA,
    TOL_ANALYTIC,
    adjoint,
    as_ket,
    canonical_ket,
    check_unitary,
    common_eigenvector,
    eigenpairs,
    ket_from_bloch,
    phase_equal_ops,
)
from .pauliparam import (
    ClassificationReport,
    PauliCoeffs,
    classify,
    coeffs_to_matrix,
    matrix_to_coeffs,
)

__all__ = [
    "EXCLUSION_RADIUS",
    "ForgeryWitness",
    "SchemeSpec",
    "SearchResult",
    "ThreeRotationVerdict",
    "brute_force_search",
    "classify_three_rotation",
    "conjugation",
    "construct_three_rotation_witness",
    "deviation",
    "find_two_rotation_witness",
    "lemma1_filter",
    "lemma1_polynomial",
    "so3_rotation",
]

log = logging.getLogger(__name__)

TWO_GENERAL = "two_general"
THREE_PAULI = "three_pauli"

# Q within this phase distance of the identity makes the forgery condition vacuous
EXCLUSION_RADIUS = 1e-3
_NON_IDENTITY = 1e-6

_ROTATION_NAMES = {"id": 0, "sx": 1, "sy": 2, "sz": 3}


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    """Assistant unitary ``W`` plus the ordered rotation set ``{R_j}``."""

    assistant: PauliCoeffs
    rotations: tuple[np.ndarray, ...]
    rotation_kind: str

    def __post_init__(self) -> None:
        rots = tuple(check_unitary(R, f"rotation {i}") for i, R in enumerate(self.rotations))
        object.__setattr__(self, "rotations", rots)
        if self.rotation_kind == TWO_GENERAL:
            if len(rots) != 2:
                raise ContractViolation("two_general schemes take exactly two rotations")
        elif self.rotation_kind == THREE_PAULI:
            if len(rots) != 3:
                raise ContractViolation("three_pauli schemes take exactly three rotations")
            labels = [pauli_label(R) for R in rots]
            if None in labels or 0 in labels or len(set(labels)) != 3:
                raise ContractViolation(
                    "three_pauli rotations must be sigma_1, sigma_2, sigma_3 (up to phase), each once"
                )
        else:
            raise ContractViolation(f"unknown rotation kind {self.rotation_kind!r}")

    @classmethod
    def two_general(cls, assistant: PauliCoeffs, r0: ArrayLike, r1: ArrayLike) -> SchemeSpec:
        return cls(assistant, (np.asarray(r0, complex), np.asarray(r1, complex)), TWO_GENERAL)

    @classmethod
    def three_pauli(cls, assistant: PauliCoeffs, order: tuple[int, int, int] = (1, 2, 3)) -> SchemeSpec:
        return cls(assistant, tuple(SIGMA[l] for l in order), THREE_PAULI)

    @classmethod
    def from_names(cls, assistant: PauliCoeffs, names: list[str]) -> SchemeSpec:
        try:
            rots = [SIGMA[_ROTATION_NAMES[n.strip().lower()]] for n in names]
        except KeyError as exc:
            raise ContractViolation(f"unknown rotation name {exc.args[0]!r}") from exc
        kind = THREE_PAULI if len(rots) == 3 else TWO_GENERAL
        return cls(assistant, tuple(rots), kind)

    @property
    def W(self) -> np.ndarray:
        return coeffs_to_matrix(self.assistant)

    @property
    def n_rotations(self) -> int:
        return len(self.rotations)

    def keys(self) -> list[tuple[int, int]]:
        return list(itertools.product(range(self.n_rotations), range(4)))


def pauli_label(R: np.ndarray, tol: float = TOL_ANALYTIC) -> int | None:
    for l, s in enumerate(SIGMA):
        if phase_equal_ops(s, R, tol):
            return l
    return None


@dataclass(frozen=True, eq=False)
class ForgeryWitness:
    """Checkable forgery certificate.

    ``target`` is the common direction ``U|M0>``; only the action of ``U`` on
    ``|M0>`` is determined, so that is all that is stored. ``unitary()``
    completes it to a full operator when one is needed.
    """

    message: np.ndarray
    q_op: np.ndarray
    target: np.ndarray
    deviation: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "message", as_ket(self.message))
        object.__setattr__(self, "q_op", check_unitary(self.q_op, "Q"))
        object.__setattr__(self, "target", as_ket(self.target))
        if 1.0 - abs(np.trace(self.q_op)) / 2 < _NON_IDENTITY:
            raise ContractViolation("Q is the identity up to phase")

    @property
    def q_coeffs(self) -> PauliCoeffs:
        return matrix_to_coeffs(self.q_op)

    def unitary(self) -> np.ndarray:
        """A unitary ``U`` with ``U|M0> = |target>``."""
        m, t = self.message, self.target
        m_perp = np.array([-np.conj(m[1]), np.conj(m[0])])
        t_perp = np.array([-np.conj(t[1]), np.conj(t[0])])
        return np.outer(t, m.conj()) + np.outer(t_perp, m_perp.conj())


@dataclass(frozen=True, eq=False)
class SearchResult:
    min_deviation: float
    best_q: PauliCoeffs
    best_message: np.ndarray
    starts: int
    seed: int
    restrict_lemma1: bool = False
    values: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True, eq=False)
class ThreeRotationVerdict:
    forgeable: bool
    report: ClassificationReport
    witness: ForgeryWitness | None = None


def _check_index(scheme: SchemeSpec, j: int, k: int) -> None:
    if not 0 <= j < scheme.n_rotations:
        raise ContractViolation(f"rotation index {j} out of range")
    if not 0 <= k < 4:
        raise ContractViolation(f"encryption index {k} out of range")


def _encoders(scheme: SchemeSpec) -> list[np.ndarray]:
    """``sigma_k W R_j`` for every key, in ``scheme.keys()`` order."""
    W = scheme.W
    return [SIGMA[k] @ W @ scheme.rotations[j] for j, k in scheme.keys()]


def conjugation(scheme: SchemeSpec, Q: ArrayLike, j: int, k: int) -> np.ndarray:
    """``R_j^+ W^+ sigma_k^+ Q sigma_k W R_j``."""
    Q = check_unitary(Q, "Q")
    _check_index(scheme, j, k)
    A = SIGMA[k] @ scheme.W @ scheme.rotations[j]
    return adjoint(A) @ Q @ A


def deviation(scheme: SchemeSpec, Q: ArrayLike, M: ArrayLike) -> float:
    """Worst pairwise phase misalignment among the states ``C_jk(Q)|M>``.

    Zero exactly when one direction ``U|M>`` is reached for every key.
    """
    Q = check_unitary(Q, "Q")
    M = as_ket(M)
    V = np.array([adjoint(A) @ (Q @ (A @ M)) for A in _encoders(scheme)])
    overlaps = np.abs(V.conj() @ V.T)
    return float(max(0.0, (1.0 - overlaps).max()))


def _witness(scheme: SchemeSpec, Q: np.ndarray, M: np.ndarray) -> ForgeryWitness:
    M = canonical_ket(M)
    target = canonical_ket(conjugation(scheme, Q, 0, 0) @ M)
    return ForgeryWitness(M, Q, target, deviation(scheme, Q, M))


def find_two_rotation_witness(scheme: SchemeSpec, tol: float = TOL_ANALYTIC) -> ForgeryWitness:
    """Witness with ``Q = sigma_1`` for any two-rotation scheme.

    ``sigma_k sigma_1 sigma_k = +-sigma_1`` removes the key index k, leaving two
    unitaries A, B; an eigenvector of ``A^+ B`` is sent to the same direction
    by both.
    """
    if scheme.rotation_kind != TWO_GENERAL:
        raise ContractViolation("find_two_rotation_witness needs a two_general scheme")
    Q = SIGMA[1]
    A = conjugation(scheme, Q, 0, 0)
    B = conjugation(scheme, Q, 1, 0)
    for pair in eigenpairs(adjoint(A) @ B):
        w = _witness(scheme, Q, pair.vector)
        if w.deviation <= tol:
            return w
    raise InconsistencyError("no eigenvector of A^+B gave a witness within tolerance")


def _phase_classes(mats: list[np.ndarray], tol: float) -> list[np.ndarray]:
    reps: list[np.ndarray] = []
    for C in mats:
        if not any(phase_equal_ops(R, C, tol) for R in reps):
            reps.append(C)
    return reps


def _candidate_messages(reps: list[np.ndarray], tol: float) -> list[np.ndarray]:
    if len(reps) == 1:
        return [np.array([1, 0], dtype=complex)]
    A, B = reps[0], reps[1]
    if len(reps) == 2:
        return [p.vector for p in eigenpairs(adjoint(A) @ B)]
    v = common_eigenvector(adjoint(A) @ B, adjoint(A) @ reps[2], tol)
    return [] if v is None else [v]


def construct_three_rotation_witness(
    scheme: SchemeSpec, perm: tuple[int, int, int], tol: float = TOL_ANALYTIC
) -> ForgeryWitness:
    """Witness for an assistant on the stratum ``perm``.

    Tries ``Q`` in (sigma_1, sigma_2, sigma_3). For each, the three conjugates
    ``C_j0(Q)`` fall into at most two phase classes when the assistant is on
    a stratum; a message is then read off an eigenvector as in the
    two-rotation case. Every candidate is accepted only after its deviation
    is recomputed.
    """
    if scheme.rotation_kind != THREE_PAULI:
        raise ContractViolation("construct_three_rotation_witness needs a three_pauli scheme")
    report = classify(scheme.assistant, tol)
    if abs(report.triples[tuple(perm)].product) > tol:
        raise ContractViolation(f"assistant is not on the stratum {tuple(perm)}")
    for l in (1, 2, 3):
        Q = SIGMA[l]
        conj = [conjugation(scheme, Q, j, 0) for j in range(3)]
        for M in _candidate_messages(_phase_classes(conj, tol), tol):
            w = _witness(scheme, Q, M)
            if w.deviation <= tol:
                return w
    raise InconsistencyError(
        f"assistant {scheme.assistant} is on stratum {tuple(perm)} but no single-Pauli Q gave a witness"
    )


def classify_three_rotation(scheme: SchemeSpec, tol: float = TOL_ANALYTIC) -> ThreeRotationVerdict:
    if scheme.rotation_kind != THREE_PAULI:
        raise ContractViolation("classify_three_rotation needs a three_pauli scheme")
    report = classify(scheme.assistant, tol)
    if not report.forgeable:
        return ThreeRotationVerdict(False, report)
    witness = construct_three_rotation_witness(scheme, report.member_of[0], tol)
    return ThreeRotationVerdict(True, report, witness)


def lemma1_polynomial(q: PauliCoeffs) -> float:
    """Third elementary symmetric polynomial in the squared coefficients.

    It is the determinant of the commutator of the two conjugated products
    that a forgery operator must share an eigenvector of; it vanishes iff at
    least two coefficients are zero.
    """
    x0, x1, x2, x3 = (c * c for c in q.as_array())
    return float(x0 * x1 * x2 + x0 * x2 * x3 + x0 * x1 * x3 + x1 * x2 * x3)


def lemma1_filter(q: PauliCoeffs, tol: float = TOL_ANALYTIC) -> bool:
    return lemma1_polynomial(q) <= tol


def so3_rotation(U: np.ndarray) -> np.ndarray:
    """Bloch-sphere action of a 2x2 unitary: ``R[a, b] = tr(s_a U s_b U^+) / 2``."""
    P = SIGMA[1:]
    Ud = adjoint(U)
    return np.array([[0.5 * np.trace(P[a] @ U @ P[b] @ Ud).real for b in range(3)] for a in range(3)])


# search settings
_GRID = 24
_GOLDEN_STEPS = 45
_MAX_SWEEPS = 200
_MIN_IMPROVE = 1e-12


def _start_point(seed: int, index: int, restrict_lemma1: bool, psi_min: float):
    # one independent stream per start: output does not depend on batching
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    if restrict_lemma1:
        a, b = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)][rng.integers(6)]
        phi = rng.uniform(0.0, 2.0 * np.pi)
        q = np.zeros(4)
        q[a], q[b] = np.cos(phi), np.sin(phi)
    else:
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    psi = float(np.clip(np.arccos(min(1.0, q[0])), psi_min, 0.5 * np.pi))
    axis = q[1:]
    norm = np.linalg.norm(axis)
    u = axis / norm if norm > 1e-12 else np.array([1.0, 0.0, 0.0])
    bloch = rng.standard_normal(3)
    bloch /= np.linalg.norm(bloch)
    return psi, u, bloch


def _q_from_search(psi: float, u: np.ndarray) -> PauliCoeffs:
    q = np.concatenate([[np.cos(psi)], np.sin(psi) * u / np.linalg.norm(u)])
    return PauliCoeffs.from_array(q, normalize=True)


def brute_force_search(
    scheme: SchemeSpec,
    starts: int,
    seed: int,
    restrict_lemma1: bool = False,
) -> SearchResult:
    """Multi-start minimisation of ``deviation`` over Q and the message.

    Q is kept at least ``EXCLUSION_RADIUS`` (phase distance) away from the
    identity. Start ``i`` draws from ``SeedSequence(seed, spawn_key=(i,))``;
    the best start wins, ties going to the lowest index. The returned
    ``min_deviation`` is re-evaluated with ``deviation`` at the best point.
    """
    if starts < 1:
        raise ContractViolation("starts must be >= 1")
    psi_min = float(np.arccos(1.0 - EXCLUSION_RADIUS))
    init = [_start_point(seed, i, restrict_lemma1, psi_min) for i in range(starts)]
    psi0 = np.array([p for p, _, _ in init])
    u0 = np.array([u for _, u, _ in init])
    b0 = np.array([b for _, _, b in init])
    O = np.array([so3_rotation(A) for A in _encoders(scheme)])
    psi, u, b, values = _search.descend_many(
        psi0, u0, b0, O, psi_min, _GRID, _GOLDEN_STEPS, _MAX_SWEEPS, _MIN_IMPROVE
    )
    best = int(np.argmin(values))
    q = _q_from_search(psi[best], u[best])
    message = ket_from_bloch(b[best])
    min_dev = deviation(scheme, coeffs_to_matrix(q), message)
    log.debug("search: kernel min %.3g, recomputed %.3g", values[best], min_dev)
    return SearchResult(min_dev, q, message, starts, seed, restrict_lemma1, values)


def search_objective(scheme: SchemeSpec, q: PauliCoeffs, message: ArrayLike) -> float:
    """The compiled search objective at one point (for cross-checking against ``deviation``)."""
    M = as_ket(message)
    rho_vec = np.array(
        [2 * (np.conj(M[0]) * M[1]).real, 2 * (np.conj(M[0]) * M[1]).imag, abs(M[0]) ** 2 - abs(M[1]) ** 2]
    )
    arr = q.as_array()
    psi = float(np.arccos(np.clip(arr[0], -1.0, 1.0)))
    axis = arr[1:]
    norm = np.linalg.norm(axis)
    u = axis / norm if norm > 1e-15 else np.array([1.0, 0.0, 0.0])
    O = np.array([so3_rotation(A) for A in _encoders(scheme)])
    return float(_search.objective_many(np.array([psi]), u[None, :], rho_vec[None, :], O)[0])
