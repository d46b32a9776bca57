"""Dense 2x2 complex linear algebra.

Matrices are ``(2, 2)`` complex numpy arrays and kets are ``(2,)`` complex
arrays. Everything here is closed form: eigen-solutions come from the
characteristic quadratic, phase comparisons from a single inner product or
trace. No iterative solvers, no convergence parameters.

Public API:
    SIGMA, I2                      Pauli matrices sigma_0..sigma_3
    as_mat2, as_ket                validated conversion
    check_unitary, is_unitary
    canonical_ket                  fix the global phase of a ket
    phase_equal_states(a, b, tol)  -> PhaseMatch
    phase_equal_ops(A, B, tol)     -> PhaseMatch
    eigenpairs(A)                  -> list[EigenPair]
    common_eigenvector(A, B, tol)  -> ket or None
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import ContractViolation, UnsupportedInput

__all__ = [
    "I2",
    "SIGMA",
    "TOL_ANALYTIC",
    "TOL_IDENTITY",
    "EigenPair",
    "PhaseMatch",
    "adjoint",
    "as_ket",
    "as_mat2",
    "canonical_ket",
    "check_unitary",
    "common_eigenvector",
    "commutator_det",
    "eigenpairs",
    "is_unitary",
    "ket_from_bloch",
    "phase_equal_ops",
    "phase_equal_states",
]

TOL_ANALYTIC = 1e-9
TOL_IDENTITY = 1e-12

# contract checks on inputs; looser than TOL_IDENTITY so products of a few
# unitaries are still accepted
_NORM_SLACK = 1e-9
_DEGENERATE_GAP = 1e-9
_CANON_THRESHOLD = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA = (
    I2,
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _s in SIGMA:
    _s.setflags(write=False)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET0.setflags(write=False)
KET1.setflags(write=False)


@dataclass(frozen=True)
class PhaseMatch:
    """Outcome of a global-phase comparison.

    ``theta`` is the relative phase (meaningful when ``equivalent``); ``gap``
    is the distance from perfect alignment, ``1 - |overlap|``.
    """

    equivalent: bool
    theta: float
    gap: float

    def __bool__(self) -> bool:
        return self.equivalent


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: complex
    vector: np.ndarray
    degenerate: bool = False


def as_mat2(A: ArrayLike) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ContractViolation(f"expected a 2x2 matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractViolation("matrix has non-finite entries")
    return A


def as_ket(v: ArrayLike, *, normalized: bool = True) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (2,):
        raise ContractViolation(f"expected a 2-component ket, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("ket has non-finite entries")
    if normalized:
        dev = abs(np.linalg.norm(v) - 1.0)
        if dev > _NORM_SLACK:
            raise ContractViolation(f"ket is not unit norm (|norm - 1| = {dev:.3g})")
    return v


def adjoint(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def unitarity_error(A: np.ndarray) -> float:
    """Max-entry deviation of ``A^dagger A`` from the identity."""
    return float(np.abs(adjoint(A) @ A - I2).max())


def is_unitary(A: ArrayLike, tol: float = TOL_IDENTITY) -> bool:
    A = np.asarray(A, dtype=complex)
    return A.shape == (2, 2) and unitarity_error(A) <= tol


def check_unitary(A: ArrayLike, name: str = "matrix") -> np.ndarray:
    A = as_mat2(A)
    err = unitarity_error(A)
    if err > _NORM_SLACK:
        raise ContractViolation(f"{name} is not unitary (max |A^+A - I| = {err:.3g})")
    return A


def canonical_ket(v: ArrayLike) -> np.ndarray:
    """Rotate the global phase so the first significant component is real and >= 0."""
    v = np.array(v, dtype=complex)
    for c in v:
        if abs(c) > _CANON_THRESHOLD:
            v = v * (abs(c) / c)
            break
    # kill the rounding residue left in the imaginary part
    for i, c in enumerate(v):
        if abs(c) > _CANON_THRESHOLD:
            v[i] = complex(abs(c), 0.0)
            break
    return v


def ket_from_bloch(r: ArrayLike) -> np.ndarray:
    """Pure state whose Bloch vector is the unit 3-vector ``r``."""
    x, y, z = np.asarray(r, dtype=float) / np.linalg.norm(r)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return canonical_ket([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def phase_equal_states(a: ArrayLike, b: ArrayLike, tol: float = TOL_ANALYTIC) -> PhaseMatch:
    """Decide whether ``b = e^{i theta} a`` for some real theta."""
    a = as_ket(a)
    b = as_ket(b)
    overlap = np.vdot(a, b)
    gap = max(0.0, 1.0 - abs(overlap))
    return PhaseMatch(bool(gap <= tol), float(np.angle(overlap)), float(gap))


def phase_equal_ops(A: ArrayLike, B: ArrayLike, tol: float = TOL_ANALYTIC) -> PhaseMatch:
    """Decide whether ``B = e^{i theta} A``; uses ``|tr(A^dagger B)| / 2``.

    For 2x2 unitaries the normalised trace reaches 1 only when the two
    operators differ by a global phase.
    """
    A = check_unitary(A, "A")
    B = check_unitary(B, "B")
    tr = np.trace(adjoint(A) @ B) / 2
    gap = max(0.0, 1.0 - abs(tr))
    return PhaseMatch(bool(gap <= tol), float(np.angle(tr)), float(gap))


def _traceless_eigvec(p: complex, b: complex, c: complex, s: complex) -> np.ndarray | None:
    # eigenvector of [[p, b], [c, -p]] for eigenvalue s; pick the better
    # conditioned of the two row-derived candidates
    v1 = np.array([b, s - p], dtype=complex)
    v2 = np.array([s + p, c], dtype=complex)
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    v, n = (v1, n1) if n1 >= n2 else (v2, n2)
    if n == 0.0:
        return None
    return v / n


def _split(A: np.ndarray) -> tuple[complex, complex, complex, complex, complex]:
    """Write ``A = mean*I + [[p, b], [c, -p]]`` and return (mean, p, b, c, s), s^2 = p^2 + bc."""
    mean = (A[0, 0] + A[1, 1]) / 2
    p = (A[0, 0] - A[1, 1]) / 2
    b, c = A[0, 1], A[1, 0]
    s = np.sqrt(complex(p * p + b * c))
    return mean, p, b, c, s


def _degenerate_representative(A: np.ndarray, value: complex) -> np.ndarray:
    # |0> projected onto the eigenspace, falling back to |1>
    for e in (KET0, KET1):
        resid = A @ e - value * e
        if np.linalg.norm(resid) < 1e-6:
            return canonical_ket(e)
    return canonical_ket(KET0)


def eigenpairs(A: ArrayLike) -> list[EigenPair]:
    """Closed-form eigen-decomposition of a normal 2x2 matrix.

    Returns two pairs ordered by the sign choice of the square root, or a
    single pair flagged ``degenerate`` when the eigenvalues coincide (then
    ``A`` is a multiple of the identity and the representative is |0>).
    """
    A = as_mat2(A)
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A @ adjoint(A) - adjoint(A) @ A).max() > 1e-9 * scale * scale:
        raise UnsupportedInput("eigenpairs requires a normal matrix")
    mean, p, b, c, s = _split(A)
    if 2 * abs(s) < _DEGENERATE_GAP:
        value = complex(mean)
        return [EigenPair(value, _degenerate_representative(A, value), degenerate=True)]
    pairs = []
    for sign in (1, -1):
        v = _traceless_eigvec(p, b, c, sign * s)
        pairs.append(EigenPair(complex(mean + sign * s), canonical_ket(v)))
    return pairs


def _any_eigvecs(A: np.ndarray) -> list[np.ndarray] | None:
    """Eigenvectors of an arbitrary 2x2 matrix; ``None`` when ``A`` is scalar."""
    mean, p, b, c, s = _split(A)
    scale = max(abs(p), abs(b), abs(c))
    if scale < 1e-14 * max(1.0, abs(mean)):
        return None
    if abs(s) < 1e-12 * max(1.0, scale):
        # nilpotent traceless part: single eigen-direction, the kernel
        v1 = np.array([b, -p], dtype=complex)
        v2 = np.array([p, c], dtype=complex)
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        return [v / np.linalg.norm(v)]
    return [_traceless_eigvec(p, b, c, sign * s) for sign in (1, -1)]


def commutator_det(A: ArrayLike, B: ArrayLike) -> complex:
    A = as_mat2(A)
    B = as_mat2(B)
    return complex(np.linalg.det(A @ B - B @ A))


def _eigen_residual(B: np.ndarray, v: np.ndarray) -> float:
    Bv = B @ v
    return float(np.linalg.norm(Bv - np.vdot(v, Bv) * v))


def common_eigenvector(A: ArrayLike, B: ArrayLike, tol: float = TOL_ANALYTIC) -> np.ndarray | None:
    """Shared eigenvector of two 2x2 matrices, or ``None``.

    Existence is decided by ``|det(AB - BA)| <= tol``. The returned vector is
    the eigenvector of ``A`` (or of ``B`` when ``A`` is scalar) that best
    satisfies the eigen-equation of the other matrix.
    """
    A = as_mat2(A)
    B = as_mat2(B)
    if abs(commutator_det(A, B)) > tol:
        return None
    candidates = _any_eigvecs(A)
    if candidates is None:
        candidates = _any_eigvecs(B)
    if candidates is None:
        return canonical_ket(KET0)
    best = min(candidates, key=lambda v: _eigen_residual(B, v) + _eigen_residual(A, v))
    return canonical_ket(best)
