"""Pauli-coefficient parametrisation of single-qubit unitaries.

A unit 4-vector ``w = (w0, w1, w2, w3)`` with ``w0 >= 0`` stands for

    W = w0*s0 + i*w1*s1 - i*w2*s2 + i*w3*s3

Note the minus sign on the sigma_2 term. In the usual quaternion language
``W = exp(i*phi*n.sigma)`` this means ``(w1, -w2, w3) = sin(phi)*n`` and
``w0 = cos(phi)``; keeping the sign in the coefficients lets the alpha /
beta / gamma functionals below be written without sign bookkeeping.

For an ordered triple ``(l, m, n)`` of distinct indices from {1, 2, 3}:

    alpha = 1/2 - w_m^2 - w_n^2      (= w0^2 + w_l^2 - 1/2)
    beta  = w0*w_m + w_n*w_l
    gamma = w0*w_n - w_l*w_m

An assistant unitary lies in the stratum ``W_lmn`` when ``alpha*beta*gamma``
vanishes. Over all six orderings those strata are exactly the assistants that
admit a forgery against a three-Pauli-rotation scheme.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import ContractViolation
from .mat2core import SIGMA, TOL_ANALYTIC, check_unitary

__all__ = [
    "PERMUTATIONS",
    "PRESETS",
    "AbgTriple",
    "ClassificationReport",
    "PauliCoeffs",
    "abg",
    "abg_products",
    "boundary_sample",
    "classify",
    "coeffs_from_json",
    "coeffs_to_json",
    "coeffs_to_matrix",
    "haar_sample",
    "haar_sample_array",
    "haar_unitary",
    "matrix_to_coeffs",
]

PERMUTATIONS: tuple[tuple[int, int, int], ...] = tuple(itertools.permutations((1, 2, 3)))

_NORM_SLACK = 1e-9
_SIGN_ZERO = 1e-12


def _fix_sign(w: np.ndarray) -> np.ndarray:
    """Representative of ``+-w``: w0 > 0, or first nonzero of w1..w3 positive."""
    w = np.array(w, dtype=float) + 0.0  # no negative zeros
    if w[0] > _SIGN_ZERO:
        return w
    if w[0] < -_SIGN_ZERO:
        return -w + 0.0
    w[0] = 0.0  # a sub-threshold w0 of either sign is treated as zero
    for x in w[1:]:
        if abs(x) > _SIGN_ZERO:
            return w if x > 0 else -w + 0.0
    return w


@dataclass(frozen=True)
class PauliCoeffs:
    """Unit 4-vector of real Pauli coefficients, ``w0 >= 0``."""

    w0: float
    w1: float
    w2: float
    w3: float

    def __post_init__(self) -> None:
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise ContractViolation("coefficients must be finite")
        dev = abs(float(np.dot(arr, arr)) - 1.0)
        if dev > _NORM_SLACK:
            raise ContractViolation(f"coefficients not normalised (|sum w^2 - 1| = {dev:.3g})")
        if self.w0 < -_NORM_SLACK:
            raise ContractViolation("w0 must be nonnegative")

    @classmethod
    def from_array(cls, w: ArrayLike, *, normalize: bool = False) -> PauliCoeffs:
        w = np.asarray(w, dtype=float)
        if w.shape != (4,):
            raise ContractViolation(f"expected 4 coefficients, got shape {w.shape}")
        if normalize:
            w = w / np.linalg.norm(w)
            w = _fix_sign(w)
        return cls(*(float(x) for x in w))

    def as_array(self) -> np.ndarray:
        return np.array([self.w0, self.w1, self.w2, self.w3], dtype=float)

    def __getitem__(self, i: int) -> float:
        return (self.w0, self.w1, self.w2, self.w3)[i]


@dataclass(frozen=True)
class AbgTriple:
    alpha: float
    beta: float
    gamma: float
    perm: tuple[int, int, int]

    @property
    def product(self) -> float:
        return self.alpha * self.beta * self.gamma


@dataclass(frozen=True)
class ClassificationReport:
    triples: dict[tuple[int, int, int], AbgTriple]
    member_of: list[tuple[int, int, int]]
    tol: float
    forgeable: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "forgeable", bool(self.member_of))

    @property
    def min_abs_product(self) -> float:
        return min(abs(t.product) for t in self.triples.values())


def coeffs_to_matrix(w: PauliCoeffs) -> np.ndarray:
    s0, s1, s2, s3 = SIGMA
    return w.w0 * s0 + 1j * w.w1 * s1 - 1j * w.w2 * s2 + 1j * w.w3 * s3


def matrix_to_coeffs(W: ArrayLike) -> PauliCoeffs:
    """Coefficients of a unitary, with the global phase stripped."""
    W = check_unitary(W, "W")
    s0, s1, s2, s3 = SIGMA
    # each entry is e^{i phi} * w_l for the common phase e^{i phi}
    c = np.array(
        [
            np.trace(W) / 2,
            np.trace(s1 @ W) / 2j,
            -np.trace(s2 @ W) / 2j,
            np.trace(s3 @ W) / 2j,
        ]
    )
    k = int(np.argmax(np.abs(c)))
    w = (c * (abs(c[k]) / c[k])).real
    w = _fix_sign(w / np.linalg.norm(w))
    return PauliCoeffs.from_array(w)


def abg(w: PauliCoeffs, perm: tuple[int, int, int]) -> AbgTriple:
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3]:
        raise ContractViolation(f"perm must order (1, 2, 3), got {perm}")
    l, m, n = perm
    w0 = w.w0
    wl, wm, wn = w[l], w[m], w[n]
    alpha = 0.5 - wm * wm - wn * wn
    beta = w0 * wm + wn * wl
    gamma = w0 * wn - wl * wm
    return AbgTriple(alpha, beta, gamma, perm)


def classify(w: PauliCoeffs, tol: float = TOL_ANALYTIC) -> ClassificationReport:
    """Evaluate all six orderings; membership is tested on the product ``|alpha*beta*gamma|``."""
    triples = {p: abg(w, p) for p in PERMUTATIONS}
    member_of = [p for p, t in triples.items() if abs(t.product) <= tol]
    return ClassificationReport(triples, member_of, tol)


def abg_products(w: np.ndarray) -> np.ndarray:
    """Vectorised ``alpha*beta*gamma`` for rows of ``w``; shape ``(N, 6)`` in PERMUTATIONS order."""
    w = np.asarray(w, dtype=float)
    out = np.empty((w.shape[0], len(PERMUTATIONS)))
    w0 = w[:, 0]
    for i, (l, m, n) in enumerate(PERMUTATIONS):
        wl, wm, wn = w[:, l], w[:, m], w[:, n]
        out[:, i] = (0.5 - wm * wm - wn * wn) * (w0 * wm + wn * wl) * (w0 * wn - wl * wm)
    return out


def haar_sample_array(rng_seed: int | np.random.Generator, count: int) -> np.ndarray:
    """``(count, 4)`` array of Haar-distributed coefficient vectors.

    Four standard normals normalised onto the 3-sphere, sign fixed to w0 >= 0.
    """
    if count < 1:
        raise ContractViolation("count must be >= 1")
    rng = np.random.default_rng(rng_seed)
    w = rng.standard_normal((count, 4))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    w[w[:, 0] < 0] *= -1
    return w


def haar_sample(rng_seed: int | np.random.Generator, count: int) -> list[PauliCoeffs]:
    return [PauliCoeffs.from_array(row) for row in haar_sample_array(rng_seed, count)]


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of U(2): a random SU(2) point times a random phase."""
    w = rng.standard_normal(4)
    w /= np.linalg.norm(w)
    U = coeffs_to_matrix(PauliCoeffs.from_array(_fix_sign(w)))
    return np.exp(1j * rng.uniform(0, 2 * np.pi)) * U


def boundary_sample(
    rng: np.random.Generator, perm: tuple[int, int, int], which: str, max_tries: int = 1000
) -> PauliCoeffs:
    """Draw an assistant on the stratum where alpha, beta or gamma of ``perm`` vanishes.

    alpha = 0 is enforced by rescaling (w_m, w_n) to norm 1/sqrt(2); beta = 0
    by solving for w_m, gamma = 0 by solving for w_n (both need w0 != 0).
    """
    l, m, n = perm
    for _ in range(max_tries):
        w = rng.standard_normal(4)
        w /= np.linalg.norm(w)
        w[0] = abs(w[0])
        if which == "alpha":
            r = np.hypot(w[m], w[n])
            if r < 1e-3:
                continue
            w[[m, n]] *= np.sqrt(0.5) / r
            rest = np.hypot(w[0], w[l])
            if rest < 1e-3:
                continue
            w[[0, l]] *= np.sqrt(0.5) / rest
        elif which == "beta":
            if w[0] < 1e-3:
                continue
            w[m] = -w[n] * w[l] / w[0]
            w /= np.linalg.norm(w)
        elif which == "gamma":
            if w[0] < 1e-3:
                continue
            w[n] = w[l] * w[m] / w[0]
            w /= np.linalg.norm(w)
        else:
            raise ContractViolation(f"which must be alpha, beta or gamma, got {which!r}")
        return PauliCoeffs.from_array(w)
    raise ContractViolation("could not draw a valid stratum sample")


def coeffs_to_json(w: PauliCoeffs) -> dict:
    return {"w": [float(x) for x in w.as_array()]}


def coeffs_from_json(obj: dict | str) -> PauliCoeffs:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        values = obj["w"]
    except (KeyError, TypeError) as exc:
        raise ContractViolation('coefficient JSON must look like {"w": [w0, w1, w2, w3]}') from exc
    return PauliCoeffs.from_array(values)


PRESETS: dict[str, PauliCoeffs] = {
    "I": PauliCoeffs(1.0, 0.0, 0.0, 0.0),
    "H": PauliCoeffs(0.5, 0.5, 0.5, 0.5),
    "Wa": PauliCoeffs(0.0, 0.5, 0.5, float(np.sqrt(0.5))),
    "T": PauliCoeffs(0.0, *(float(1 / np.sqrt(3)),) * 3),
}
