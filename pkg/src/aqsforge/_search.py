"""Compiled kernel for the multi-start forgery search.

Works on Bloch vectors: conjugating a state by a unitary is a rotation of
its Bloch vector, and |<a|b>|^2 = (1 + r_a.r_b) / 2 for pure states. The
search point is (psi, u, b):

    Q = cos(psi) I + i sin(psi) (u1 s1 - u2 s2 + u3 s3),  psi in [psi_min, pi/2]
    M = pure state with Bloch vector b

and the objective is max over pairs of 1 - |<C M|C' M>|, the same quantity
as ``forgery.deviation``, but computed through SO(3) rotations instead of
2x2 complex products.
"""

from __future__ import annotations

import numpy as np
from numba import config, njit, prange

# the bundled TBB is often too old and numba warns on every first launch
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _q_rotation(psi, u, R):
    # Bloch action of exp(i psi n.sigma), n = (u1, -u2, u3): rotation by -2 psi about n
    n0 = u[0]
    n1 = -u[1]
    n2 = u[2]
    th = -2.0 * psi
    c = np.cos(th)
    s = np.sin(th)
    C = 1.0 - c
    R[0, 0] = c + C * n0 * n0
    R[0, 1] = -s * n2 + C * n0 * n1
    R[0, 2] = s * n1 + C * n0 * n2
    R[1, 0] = s * n2 + C * n1 * n0
    R[1, 1] = c + C * n1 * n1
    R[1, 2] = -s * n0 + C * n1 * n2
    R[2, 0] = -s * n1 + C * n2 * n0
    R[2, 1] = s * n0 + C * n2 * n1
    R[2, 2] = c + C * n2 * n2


@njit(cache=True)
def objective(psi, u, b, O, R, r):
    """Deviation at one point; ``R`` (3x3) and ``r`` (J x 3) are scratch."""
    _q_rotation(psi, u, R)
    J = O.shape[0]
    for j in range(J):
        x0 = O[j, 0, 0] * b[0] + O[j, 0, 1] * b[1] + O[j, 0, 2] * b[2]
        x1 = O[j, 1, 0] * b[0] + O[j, 1, 1] * b[1] + O[j, 1, 2] * b[2]
        x2 = O[j, 2, 0] * b[0] + O[j, 2, 1] * b[1] + O[j, 2, 2] * b[2]
        y0 = R[0, 0] * x0 + R[0, 1] * x1 + R[0, 2] * x2
        y1 = R[1, 0] * x0 + R[1, 1] * x1 + R[1, 2] * x2
        y2 = R[2, 0] * x0 + R[2, 1] * x1 + R[2, 2] * x2
        for a in range(3):
            r[j, a] = O[j, 0, a] * y0 + O[j, 1, a] * y1 + O[j, 2, a] * y2
    worst = 1.0
    for i in range(J):
        for j in range(i + 1, J):
            d = r[i, 0] * r[j, 0] + r[i, 1] * r[j, 1] + r[i, 2] * r[j, 2]
            if d < worst:
                worst = d
    v = 0.5 * (1.0 + worst)
    if v < 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    return 1.0 - np.sqrt(v)


@njit(cache=True)
def _rotate(v, axis, t, out):
    c = np.cos(t)
    s = np.sin(t)
    a = (axis + 1) % 3
    bb = (axis + 2) % 3
    out[axis] = v[axis]
    out[a] = c * v[a] - s * v[bb]
    out[bb] = s * v[a] + c * v[bb]


@njit(cache=True)
def _eval_coord(coord, t, psi, u, b, O, R, r, tu, tb):
    # objective after moving coordinate `coord` to parameter t
    if coord == 0:
        return objective(t, u, b, O, R, r)
    if coord <= 3:
        _rotate(u, coord - 1, t, tu)
        return objective(psi, tu, b, O, R, r)
    _rotate(b, coord - 4, t, tb)
    return objective(psi, u, tb, O, R, r)


@njit(cache=True)
def descend(psi, u, b, O, psi_min, grid, golden_steps, max_sweeps, min_improve):
    """Coordinate descent from one start; returns (psi, u, b, value, sweeps).

    Coordinates: the Q angle psi (a bounded interval), rotations of the Q
    axis u about x, y, z, and rotations of the message Bloch vector b about
    x, y, z. Each 1-D search is a uniform grid followed by golden-section
    refinement around the best grid point.
    """
    R = np.empty((3, 3))
    r = np.empty((O.shape[0], 3))
    tu = np.empty(3)
    tb = np.empty(3)
    u = u.copy()
    b = b.copy()
    cur = objective(psi, u, b, O, R, r)
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        before = cur
        for coord in range(7):
            if coord == 0:
                lo = psi_min
                hi = 0.5 * np.pi
                step = (hi - lo) / (grid - 1)
                t0 = lo
            else:
                lo = -np.pi
                hi = np.pi
                step = 2.0 * np.pi / grid
                t0 = -np.pi
            best_t = 0.0
            best_f = np.inf
            for g in range(grid):
                t = t0 + g * step
                f = _eval_coord(coord, t, psi, u, b, O, R, r, tu, tb)
                if f < best_f:
                    best_f = f
                    best_t = t
            a = best_t - step
            c = best_t + step
            if coord == 0:
                a = max(a, lo)
                c = min(c, hi)
            x1 = c - GOLDEN * (c - a)
            x2 = a + GOLDEN * (c - a)
            f1 = _eval_coord(coord, x1, psi, u, b, O, R, r, tu, tb)
            f2 = _eval_coord(coord, x2, psi, u, b, O, R, r, tu, tb)
            for _g in range(golden_steps):
                if f1 < f2:
                    c = x2
                    x2 = x1
                    f2 = f1
                    x1 = c - GOLDEN * (c - a)
                    f1 = _eval_coord(coord, x1, psi, u, b, O, R, r, tu, tb)
                else:
                    a = x1
                    x1 = x2
                    f1 = f2
                    x2 = a + GOLDEN * (c - a)
                    f2 = _eval_coord(coord, x2, psi, u, b, O, R, r, tu, tb)
            if f1 < best_f:
                best_f = f1
                best_t = x1
            if f2 < best_f:
                best_f = f2
                best_t = x2
            if best_f < cur:
                cur = best_f
                if coord == 0:
                    psi = best_t
                elif coord <= 3:
                    _rotate(u, coord - 1, best_t, tu)
                    u[:] = tu
                else:
                    _rotate(b, coord - 4, best_t, tb)
                    b[:] = tb
        if before - cur < min_improve:
            break
    return psi, u, b, cur, sweeps


@njit(cache=True, parallel=True)
def descend_many(psi0, u0, b0, O, psi_min, grid, golden_steps, max_sweeps, min_improve):
    n = psi0.shape[0]
    psi_out = np.empty(n)
    u_out = np.empty((n, 3))
    b_out = np.empty((n, 3))
    f_out = np.empty(n)
    for i in prange(n):
        p, uu, bb, f, _s = descend(
            psi0[i], u0[i], b0[i], O, psi_min, grid, golden_steps, max_sweeps, min_improve
        )
        psi_out[i] = p
        u_out[i] = uu
        b_out[i] = bb
        f_out[i] = f
    return psi_out, u_out, b_out, f_out


@njit(cache=True)
def objective_many(psi, u, b, O):
    R = np.empty((3, 3))
    r = np.empty((O.shape[0], 3))
    out = np.empty(psi.shape[0])
    for i in range(psi.shape[0]):
        out[i] = objective(psi[i], u[i], b[i], O, R, r)
    return out
