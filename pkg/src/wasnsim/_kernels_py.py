"""Pure-Python numerical kernels.

Fallback backend with the exact same call signatures and in-place
semantics as the compiled ``_kernels`` extension. All arrays must be
C-contiguous complex128.
"""
import math

import numpy as np

COMPILED = False

# Pivots at or below PIVOT_REL * |trace| / m mark the matrix as not
# positive-definite (scale-invariant threshold).
PIVOT_REL = 1e-13


def cholesky_lower(a, l):
    """Factor Hermitian positive-definite ``a`` as L L^H into ``l``.

    Only the lower triangle of ``a`` is read. Returns 0 on success or
    ``j + 1`` when pivot ``j`` fails the positive-definiteness test.
    """
    m = a.shape[0]
    thr = PIVOT_REL * abs(a.trace().real) / m
    l[:] = 0.0
    for j in range(m):
        d = a[j, j].real - np.real(l[j, :j] @ l[j, :j].conj())
        if d <= thr:
            return j + 1
        ljj = math.sqrt(d)
        l[j, j] = ljj
        if j + 1 < m:
            l[j + 1:, j] = (a[j + 1:, j] - l[j + 1:, :j] @ l[j, :j].conj()) / ljj
    return 0


def forward_subst(l, b):
    """Solve L X = B in place on ``b`` for lower-triangular ``l``."""
    m = l.shape[0]
    for i in range(m):
        if i:
            b[i] -= l[i, :i] @ b[:i]
        b[i] /= l[i, i]


def back_subst_conj(l, b):
    """Solve L^H X = B in place on ``b`` for lower-triangular ``l``."""
    m = l.shape[0]
    for i in range(m - 1, -1, -1):
        if i + 1 < m:
            b[i] -= l[i + 1:, i].conj() @ b[i + 1:]
        b[i] /= l[i, i].conjugate()


def jacobi_eigh(a, u, max_sweeps, tol_rel):
    """Diagonalize Hermitian ``a`` in place by cyclic Jacobi rotations.

    Rotations accumulate into ``u`` (must enter as the identity), so on
    exit ``a_in = u @ diag(a) @ u^H``. Returns the number of sweeps used,
    or -1 if the off-diagonal Frobenius norm did not drop below
    ``tol_rel * ||a_in||_F`` within ``max_sweeps``.
    """
    m = a.shape[0]
    if m == 1:
        return 0
    target = tol_rel * np.linalg.norm(a)
    if _off_norm(a) <= target:
        return 0
    for sweep in range(1, max_sweeps + 1):
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                ab = abs(apq)
                if ab == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / ab
                tau = (aqq - app) / (2.0 * ab)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                cp = c * phase
                sp = s * phase
                # A <- G^H A G with the 2x2 block [[c*phase, s*phase], [-s, c]].
                col_p = a[:, p] * cp - a[:, q] * s
                col_q = a[:, p] * sp + a[:, q] * c
                a[:, p] = col_p
                a[:, q] = col_q
                row_p = cp.conjugate() * a[p, :] - s * a[q, :]
                row_q = sp.conjugate() * a[p, :] + c * a[q, :]
                a[p, :] = row_p
                a[q, :] = row_q
                a[p, p] = app - t * ab
                a[q, q] = aqq + t * ab
                a[p, q] = 0.0
                a[q, p] = 0.0
                col_p = u[:, p] * cp - u[:, q] * s
                col_q = u[:, p] * sp + u[:, q] * c
                u[:, p] = col_p
                u[:, q] = col_q
        if _off_norm(a) <= target:
            return sweep
    return -1


def _off_norm(a):
    od = a - np.diag(np.diag(a))
    return np.linalg.norm(od)
