# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Hot inner loops of the per-bin filtering math: Cholesky factorization,
triangular substitution, and the cyclic Jacobi eigensolver. Semantics
mirror ``_kernels_py`` exactly; that module is the fallback when this
extension is unavailable.
"""
from libc.math cimport sqrt, fabs, hypot, copysign

COMPILED = True

PIVOT_REL = 1e-13


def cholesky_lower(double complex[:, ::1] a, double complex[:, ::1] l):
    """Factor Hermitian positive-definite ``a`` as L L^H into ``l``.

    Only the lower triangle of ``a`` is read. Returns 0 on success or
    ``j + 1`` when pivot ``j`` fails the positive-definiteness test.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double tr = 0.0
    cdef double d, ljj, thr
    cdef double complex acc
    for i in range(m):
        tr += a[i, i].real
        for j in range(m):
            l[i, j] = 0.0
    thr = 1e-13 * fabs(tr) / m
    for j in range(m):
        d = a[j, j].real
        for k in range(j):
            d -= (l[j, k] * l[j, k].conjugate()).real
        if d <= thr:
            return j + 1
        ljj = sqrt(d)
        l[j, j] = ljj
        for i in range(j + 1, m):
            acc = a[i, j]
            for k in range(j):
                acc -= l[i, k] * l[j, k].conjugate()
            l[i, j] = acc / ljj
    return 0


def forward_subst(double complex[:, ::1] l, double complex[:, ::1] b):
    """Solve L X = B in place on ``b`` for lower-triangular ``l``."""
    cdef Py_ssize_t m = l.shape[0]
    cdef Py_ssize_t n = b.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for j in range(n):
        for i in range(m):
            acc = b[i, j]
            for k in range(i):
                acc -= l[i, k] * b[k, j]
            b[i, j] = acc / l[i, i]


def back_subst_conj(double complex[:, ::1] l, double complex[:, ::1] b):
    """Solve L^H X = B in place on ``b`` for lower-triangular ``l``."""
    cdef Py_ssize_t m = l.shape[0]
    cdef Py_ssize_t n = b.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for j in range(n):
        for i in range(m - 1, -1, -1):
            acc = b[i, j]
            for k in range(i + 1, m):
                acc -= l[k, i].conjugate() * b[k, j]
            b[i, j] = acc / l[i, i].conjugate()


cdef double _off_norm(double complex[:, ::1] a, Py_ssize_t m):
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(m):
        for j in range(m):
            if i != j:
                acc += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return sqrt(acc)


def jacobi_eigh(double complex[:, ::1] a, double complex[:, ::1] u,
                int max_sweeps, double tol_rel):
    """Diagonalize Hermitian ``a`` in place by cyclic Jacobi rotations.

    Rotations accumulate into ``u`` (must enter as the identity), so on
    exit ``a_in = u @ diag(a) @ u^H``. Returns the number of sweeps used,
    or -1 if the off-diagonal Frobenius norm did not drop below
    ``tol_rel * ||a_in||_F`` within ``max_sweeps``.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double total = 0.0
    cdef double target, ab, app, aqq, tau, t, c, s
    cdef double complex apq, phase, cp, sp, xp, xq
    if m == 1:
        return 0
    for p in range(m):
        for q in range(m):
            total += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    target = tol_rel * sqrt(total)
    if _off_norm(a, m) <= target:
        return 0
    for sweep in range(1, max_sweeps + 1):
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                ab = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if ab == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / ab
                tau = (aqq - app) / (2.0 * ab)
                t = copysign(1.0, tau) / (fabs(tau) + hypot(1.0, tau))
                c = 1.0 / hypot(1.0, t)
                s = t * c
                cp = c * phase
                sp = s * phase
                # A <- G^H A G with the 2x2 block [[c*phase, s*phase], [-s, c]].
                for r in range(m):
                    xp = a[r, p]
                    xq = a[r, q]
                    a[r, p] = xp * cp - xq * s
                    a[r, q] = xp * sp + xq * c
                for r in range(m):
                    xp = a[p, r]
                    xq = a[q, r]
                    a[p, r] = cp.conjugate() * xp - s * xq
                    a[q, r] = sp.conjugate() * xp + c * xq
                a[p, p] = app - t * ab
                a[q, q] = aqq + t * ab
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(m):
                    xp = u[r, p]
                    xq = u[r, q]
                    u[r, p] = xp * cp - xq * s
                    u[r, q] = xp * sp + xq * c
        if _off_norm(a, m) <= target:
            return sweep
    return -1
