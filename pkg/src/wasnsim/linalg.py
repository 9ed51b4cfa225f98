"""Complex dense linear algebra on small Hermitian matrices.

Provides Hermitian positive-definite solves (Cholesky), the Hermitian-
definite generalized eigendecomposition, and small-matrix inverse
Hermitian transposes. The heavy kernels live in a compiled extension
with a pure-Python twin; the backend is selected once at import time
(set ``WASNSIM_PURE_PYTHON=1`` to force the fallback).
"""
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite, Singular

if os.environ.get("WASNSIM_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

#: Name of the active kernel backend ("compiled" or "python").
BACKEND = "compiled" if _impl.COMPILED else "python"

HERMITIAN_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_RTOL = 1e-12


@dataclass
class GevdResult:
    """Generalized eigendecomposition of a Hermitian-definite pencil.

    ``qmat`` (m x m) and the real, descending ``sigmas`` satisfy
    ``ryy = qmat @ diag(sigmas) @ qmat^H`` and ``rnn = qmat @ qmat^H``;
    the generalized eigenvectors are the columns of ``qmat^{-H}``.
    """

    qmat: np.ndarray
    sigmas: np.ndarray


def _as_matrix(a, name):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    return a


def _require_square_hermitian(a, name):
    a = _as_matrix(a, name)
    m, n = a.shape
    if m != n:
        raise DimensionMismatch(f"{name} must be square, got {m}x{n}")
    norm = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > HERMITIAN_RTOL * max(1.0, norm):
        raise ValueError(f"{name} is not Hermitian within tolerance")
    return a


def _cholesky(a, name):
    m = a.shape[0]
    l = np.zeros((m, m), dtype=np.complex128)
    status = _impl.cholesky_lower(np.ascontiguousarray(a), l)
    if status:
        raise NotPositiveDefinite(
            f"{name} is not positive-definite (pivot {status - 1} failed)"
        )
    return l


def hermitian_solve(a, b):
    """Solve A X = B for Hermitian positive-definite A.

    Cholesky factorization followed by forward and back substitution.
    Raises NotPositiveDefinite when a pivot falls at or below
    1e-13 * |trace| / m, and DimensionMismatch on incompatible shapes.
    """
    a = _require_square_hermitian(a, "a")
    b = np.asarray(b, dtype=np.complex128)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.ndim != 2 or b.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"rhs has {b.shape[0] if b.ndim else 0} rows, expected {a.shape[0]}"
        )
    l = _cholesky(a, "a")
    x = np.array(b, dtype=np.complex128, order="C")  # copy: solved in place
    _impl.forward_subst(l, x)
    _impl.back_subst_conj(l, x)
    return x[:, 0] if vector_rhs else x


def gevd(ryy, rnn):
    """Generalized eigendecomposition of the Hermitian pencil {ryy, rnn}.

    rnn must be positive-definite. The pencil is whitened with the
    Cholesky factor of rnn (S = L^{-1} ryy L^{-H}), diagonalized by
    cyclic Jacobi rotations, and back-transformed; eigenvalues come out
    sorted in descending order (stable for ties).
    """
    ryy = _require_square_hermitian(ryy, "ryy")
    rnn = _require_square_hermitian(rnn, "rnn")
    if ryy.shape != rnn.shape:
        raise DimensionMismatch(f"pencil shapes differ: {ryy.shape} vs {rnn.shape}")
    m = ryy.shape[0]
    l = _cholesky(rnn, "rnn")
    # S = L^{-1} ryy L^{-H}, computed by two triangular solves.
    y = np.array(ryy, dtype=np.complex128, order="C")  # copy: solved in place
    _impl.forward_subst(l, y)
    s = np.ascontiguousarray(y.conj().T)
    _impl.forward_subst(l, s)
    s = s.conj().T
    s = np.ascontiguousarray((s + s.conj().T) / 2.0)
    u = np.eye(m, dtype=np.complex128)
    sweeps = _impl.jacobi_eigh(s, u, JACOBI_MAX_SWEEPS, JACOBI_RTOL)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi sweeps exceeded {JACOBI_MAX_SWEEPS}")
    sigmas = np.diag(s).real.copy()
    order = np.argsort(-sigmas, kind="stable")
    return GevdResult(qmat=l @ u[:, order], sigmas=sigmas[order])


def inv_hermitian_transpose(t):
    """Return (t^H)^{-1} for a small nonsingular square matrix.

    Raises Singular when |det t| < 1e-14 * ||t||_F^m.
    """
    t = _as_matrix(t, "t")
    m, n = t.shape
    if m != n:
        raise DimensionMismatch(f"t must be square, got {m}x{n}")
    norm = np.linalg.norm(t)
    det = np.linalg.det(t)
    if norm == 0.0 or abs(det) < 1e-14 * norm**m:
        raise Singular(f"|det| = {abs(det):.3e} below singularity threshold")
    return np.linalg.inv(t.conj().T)
