"""Complex linear-algebra layer: solves, GEVD, small inverses."""
import numpy as np
import pytest

from wasnsim import linalg
from wasnsim.errors import DimensionMismatch, NotPositiveDefinite, Singular

from conftest import random_complex, random_hpd


class TestHermitianSolve:
    def test_identity_solve(self, rng):
        b = random_complex(rng, (3, 2))
        x = linalg.hermitian_solve(np.eye(3), b)
        np.testing.assert_allclose(x, b, atol=1e-14)

    def test_diagonal_solve(self):
        x = linalg.hermitian_solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
        np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-14)

    def test_residual_oracle(self, rng):
        a = random_hpd(rng, 6)
        b = random_complex(rng, (6, 2))
        x = linalg.hermitian_solve(a, b)
        assert np.linalg.norm(a @ x - b) < 1e-10 * np.linalg.norm(b)

    def test_not_positive_definite(self, rng):
        a = -random_hpd(rng, 4)
        with pytest.raises(NotPositiveDefinite):
            linalg.hermitian_solve(a, np.ones(4))

    def test_indefinite_rejected(self):
        a = np.diag([1.0, -1.0])
        with pytest.raises(NotPositiveDefinite):
            linalg.hermitian_solve(a, np.ones(2))

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            linalg.hermitian_solve(np.eye(3), np.ones((4, 1)))
        with pytest.raises(DimensionMismatch):
            linalg.hermitian_solve(np.ones((3, 2)), np.ones(3))

    def test_non_hermitian_rejected(self, rng):
        a = random_complex(rng, (4, 4))
        with pytest.raises(ValueError):
            linalg.hermitian_solve(a, np.ones(4))

    def test_does_not_mutate_inputs(self, rng):
        a = random_hpd(rng, 5)
        b = random_complex(rng, (5, 3))
        a0, b0 = a.copy(), b.copy()
        linalg.hermitian_solve(a, b)
        np.testing.assert_array_equal(a, a0)
        np.testing.assert_array_equal(b, b0)

    def test_roundtrip_property(self, rng):
        for _ in range(1000):
            m = int(rng.integers(1, 17))
            a = random_hpd(rng, m, floor=10.0 ** rng.uniform(-4, 1))
            b = random_complex(rng, (m, int(rng.integers(1, 4))))
            x = linalg.hermitian_solve(a, b)
            assert np.linalg.norm(a @ x - b) < 1e-10 * np.linalg.norm(b)


class TestGevd:
    def test_identity_pencil_gives_eigenvalues(self, rng):
        ryy = random_hpd(rng, 5)
        res = linalg.gevd(ryy, np.eye(5))
        ref = np.sort(np.linalg.eigvalsh(ryy))[::-1]
        np.testing.assert_allclose(res.sigmas, ref, rtol=1e-10)

    def test_proportional_pencil(self, rng):
        rnn = random_hpd(rng, 4)
        res = linalg.gevd(2.0 * rnn, rnn)
        np.testing.assert_allclose(res.sigmas, 2.0, rtol=1e-10)

    def test_rank_one_pencil_closed_form(self, rng):
        m = 6
        psi = random_complex(rng, m)
        ryy = np.outer(psi, psi.conj()) + np.eye(m)
        res = linalg.gevd(ryy, np.eye(m))
        assert abs(res.sigmas[0] - (1 + np.sum(np.abs(psi) ** 2))) < 1e-10
        np.testing.assert_allclose(res.sigmas[1:], 1.0, atol=1e-10)

    def test_reconstruction(self, rng):
        for _ in range(1000):
            m = int(rng.integers(1, 13))
            ryy = random_hpd(rng, m, floor=0.1)
            rnn = random_hpd(rng, m, floor=0.1)
            res = linalg.gevd(ryy, rnn)
            q, sig = res.qmat, res.sigmas
            assert (np.linalg.norm(q @ np.diag(sig) @ q.conj().T - ryy)
                    <= 1e-8 * np.linalg.norm(ryy))
            assert (np.linalg.norm(q @ q.conj().T - rnn)
                    <= 1e-8 * np.linalg.norm(rnn))
            assert np.all(np.diff(sig) <= 1e-12 * max(1.0, abs(sig[0])))

    def test_scaling_invariance(self, rng):
        for _ in range(1000):
            m = int(rng.integers(2, 10))
            ryy = random_hpd(rng, m)
            rnn = random_hpd(rng, m)
            c = 10.0 ** rng.uniform(-3, 3)
            s1 = linalg.gevd(ryy, rnn).sigmas
            s2 = linalg.gevd(c * ryy, c * rnn).sigmas
            np.testing.assert_allclose(s1, s2, rtol=1e-10)

    def test_shifted_pencil_sigmas_at_least_one(self, rng):
        for _ in range(1000):
            m = int(rng.integers(2, 10))
            psd = random_complex(rng, (m, int(rng.integers(1, m + 1))))
            a = psd @ psd.conj().T
            b = random_hpd(rng, m)
            sig = linalg.gevd(a + b, b).sigmas
            assert np.all(sig >= 1.0 - 1e-10)

    def test_rnn_must_be_pd(self, rng):
        with pytest.raises(NotPositiveDefinite):
            linalg.gevd(np.eye(3), np.zeros((3, 3)))


class TestInvHermitianTranspose:
    def test_identity(self):
        np.testing.assert_allclose(
            linalg.inv_hermitian_transpose(np.eye(4)), np.eye(4), atol=1e-14
        )

    def test_scalar_conjugate_inverse(self):
        out = linalg.inv_hermitian_transpose(np.array([[2j]]))
        np.testing.assert_allclose(out, [[0.5j]], atol=1e-15)

    def test_residual(self, rng):
        t = random_complex(rng, (3, 3))
        x = linalg.inv_hermitian_transpose(t)
        assert np.linalg.norm(t.conj().T @ x - np.eye(3)) < 1e-12

    def test_singular(self):
        with pytest.raises(Singular):
            linalg.inv_hermitian_transpose(np.zeros((2, 2)))
        with pytest.raises(Singular):
            linalg.inv_hermitian_transpose(np.ones((2, 2)))

    def test_involution_property(self, rng):
        for _ in range(1000):
            m = int(rng.integers(1, 5))
            t = random_complex(rng, (m, m))
            back = linalg.inv_hermitian_transpose(linalg.inv_hermitian_transpose(t))
            assert np.linalg.norm(back - t) < 1e-12 * np.linalg.norm(t)


class TestBackendParity:
    """The compiled and pure-Python kernels must agree bit-for-bit-ish."""

    def setup_method(self):
        pytest.importorskip("wasnsim._kernels")

    def test_cholesky_and_solve_agree(self, rng):
        from wasnsim import _kernels as kc
        from wasnsim import _kernels_py as kp

        for _ in range(50):
            m = int(rng.integers(1, 17))
            a = np.ascontiguousarray(random_hpd(rng, m))
            lc = np.zeros((m, m), dtype=complex)
            lp = np.zeros((m, m), dtype=complex)
            assert kc.cholesky_lower(a, lc) == kp.cholesky_lower(a, lp) == 0
            np.testing.assert_allclose(lc, lp, atol=1e-13)
            b = np.ascontiguousarray(random_complex(rng, (m, 2)))
            bc, bp = b.copy(), b.copy()
            kc.forward_subst(lc, bc)
            kp.forward_subst(lp, bp)
            kc.back_subst_conj(lc, bc)
            kp.back_subst_conj(lp, bp)
            np.testing.assert_allclose(bc, bp, atol=1e-12)

    def test_jacobi_agrees(self, rng):
        from wasnsim import _kernels as kc
        from wasnsim import _kernels_py as kp

        for _ in range(50):
            m = int(rng.integers(1, 13))
            a = random_hpd(rng, m)
            ac = np.ascontiguousarray(a)
            ap = a.copy()
            uc = np.eye(m, dtype=complex)
            up = np.eye(m, dtype=complex)
            sc = kc.jacobi_eigh(ac, uc, 100, 1e-12)
            sp = kp.jacobi_eigh(ap, up, 100, 1e-12)
            assert sc >= 0 and sp >= 0
            np.testing.assert_allclose(
                np.sort(np.diag(ac).real), np.sort(np.diag(ap).real), atol=1e-10
            )
