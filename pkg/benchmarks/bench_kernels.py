"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot kernels (Cholesky solve, Jacobi GEVD) on matrix sizes
spanning the observation-vector dimensions seen in experiments, then a
full algorithm iteration through whichever backend is active.

Run:  python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from wasnsim import _kernels_py
from wasnsim import linalg

try:
    from wasnsim import _kernels
except ImportError:
    _kernels = None

SIZES = (4, 8, 16, 32)


def _random_hpd(rng, m):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return np.ascontiguousarray(a @ a.conj().T + np.eye(m))


def time_solve(impl, a, b, reps):
    l = np.zeros_like(a)
    start = time.perf_counter()
    for _ in range(reps):
        impl.cholesky_lower(a, l)
        x = b.copy()
        impl.forward_subst(l, x)
        impl.back_subst_conj(l, x)
    return (time.perf_counter() - start) / reps


def time_gevd(impl, ryy, rnn, reps):
    start = time.perf_counter()
    for _ in range(reps):
        l = np.zeros_like(rnn)
        impl.cholesky_lower(rnn, l)
        y = ryy.copy()
        impl.forward_subst(l, y)
        s = np.ascontiguousarray(y.conj().T)
        impl.forward_subst(l, s)
        s = np.ascontiguousarray((s.conj().T + s) / 2.0)
        u = np.eye(rnn.shape[0], dtype=complex)
        impl.jacobi_eigh(s, u, 100, 1e-12)
    return (time.perf_counter() - start) / reps


def bench_kernels():
    rng = np.random.default_rng(0)
    print(f"active linalg backend: {linalg.BACKEND}")
    print(f"{'kernel':>14} {'m':>4} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for m in SIZES:
        a = _random_hpd(rng, m)
        b = np.ascontiguousarray(
            rng.standard_normal((m, 2)) + 1j * rng.standard_normal((m, 2))
        )
        rnn = _random_hpd(rng, m)
        reps = max(5, 2000 // m)
        t_py = time_solve(_kernels_py, a, b, reps)
        row = f"{'cholesky+solve':>14} {m:>4} {t_py * 1e6:>10.1f}us"
        if _kernels is not None:
            t_c = time_solve(_kernels, a, b, reps)
            row += f" {t_c * 1e6:>10.1f}us {t_py / t_c:>7.1f}x"
        print(row)
        t_py = time_gevd(_kernels_py, a, rnn, max(3, reps // 4))
        row = f"{'jacobi gevd':>14} {m:>4} {t_py * 1e6:>10.1f}us"
        if _kernels is not None:
            t_c = time_gevd(_kernels, a, rnn, reps)
            row += f" {t_c * 1e6:>10.1f}us {t_py / t_c:>7.1f}x"
        print(row)


def bench_iteration():
    from wasnsim import danse, harness
    from wasnsim.scenario import ScenarioConfig, build_environment, theoretical_scms
    from wasnsim.topology import graph_from_positions

    cfg = ScenarioConfig(k_nodes=10, sensors_per_node=3, q_dim=1, s_sources=3,
                         n_noise_sources=3, n_bins=4)
    env = build_environment(cfg, seed=0)
    scms = theoretical_scms(env)
    graph = graph_from_positions(env.geometry.node_positions)
    for rank, label in ((None, "plain"), (1, "gevd(1)")):
        start = time.perf_counter()
        harness.run_series(env, scms, graph, danse.TIDANSEPLUS, 100,
                           gevd_rank=rank, init_rng=np.random.default_rng(1))
        total = time.perf_counter() - start
        print(f"100 iterations, K=10, F=4 bins, {label:<8}: {total:6.2f}s "
              f"({total * 10:.1f} ms/iteration)")


if __name__ == "__main__":
    bench_kernels()
    print()
    bench_iteration()
