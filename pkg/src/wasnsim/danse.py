"""The estimation algorithm family and its shared machinery.

Implements the centralized multichannel Wiener filter, the distributed
variants ("danse", "ti-danse", "ti-danse+") in both exact-SCM and
online-estimation modes, the GEVD-based rank-constrained updates, the
leaf-to-root fusion flow and root-to-leaf diffusion flow, and the
network-wide filter parametrizations used for evaluation.

All per-node, per-bin state lives in arrays shaped (F, rows, cols) so
frequency bins ride along a leading batch axis.
"""
import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    ConfigInvalid,
    DanseRequiresFc,
    DimensionMismatch,
    NotPositiveDefinite,
    RankTooLarge,
    Singular,
    SingularT,
)
from .metrics import MetricsRecord
from .scenario import OnlineScmEstimator
from .topology import Tree
from .utils import as_rng, complex_normal

logger = logging.getLogger(__name__)

DANSE = "danse"
TIDANSE = "ti-danse"
TIDANSEPLUS = "ti-danse+"
ALGORITHMS = (DANSE, TIDANSE, TIDANSEPLUS)

T_COND_MAX = 1e12
INIT_RANK_RTOL = 1e-8


@dataclass
class NodeState:
    """Per-node filter state, one leading frequency-bin axis per array.

    ``p_fusion`` always equals ``w_local @ t_mat`` after a diffusion
    flow; ``g_ext`` is the per-node compression block used only by the
    "ti-danse" variant.
    """

    w_local: np.ndarray  # (F, M_q, Q)
    t_mat: np.ndarray  # (F, Q, Q)
    p_fusion: np.ndarray  # (F, M_q, Q)
    g_ext: np.ndarray  # (F, Q, Q)


@dataclass
class IterationPlan:
    """Everything one iteration needs to know about its context."""

    index: int
    root: int
    algorithm: str
    tree: Tree = None
    graph: object = None  # WasnGraph, for the FC requirement of "danse"
    gevd_rank: int = None  # None = plain MWF update
    scm_mode: str = "theoretical"


@dataclass
class FusionFlowResult:
    """Partial in-network sums arriving at the root."""

    partial_sums: list  # one per root branch, ascending branch index
    branch_roots: list  # the root's upstream neighbors, ascending
    obs_vector_dim: int  # M_root + Q * n_branches; None if M_root unknown
    signals_exchanged: int


@dataclass
class OnlineStream:
    """Cursor over a synthesized SignalBlock for online-mode iterations."""

    block: object  # scenario.SignalBlock
    cursor: int = 0
    n_min: int = 16
    beta: float = 0.95


def root_for_iteration(index, k_nodes):
    """Round-robin root schedule: iteration 1 updates node 0."""
    return (index - 1) % k_nodes


def init_states(env, rng=None):
    """Random initial state: Gaussian local filters, identity transforms.

    Local filters are redrawn (per node and bin) in the measure-zero
    event that they lack full column rank.
    """
    rng = as_rng(rng)
    f_bins, q_dim = env.n_bins, env.q_dim
    states = []
    for m_q in env.sensors_per_node:
        w = complex_normal(rng, (f_bins, m_q, q_dim))
        for f in range(f_bins):
            while _rank_deficient(w[f]):
                w[f] = complex_normal(rng, (m_q, q_dim))
        eye = np.tile(np.eye(q_dim, dtype=complex), (f_bins, 1, 1))
        states.append(
            NodeState(w_local=w, t_mat=eye.copy(), p_fusion=w.copy(),
                      g_ext=eye.copy())
        )
    return states


def _rank_deficient(mat):
    sv = np.linalg.svd(mat, compute_uv=False)
    return sv[-1] < INIT_RANK_RTOL * sv[0]


def states_to_json(states):
    """Checkpoint snapshot with matrices as [re, im] pair arrays."""
    def encode(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()

    return [
        {
            "w_local": encode(s.w_local),
            "t_mat": encode(s.t_mat),
            "p_fusion": encode(s.p_fusion),
            "g_ext": encode(s.g_ext),
        }
        for s in states
    ]


def states_from_json(data):
    def decode(lst):
        a = np.asarray(lst, dtype=float)
        return a[..., 0] + 1j * a[..., 1]

    return [
        NodeState(
            w_local=decode(d["w_local"]),
            t_mat=decode(d["t_mat"]),
            p_fusion=decode(d["p_fusion"]),
            g_ext=decode(d["g_ext"]),
        )
        for d in data
    ]


def centralized_mwf(ryy, rnn, e_sel):
    """Single-bin centralized MWF: ryy^{-1} (ryy - rnn) e_sel."""
    return linalg.hermitian_solve(ryy, (ryy - rnn) @ e_sel)


def gevd_mwf(ryy, rnn, e_sel, rank):
    """Rank-constrained MWF built from the {ryy, rnn} pencil.

    The smallest eigenvalues are zeroed so the implied desired-signal
    SCM has rank at most ``rank``.
    """
    m = ryy.shape[0]
    if rank > m:
        raise RankTooLarge(f"rank {rank} exceeds dimension {m}")
    res = linalg.gevd(ryy, rnn)
    # Columns of qmat^{-H} are the generalized eigenvectors; recovered
    # via rnn^{-1} qmat since rnn = qmat qmat^H.
    qinvh = linalg.hermitian_solve(rnn, res.qmat)
    gains = 1.0 - 1.0 / res.sigmas[:rank]
    return qinvh[:, :rank] @ (gains[:, None] * (res.qmat[:, :rank].conj().T @ e_sel))


def centralized_filters(env, scms, gevd_rank=None):
    """Per-node centralized filters, all bins: list of (F, M, Q)."""
    f_bins, k = env.n_bins, env.k_nodes
    sels = [env.global_selection(q) for q in range(k)]
    out = [np.empty((f_bins, env.m_total, env.q_dim), dtype=complex)
           for _ in range(k)]
    for f in range(f_bins):
        if gevd_rank is None:
            stacked = centralized_mwf(
                scms.ryy[f], scms.rnn[f], np.concatenate(sels, axis=1)
            )
            for q in range(k):
                out[q][f] = stacked[:, q * env.q_dim:(q + 1) * env.q_dim]
        else:
            for q in range(k):
                out[q][f] = gevd_mwf(scms.ryy[f], scms.rnn[f], sels[q], gevd_rank)
    return out


def fuse(p_fusion, y_frame):
    """Compress local sensor data into Q fused signals: P^H y."""
    p = np.asarray(p_fusion)
    y = np.asarray(y_frame)
    if p.shape[-2] != y.shape[-2 if y.ndim >= 2 else -1]:
        raise DimensionMismatch(
            f"fusion matrix rows {p.shape[-2]} != sensor count"
        )
    return np.swapaxes(p, -2, -1).conj() @ y if y.ndim >= 2 else (
        p.conj().T @ y
    )


def fusion_flow(tree, fused, q_dim=None, m_root=None):
    """Leaf-to-root sum-and-send pass over a pruned tree.

    ``fused`` maps node index to that node's fused frames; entries are
    summed along the tree so the root receives one partial in-network
    sum per branch (ordered by ascending branch-root index).
    """
    eta = {}
    for q in tree.leaf_to_root_order():
        if q == tree.root:
            continue
        total = fused[q]
        for m in tree.upstream[q]:
            total = total + eta[m]
        eta[q] = total
    branch_roots = sorted(tree.upstream[tree.root])
    partial_sums = [eta[l] for l in branch_roots]
    if q_dim is None:
        ref = np.asarray(fused[tree.root])
        q_dim = ref.shape[0] if ref.ndim <= 2 else ref.shape[-2]
    return FusionFlowResult(
        partial_sums=partial_sums,
        branch_roots=branch_roots,
        obs_vector_dim=(
            None if m_root is None else m_root + q_dim * len(branch_roots)
        ),
        signals_exchanged=q_dim * len(eta),  # one transmission per non-root
    )


def assemble_observation(y_root, partial_sums):
    """Stack the root's sensors above the per-branch partial sums."""
    parts = [np.asarray(y_root)] + [np.asarray(p) for p in partial_sums]
    trailing = {p.shape[1:] for p in parts if p.ndim > 1}
    if len(trailing) > 1:
        raise DimensionMismatch(f"inconsistent frame shapes: {trailing}")
    return np.concatenate(parts, axis=0)


def local_update(ryy_t, rnn_t, m_local, q_dim, gevd_rank=None, e_local=None):
    """Optimal local filter at the updating node, single bin.

    Returns the full filter over the observation vector together with
    its per-branch Q x Q blocks. ``e_local`` selects the target channels
    among the local sensors (defaults to the first ``q_dim``).
    """
    m_tilde = ryy_t.shape[0]
    if e_local is None:
        e_local = np.eye(m_local, q_dim)
    e_tilde = np.zeros((m_tilde, q_dim), dtype=complex)
    e_tilde[:m_local, :] = e_local
    if gevd_rank is None:
        w_tilde = linalg.hermitian_solve(ryy_t, (ryy_t - rnn_t) @ e_tilde)
    else:
        w_tilde = gevd_mwf(ryy_t, rnn_t, e_tilde, gevd_rank)
    n_blocks = (m_tilde - m_local) // q_dim
    g_blocks = [
        w_tilde[m_local + b * q_dim: m_local + (b + 1) * q_dim, :]
        for b in range(n_blocks)
    ]
    return w_tilde, g_blocks


def _inv_t(t_mat):
    """Batched T^{-1} over bins, with the singularity guard."""
    out = np.empty_like(t_mat)
    for f in range(t_mat.shape[0]):
        try:
            out[f] = linalg.inv_hermitian_transpose(t_mat[f]).conj().T
        except Singular as exc:
            raise SingularT(str(exc)) from exc
    return out


def _inv_t_herm(t_mat):
    """Batched T^{-H} over bins."""
    out = np.empty_like(t_mat)
    for f in range(t_mat.shape[0]):
        try:
            out[f] = linalg.inv_hermitian_transpose(t_mat[f])
        except Singular as exc:
            raise SingularT(str(exc)) from exc
    return out


def diffusion_flow(states, tree, g_blocks, w_root_local, d_hat_root=None):
    """Root-to-leaf redistribution of the fresh update.

    The root adopts its new local filter and resets its transform to
    identity; every other node multiplies its transform by the block of
    its branch. Fusion matrices are refreshed everywhere and, when the
    root's target estimate is given, node estimates T^{-H} d_hat are
    returned per node.
    """
    root = tree.root
    q_dim = states[root].t_mat.shape[-1]
    f_bins = states[root].t_mat.shape[0]
    states[root].w_local = w_root_local
    states[root].t_mat = np.tile(np.eye(q_dim, dtype=complex), (f_bins, 1, 1))
    for q in range(len(states)):
        if q == root:
            continue
        g = g_blocks[int(tree.branch_of[q])]
        states[q].t_mat = states[q].t_mat @ g
    for q, s in enumerate(states):
        s.p_fusion = s.w_local @ s.t_mat
    if d_hat_root is None:
        return None
    return {
        q: _inv_t_herm(states[q].t_mat) @ d_hat_root for q in range(len(states))
    }


def build_ck(states, algorithm, tree=None, root=None):
    """Fusion-matrix arrangement mapping centralized SCMs to local ones.

    Returns C of shape (F, M, M_tilde) such that the observation-vector
    SCM equals C^H R C: local-sensor selector first, then the variant-
    specific arrangement of the non-root fusion matrices (block-diagonal
    for "danse", one stacked column for "ti-danse", per-branch stacked
    columns for "ti-danse+").
    """
    if root is None:
        root = tree.root
    k = len(states)
    f_bins = states[0].t_mat.shape[0]
    q_dim = states[0].t_mat.shape[-1]
    sizes = [s.w_local.shape[1] for s in states]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    m_total = int(offsets[-1])
    m_root = sizes[root]
    if algorithm == DANSE:
        others = [q for q in range(k) if q != root]
        cols = [(q, i) for i, q in enumerate(others)]
    elif algorithm == TIDANSE:
        cols = [(q, 0) for q in range(k) if q != root]
    elif algorithm == TIDANSEPLUS:
        branch_roots = sorted(tree.upstream[root])
        index = {l: i for i, l in enumerate(branch_roots)}
        cols = [
            (q, index[int(tree.branch_of[q])]) for q in range(k) if q != root
        ]
    else:
        raise ConfigInvalid(f"unknown algorithm {algorithm!r}")
    n_blocks = 1 + max((i for _, i in cols), default=-1)
    m_tilde = m_root + q_dim * n_blocks
    c = np.zeros((f_bins, m_total, m_tilde), dtype=complex)
    c[:, offsets[root]:offsets[root] + m_root, :m_root] = np.eye(m_root)
    for q, block in cols:
        rows = slice(offsets[q], offsets[q] + sizes[q])
        col = m_root + block * q_dim
        c[:, rows, col:col + q_dim] = states[q].p_fusion
    return c


def network_wide_filter(states, q):
    """Equivalent centralized-domain filter of node q: [P_m T_q^{-1}]
    stacked over nodes, with the local block W_qq at position q."""
    t_inv = _inv_t(states[q].t_mat)
    blocks = [
        states[m].w_local if m == q else states[m].p_fusion @ t_inv
        for m in range(len(states))
    ]
    return np.concatenate(blocks, axis=1)


def network_wide_filter_tidanse(states, q):
    """"ti-danse" equivalent filter: [P_m G_q] with W_qq at position q."""
    g = states[q].g_ext
    blocks = [
        states[m].w_local if m == q else states[m].p_fusion @ g
        for m in range(len(states))
    ]
    return np.concatenate(blocks, axis=1)


def network_wide_filters(states, algorithm):
    """All nodes' network-wide filters under the given variant."""
    builder = (
        network_wide_filter_tidanse if algorithm == TIDANSE else network_wide_filter
    )
    return [builder(states, q) for q in range(len(states))]


def lmmse_cost(w, scms, e_global):
    """Closed-form per-bin estimation cost E||d - W^H y||^2."""
    rss_e = scms.rss @ e_global
    r_dd = np.einsum("mq,fmp->fqp", e_global, rss_e)
    cost = np.trace(r_dd, axis1=1, axis2=2).real
    cost -= 2.0 * np.einsum("fmq,fmq->f", w.conj(), rss_e).real
    cost += np.einsum("fmq,fmq->f", w.conj(), scms.ryy @ w).real
    return cost


def transform_optimal_cost(states, env, scms, root):
    """Per-node, per-bin cost of the best QxQ re-use of the root estimate.

    min over A of E||d_q - A^H d_hat_root||^2: the quantity the
    round-robin iteration drives down monotonically (each update can
    only improve it, for every node at once). Shape (K, F).
    """
    w_root = network_wide_filter(states, root)
    k, f_bins = env.k_nodes, env.n_bins
    out = np.empty((k, f_bins))
    for q in range(k):
        e_q = env.global_selection(q)
        for f in range(f_bins):
            r_dd = np.trace(e_q.T @ scms.rss[f] @ e_q).real
            b = w_root[f].conj().T @ (scms.rss[f] @ e_q)
            m = w_root[f].conj().T @ scms.ryy[f] @ w_root[f]
            out[q, f] = r_dd - np.trace(
                b.conj().T @ np.linalg.solve(m, b)
            ).real
    return out


def theorem1_state(env, scms, root):
    """State built from the centralized filters and steering transforms.

    Realizes the optimal-point parametrization: local blocks from the
    centralized filters and T_q = psi_bar_q^{-H} psi_bar_root^H, which
    is a fixed point of the iteration map. Requires Q = S.
    """
    if env.q_dim != env.desired_powers.size:
        raise ConfigInvalid("fixed-point construction requires Q == S")
    w_hat = centralized_filters(env, scms)
    psi_root = env.psi_bar(root)
    f_bins, q_dim = env.n_bins, env.q_dim
    states = []
    for q in range(env.k_nodes):
        psi_q = env.psi_bar(q)
        t = np.empty((f_bins, q_dim, q_dim), dtype=complex)
        for f in range(f_bins):
            t[f] = linalg.inv_hermitian_transpose(psi_q[f]) @ psi_root[f].conj().T
        w_local = w_hat[q][:, env.node_slice(q), :]
        eye = np.tile(np.eye(q_dim, dtype=complex), (f_bins, 1, 1))
        states.append(
            NodeState(w_local=w_local, t_mat=t, p_fusion=w_local @ t,
                      g_ext=eye)
        )
    return states


def _hermitianize(a):
    return (a + a.conj().swapaxes(-2, -1)) / 2.0


def _transform_scms(c, scms):
    ch = c.conj().swapaxes(-2, -1)
    ryy_t = _hermitianize(ch @ scms.ryy @ c)
    rnn_t = _hermitianize(ch @ scms.rnn @ c)
    return ryy_t, rnn_t


def _update_all_bins(ryy_t, rnn_t, m_local, q_dim, gevd_rank, e_local, n_blocks):
    f_bins = ryy_t.shape[0]
    m_tilde = ryy_t.shape[1]
    w_tilde = np.empty((f_bins, m_tilde, q_dim), dtype=complex)
    g_blocks = [np.empty((f_bins, q_dim, q_dim), dtype=complex)
                for _ in range(n_blocks)]
    for f in range(f_bins):
        w_f, g_f = _loaded_local_update(
            ryy_t[f], rnn_t[f], m_local, q_dim, gevd_rank, e_local
        )
        w_tilde[f] = w_f
        for b in range(n_blocks):
            g_blocks[b][f] = g_f[b]
    return w_tilde, g_blocks


def _loaded_local_update(ryy_t, rnn_t, m_local, q_dim, gevd_rank, e_local):
    """Local update with escalating diagonal loading as a fallback.

    Divergent parameter drift (possible when Q < S without the GEVD
    rank constraint) can make the transformed SCMs numerically
    singular; loading keeps the run alive in that regime.
    """
    m = ryy_t.shape[0]
    load = 0.0
    step = 1e-10 * ryy_t.trace().real / m
    for _ in range(4):
        try:
            eye = load * np.eye(m)
            return local_update(
                ryy_t + eye, rnn_t + eye, m_local, q_dim,
                gevd_rank=gevd_rank, e_local=e_local,
            )
        except NotPositiveDefinite:
            logger.debug("SCM singular; diagonal loading %.3e", load)
            load = step if load == 0.0 else load * 1e4
    return local_update(
        ryy_t + load * np.eye(m), rnn_t + load * np.eye(m), m_local, q_dim,
        gevd_rank=gevd_rank, e_local=e_local,
    )


def _check_t_degeneracy(states, root, rng):
    for q, s in enumerate(states):
        if q == root:
            continue
        if np.linalg.cond(s.t_mat).max() <= T_COND_MAX:
            continue
        logger.warning("node %d transform degenerate; re-randomizing", q)
        if rng is None:
            raise SingularT(f"node {q} transform degenerate and no rng given")
        s.t_mat = complex_normal(as_rng(rng), s.t_mat.shape)
        s.p_fusion = s.w_local @ s.t_mat


def count_exchanged_signals(algorithm, tree, k_nodes, q_dim):
    """Signal streams one iteration moves, counted link by link."""
    if algorithm == DANSE:
        # Every node broadcasts its Q fused signals to all others.
        return sum(q_dim * (k_nodes - 1) for _ in range(k_nodes))
    # Each tree edge carries Q fused-sum signals rootward during the
    # fusion flow and Q estimate signals leafward during the diffusion.
    n_edges = len(tree.edges())
    return q_dim * n_edges + q_dim * n_edges


def run_iteration(plan, states, env, scms=None, stream=None, rng=None):
    """Advance the selected algorithm by one root update.

    ``states`` is modified in place. Theoretical mode transforms the
    exact centralized SCMs through the current fusion matrices; online
    mode streams synthesized frames into a freshly reset estimator until
    both SCMs have seen ``stream.n_min`` updates. Returns a MetricsRecord
    with the iteration's communication count (mse/snr left for the
    caller to fill in).
    """
    algorithm = plan.algorithm
    if algorithm not in ALGORITHMS:
        raise ConfigInvalid(f"unknown algorithm {algorithm!r}")
    if algorithm == DANSE and plan.graph is not None:
        if not plan.graph.is_fully_connected():
            raise DanseRequiresFc("the DANSE baseline needs a fully connected graph")
    root = plan.root
    q_dim = env.q_dim
    m_local = env.sensors_per_node[root]
    e_local = env.target_selection[root]
    k = env.k_nodes
    count_tree = plan.tree if algorithm != DANSE else None

    if plan.scm_mode == "theoretical":
        ryy_t, rnn_t = _transform_scms(
            build_ck(states, algorithm, tree=plan.tree, root=root), scms
        )
    elif plan.scm_mode == "online":
        ryy_t, rnn_t = _stream_scms(plan, states, env, stream)
    else:
        raise ConfigInvalid(f"unknown scm_mode {plan.scm_mode!r}")

    n_blocks = (ryy_t.shape[1] - m_local) // q_dim
    w_tilde, g_blocks = _update_all_bins(
        ryy_t, rnn_t, m_local, q_dim, plan.gevd_rank, e_local, n_blocks
    )
    w_root = w_tilde[:, :m_local, :]

    if algorithm == TIDANSE:
        # Only the root refreshes: its compression renormalizes the
        # in-network sum by the inverse of its own summed-signal block.
        states[root].w_local = w_root
        if g_blocks:
            g = g_blocks[0]
            states[root].g_ext = g
            states[root].p_fusion = w_root @ _inv_t(g)
        else:  # single-node network: nothing to renormalize
            states[root].p_fusion = w_root
    else:
        if algorithm == DANSE:
            tree = star_tree(k, root)
            order = [q for q in range(k) if q != root]
        else:
            tree = plan.tree
            order = sorted(tree.upstream[root])
        blocks_by_branch = {l: g_blocks[i] for i, l in enumerate(order)}
        diffusion_flow(states, tree, blocks_by_branch, w_root)
        _check_t_degeneracy(states, root, rng)

    return MetricsRecord(
        iteration=plan.index,
        root=root,
        algorithm=algorithm,
        signals_exchanged=count_exchanged_signals(algorithm, count_tree, k, q_dim),
    )


def star_tree(k_nodes, root):
    """Virtual hub-and-spoke tree used by the FC "danse" baseline."""
    parent = np.full(k_nodes, root, dtype=int)
    parent[root] = -1
    others = [q for q in range(k_nodes) if q != root]
    upstream = [[] for _ in range(k_nodes)]
    upstream[root] = list(others)
    closure = [[] for _ in range(k_nodes)]
    closure[root] = list(others)
    branch_of = np.arange(k_nodes)
    branch_of[root] = -1
    weights = {(min(root, q), max(root, q)): 0.0 for q in others}
    return Tree(
        root=root,
        parent=parent,
        upstream=upstream,
        upstream_closure=closure,
        branch_of=branch_of,
        edge_weights=weights,
    )


def _stream_scms(plan, states, env, stream):
    """Feed frames through the current fusion until the SCMs are ready."""
    if stream is None:
        raise ConfigInvalid("online mode needs an OnlineStream")
    algorithm, root = plan.algorithm, plan.root
    block = stream.block
    f_bins, q_dim = env.n_bins, env.q_dim
    k = env.k_nodes
    m_local = env.sensors_per_node[root]
    if algorithm == DANSE:
        n_blocks = k - 1
    elif algorithm == TIDANSE:
        n_blocks = 1
    else:
        n_blocks = len(plan.tree.upstream[root])
    m_tilde = m_local + q_dim * n_blocks
    # SCM estimation restarts from scratch at every iteration.
    ests = [OnlineScmEstimator.zeros(m_tilde, stream.beta) for _ in range(f_bins)]
    n_frames = block.vad.shape[0]
    while min(ests[0].count_yy, ests[0].count_nn) < stream.n_min:
        t = stream.cursor % n_frames
        stream.cursor += 1
        fused = [
            np.matmul(
                states[q].p_fusion.conj().swapaxes(-2, -1),
                block.y_frames[q][:, :, t:t + 1],
            )
            for q in range(k)
        ]
        y_root = block.y_frames[root][:, :, t:t + 1]
        if algorithm == DANSE:
            parts = [fused[q] for q in range(k) if q != root]
        elif algorithm == TIDANSE:
            flow = fusion_flow(plan.tree, fused, q_dim=q_dim, m_root=m_local)
            parts = [sum(flow.partial_sums)]
        else:
            flow = fusion_flow(plan.tree, fused, q_dim=q_dim, m_root=m_local)
            parts = flow.partial_sums
        obs = np.concatenate([y_root] + parts, axis=1)
        vad_on = bool(block.vad[t])
        for f in range(f_bins):
            ests[f].update(obs[f, :, 0], vad_on)
    ryy_t = np.empty((f_bins, m_tilde, m_tilde), dtype=complex)
    rnn_t = np.empty_like(ryy_t)
    for f in range(f_bins):
        ryy_t[f], rnn_t[f] = ests[f].corrected()
    return ryy_t, rnn_t
