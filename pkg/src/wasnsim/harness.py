"""Experiment harness: seeded end-to-end runs producing CSV/JSON output.

Reproduces the convergence and pruning studies at desk scale: a few
frequency bins, a handful of random sensing environments, exact SCMs by
default. Every run is a pure function of (config, seed); rows are sorted
before writing so outputs are byte-stable.
"""
import csv
import json
import math
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__, danse, linalg, metrics
from .errors import ConfigInvalid, DegenerateK
from .plots import emit_plot  # noqa: F401  (part of the harness surface)
from .scenario import ScenarioConfig, build_environment, istft, synthesize_signals, theoretical_scms
from .topology import (
    adjust_connectivity,
    connectivity,
    generate_geometric_wasn,
    graph_from_positions,
    prune_mmut,
    prune_mst,
    randomize_adjacency,
)

PRUNERS = {"mst": prune_mst, "mmut": prune_mmut}


@dataclass
class ExperimentConfig:
    """Flat experiment description, JSON-loadable."""

    k_nodes: int = 10
    sensors_per_node: object = 3
    q_dim: int = 1
    s_sources: int = 1
    n_noise_sources: int = 3
    n_bins: int = 4
    n_envs: int = 10
    n_iterations: int = 200
    connectivity_targets: list = None  # None entries keep the natural graph
    algorithms: list = field(default_factory=lambda: [danse.TIDANSEPLUS])
    pruning: str = "mmut"
    update_mode: str = "plain"  # "plain" or "gevd"
    gevd_rank: int = 1
    scm_mode: str = "theoretical"
    topology_mode: str = "static"
    steering_mode: str = "random-gaussian"
    compute_snr: bool = False
    duration_frames: int = 400
    activity_duty: float = 0.5
    n_min: int = 16
    beta: float = 0.95
    seed: int = 0
    out_dir: str = "out"


def validate_config(config):
    counts = (
        [config.sensors_per_node] * config.k_nodes
        if np.isscalar(config.sensors_per_node)
        else list(config.sensors_per_node)
    )
    if config.q_dim < 1 or config.q_dim > min(counts):
        raise ConfigInvalid("q_dim must be in [1, min sensors_per_node]")
    for algo in config.algorithms:
        if algo not in danse.ALGORITHMS:
            raise ConfigInvalid(f"unknown algorithm {algo!r}")
    if config.pruning not in PRUNERS:
        raise ConfigInvalid(f"unknown pruning {config.pruning!r}")
    if config.update_mode not in ("plain", "gevd"):
        raise ConfigInvalid(f"unknown update_mode {config.update_mode!r}")
    if config.update_mode == "gevd" and config.gevd_rank < 1:
        raise ConfigInvalid("gevd_rank must be >= 1")
    if config.scm_mode not in ("theoretical", "online"):
        raise ConfigInvalid(f"unknown scm_mode {config.scm_mode!r}")
    if config.topology_mode not in ("static", "dynamic"):
        raise ConfigInvalid(f"unknown topology_mode {config.topology_mode!r}")
    if config.n_envs < 1 or config.n_iterations < 0:
        raise ConfigInvalid("n_envs must be >= 1 and n_iterations >= 0")


def load_config(path):
    with open(path) as fh:
        data = json.load(fh)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)


def scenario_config(config):
    return ScenarioConfig(
        k_nodes=config.k_nodes,
        sensors_per_node=config.sensors_per_node,
        q_dim=config.q_dim,
        s_sources=config.s_sources,
        n_noise_sources=config.n_noise_sources,
        n_bins=config.n_bins,
        steering_mode=config.steering_mode,
    )


def _safe_connectivity(graph):
    if graph is None:
        return math.nan
    try:
        return connectivity(graph)
    except DegenerateK:
        return math.nan


def _snr_from_filters(w_net, block):
    s_stack = np.concatenate(block.desired_frames, axis=1)
    n_stack = np.concatenate(block.noise_frames, axis=1)
    s_est, n_est = [], []
    for w in w_net:
        wh = w.conj().swapaxes(-2, -1)
        s_est.append(istft(wh @ s_stack))
        n_est.append(istft(wh @ n_stack))
    return metrics.snr_db(s_est, n_est)


def run_series(env, scms, graph, algorithm, n_iterations, pruning="mmut",
               gevd_rank=None, scm_mode="theoretical", dynamic=False,
               init_rng=None, dyn_rng=None, stream=None, centralized=None,
               stop_below=None, guard_rng=None, signal_block=None,
               compute_snr=False, c_label=None):
    """One (environment, algorithm, graph) run; returns per-iteration records.

    The "danse" baseline ignores the tree pruning and may be handed
    ``graph=None`` to request the as-if-fully-connected comparison the
    experiments use. ``stop_below`` ends the run early once mse_w falls
    to that level (records up to that iteration are returned).

    Every record of the series carries the same nominal connectivity:
    ``c_label`` when given, else 1.0 for the broadcast baseline, NaN when
    the adjacency is redrawn per iteration, else the graph's measure.
    """
    prune = PRUNERS[pruning]
    k = env.k_nodes
    if centralized is None:
        centralized = danse.centralized_filters(env, scms, gevd_rank=gevd_rank)
    states = danse.init_states(env, init_rng)
    trees = {}
    if algorithm != danse.DANSE and not dynamic:
        trees = {root: prune(graph, root) for root in range(k)}
    if c_label is None:
        if algorithm == danse.DANSE:
            c_label = 1.0
        elif dynamic:
            c_label = math.nan
        else:
            c_label = _safe_connectivity(graph)

    def measure(record):
        w_net = danse.network_wide_filters(states, algorithm)
        record.mse_w = metrics.mse_w(w_net, centralized)
        record.pruning = pruning
        record.connectivity_c = c_label
        if compute_snr and signal_block is not None:
            record.snr_db = _snr_from_filters(w_net, signal_block)
        return record

    records = [measure(metrics.MetricsRecord(iteration=0, root=-1,
                                             algorithm=algorithm))]
    for i in range(1, n_iterations + 1):
        root = danse.root_for_iteration(i, k)
        tree = None
        if algorithm != danse.DANSE:
            if dynamic:
                redrawn = randomize_adjacency(env.geometry.node_positions,
                                              dyn_rng)
                tree = prune(redrawn, root)
            else:
                tree = trees[root]
        plan = danse.IterationPlan(
            index=i, root=root, algorithm=algorithm, tree=tree,
            graph=graph if algorithm == danse.DANSE else None,
            gevd_rank=gevd_rank, scm_mode=scm_mode,
        )
        record = danse.run_iteration(
            plan, states, env, scms=scms, stream=stream, rng=guard_rng
        )
        records.append(measure(record))
        if stop_below is not None and record.mse_w <= stop_below:
            break
    return records


def _combos(config):
    """Expand the config into (algorithm, target) pairs.

    The broadcast baseline runs as-if-FC and the global-sum baseline is
    connectivity-independent, so both collapse to a single run.
    """
    targets = config.connectivity_targets or [None]
    combos = []
    for algo in config.algorithms:
        if algo in (danse.DANSE, danse.TIDANSE):
            combos.append((algo, None))
        else:
            combos.extend((algo, t) for t in targets)
    return combos


def run_experiment(config):
    """Run every (env, algorithm, connectivity) combination in the config.

    Writes ``metrics.csv`` and ``manifest.json`` into the output
    directory and returns their paths. Deterministic given the seed.
    """
    validate_config(config)
    t0 = time.perf_counter()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    env_seeds = np.random.default_rng(config.seed).integers(
        0, 2**63, size=config.n_envs
    ).tolist()
    combos = _combos(config)
    needs_block = config.scm_mode == "online" or config.compute_snr

    records = []
    manifest_combos = []
    for env_idx, env_seed in enumerate(env_seeds):
        env = build_environment(scenario_config(config), seed=env_seed)
        scms = theoretical_scms(env)
        gevd_rank = config.gevd_rank if config.update_mode == "gevd" else None
        centralized = danse.centralized_filters(env, scms, gevd_rank=gevd_rank)
        graph0 = graph_from_positions(env.geometry.node_positions)
        block = None
        if needs_block:
            block = synthesize_signals(
                env, config.duration_frames, config.activity_duty,
                rng=np.random.default_rng([env_seed, 3]),
            )
        for combo_idx, (algo, target) in enumerate(combos):
            if algo == danse.DANSE:
                graph = None
            elif target is None:
                graph = graph0
            else:
                graph = adjust_connectivity(
                    graph0, target, rng=np.random.default_rng(
                        [env_seed, 40 + combo_idx]
                    )
                )
            stream = None
            if config.scm_mode == "online":
                stream = danse.OnlineStream(
                    block=block, n_min=config.n_min, beta=config.beta
                )
            if algo == danse.DANSE:
                c_label = 1.0
            else:
                c_label = math.nan if target is None else float(target)
            series = run_series(
                env, scms, graph, algo, config.n_iterations,
                pruning=config.pruning, gevd_rank=gevd_rank,
                scm_mode=config.scm_mode,
                dynamic=config.topology_mode == "dynamic",
                init_rng=np.random.default_rng([env_seed, 5]),
                dyn_rng=np.random.default_rng([env_seed, 70 + combo_idx]),
                stream=stream, centralized=centralized,
                guard_rng=np.random.default_rng([env_seed, 90 + combo_idx]),
                signal_block=block, compute_snr=config.compute_snr,
                c_label=c_label,
            )
            for record in series:
                record.env = env_idx
            records.extend(series)
            if env_idx == 0:
                manifest_combos.append({
                    "algorithm": algo,
                    "pruning": config.pruning,
                    "connectivity": "natural" if target is None else target,
                })

    csv_path = out / "metrics.csv"
    metrics.write_metrics_csv(csv_path, records)
    series = sorted({
        (r.env, r.algorithm, r.pruning, repr(float(r.connectivity_c)))
        for r in records
    })
    manifest = {
        "config": asdict(config),
        "env_seeds": env_seeds,
        "combos": manifest_combos,
        "series": [list(s) for s in series],
        "versions": {
            "wasnsim": __version__,
            "numpy": np.__version__,
            "linalg_backend": linalg.BACKEND,
        },
        "wall_ms": int((time.perf_counter() - t0) * 1000),
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return {"csv": csv_path, "manifest": manifest_path}


PRUNE_QUANTILES = (5, 25, 50, 75, 95)


def prune_stats(k_list=(6, 9, 12, 15), n_wasns=50, seed=0, out_dir="out"):
    """Root-degree and tree-length statistics of MST vs MMUT pruning.

    For every random WASN and every root, records the root's tree degree
    and the total tree edge length, averaged over roots per WASN; emits
    a per-WASN detail CSV and a quantile summary CSV.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    detail = []
    for k in k_list:
        for w in range(n_wasns):
            graph = generate_geometric_wasn(
                k, rng=np.random.default_rng([seed, k, w])
            )
            for name, prune in PRUNERS.items():
                u_sum = 0.0
                e_sum = 0.0
                for root in range(k):
                    tree = prune(graph, root)
                    u_sum += len(tree.upstream[root])
                    e_sum += tree.total_weight()
                detail.append({
                    "k_nodes": k, "wasn": w, "pruning": name,
                    "u_avg": u_sum / k, "e_avg": e_sum / k,
                })
    detail_path = out / "prune_stats.csv"
    _write_rows(detail_path, ("k_nodes", "wasn", "pruning", "u_avg", "e_avg"),
                detail)
    summary = []
    for k in k_list:
        for name in PRUNERS:
            rows = [d for d in detail if d["k_nodes"] == k and d["pruning"] == name]
            for metric_name in ("u_avg", "e_avg"):
                values = np.array([r[metric_name] for r in rows])
                entry = {"k_nodes": k, "pruning": name, "metric": metric_name}
                for q in PRUNE_QUANTILES:
                    entry[f"q{q:02d}"] = float(np.percentile(values, q))
                summary.append(entry)
    summary_path = out / "prune_stats_summary.csv"
    _write_rows(
        summary_path,
        ("k_nodes", "pruning", "metric") + tuple(
            f"q{q:02d}" for q in PRUNE_QUANTILES
        ),
        summary,
    )
    return {"detail": detail_path, "summary": summary_path}


def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
