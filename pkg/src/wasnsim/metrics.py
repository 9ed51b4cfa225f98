"""Evaluation metrics and their CSV record format."""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MalformedCsv, NonPositiveValue

CENTRALIZED = "centralized"

#: Floor applied before taking logs so exact convergence stays finite.
MSE_FLOOR = 1e-300

CSV_COLUMNS = (
    "env", "iteration", "root", "algorithm", "pruning",
    "connectivity_c", "mse_w", "snr_db", "signals_exchanged",
)


@dataclass
class MetricsRecord:
    """One iteration's worth of evaluation output."""

    iteration: int
    root: int
    algorithm: str = ""
    pruning: str = ""
    connectivity_c: float = math.nan
    mse_w: float = math.nan
    snr_db: float = None
    signals_exchanged: int = 0
    env: int = 0

    def to_row(self):
        return {
            "env": self.env,
            "iteration": self.iteration,
            "root": self.root,
            "algorithm": self.algorithm,
            "pruning": self.pruning,
            "connectivity_c": repr(float(self.connectivity_c)),
            "mse_w": repr(float(self.mse_w)),
            "snr_db": "" if self.snr_db is None else repr(float(self.snr_db)),
            "signals_exchanged": self.signals_exchanged,
        }


def mse_w(network_filters, centralized):
    """Mean squared filter error vs. the centralized solution.

    (1/K) sum_q ||W_q - W_hat_q||_F^2 per bin, averaged across bins.
    Inputs are per-node lists of (F, M, Q) arrays.
    """
    if len(network_filters) != len(centralized):
        raise DimensionMismatch("node counts differ")
    k = len(network_filters)
    per_bin = 0.0
    for w, w_hat in zip(network_filters, centralized):
        w = np.asarray(w)
        w_hat = np.asarray(w_hat)
        if w.shape != w_hat.shape:
            raise DimensionMismatch(f"{w.shape} vs {w_hat.shape}")
        d = w - w_hat
        per_bin = per_bin + np.sum(d.real**2 + d.imag**2, axis=(-2, -1))
    return float(np.mean(per_bin) / k)


def geometric_mean_series(per_env_series):
    """Geometric mean across environments at each iteration index."""
    arr = np.asarray(per_env_series, dtype=float)
    if np.any(arr <= 0.0):
        raise NonPositiveValue("geometric mean requires positive values")
    return np.exp(np.mean(np.log(np.maximum(arr, MSE_FLOOR)), axis=0))


def snr_db(s_estimates, n_estimates):
    """Node-averaged output SNR from separated component estimates.

    Each list holds one time-domain array per node; ``s + n`` is the
    node's full estimate. Zero noise energy yields an +inf sentinel.
    """
    if len(s_estimates) != len(n_estimates):
        raise DimensionMismatch("node counts differ")
    total = 0.0
    for s_hat, n_hat in zip(s_estimates, n_estimates):
        s_energy = float(np.sum(np.abs(s_hat) ** 2))
        n_energy = float(np.sum(np.abs(n_hat) ** 2))
        if n_energy == 0.0:
            return math.inf
        total += 10.0 * math.log10(s_energy / n_energy)
    return total / len(s_estimates)


def comm_count(algorithm, k_nodes, q_dim, sensors_per_node=None):
    """Signals exchanged per iteration under each scheme.

    Tree-based variants exchange 2 Q (K - 1) streams (fusion plus
    diffusion); the broadcast baseline K Q (K - 1); a fusion center
    ingests all M sensor signals.
    """
    if algorithm == "danse":
        return k_nodes * q_dim * (k_nodes - 1)
    if algorithm in ("ti-danse", "ti-danse+"):
        return 2 * q_dim * (k_nodes - 1)
    if algorithm == CENTRALIZED:
        if sensors_per_node is None:
            raise DimensionMismatch("centralized count needs sensors_per_node")
        return int(np.sum(sensors_per_node))
    raise ValueError(f"unknown algorithm {algorithm!r}")


def write_metrics_csv(path, records):
    """Write records (sorted for byte-stable output) to ``path``."""
    rows = [r.to_row() for r in records]
    rows.sort(key=lambda r: (
        r["env"], r["algorithm"], r["pruning"], r["connectivity_c"],
        r["iteration"],
    ))
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def read_metrics_csv(path):
    """Parse a metrics CSV back into typed row dicts."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(CSV_COLUMNS) <= set(
            reader.fieldnames
        ):
            raise MalformedCsv(f"{path} lacks the metrics columns")
        rows = []
        for raw in reader:
            rows.append({
                "env": int(raw["env"]),
                "iteration": int(raw["iteration"]),
                "root": int(raw["root"]),
                "algorithm": raw["algorithm"],
                "pruning": raw["pruning"],
                "connectivity_c": float(raw["connectivity_c"]),
                "mse_w": float(raw["mse_w"]),
                "snr_db": float(raw["snr_db"]) if raw["snr_db"] else None,
                "signals_exchanged": int(raw["signals_exchanged"]),
            })
    return rows
