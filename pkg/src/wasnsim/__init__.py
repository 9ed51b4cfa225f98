"""Distributed node-specific signal estimation in simulated WASNs.

Library plus CLI covering the centralized multichannel Wiener filter,
the distributed variants exchanging fused signals over pruned trees,
tree-pruning strategies, and the experiment harness evaluating their
convergence toward the centralized solution.
"""
__version__ = "0.1.0"

from . import danse, harness, linalg, metrics, plots, scenario, topology  # noqa: E402,F401
