"""WASN topology: geometric graph generation, connectivity, tree pruning.

Graphs are undirected and kept connected at all times. Trees are rooted
at the current updating node; "upstream" points from the root towards
the leaves, so the upstream neighbors of a node are its children.
"""
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateK, PlacementFailed, Unreachable
from .utils import as_rng

PLACEMENT_ATTEMPTS = 10_000
RADIUS_STEP = 0.25
RANDOM_ADJ_RETRIES = 1000


@dataclass
class WasnGraph:
    """Sensor network graph: 2-D node positions plus 0/1 adjacency."""

    positions: np.ndarray  # (K, 2) meters
    adjacency: np.ndarray  # (K, K) symmetric, zero diagonal

    @property
    def k_nodes(self):
        return self.adjacency.shape[0]

    def edges(self):
        """Edge list as (i, j) pairs with i < j."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def edge_count(self):
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def degree(self, q):
        return int(self.adjacency[q].sum())

    def edge_length(self, i, j):
        return float(np.linalg.norm(self.positions[i] - self.positions[j]))

    def is_fully_connected(self):
        k = self.k_nodes
        return self.edge_count() == k * (k - 1) // 2

    def to_json(self):
        return {
            "positions": self.positions.tolist(),
            "adjacency": self.adjacency.astype(int).tolist(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            positions=np.asarray(data["positions"], dtype=float),
            adjacency=np.asarray(data["adjacency"], dtype=np.int8),
        )


@dataclass
class Tree:
    """Spanning tree of a WasnGraph, oriented at ``root``.

    ``upstream[q]`` holds the children of q, ``upstream_closure[q]`` all
    of q's descendants, and ``branch_of[q]`` the root child whose branch
    contains q (-1 for the root itself).
    """

    root: int
    parent: np.ndarray  # (K,), -1 at root
    upstream: list = field(repr=False)
    upstream_closure: list = field(repr=False)
    branch_of: np.ndarray = field(repr=False)
    edge_weights: dict = field(repr=False)

    @property
    def k_nodes(self):
        return self.parent.shape[0]

    def edges(self):
        return sorted(
            (min(q, p), max(q, p))
            for q, p in enumerate(self.parent.tolist())
            if p >= 0
        )

    def total_weight(self):
        return float(sum(self.edge_weights.values()))

    def leaf_to_root_order(self):
        """Node indices ordered so every node precedes its parent."""
        depth = np.zeros(self.k_nodes, dtype=int)
        for q in self.root_to_leaf_order():
            if self.parent[q] >= 0:
                depth[q] = depth[self.parent[q]] + 1
        return sorted(range(self.k_nodes), key=lambda q: -depth[q])

    def root_to_leaf_order(self):
        order = []
        queue = deque([self.root])
        while queue:
            q = queue.popleft()
            order.append(q)
            queue.extend(self.upstream[q])
        return order


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _connected(adjacency):
    k = adjacency.shape[0]
    seen = np.zeros(k, dtype=bool)
    queue = deque([0])
    seen[0] = True
    while queue:
        q = queue.popleft()
        for n in np.nonzero(adjacency[q])[0]:
            if not seen[n]:
                seen[n] = True
                queue.append(n)
    return bool(seen.all())


def place_nodes(k_nodes, area=5.0, min_dist=0.1, rng=None):
    """Rejection-sample (K, 2) positions, pairwise at least min_dist apart."""
    rng = as_rng(rng)
    positions = np.empty((k_nodes, 2))
    attempts = 0
    placed = 0
    while placed < k_nodes:
        if attempts >= PLACEMENT_ATTEMPTS:
            raise PlacementFailed(
                f"{PLACEMENT_ATTEMPTS} attempts could not place {k_nodes} nodes "
                f"with min_dist={min_dist}"
            )
        attempts += 1
        candidate = rng.uniform(0.0, area, size=2)
        if placed and np.any(
            np.linalg.norm(positions[:placed] - candidate, axis=1) < min_dist
        ):
            continue
        positions[placed] = candidate
        placed += 1
    return positions


def graph_from_positions(positions, initial_radius=1.5, step=RADIUS_STEP):
    """Connect nodes within a communication radius, grown until connected."""
    k = positions.shape[0]
    dists = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=-1)
    radius = initial_radius
    while True:
        adjacency = ((dists <= radius) & ~np.eye(k, dtype=bool)).astype(np.int8)
        if _connected(adjacency):
            return WasnGraph(positions=positions, adjacency=adjacency)
        radius += step


def generate_geometric_wasn(k_nodes, area=5.0, min_dist=0.1, initial_radius=1.5,
                            rng=None):
    """Random geometric WASN on an area x area square.

    Positions are rejection-sampled with a pairwise minimum distance;
    the communication radius starts at ``initial_radius`` and grows in
    0.25 m steps until the graph is connected.
    """
    if k_nodes < 2:
        raise DegenerateK("need at least 2 nodes")
    positions = place_nodes(k_nodes, area=area, min_dist=min_dist, rng=rng)
    return graph_from_positions(positions, initial_radius=initial_radius)


def connectivity(graph):
    """Normalized edge-density measure (1T A 1 - 2K) / (K (K - 3)).

    Equals 1 for fully connected graphs; requires K >= 4.
    """
    k = graph.k_nodes
    if k <= 3:
        raise DegenerateK(f"connectivity undefined for K={k}")
    return (float(graph.adjacency.sum()) - 2 * k) / (k * (k - 3))


def target_edge_count(k_nodes, target_c):
    """Edge count whose connectivity measure rounds to ``target_c``."""
    return round(k_nodes + target_c * k_nodes * (k_nodes - 3) / 2)


def adjust_connectivity(graph, target_c, rng=None):
    """Add or remove random links until the connectivity measure is met.

    Removals that would disconnect the graph are rolled back. Node
    positions are untouched. Returns a new graph.
    """
    if not 0.0 <= target_c <= 1.0:
        raise Unreachable(f"target_c={target_c} outside [0, 1]")
    k = graph.k_nodes
    if k <= 3:
        raise DegenerateK(f"connectivity undefined for K={k}")
    rng = as_rng(rng)
    target = target_edge_count(k, target_c)
    if target < k - 1:
        raise Unreachable(f"{target} edges cannot keep {k} nodes connected")
    adjacency = graph.adjacency.copy()
    count = int(np.count_nonzero(np.triu(adjacency, 1)))
    if count < target:
        i, j = np.nonzero(~adjacency.astype(bool) & np.triu(np.ones((k, k), bool), 1))
        non_edges = list(zip(i.tolist(), j.tolist()))
        rng.shuffle(non_edges)
        for (a, b) in non_edges[: target - count]:
            adjacency[a, b] = adjacency[b, a] = 1
    while count > target:
        candidates = list(zip(*np.nonzero(np.triu(adjacency, 1))))
        rng.shuffle(candidates)
        for (a, b) in candidates:
            adjacency[a, b] = adjacency[b, a] = 0
            if _connected(adjacency):
                count -= 1
                break
            adjacency[a, b] = adjacency[b, a] = 1
        else:
            raise Unreachable("no removable edge keeps the graph connected")
    return WasnGraph(positions=graph.positions, adjacency=adjacency)


def _sorted_edges(graph):
    return sorted(
        ((graph.edge_length(i, j), i, j) for (i, j) in graph.edges()),
        key=lambda e: (e[0], e[1], e[2]),
    )


def _orient(edge_set, graph, root):
    """Build a Tree from an undirected spanning edge set by BFS from root."""
    k = graph.k_nodes
    neighbors = [[] for _ in range(k)]
    for (i, j) in edge_set:
        neighbors[i].append(j)
        neighbors[j].append(i)
    for lst in neighbors:
        lst.sort()
    parent = np.full(k, -1, dtype=int)
    children = [[] for _ in range(k)]
    seen = np.zeros(k, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        q = queue.popleft()
        for n in neighbors[q]:
            if not seen[n]:
                seen[n] = True
                parent[n] = q
                children[q].append(n)
                queue.append(n)
    branch_of = np.full(k, -1, dtype=int)
    for child in children[root]:
        branch_of[child] = child
        stack = [child]
        while stack:
            q = stack.pop()
            for n in children[q]:
                branch_of[n] = child
                stack.append(n)
    closure = [[] for _ in range(k)]
    for q in sorted(range(k), key=lambda q: -_depth(parent, q)):
        acc = []
        for c in children[q]:
            acc.extend([c] + closure[c])
        closure[q] = sorted(acc)
    weights = {
        (min(q, p), max(q, p)): graph.edge_length(q, p)
        for q, p in enumerate(parent.tolist())
        if p >= 0
    }
    return Tree(
        root=root,
        parent=parent,
        upstream=children,
        upstream_closure=closure,
        branch_of=branch_of,
        edge_weights=weights,
    )


def _depth(parent, q):
    d = 0
    while parent[q] >= 0:
        q = parent[q]
        d += 1
    return d


def prune_mst(graph, root):
    """Minimum spanning tree (Kruskal, Euclidean edge weights), rooted.

    Ties break on (weight, smaller index, larger index) so the tree is
    deterministic for a fixed input.
    """
    uf = _UnionFind(graph.k_nodes)
    kept = []
    for (_, i, j) in _sorted_edges(graph):
        if uf.union(i, j):
            kept.append((i, j))
    return _orient(kept, graph, root)


def prune_mmut(graph, root):
    """Root-degree-maximizing tree: keep every root edge, Kruskal the rest.

    The root keeps all of its graph neighbors, maximizing the updating
    node's degrees of freedom; remaining edges join in increasing-weight
    order when they do not close a cycle.
    """
    uf = _UnionFind(graph.k_nodes)
    kept = []
    for n in np.nonzero(graph.adjacency[root])[0]:
        uf.union(root, int(n))
        kept.append((min(root, int(n)), max(root, int(n))))
    for (_, i, j) in _sorted_edges(graph):
        if uf.union(i, j):
            kept.append((i, j))
    return _orient(kept, graph, root)


def randomize_adjacency(positions, rng=None):
    """Uniformly random connected adjacency over existing node positions.

    Each link is drawn with probability 0.5; disconnected draws are
    retried (up to 1000 times), after which random cross-component links
    are added to force connectivity.
    """
    rng = as_rng(rng)
    k = positions.shape[0]
    for _ in range(RANDOM_ADJ_RETRIES):
        upper = np.triu(rng.random((k, k)) < 0.5, 1)
        adjacency = (upper | upper.T).astype(np.int8)
        if _connected(adjacency):
            return WasnGraph(positions=positions, adjacency=adjacency)
    while not _connected(adjacency):
        comp = _component_of(adjacency, 0)
        inside = np.nonzero(comp)[0]
        outside = np.nonzero(~comp)[0]
        a = int(rng.choice(inside))
        b = int(rng.choice(outside))
        adjacency[a, b] = adjacency[b, a] = 1
    return WasnGraph(positions=positions, adjacency=adjacency)


def _component_of(adjacency, start):
    k = adjacency.shape[0]
    seen = np.zeros(k, dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for n in np.nonzero(adjacency[q])[0]:
            if not seen[n]:
                seen[n] = True
                queue.append(n)
    return seen
