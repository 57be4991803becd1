"""Functional brain networks from task-state phase locking, plus metrics.

A subject's electrodes become nodes, task-state PLV between electrode
pairs becomes edge weights, weak edges are removed by a threshold (0.3 by
default, or the largest value that keeps the graph connected) and five
graph measures are computed on the resulting binary graph: characteristic
path length, clustering coefficient, small-worldness, degree centrality
and betweenness centrality.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import signal_core as sc
from . import stats
from .errors import (
    DegenerateTestError,
    DisconnectedGraphError,
    NoThresholdError,
    PairingError,
)
from .phase_sync import analytic_signal  # noqa: F401  (re-exported pipeline dep)
from .phase_sync import phase_stack

DEFAULT_TAU = 0.3
DEFAULT_N_REFS = 100
DEFAULT_REWIRES_PER_EDGE = 10

GLOBAL_METRICS = ("char_path_length", "clustering_coeff", "small_worldness")
NODE_METRICS = ("degree", "betweenness")


@dataclass
class ConnectivityMatrix:
    """Symmetric PLV weights between electrodes, zero diagonal, in [0, 1]."""

    weights: np.ndarray
    labels: tuple[str, ...] = sc.ELECTRODES

    def __post_init__(self):
        self.labels = tuple(self.labels)
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if w.shape[0] != len(self.labels):
            raise ValueError(f"{len(self.labels)} labels for {w.shape[0]} nodes")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("diagonal must be zero")
        if np.any(w < 0) or np.any(w[np.isfinite(w)] > 1):
            raise ValueError("weights must lie in [0, 1]")
        self.weights = w

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass
class BinaryGraph:
    """Undirected unweighted graph as a boolean adjacency matrix."""

    adjacency: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(adj)):
            raise ValueError("self-loops are not allowed")
        self.adjacency = adj
        if not self.labels:
            self.labels = tuple(str(i) for i in range(adj.shape[0]))
        else:
            self.labels = tuple(self.labels)
            if len(self.labels) != adj.shape[0]:
                raise ValueError(f"{len(self.labels)} labels for {adj.shape[0]} nodes")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def neighbors(self, v: int) -> np.ndarray:
        return np.nonzero(self.adjacency[v])[0]

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(iu.tolist(), ju.tolist()))


@dataclass
class NetworkMetrics:
    """The five graph measures for one subject / band / task."""

    char_path_length: float
    clustering_coeff: float
    small_worldness: float
    degree: np.ndarray
    betweenness: np.ndarray
    labels: tuple[str, ...] = field(default=())


def intra_brain_connectivity(epochs, fband: sc.FrequencyBand) -> ConnectivityMatrix:
    """Task-state PLV between every electrode pair of one subject.

    Phases come from band filtering and the Hilbert transform over the full
    epoch; the across-trial PLV is averaged over every sample of the task
    window.  Each unordered pair is computed once, so the matrix is
    symmetric bit for bit.
    """
    ph, _fs = phase_stack(epochs, fband, "task")
    n_elec, n_trials, _ = ph.shape
    z = np.exp(1j * ph)
    weights = np.zeros((n_elec, n_elec))
    for i in range(n_elec):
        for j in range(i + 1, n_elec):
            per_sample = np.abs(np.mean(z[i] * np.conj(z[j]), axis=0))
            good = np.isfinite(per_sample)
            value = float(np.mean(per_sample[good])) if np.any(good) else np.nan
            weights[i, j] = weights[j, i] = min(value, 1.0) if np.isfinite(value) else value
    return ConnectivityMatrix(weights=weights, labels=sc.ELECTRODES)


def threshold_graph(m: ConnectivityMatrix, tau: float = DEFAULT_TAU) -> BinaryGraph:
    """Keep edges with weight strictly greater than ``tau``."""
    adj = m.weights > tau
    np.fill_diagonal(adj, False)
    return BinaryGraph(adjacency=adj, labels=m.labels)


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
        self.parent[ra] = rb
        return True


def max_connected_threshold(m: ConnectivityMatrix) -> float:
    """Largest threshold that still leaves the graph connected.

    This is the bottleneck (minimum) edge weight of the maximum spanning
    tree, stepped down to the next representable float so the strict
    ``weight > tau`` rule keeps the bottleneck edge itself.
    """
    n = m.n
    iu, ju = np.triu_indices(n, k=1)
    weights = m.weights[iu, ju]
    order = np.argsort(-weights, kind="mergesort")
    uf = _UnionFind(n)
    components = n
    for k in order:
        w = weights[k]
        if w <= 0:
            break
        if uf.union(int(iu[k]), int(ju[k])):
            components -= 1
            if components == 1:
                return float(np.nextafter(w, -np.inf))
    raise NoThresholdError("graph is disconnected even with every positive edge kept")


def _bfs_distances(g: BinaryGraph, source: int) -> np.ndarray:
    dist = np.full(g.n, -1, dtype=int)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v):
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def is_connected(g: BinaryGraph) -> bool:
    if g.n == 0:
        return True
    return bool(np.all(_bfs_distances(g, 0) >= 0))


def characteristic_path_length(g: BinaryGraph) -> float:
    """Mean breadth-first shortest-path length over unordered node pairs."""
    if g.n < 2:
        return 0.0
    total = 0
    for s in range(g.n):
        dist = _bfs_distances(g, s)
        if np.any(dist < 0):
            raise DisconnectedGraphError("characteristic path length needs a connected graph")
        total += int(dist.sum())
    return total / (g.n * (g.n - 1))


def clustering_coefficient(g: BinaryGraph) -> float:
    """Mean local clustering; nodes of degree below 2 contribute 0."""
    if g.n == 0:
        return 0.0
    local = np.zeros(g.n)
    for v in range(g.n):
        nbrs = g.neighbors(v)
        k = nbrs.size
        if k < 2:
            continue
        links = int(np.count_nonzero(g.adjacency[np.ix_(nbrs, nbrs)])) // 2
        local[v] = links / (k * (k - 1) / 2)
    return float(np.mean(local))


def degree_centrality(g: BinaryGraph) -> np.ndarray:
    """Degree of each node."""
    return g.adjacency.sum(axis=1).astype(int)


def betweenness_centrality(g: BinaryGraph) -> np.ndarray:
    """Brandes betweenness over unordered pairs, unnormalized.

    For node ``v``: the sum over pairs (s, t), both different from v, of
    the fraction of shortest s-t paths that pass through v.
    """
    n = g.n
    bc = np.zeros(n)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=int)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


@dataclass
class SmallWorldResult:
    """Small-worldness with its rewired-reference normalizers."""

    sigma: float
    clustering_ref: float
    path_length_ref: float
    n_refs_used: int
    degenerate: bool


def _double_edge_swaps(adj: np.ndarray, n_swaps: int, rng) -> np.ndarray:
    """Degree-preserving rewiring; returns a new adjacency matrix."""
    adj = adj.copy()
    edges = [tuple(e) for e in np.argwhere(np.triu(adj, k=1))]
    if len(edges) < 2:
        return adj
    attempts = 0
    swaps = 0
    max_attempts = max(20 * n_swaps, 100)
    while swaps < n_swaps and attempts < max_attempts:
        attempts += 1
        i, j = rng.choice(len(edges), size=2, replace=False)
        a, b = edges[i]
        c, d = edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4:
            continue
        if adj[a, d] or adj[c, b]:
            continue
        adj[a, b] = adj[b, a] = False
        adj[c, d] = adj[d, c] = False
        adj[a, d] = adj[d, a] = True
        adj[c, b] = adj[b, c] = True
        edges[i] = (min(a, d), max(a, d))
        edges[j] = (min(c, b), max(c, b))
        swaps += 1
    return adj


def small_worldness(
    g: BinaryGraph,
    n_refs: int = DEFAULT_N_REFS,
    seed: int = 0,
    rewires_per_edge: int = DEFAULT_REWIRES_PER_EDGE,
) -> SmallWorldResult:
    """Small-worldness sigma = (C / C_ref) / (L / L_ref).

    C_ref and L_ref are means over ``n_refs`` degree-preserving rewired
    reference graphs (double-edge swaps, connected references only),
    deterministic for a given seed.  ``rewires_per_edge = 0`` keeps the
    references equal to the input, giving sigma exactly 1.

    When no reference has a triangle (C_ref = 0, e.g. a star, where no
    rewiring is possible) the result is flagged degenerate and sigma is
    NaN.
    """
    if n_refs < 1:
        raise ValueError(f"n_refs must be at least 1, got {n_refs}")
    if not is_connected(g):
        raise DisconnectedGraphError("small-worldness needs a connected graph")
    c = clustering_coefficient(g)
    path_len = characteristic_path_length(g)
    n_edges = len(g.edges())
    rng = np.random.default_rng(seed)
    c_refs, l_refs = [], []
    for _ in range(n_refs):
        ref_adj = None
        for _attempt in range(20):
            candidate = _double_edge_swaps(g.adjacency, rewires_per_edge * n_edges, rng)
            ref = BinaryGraph(adjacency=candidate, labels=g.labels)
            if is_connected(ref):
                ref_adj = ref
                break
        if ref_adj is None:
            continue
        c_refs.append(clustering_coefficient(ref_adj))
        l_refs.append(characteristic_path_length(ref_adj))
    if not c_refs:
        return SmallWorldResult(float("nan"), 0.0, float("nan"), 0, True)
    c_ref = float(np.mean(c_refs))
    l_ref = float(np.mean(l_refs))
    if c_ref == 0.0 or path_len == 0.0:
        return SmallWorldResult(float("nan"), c_ref, l_ref, len(c_refs), True)
    sigma = (c / c_ref) / (path_len / l_ref)
    return SmallWorldResult(float(sigma), c_ref, l_ref, len(c_refs), False)


def network_metrics(
    g: BinaryGraph,
    n_refs: int = DEFAULT_N_REFS,
    seed: int = 0,
) -> NetworkMetrics:
    """All five measures for one connected binary graph."""
    sw = small_worldness(g, n_refs=n_refs, seed=seed)
    return NetworkMetrics(
        char_path_length=characteristic_path_length(g),
        clustering_coeff=clustering_coefficient(g),
        small_worldness=sw.sigma,
        degree=degree_centrality(g),
        betweenness=betweenness_centrality(g),
        labels=g.labels,
    )


@dataclass
class PhaseComparison:
    """One row of a phase-1 versus phase-3 metric contrast."""

    metric: str
    node: str | None
    mean_difference: float
    direction: str
    test: stats.TestResult | None


def _direction(mean_diff: float) -> str:
    if mean_diff > 0:
        return "decrease"
    if mean_diff < 0:
        return "increase"
    return "none"


def compare_phases(
    metrics_p1: dict[str, NetworkMetrics],
    metrics_p3: dict[str, NetworkMetrics],
) -> list[PhaseComparison]:
    """Paired tests of network metrics between two phases.

    Parameters
    ----------
    metrics_p1, metrics_p3 : dict
        Subject id to NetworkMetrics; both dicts must cover the same
        subjects.  Pairs are formed subject by subject.

    Returns
    -------
    list of PhaseComparison
        One row per global metric and one per node for the centralities.
        ``mean_difference`` is mean(phase1 - phase3); ``direction``
        describes the phase1 -> phase3 change.  Pairs with non-finite
        values are dropped; if fewer than two remain the test is None.
    """
    if set(metrics_p1) != set(metrics_p3):
        raise PairingError(
            f"subject sets differ: {sorted(metrics_p1)} vs {sorted(metrics_p3)}"
        )
    if not metrics_p1:
        raise PairingError("no subjects to compare")
    subjects = sorted(metrics_p1)
    first = metrics_p1[subjects[0]]
    labels = first.labels or tuple(str(i) for i in range(len(first.degree)))
    rows: list[PhaseComparison] = []

    def add_row(metric, node, v1, v3):
        v1 = np.asarray(v1, dtype=float)
        v3 = np.asarray(v3, dtype=float)
        good = np.isfinite(v1) & np.isfinite(v3)
        diff = float(np.mean(v1[good] - v3[good])) if np.any(good) else float("nan")
        test = None
        if np.count_nonzero(good) >= 2:
            try:
                test = stats.paired_t_test(v1[good], v3[good])
            except DegenerateTestError:
                test = None
        rows.append(PhaseComparison(metric, node, diff, _direction(diff), test))

    for metric in GLOBAL_METRICS:
        add_row(
            metric,
            None,
            [getattr(metrics_p1[s], metric) for s in subjects],
            [getattr(metrics_p3[s], metric) for s in subjects],
        )
    for metric in NODE_METRICS:
        for i, label in enumerate(labels):
            add_row(
                metric,
                label,
                [np.asarray(getattr(metrics_p1[s], metric))[i] for s in subjects],
                [np.asarray(getattr(metrics_p3[s], metric))[i] for s in subjects],
            )
    return rows
