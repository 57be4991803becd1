"""Brute-force reference implementations for graph metric tests.

Everything here is deliberately naive (Floyd-Warshall, triangle counting,
exhaustive path enumeration, threshold scanning) and shares no code with
the package, so agreement is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np


def fw_distances(adj: np.ndarray) -> np.ndarray:
    """All-pairs shortest path lengths by Floyd-Warshall; inf if unreachable."""
    n = adj.shape[0]
    dist = np.where(adj, 1.0, np.inf)
    np.fill_diagonal(dist, 0.0)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def fw_path_length(adj: np.ndarray) -> float:
    """Mean shortest-path length over unordered pairs (connected input)."""
    n = adj.shape[0]
    if n < 2:
        return 0.0
    dist = fw_distances(adj)
    iu, ju = np.triu_indices(n, k=1)
    values = dist[iu, ju]
    assert np.all(np.isfinite(values)), "oracle needs a connected graph"
    return float(np.mean(values))


def triangle_clustering(adj: np.ndarray) -> float:
    """Mean local clustering by explicit triangle counting."""
    n = adj.shape[0]
    if n == 0:
        return 0.0
    local = np.zeros(n)
    for v in range(n):
        nbrs = np.nonzero(adj[v])[0]
        k = nbrs.size
        if k < 2:
            continue
        triangles = sum(
            1 for a, b in itertools.combinations(nbrs, 2) if adj[a, b]
        )
        local[v] = triangles / (k * (k - 1) / 2)
    return float(np.mean(local))


def _all_shortest_paths(adj: np.ndarray, s: int, t: int, max_len: float):
    """Every simple path from s to t of exactly the shortest length."""
    n = adj.shape[0]
    paths = []

    def extend(path):
        v = path[-1]
        if v == t:
            paths.append(tuple(path))
            return
        if len(path) - 1 >= max_len:
            return
        for w in range(n):
            if adj[v, w] and w not in path:
                path.append(w)
                extend(path)
                path.pop()

    extend([s])
    return [p for p in paths if len(p) - 1 == max_len]


def enumeration_betweenness(adj: np.ndarray) -> np.ndarray:
    """Betweenness over unordered pairs by exhaustive path enumeration.

    For every pair (s, t): enumerate all shortest s-t paths, then credit
    each interior node with its fraction of those paths.  Matches the
    unnormalized pair-fraction definition.
    """
    n = adj.shape[0]
    dist = fw_distances(adj)
    bc = np.zeros(n)
    for s, t in itertools.combinations(range(n), 2):
        if not np.isfinite(dist[s, t]) or dist[s, t] == 0:
            continue
        paths = _all_shortest_paths(adj, s, t, dist[s, t])
        sigma = len(paths)
        for p in paths:
            for v in p[1:-1]:
                bc[v] += 1.0 / sigma
    return bc


def scan_connected(weights: np.ndarray, tau: float) -> bool:
    """Is the graph with edges ``weight > tau`` connected?"""
    adj = weights > tau
    np.fill_diagonal(adj, False)
    n = adj.shape[0]
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for w in np.nonzero(adj[v])[0]:
            if w not in seen:
                seen.add(int(w))
                frontier.append(int(w))
    return len(seen) == n


def scan_max_connected_threshold(weights: np.ndarray):
    """Largest strict threshold keeping the graph connected, by scanning.

    Tries ``nextafter(w, -inf)`` for every distinct positive weight in
    descending order and returns the first that works; None when even the
    full positive graph is disconnected.
    """
    iu, ju = np.triu_indices(weights.shape[0], k=1)
    candidates = sorted({w for w in weights[iu, ju] if w > 0}, reverse=True)
    for w in candidates:
        tau = float(np.nextafter(w, -np.inf))
        if scan_connected(weights, tau):
            return tau
    return None
