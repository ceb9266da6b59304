"""Shared helpers for the test suite."""

from __future__ import annotations

from collections import deque

import numpy as np

from impactfield import Graph, generate_er, is_connected


def arcs(n: int, pairs, directed: bool = True, weight: float = 1.0) -> Graph:
    """Build a Graph from bare (src, dst) pairs with a uniform weight."""
    edges = []
    for src, dst in pairs:
        if not directed and src > dst:
            src, dst = dst, src
        edges.append((src, dst, weight))
    return Graph(n=n, directed=directed, edges=tuple(edges))


def bfs_hops(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Reference all-pairs hop counts: a plain per-source queue BFS."""
    out_neighbors: list[list[int]] = [[] for _ in range(graph.n)]
    for src, dst, _ in graph.edges:
        out_neighbors[src].append(dst)
        if not graph.directed:
            out_neighbors[dst].append(src)
    hops = np.zeros((graph.n, graph.n), dtype=np.int64)
    reachable = np.zeros((graph.n, graph.n), dtype=bool)
    for source in range(graph.n):
        level = {source: 0}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for neighbor in out_neighbors[node]:
                if neighbor not in level:
                    level[neighbor] = level[node] + 1
                    queue.append(neighbor)
        for node, d in level.items():
            hops[source, node] = d
            reachable[source, node] = True
    return hops, reachable


def connected_er(n: int, p: float, count: int, start_seed: int) -> list[Graph]:
    """First ``count`` connected undirected G(n, p) draws from a seed walk."""
    graphs = []
    seed = start_seed
    while len(graphs) < count:
        candidate = generate_er(n=n, p=p, directed=False, seed=seed)
        if is_connected(candidate):
            graphs.append(candidate)
        seed += 1
    return graphs
