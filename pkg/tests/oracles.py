"""Independent brute-force centrality oracles for desk-scale graphs.

Deliberately naive algorithms: Floyd-Warshall distances, exhaustive
shortest-path enumeration via DFS, vectorized long power iteration. They
share no code with the production implementations so agreement is evidence,
not tautology.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from rolecycle import InteractionGraph

INF = float("inf")


def random_graph(rng: random.Random, max_nodes: int = 7) -> InteractionGraph:
    """Seeded random directed weighted graph with up to max_nodes nodes."""
    n = rng.randint(1, max_nodes)
    names = [f"n{i}" for i in range(n)]
    p = rng.choice([0.15, 0.3, 0.5, 0.8])
    edges = {}
    for u, v in itertools.permutations(names, 2):
        if rng.random() < p:
            edges[(u, v)] = rng.choice([0.5, 1.0, 1.0, 2.0, 3.0])
    return InteractionGraph(names, edges)


def oracle_degree(graph: InteractionGraph) -> dict[str, tuple[float, float, float]]:
    nodes = sorted(graph.nodes)
    d_in = {v: 0.0 for v in nodes}
    d_out = {v: 0.0 for v in nodes}
    for (u, v), w in graph.edges.items():
        d_out[u] += w
        d_in[v] += w
    return {v: (d_in[v], d_out[v], d_in[v] + d_out[v]) for v in nodes}


def _floyd_warshall(nodes: list[str], pairs: set[tuple[str, str]]) -> dict:
    dist = {(u, v): (0 if u == v else INF) for u in nodes for v in nodes}
    for (u, v) in pairs:
        dist[(u, v)] = 1
    for k in nodes:
        for i in nodes:
            for j in nodes:
                via = dist[(i, k)] + dist[(k, j)]
                if via < dist[(i, j)]:
                    dist[(i, j)] = via
    return dist


def oracle_closeness(graph: InteractionGraph) -> dict[str, float]:
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if n <= 1:
        return {v: 0.0 for v in nodes}
    undirected = set()
    for (u, v) in graph.edges:
        undirected.add((u, v))
        undirected.add((v, u))
    dist = _floyd_warshall(nodes, undirected)
    out = {}
    for s in nodes:
        total = 0.0
        for t in nodes:
            d = dist[(s, t)]
            if t != s and d < INF:
                total += 1.0 / d
        out[s] = total / (n - 1)
    return out


def oracle_betweenness(graph: InteractionGraph) -> dict[str, float]:
    """Enumerate every shortest path of every ordered pair via DFS."""
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if n < 3:
        return {v: 0.0 for v in nodes}
    adj = {v: [] for v in nodes}
    directed = {(u, v) for (u, v) in graph.edges}
    for (u, v) in directed:
        adj[u].append(v)
    dist = _floyd_warshall(nodes, directed)

    score = {v: 0.0 for v in nodes}
    for s, t in itertools.permutations(nodes, 2):
        shortest = dist[(s, t)]
        if shortest == INF:
            continue
        # All paths from s to t of exactly the shortest length.
        paths = []
        stack = [(s, (s,))]
        while stack:
            node, path = stack.pop()
            if node == t:
                paths.append(path)
                continue
            if len(path) - 1 >= shortest:
                continue
            for nxt in adj[node]:
                # Following shortest-path DAG edges only keeps this exact.
                if dist[(s, nxt)] == len(path) and dist[(nxt, t)] == shortest - len(path):
                    stack.append((nxt, path + (nxt,)))
        sigma = len(paths)
        for v in nodes:
            if v == s or v == t:
                continue
            through = sum(1 for path in paths if v in path[1:-1])
            if through:
                score[v] += through / sigma
    scale = 1.0 / ((n - 1) * (n - 2))
    return {v: score[v] * scale for v in nodes}


def oracle_eigenvector(graph: InteractionGraph) -> dict[str, float]:
    """Long vectorized power iteration on the undirected weighted view."""
    nodes = sorted(graph.nodes)
    if not graph.edges:
        return {v: 0.0 for v in nodes}
    index = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    a = np.zeros((n, n))
    for (u, v), w in graph.edges.items():
        a[index[u], index[v]] += w
        a[index[v], index[u]] += w
    shifted = a + np.eye(n)
    x = np.ones(n)
    for _ in range(200_000):
        nxt = shifted @ x
        norm = nxt.max()
        if norm > 0:
            nxt = nxt / norm
        if np.abs(nxt - x).max() <= 1e-14:
            x = nxt
            break
        x = nxt
    return {v: float(x[index[v]]) for v in nodes}


def oracle_reciprocity(graph: InteractionGraph, member: str) -> float:
    outs = [v for (u, v) in graph.edges if u == member]
    if not outs:
        return 1.0
    mutual = sum(1 for t in outs if (t, member) in graph.edges)
    return mutual / len(outs)
