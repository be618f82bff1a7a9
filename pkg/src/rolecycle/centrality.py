"""The four classic centralities plus reciprocity over interaction graphs.

View conventions: degree and reciprocity read the directed weighted graph;
betweenness reads the directed unweighted view; closeness (harmonic) and
eigenvector read the undirected view (unweighted and weighted respectively).
All floating-point reductions go through math.fsum over gathered terms so
results are independent of node iteration order and stable under relabeling.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import fsum
from typing import Mapping

from .errors import UnknownMember
from .graph import InteractionGraph

EIGEN_TOL_DEFAULT = 1e-10
EIGEN_MAX_ITER_DEFAULT = 1000


@dataclass(frozen=True)
class CentralityRow:
    member: str
    degree_in: float
    degree_out: float
    degree_total: float
    closeness: float
    betweenness: float
    eigenvector: float
    reciprocity: float


@dataclass(frozen=True)
class CentralityReport:
    """Per-member centrality rows for one graph.

    eigenvector_converged is False when power iteration hit its cap; the
    eigenvector column then holds the flagged best-effort last iterate.
    """

    rows: Mapping[str, CentralityRow]
    eigenvector_converged: bool

    def __getitem__(self, member: str) -> CentralityRow:
        if member not in self.rows:
            raise UnknownMember(f"member {member!r} not in report")
        return self.rows[member]

    def __contains__(self, member: str) -> bool:
        return member in self.rows

    def __len__(self) -> int:
        return len(self.rows)


def degree_centrality(graph: InteractionGraph) -> dict[str, tuple[float, float, float]]:
    """Weighted in/out/total degree sums per member."""
    out: dict[str, tuple[float, float, float]] = {}
    for node in graph.nodes:
        d_in = fsum(graph.in_neighbors(node).values())
        d_out = fsum(graph.out_neighbors(node).values())
        out[node] = (d_in, d_out, d_in + d_out)
    return out


def _undirected_unweighted(graph: InteractionGraph) -> dict[str, list[str]]:
    adj: dict[str, set[str]] = {node: set() for node in graph.nodes}
    for (u, v) in graph.edges:
        adj[u].add(v)
        adj[v].add(u)
    return {node: sorted(nbrs) for node, nbrs in adj.items()}


def _directed_unweighted(graph: InteractionGraph) -> dict[str, list[str]]:
    adj: dict[str, set[str]] = {node: set() for node in graph.nodes}
    for (u, v) in graph.edges:
        adj[u].add(v)
    return {node: sorted(nbrs) for node, nbrs in adj.items()}


def closeness_centrality(graph: InteractionGraph) -> dict[str, float]:
    """Harmonic closeness on the undirected unweighted view, divided by n-1.

    Unreachable pairs contribute 0, so the measure is well-defined on
    disconnected graphs; a graph with a single node scores 0.
    """
    adj = _undirected_unweighted(graph)
    n = len(adj)
    result: dict[str, float] = {}
    for source in adj:
        if n <= 1:
            result[source] = 0.0
            continue
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        terms = [1.0 / d for node, d in sorted(dist.items()) if d > 0]
        result[source] = fsum(terms) / (n - 1)
    return result


def betweenness_centrality(graph: InteractionGraph) -> dict[str, float]:
    """Brandes accumulation on the directed unweighted view.

    Normalized by (n-1)(n-2) for n >= 3, else all zeros. Per-node dependency
    contributions are gathered per source and fsum-reduced at the end, so the
    result does not depend on the order sources are processed in.
    """
    adj = _directed_unweighted(graph)
    nodes = sorted(adj)
    n = len(nodes)
    if n < 3:
        return {node: 0.0 for node in nodes}

    contributions: dict[str, list[float]] = {node: [] for node in nodes}
    for source in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {node: [] for node in nodes}
        sigma = {node: 0 for node in nodes}  # path counts stay integral
        sigma[source] = 1
        dist = {node: -1 for node in nodes}
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            stack.append(u)
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        # Pop order is reverse-BFS, so every successor's dependency is final
        # before its predecessors consume it; per-node terms are fsum-reduced
        # so the value cannot depend on predecessor visit order.
        terms: dict[str, list[float]] = {node: [] for node in nodes}
        while stack:
            w = stack.pop()
            delta_w = fsum(terms[w])
            for v in preds[w]:
                terms[v].append((sigma[v] / sigma[w]) * (1.0 + delta_w))
            if w != source:
                contributions[w].append(delta_w)

    scale = 1.0 / ((n - 1) * (n - 2))
    return {node: fsum(contributions[node]) * scale for node in nodes}


def _undirected_weighted(graph: InteractionGraph) -> dict[str, list[tuple[str, float]]]:
    adj: dict[str, dict[str, float]] = {node: {} for node in graph.nodes}
    for (u, v), w in graph.edges.items():
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w
    return {node: sorted(nbrs.items()) for node, nbrs in adj.items()}


def eigenvector_centrality(
    graph: InteractionGraph,
    tol: float = EIGEN_TOL_DEFAULT,
    max_iter: int = EIGEN_MAX_ITER_DEFAULT,
) -> tuple[dict[str, float], bool]:
    """Dominant-eigenvector scores on the undirected weighted view.

    Power iteration on A + I: shifting by the identity leaves eigenvectors
    unchanged but keeps the spectrum one-signed, so bipartite-ish graphs
    cannot oscillate. Each iterate is max-normalized; convergence is a
    successive-iterate max-norm difference <= tol. Returns (scores, converged);
    a capped run returns the last iterate flagged as non-converged rather
    than raising. An edgeless graph scores all zeros.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    adj = _undirected_weighted(graph)
    nodes = sorted(adj)
    if not graph.edges:
        return {node: 0.0 for node in nodes}, True

    x = {node: 1.0 for node in nodes}
    converged = False
    for _ in range(max_iter):
        nxt: dict[str, float] = {}
        for node in nodes:
            # A·x plus the identity shift term x[node].
            nxt[node] = fsum([w * x[v] for v, w in adj[node]] + [x[node]])
        norm = max(nxt.values())
        if norm > 0:
            for node in nodes:
                nxt[node] /= norm
        diff = max(abs(nxt[node] - x[node]) for node in nodes)
        x = nxt
        if diff <= tol:
            converged = True
            break
    return x, converged


def reciprocity(graph: InteractionGraph, member: str) -> float:
    """Fraction of the member's out-neighbors that point back.

    A member with no out-neighbors is vacuously fully reciprocated (1.0);
    this is the one deliberate exception to isolated-members-score-zero.
    """
    if member not in graph:
        raise UnknownMember(f"member {member!r} not in graph")
    outs = graph.out_neighbors(member)
    if not outs:
        return 1.0
    mutual = sum(1 for t in outs if graph.weight(t, member) > 0)
    return mutual / len(outs)


def compute_centralities(
    graph: InteractionGraph,
    tol: float = EIGEN_TOL_DEFAULT,
    max_iter: int = EIGEN_MAX_ITER_DEFAULT,
) -> CentralityReport:
    """All centralities for every member of the graph, as one report."""
    degree = degree_centrality(graph)
    closeness = closeness_centrality(graph)
    betweenness = betweenness_centrality(graph)
    eigen, converged = eigenvector_centrality(graph, tol=tol, max_iter=max_iter)
    rows = {}
    for node in sorted(graph.nodes):
        d_in, d_out, d_total = degree[node]
        rows[node] = CentralityRow(
            member=node,
            degree_in=d_in,
            degree_out=d_out,
            degree_total=d_total,
            closeness=closeness[node],
            betweenness=betweenness[node],
            eigenvector=eigen[node],
            reciprocity=reciprocity(graph, node),
        )
    return CentralityReport(rows=rows, eigenvector_converged=converged)


CENTRALITY_CSV_HEADER = (
    "member,degree_in,degree_out,degree_total,"
    "closeness,betweenness,eigenvector,reciprocity"
)


def centralities_to_csv(report: CentralityReport) -> str:
    """CSV export, one row per member, sorted by member id."""
    lines = [CENTRALITY_CSV_HEADER]
    for member in sorted(report.rows):
        r = report.rows[member]
        lines.append(
            f"{member},{r.degree_in!r},{r.degree_out!r},{r.degree_total!r},"
            f"{r.closeness!r},{r.betweenness!r},{r.eigenvector!r},{r.reciprocity!r}"
        )
    return "\n".join(lines) + "\n"
