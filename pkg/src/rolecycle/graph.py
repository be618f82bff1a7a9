"""Directed weighted interaction graphs accumulated from event windows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InvalidWindow, UnknownMember
from .events import EventKind, EventLog

# Named edge-semantics switches: which event kinds imply a directed tie and
# with what weight increment. Accumulated weights at or below zero drop the
# edge entirely; weight never goes negative.
EDGE_SEMANTICS: dict[str, Mapping[EventKind, float]] = {
    "explicit+communication": {
        EventKind.EDGE_ADD: 1.0,
        EventKind.EDGE_REMOVE: -1.0,
        EventKind.REPLY: 1.0,
        EventKind.REACTION: 1.0,
    },
    "explicit": {
        EventKind.EDGE_ADD: 1.0,
        EventKind.EDGE_REMOVE: -1.0,
    },
    "communication": {
        EventKind.REPLY: 1.0,
        EventKind.REACTION: 1.0,
    },
}

DEFAULT_EDGE_SEMANTICS = "explicit+communication"


class InteractionGraph:
    """Immutable directed weighted graph over member ids.

    Nodes may include isolated members; they participate in centrality
    rankings with zero scores.
    """

    __slots__ = ("_nodes", "_edges", "_out", "_in", "_window")

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Mapping[tuple[str, str], float],
        window: tuple[int, int] = (0, 0),
    ):
        node_set = set(nodes)
        out_adj: dict[str, dict[str, float]] = {}
        in_adj: dict[str, dict[str, float]] = {}
        clean: dict[tuple[str, str], float] = {}
        for (u, v), w in edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if w <= 0:
                continue
            node_set.add(u)
            node_set.add(v)
            clean[(u, v)] = w
            out_adj.setdefault(u, {})[v] = w
            in_adj.setdefault(v, {})[u] = w
        self._nodes = frozenset(node_set)
        self._edges = clean
        self._out = out_adj
        self._in = in_adj
        self._window = window

    @property
    def nodes(self) -> frozenset[str]:
        return self._nodes

    @property
    def edges(self) -> Mapping[tuple[str, str], float]:
        return dict(self._edges)

    @property
    def window(self) -> tuple[int, int]:
        return self._window

    def __contains__(self, member: str) -> bool:
        return member in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def weight(self, u: str, v: str) -> float:
        return self._edges.get((u, v), 0.0)

    def out_neighbors(self, u: str) -> Mapping[str, float]:
        self._require(u)
        return dict(self._out.get(u, {}))

    def in_neighbors(self, v: str) -> Mapping[str, float]:
        self._require(v)
        return dict(self._in.get(v, {}))

    def undirected_neighbors(self, u: str) -> Mapping[str, float]:
        """Neighbors in either direction; weights sum over both directions."""
        self._require(u)
        merged: dict[str, float] = {}
        for v, w in self._out.get(u, {}).items():
            merged[v] = merged.get(v, 0.0) + w
        for v, w in self._in.get(u, {}).items():
            merged[v] = merged.get(v, 0.0) + w
        return merged

    def ego(self, member: str) -> "EgoNetwork":
        """The member, their direct neighbors, and all edges among them."""
        self._require(member)
        keep = {member} | set(self._out.get(member, {})) | set(self._in.get(member, {}))
        edges = {
            (u, v): w for (u, v), w in self._edges.items() if u in keep and v in keep
        }
        return EgoNetwork(center=member, graph=InteractionGraph(keep, edges, self._window))

    def _require(self, member: str) -> None:
        if member not in self._nodes:
            raise UnknownMember(f"member {member!r} not in graph")


@dataclass(frozen=True)
class EgoNetwork:
    center: str
    graph: InteractionGraph


def build_graph(
    log: EventLog,
    start: int,
    end: int,
    semantics: str = DEFAULT_EDGE_SEMANTICS,
) -> InteractionGraph:
    """Accumulate the interaction graph over [start, end).

    Nodes are the members active in the window (as actor or target), so
    isolated-but-active members rank with zero centrality. Self-directed
    communication events are skipped; explicit self-edges are already
    rejected at ingest.
    """
    if semantics not in EDGE_SEMANTICS:
        raise ValueError(f"unknown edge semantics {semantics!r}")
    weights = EDGE_SEMANTICS[semantics]
    acc: dict[tuple[str, str], float] = {}
    nodes: set[str] = set()
    for rec in log.window(start, end):
        nodes.add(rec.member)
        if rec.target is not None:
            nodes.add(rec.target)
        delta = weights.get(rec.kind)
        if delta is None or rec.target is None or rec.target == rec.member:
            continue
        key = (rec.member, rec.target)
        acc[key] = acc.get(key, 0.0) + delta
    return InteractionGraph(nodes, acc, window=(start, end))


def churn_between(g1: InteractionGraph, g2: InteractionGraph, member: str) -> float:
    """Neighbor-set turnover for one member between two prebuilt graphs."""
    n1 = set(g1.undirected_neighbors(member)) if member in g1 else set()
    n2 = set(g2.undirected_neighbors(member)) if member in g2 else set()
    union = n1 | n2
    if not union:
        return 0.0
    return 1.0 - len(n1 & n2) / len(union)


def edge_churn(
    log: EventLog,
    member: str,
    first: tuple[int, int],
    second: tuple[int, int],
    semantics: str = DEFAULT_EDGE_SEMANTICS,
) -> float:
    """Turnover of the member's undirected neighbor set between two windows.

    churn = 1 - |N1 & N2| / |N1 | N2| over the neighbor sets in each window's
    graph; 0.0 when both sets are empty. The first window must end before the
    second begins.
    """
    if member not in log.members:
        raise UnknownMember(f"unknown member {member!r}")
    if first[1] > second[0]:
        raise InvalidWindow("first window must precede the second")
    g1 = build_graph(log, first[0], first[1], semantics)
    g2 = build_graph(log, second[0], second[1], semantics)
    return churn_between(g1, g2, member)


def graph_to_csv(graph: InteractionGraph) -> str:
    """Edge list as CSV text: source,target,weight, sorted for determinism."""
    lines = ["source,target,weight"]
    for (u, v), w in sorted(graph.edges.items()):
        lines.append(f"{u},{v},{w!r}")
    return "\n".join(lines) + "\n"
