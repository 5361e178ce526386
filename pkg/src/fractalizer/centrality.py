"""Per-vertex centrality profiles: weighted degrees and closeness.

Degrees are weight-summed (a transition repeated w times contributes w,
not 1) and a self-loop of weight w adds w to both the in- and out-degree
of its vertex, so vertex importance grows with call repetition.

Closeness is computed on the undirected, unweighted projection of the
graph with self-loops ignored. For a vertex v in a graph of n vertices
with R reachable others at total shortest-path distance S:

    closeness(v) = (R / (n - 1)) * (R / S)      if S > 0, else 0

The leading factor corrects for disconnected components and keeps values
in [0, 1]; a lone vertex gets 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .callgraph import CallGraph


@dataclass(frozen=True)
class CentralityEntry:
    vertex: str
    d_in: int
    d_out: int
    d_all: int
    d_diff: int
    closeness: float

    def __post_init__(self):
        if self.d_all != self.d_in + self.d_out:
            raise ValueError(f"{self.vertex}: d_all must equal d_in + d_out")
        if self.d_diff != self.d_in - self.d_out:
            raise ValueError(f"{self.vertex}: d_diff must equal d_in - d_out")
        if not 0.0 <= self.closeness <= 1.0:
            raise ValueError(f"{self.vertex}: closeness outside [0, 1]")


@dataclass(frozen=True)
class CentralityProfile:
    """Entries in first-appearance vertex order of the source graph."""

    entries: tuple[CentralityEntry, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _degree_maps(graph: CallGraph) -> tuple[dict[str, int], dict[str, int]]:
    d_in = {v: 0 for v in graph.vertices}
    d_out = {v: 0 for v in graph.vertices}
    for (src, dst), weight in graph.edges.items():
        d_out[src] += weight
        d_in[dst] += weight
    return d_in, d_out


def _closeness_map(graph: CallGraph) -> dict[str, float]:
    n = len(graph.vertices)
    adjacency: dict[str, set[str]] = {v: set() for v in graph.vertices}
    for src, dst in graph.edges:
        if src != dst:
            adjacency[src].add(dst)
            adjacency[dst].add(src)
    closeness: dict[str, float] = {}
    for start in graph.vertices:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for neighbour in adjacency[node]:
                if neighbour not in dist:
                    dist[neighbour] = dist[node] + 1
                    queue.append(neighbour)
        reachable = len(dist) - 1
        total = sum(dist.values())
        if total > 0 and n > 1:
            closeness[start] = (reachable / (n - 1)) * (reachable / total)
        else:
            closeness[start] = 0.0
    return closeness


def _assemble(
    graph: CallGraph,
    d_in: dict[str, int] | None = None,
    d_out: dict[str, int] | None = None,
    closeness: dict[str, float] | None = None,
) -> CentralityProfile:
    entries = []
    for v in graph.vertices:
        din = d_in[v] if d_in else 0
        dout = d_out[v] if d_out else 0
        entries.append(
            CentralityEntry(
                vertex=v,
                d_in=din,
                d_out=dout,
                d_all=din + dout,
                d_diff=din - dout,
                closeness=closeness[v] if closeness else 0.0,
            )
        )
    return CentralityProfile(entries=tuple(entries))


def degree_profile(graph: CallGraph) -> CentralityProfile:
    """Degree fields only; closeness left at 0."""
    if not graph.vertices:
        raise ValueError("empty graph")
    d_in, d_out = _degree_maps(graph)
    return _assemble(graph, d_in, d_out)


def closeness_profile(graph: CallGraph) -> CentralityProfile:
    """Closeness field only; degrees left at 0."""
    if not graph.vertices:
        raise ValueError("empty graph")
    return _assemble(graph, closeness=_closeness_map(graph))


def centrality_profile(graph: CallGraph) -> CentralityProfile:
    """Full profile: degrees and closeness together."""
    if not graph.vertices:
        raise ValueError("empty graph")
    d_in, d_out = _degree_maps(graph)
    return _assemble(graph, d_in, d_out, _closeness_map(graph))
