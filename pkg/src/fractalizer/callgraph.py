"""Weighted directed call graphs built from API-call sequences.

Consecutive calls become directed edges; a repeated transition raises the
edge weight instead of adding parallel edges, and an immediately repeated
call yields a self-loop. Vertex order is first-appearance order, which
fixes all downstream output byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .traces import ApiTrace


@dataclass(frozen=True)
class CallGraph:
    """Immutable by convention: do not mutate `edges` after construction."""

    vertices: tuple[str, ...]
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    source_id: str = ""

    @property
    def weight_sum(self) -> int:
        return sum(self.edges.values())


def build_graph(trace: ApiTrace) -> CallGraph:
    """Convert a trace into its call graph.

    A single-call trace yields one vertex and no edges. For every
    consecutive pair the corresponding edge weight is incremented, so the
    edge weights always sum to len(calls) - 1.
    """
    if not trace.calls:
        raise ValueError("trace has no calls")
    vertices: list[str] = []
    seen: set[str] = set()
    for token in trace.calls:
        if token not in seen:
            seen.add(token)
            vertices.append(token)
    edges: dict[tuple[str, str], int] = {}
    for src, dst in zip(trace.calls, trace.calls[1:]):
        key = (src, dst)
        edges[key] = edges.get(key, 0) + 1
    return CallGraph(vertices=tuple(vertices), edges=edges, source_id=trace.sample_id)


def export_dot(graph: CallGraph) -> str:
    """Render the graph as DOT text with edge weights as labels.

    Vertices appear in first-appearance order and edges in first-traversal
    order, so the output is byte-deterministic for a given graph.
    """
    name = graph.source_id.replace("\\", "\\\\").replace('"', '\\"')
    lines = [f'digraph "{name}" {{']
    for vertex in graph.vertices:
        lines.append(f"  {vertex};")
    for (src, dst), weight in graph.edges.items():
        lines.append(f'  {src} -> {dst} [label="{weight}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
