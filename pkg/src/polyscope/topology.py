"""Graph construction from distance matrices.

A minimum spanning tree over the coherence distances recovers the skeleton
of a tree-shaped network; orienting its edges by the cheaper causal
modelling direction yields a polytree.  The alternative route goes through
multi-input Wiener filters: the support of the filter of one target is its
Markov blanket (parents, children, co-parents), and co-parents are pruned
by an indirect-path test on the distances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import record
from .errors import InvalidParameterError
from .metric import DistanceMatrix, causal_edge_weights
from .signals import SpectralMatrix
from .wiener import noncausal_wiener

#: Relative filter magnitude below which a MISO input does not count as a
#: blanket candidate.
BLANKET_RMS_RTOL = 1e-3


def _check_edge_nodes(n: int, a: int, b: int) -> None:
    if not (0 <= a < n and 0 <= b < n):
        raise InvalidParameterError(f"edge ({a}, {b}) out of range for n={n}")
    if a == b:
        raise InvalidParameterError(f"self-loop on node {a}")


@dataclass
class UndirectedGraph:
    """Weighted undirected graph over labelled nodes.

    Edges are keyed by the ordered index pair ``(min, max)``; duplicate or
    self-loop edges are rejected.
    """

    nodes: list[str]
    edges: dict[tuple[int, int], float]

    def __post_init__(self):
        canonical = {}
        for (a, b), w in self.edges.items():
            _check_edge_nodes(len(self.nodes), a, b)
            key = (min(a, b), max(a, b))
            if key in canonical:
                raise InvalidParameterError(f"duplicate edge {key}")
            canonical[key] = float(w)
        self.edges = canonical

    @property
    def n(self) -> int:
        return len(self.nodes)

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def total_weight(self) -> float:
        return float(sum(self.edges.values()))


class Tree(UndirectedGraph):
    """An undirected graph that is connected and has exactly n-1 edges."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.edges) != self.n - 1:
            raise InvalidParameterError(
                f"a tree on {self.n} nodes needs {self.n - 1} edges, "
                f"got {len(self.edges)}")
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for u in self.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        if len(seen) != self.n:
            raise InvalidParameterError("tree is not connected")


@dataclass
class Polytree:
    """A directed tree: orienting the edges of a tree, cycles impossible.

    Edges are keyed ``(parent, child)``.  ``ties`` flags edges whose
    orientation came from a deterministic tie-break rather than a strict
    cost comparison.
    """

    nodes: list[str]
    edges: dict[tuple[int, int], float]
    ties: set[tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        undirected = {}
        for (p, c), w in self.edges.items():
            _check_edge_nodes(len(self.nodes), p, c)
            undirected[(min(p, c), max(p, c))] = w
        Tree(list(self.nodes), undirected)   # validates shape + connectivity
        for edge in self.ties:
            if edge not in self.edges:
                raise InvalidParameterError(f"tie flag on unknown edge {edge}")

    @property
    def n(self) -> int:
        return len(self.nodes)

    def parents(self, v: int) -> set[int]:
        return {p for (p, c) in self.edges if c == v}

    def children(self, v: int) -> set[int]:
        return {c for (p, c) in self.edges if p == v}

    @property
    def roots(self) -> set[int]:
        return {v for v in range(self.n) if not self.parents(v)}

    def skeleton(self) -> Tree:
        und = {(min(p, c), max(p, c)): w for (p, c), w in self.edges.items()}
        return Tree(list(self.nodes), und)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def minimum_spanning_tree(W: DistanceMatrix) -> Tree:
    """Kruskal's minimum spanning tree over the complete distance graph.

    Candidate edges are processed in lexicographic ``(weight, min index,
    max index)`` order, which makes the result deterministic under ties.
    Requires a symmetric distance kind.
    """
    if W.kind == "causal":
        raise InvalidParameterError(
            "spanning trees need a symmetric matrix; fold causal distances "
            "with causal_edge_weights first")
    n = W.n
    if n < 2:
        raise InvalidParameterError("need at least two nodes")
    candidates = sorted(
        (W.values[a, b], a, b) for a in range(n) for b in range(a + 1, n))
    uf = _UnionFind(n)
    chosen: dict[tuple[int, int], float] = {}
    for w, a, b in candidates:
        if uf.union(a, b):
            chosen[(a, b)] = w
            if len(chosen) == n - 1:
                break
    return Tree(list(W.labels), chosen)


def build_polytree(DC: DistanceMatrix) -> Polytree:
    """Orient the spanning tree of the folded causal weights.

    The tree is grown on the pairwise-minimum causal weights; each tree edge
    then points along its cheaper modelling direction (ties keep their
    deterministic orientation and are flagged on the edge).
    """
    weights, directions = causal_edge_weights(DC)
    tree = minimum_spanning_tree(weights)
    edges: dict[tuple[int, int], float] = {}
    ties: set[tuple[int, int]] = set()
    for (a, b), w in tree.edges.items():
        # +1 at [a, b] reads: modelling a from input b won, i.e. b -> a.
        if directions.values[a, b] == 1:
            key = (b, a)
        else:
            key = (a, b)
        edges[key] = w
        if directions.ties[a, b]:
            ties.add(key)
    return Polytree(list(DC.labels), edges, ties)


def markov_blanket(tree: Polytree, node: int) -> set[int]:
    """Parents, children and co-parents of a node in a polytree."""
    if not 0 <= node < tree.n:
        raise InvalidParameterError(f"node {node} out of range")
    parents = tree.parents(node)
    children = tree.children(node)
    coparents = set()
    for child in children:
        coparents |= tree.parents(child)
    coparents.discard(node)
    return parents | children | coparents


def miso_blanket_topology(S: SpectralMatrix, D: DistanceMatrix,
                          threshold: float | None = None) -> UndirectedGraph:
    """Recover the skeleton from multi-input Wiener filter supports.

    For each target the filter over all remaining series is solved; inputs
    whose filter RMS exceeds ``threshold`` (relative to the largest RMS for
    that target) are blanket candidates.  A candidate ``i`` is then purged
    when some other candidate ``c`` explains it away, i.e. both legs of the
    indirect route are shorter than the direct distance:
    ``max(D(i,c), D(c,j)) < D(i,j)``.  In a tree this removes exactly the
    co-parents, which sit at maximal distance from the target.  Surviving
    links are symmetrised by union over targets.
    """
    if D.kind not in ("noncausal", "correlation", "causal-min"):
        raise InvalidParameterError("need a symmetric distance matrix")
    if D.labels != S.labels:
        raise InvalidParameterError("distance labels do not match the spectra")
    rtol = BLANKET_RMS_RTOL if threshold is None else float(threshold)
    if rtol <= 0:
        raise InvalidParameterError("threshold must be positive")
    n = S.n
    edges: dict[tuple[int, int], float] = {}
    for j in range(n):
        inputs = [i for i in range(n) if i != j]
        sol = noncausal_wiener(S, j, inputs)
        rms = {i: sol.filters[i].rms() for i in inputs}
        top = max(rms.values())
        if top == 0.0:
            continue
        candidates = [i for i in inputs if rms[i] > rtol * top]
        kept = []
        for i in candidates:
            explained = any(
                max(D.values[i, c], D.values[c, j]) < D.values[i, j]
                for c in candidates if c != i)
            if explained:
                record("blanket-purge",
                       f"candidate {S.labels[i]!r} of target {S.labels[j]!r} "
                       f"explained by an indirect route")
            else:
                kept.append(i)
        for i in kept:
            key = (min(i, j), max(i, j))
            edges.setdefault(key, float(D.values[i, j]))
    return UndirectedGraph(list(S.labels), edges)


def _quote(label: str) -> str:
    return '"' + label.replace('"', r'\"') + '"'


def export_dot(graph, sink=None) -> str:
    """Render a graph in DOT syntax with 4-decimal weight labels.

    Accepts :class:`UndirectedGraph`/:class:`Tree` (rendered as ``graph``)
    or :class:`Polytree` (rendered as ``digraph``).  Node and edge order is
    deterministic.  When ``sink`` is given the text is also written there
    (a path or a file-like object).
    """
    directed = isinstance(graph, Polytree)
    lines = ["digraph topology {" if directed else "graph topology {"]
    for label in graph.nodes:
        lines.append(f"    {_quote(label)};")
    connector = "->" if directed else "--"
    for (a, b), w in sorted(graph.edges.items()):
        lines.append(f"    {_quote(graph.nodes[a])} {connector} "
                     f"{_quote(graph.nodes[b])} [label=\"{w:.4f}\"];")
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8") as fh:
                fh.write(text)
    return text


def edge_list_rows(graph) -> list[dict]:
    """Edge rows for CSV export: node_a, node_b, weight, direction, tie_flag.

    Undirected edges carry direction "none"; polytree edges state which
    endpoint is the source.  Rows are sorted by node indices.
    """
    rows = []
    if isinstance(graph, Polytree):
        for (p, c), w in graph.edges.items():
            a, b = min(p, c), max(p, c)
            rows.append({
                "node_a": graph.nodes[a],
                "node_b": graph.nodes[b],
                "weight": w,
                "direction": "a_to_b" if p == a else "b_to_a",
                "tie_flag": 1 if (p, c) in graph.ties else 0,
                "_key": (a, b),
            })
    else:
        for (a, b), w in graph.edges.items():
            rows.append({
                "node_a": graph.nodes[a],
                "node_b": graph.nodes[b],
                "weight": w,
                "direction": "none",
                "tie_flag": 0,
                "_key": (a, b),
            })
    rows.sort(key=lambda r: r["_key"])
    for r in rows:
        del r["_key"]
    return rows
