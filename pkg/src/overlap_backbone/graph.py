"""Weighted undirected graphs and the structural primitives used by the extractors.

Nodes carry opaque string labels and a dense integer index fixed by order of
first appearance. Every tie-break in the package is resolved on these indices,
so results depend only on the input file (and a seed where randomness is used).
"""

from __future__ import annotations

import io
import logging
import os
from collections import deque
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, TextIO, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


class GraphError(Exception):
    """Base class for graph construction and lookup failures."""


class EdgeListParseError(GraphError, ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DuplicateEdgeError(EdgeListParseError):
    pass


class WeightedGraph:
    """Immutable undirected graph with strictly positive edge weights.

    Internally nodes are ``0..n-1``; ``labels[i]`` is the external label of
    node ``i``. ``adj[i]`` maps neighbour index to edge weight.
    """

    __slots__ = ("_labels", "_index", "_adj", "_m", "name", "self_loops_dropped")

    def __init__(self, labels: Sequence[str], adj: Sequence[Dict[int, float]], name: str = "",
                 self_loops_dropped: int = 0):
        self._labels: Tuple[str, ...] = tuple(labels)
        self._index: Dict[str, int] = {lab: i for i, lab in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise GraphError("node labels must be unique")
        self._adj: Tuple[Dict[int, float], ...] = tuple(dict(a) for a in adj)
        m2 = 0
        for i, nbrs in enumerate(self._adj):
            for j, w in nbrs.items():
                if j == i:
                    raise GraphError(f"self-loop on {self._labels[i]!r}")
                if not w > 0:
                    raise GraphError(f"non-positive weight on edge ({self._labels[i]}, {self._labels[j]})")
                if self._adj[j].get(i) != w:
                    raise GraphError("adjacency is not symmetric")
            m2 += len(nbrs)
        self._m = m2 // 2
        self.name = name
        self.self_loops_dropped = self_loops_dropped

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[str, str, float]], nodes: Iterable[str] = (),
                   name: str = "") -> "WeightedGraph":
        """Build a graph from labelled ``(u, v, weight)`` triples.

        ``nodes`` may list extra (possibly isolated) nodes; they are indexed
        before any node first seen in ``edges``.
        """
        labels: List[str] = []
        index: Dict[str, int] = {}
        adj: List[Dict[int, float]] = []

        def idx(lab: str) -> int:
            lab = str(lab)
            i = index.get(lab)
            if i is None:
                i = index[lab] = len(labels)
                labels.append(lab)
                adj.append({})
            return i

        for lab in nodes:
            idx(lab)
        for u, v, w in edges:
            i, j = idx(u), idx(v)
            if i == j:
                raise GraphError(f"self-loop on {u!r}")
            if j in adj[i]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            w = float(w)
            if not w > 0:
                raise GraphError(f"non-positive weight on edge ({u}, {v})")
            adj[i][j] = w
            adj[j][i] = w
        return cls(labels, adj, name=name)

    # -- basic accessors -------------------------------------------------

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @property
    def adj(self) -> Tuple[Dict[int, float], ...]:
        return self._adj

    def number_of_nodes(self) -> int:
        return len(self._labels)

    def number_of_edges(self) -> int:
        return self._m

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return set(self._labels) == set(other._labels) and self.edge_dict() == other.edge_dict()

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<WeightedGraph{tag} n={self.number_of_nodes()} m={self.number_of_edges()}>"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown node {label!r}") from None

    def has_edge(self, u: str, v: str) -> bool:
        i, j = self._index.get(u), self._index.get(v)
        return i is not None and j is not None and j in self._adj[i]

    def weight(self, u: str, v: str) -> float:
        i, j = self.index(u), self.index(v)
        try:
            return self._adj[i][j]
        except KeyError:
            raise KeyError(f"unknown edge ({u}, {v})") from None

    def neighbors(self, label: str) -> List[str]:
        return [self._labels[j] for j in sorted(self._adj[self.index(label)])]

    def index_edges(self) -> List[Tuple[int, int, float]]:
        """Edges as ``(i, j, w)`` with ``i < j``, sorted by ``(i, j)``."""
        out = [(i, j, w) for i, nbrs in enumerate(self._adj) for j, w in nbrs.items() if i < j]
        out.sort()
        return out

    def edges(self) -> List[Tuple[str, str, float]]:
        lab = self._labels
        return [(lab[i], lab[j], w) for i, j, w in self.index_edges()]

    def edge_dict(self) -> Dict[frozenset, float]:
        return {frozenset((u, v)): w for u, v, w in self.edges()}

    def strengths(self) -> np.ndarray:
        """Weighted degree of every node, indexed by internal node index."""
        return np.array([sum(nbrs.values()) for nbrs in self._adj], dtype=float)

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self._adj], dtype=int)

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.index_edges())


# -- ingestion / export ------------------------------------------------------

def load_edge_list(source: Union[str, os.PathLike, TextIO], default_weight: float = 1.0,
                   name: Optional[str] = None) -> WeightedGraph:
    """Parse a whitespace-separated edge list (``src dst [weight]`` per line).

    Blank lines and lines starting with ``#`` are skipped. Self-loops are
    dropped and counted in ``graph.self_loops_dropped``; duplicate unordered
    pairs and non-positive or non-numeric weights raise
    :class:`EdgeListParseError` naming the offending line.
    """
    if not default_weight > 0:
        raise ValueError("default_weight must be positive")
    if isinstance(source, (str, os.PathLike)):
        if name is None:
            name = os.path.splitext(os.path.basename(os.fspath(source)))[0]
        with open(source, encoding="utf-8") as fh:
            return _parse(fh, default_weight, name)
    return _parse(source, default_weight, name or "")


def loads_edge_list(text: str, default_weight: float = 1.0, name: str = "") -> WeightedGraph:
    return _parse(io.StringIO(text), default_weight, name)


def _parse(fh: TextIO, default_weight: float, name: str) -> WeightedGraph:
    labels: List[str] = []
    index: Dict[str, int] = {}
    adj: List[Dict[int, float]] = []
    loops = 0
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(fields)}")
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise EdgeListParseError(lineno, f"non-numeric weight {fields[2]!r}") from None
            if not w > 0 or not np.isfinite(w):
                raise EdgeListParseError(lineno, f"non-positive weight {fields[2]!r}")
        else:
            w = float(default_weight)
        ids = []
        for lab in fields[:2]:
            i = index.get(lab)
            if i is None:
                i = index[lab] = len(labels)
                labels.append(lab)
                adj.append({})
            ids.append(i)
        i, j = ids
        if i == j:
            loops += 1
            continue
        if j in adj[i]:
            raise DuplicateEdgeError(lineno, f"duplicate edge ({fields[0]}, {fields[1]})")
        adj[i][j] = w
        adj[j][i] = w
    if loops:
        logger.warning("dropped %d self-loop(s) while loading %s", loops, name or "edge list")
    return WeightedGraph(labels, adj, name=name, self_loops_dropped=loops)


def format_weight(w: float) -> str:
    # repr() is the shortest string that round-trips the double exactly
    if float(w).is_integer() and abs(w) < 2 ** 53:
        return str(int(w))
    return repr(float(w))


def write_edge_list(g: WeightedGraph, dest: Union[str, os.PathLike, TextIO]) -> None:
    """Write ``g`` in the edge-list format read by :func:`load_edge_list`.

    Isolated nodes cannot be expressed in this format and are lost.
    """
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh)
        return
    # ordering by the larger endpoint index keeps first-appearance order,
    # and hence node indices, stable on reload for most graphs
    lab = g.labels
    for i, j, w in sorted(g.index_edges(), key=lambda e: (e[1], e[0])):
        dest.write(f"{lab[i]} {lab[j]} {format_weight(w)}\n")


def dumps_edge_list(g: WeightedGraph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


# -- structural primitives ---------------------------------------------------

def weighted_degree(g: WeightedGraph, v: str) -> float:
    return sum(g.adj[g.index(v)].values())


def _component_ids(adj: Sequence[Dict[int, float]]) -> List[int]:
    comp = [-1] * len(adj)
    c = 0
    for s in range(len(adj)):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = c
                    stack.append(v)
        c += 1
    return comp


def connected_components(g: WeightedGraph) -> List[Set[str]]:
    """Connected components as label sets, ordered by smallest member index."""
    comp = _component_ids(g.adj)
    out: List[Set[str]] = [set() for _ in range(max(comp, default=-1) + 1)]
    for i, c in enumerate(comp):
        out[c].add(g.labels[i])
    return out


def number_connected_components(g: WeightedGraph) -> int:
    return max(_component_ids(g.adj), default=-1) + 1


def _connected_without(adj: Sequence[Dict[int, float]], a: int, b: int,
                       skip_edge: Optional[Tuple[int, int]] = None,
                       skip_node: Optional[int] = None) -> bool:
    """Bidirectional BFS: is ``b`` reachable from ``a`` avoiding an edge or node?

    Always expands the smaller frontier, so a negative answer costs about
    twice the size of the smaller side of the cut.
    """
    if a == b:
        return True
    if skip_edge is not None:
        x, y = skip_edge
    else:
        x = y = -1
    seen = ({a}, {b})
    frontier = ([a], [b])
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        mine, other = seen[side], seen[1 - side]
        nxt = []
        for u in frontier[side]:
            for v in adj[u]:
                if v == skip_node or (u == x and v == y) or (u == y and v == x):
                    continue
                if v in other:
                    return True
                if v not in mine:
                    mine.add(v)
                    nxt.append(v)
        frontier = (nxt, frontier[1]) if side == 0 else (frontier[0], nxt)
    return False


def is_bridge(g: WeightedGraph, e: Edge) -> bool:
    """True iff removing edge ``e`` increases the number of components."""
    u, v = e
    i, j = g.index(u), g.index(v)
    if j not in g.adj[i]:
        raise KeyError(f"unknown edge ({u}, {v})")
    return not _connected_without(g.adj, i, j, skip_edge=(i, j))


def bridges(g: WeightedGraph) -> Set[frozenset]:
    """All bridges at once (iterative low-link DFS)."""
    adj = g.adj
    n = len(adj)
    disc = [-1] * n
    low = [0] * n
    out: Set[frozenset] = set()
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if v == parent:
                    continue
                if disc[v] < 0:
                    disc[v] = low[v] = t
                    t += 1
                    stack.append((v, u, iter(adj[v])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    out.add(frozenset((g.labels[p], g.labels[u])))
    return out


def betweenness(g: WeightedGraph) -> Dict[str, float]:
    """Normalised node betweenness on hop-count shortest paths (Brandes).

    Values are divided by ``(n-1)(n-2)/2`` with ``n`` the node count of the
    whole graph, whatever its component structure.
    """
    n = g.number_of_nodes()
    if n < 3:
        return {lab: 0.0 for lab in g.labels}
    adj = g.adj
    cb = [0.0] * n
    for s in range(n):
        order = []
        preds: List[List[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    q.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    # each unordered pair was counted from both endpoints
    scale = 1.0 / ((n - 1) * (n - 2))
    return {g.labels[i]: cb[i] * scale for i in range(n)}


def induced_subgraph(g: WeightedGraph, keep: Iterable[str]) -> WeightedGraph:
    """Subgraph on ``keep`` with every edge of ``g`` inside it.

    Surviving nodes keep their relative index order, so tie-breaks made on
    the subgraph agree with those made on ``g``.
    """
    keep_idx = set()
    for lab in keep:
        keep_idx.add(g.index(lab))
    return _subgraph_by_index(g, sorted(keep_idx))


def _subgraph_by_index(g: WeightedGraph, order: Sequence[int]) -> WeightedGraph:
    remap = {old: new for new, old in enumerate(order)}
    adj = [{remap[j]: w for j, w in g.adj[i].items() if j in remap} for i in order]
    return WeightedGraph([g.labels[i] for i in order], adj, name=g.name)
