"""Backbone extractors built on overlapping nodes, plus the disparity filter.

The two community-based extractors share the same pipeline:

1. pick a node set (overlapping nodes with either their neighbours or the hubs),
2. take the induced sub-network,
3. drop low-weight edges while no component splits,
4. drop low-strength nodes until at most ``floor(s * N)`` remain, never
   removing a node whose loss would split a component.
"""

from __future__ import annotations

import heapq
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

import numpy as np

from .community import CommunityCover, overlap_neighborhood, overlapping_nodes
from .graph import (
    WeightedGraph,
    _connected_without,
    _subgraph_by_index,
    induced_subgraph,
    number_connected_components,
    write_edge_list,
)

SKIP_BRIDGES = "skip-bridges"
HALT_ON_BRIDGE = "halt-on-bridge"
PRUNE_POLICIES = (SKIP_BRIDGES, HALT_ON_BRIDGE)

METHODS = ("ego", "hubs", "disparity")

# resolution of the alpha bisection in tune_alpha
ALPHA_RESOLUTION = 1e-6


class ExtractionError(ValueError):
    pass


class EmptyOverlapError(ExtractionError):
    def __init__(self) -> None:
        super().__init__("empty overlap: the cover has no overlapping nodes")


class TuningError(ExtractionError):
    def __init__(self, target: int, reachable: int):
        self.target = target
        self.reachable = reachable
        super().__init__(f"disparity backbone cannot reach {target} nodes; maximum reachable size is {reachable}")


@dataclass
class Backbone:
    graph: WeightedGraph
    method: str
    params: Dict[str, object] = field(default_factory=dict)
    source: str = ""
    info: Dict[str, object] = field(default_factory=dict)

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self.graph.labels

    def provenance(self) -> dict:
        return {
            "method": self.method,
            "s": self.params.get("s"),
            "alpha": self.params.get("alpha"),
            "policy": self.params.get("policy"),
            "seed": self.params.get("seed"),
            "source": self.source,
            "nodes": self.graph.number_of_nodes(),
            "edges": self.graph.number_of_edges(),
            "components": number_connected_components(self.graph),
        }

    def write(self, edge_path: Union[str, os.PathLike], json_path: Union[str, os.PathLike, None] = None) -> None:
        write_edge_list(self.graph, edge_path)
        if json_path is not None:
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(self.provenance(), fh, indent=2, sort_keys=True)
                fh.write("\n")


# -- Step 3: edge pruning ------------------------------------------------------

def prune_low_weight_edges(sub: WeightedGraph, policy: str = SKIP_BRIDGES) -> WeightedGraph:
    """Remove light edges, lightest first, without splitting any component.

    Edges are visited by ascending weight, ties by ``(i, j)`` index pair.
    ``skip-bridges`` removes every visited edge that is not a bridge at visit
    time; ``halt-on-bridge`` stops at the first edge that is.
    """
    if policy not in PRUNE_POLICIES:
        raise ValueError(f"unknown prune policy {policy!r}")
    adj = [dict(a) for a in sub.adj]
    order = sorted(sub.index_edges(), key=lambda e: (e[2], e[0], e[1]))
    for i, j, _ in order:
        del adj[i][j], adj[j][i]
        if _connected_without(adj, i, j):
            continue
        # bridge: put it back
        adj[i][j] = adj[j][i] = sub.adj[i][j]
        if policy == HALT_ON_BRIDGE:
            break
    return WeightedGraph(sub.labels, adj, name=sub.name)


# -- Step 4: size control ------------------------------------------------------

def _is_cut_vertex(adj, v: int) -> bool:
    nb = list(adj[v])
    if len(nb) < 2:
        return False
    a = nb[0]
    return any(not _connected_without(adj, a, b, skip_node=v) for b in nb[1:])


def enforce_size(sub: WeightedGraph, s: float, N: int,
                 reference: Optional[WeightedGraph] = None) -> WeightedGraph:
    """Trim ``sub`` to at most ``floor(s * N)`` nodes.

    The lowest-strength node goes first (ties: larger index first) unless it
    is a cut vertex, in which case the next candidate is tried. Strength is
    measured in the current sub-network after each removal, or taken from
    ``reference`` (typically the source graph) when given. Stops early if
    only cut vertices remain.
    """
    if not 0 < s <= 1:
        raise ValueError(f"s must lie in (0, 1], got {s!r}")
    target = math.floor(s * N)
    if target < 1:
        raise ValueError(f"size target floor({s} * {N}) is zero")
    n = sub.number_of_nodes()
    if n <= target:
        return sub

    adj = [dict(a) for a in sub.adj]
    if reference is not None:
        ref = reference.strengths()
        fixed = [float(ref[reference.index(lab)]) for lab in sub.labels]
    else:
        fixed = None

    def strength(v: int) -> float:
        return fixed[v] if fixed is not None else sum(adj[v].values())

    alive = [True] * n
    current = [strength(v) for v in range(n)]
    heap = [(current[v], -v) for v in range(n)]
    heapq.heapify(heap)
    remaining = n
    while remaining > target and heap:
        blocked = []
        removed = None
        while heap:
            d, negv = heapq.heappop(heap)
            v = -negv
            if not alive[v] or d != current[v]:
                continue
            if _is_cut_vertex(adj, v):
                blocked.append((d, negv))
                continue
            removed = v
            break
        for item in blocked:
            heapq.heappush(heap, item)
        if removed is None:
            break
        alive[removed] = False
        remaining -= 1
        touched = list(adj[removed])
        for u in touched:
            del adj[u][removed]
        adj[removed] = {}
        if fixed is None:
            for u in touched:
                current[u] = strength(u)
                heapq.heappush(heap, (current[u], -u))
    keep = [v for v in range(n) if alive[v]]
    trimmed = WeightedGraph(sub.labels, adj, name=sub.name)
    return _subgraph_by_index(trimmed, keep)


# -- community-based extractors ------------------------------------------------

def _check_cover(g: WeightedGraph, cover: CommunityCover) -> Set[str]:
    missing = [lab for lab in g.labels if lab not in cover.memberships]
    if missing:
        raise ExtractionError(f"cover does not include {len(missing)} node(s), e.g. {missing[0]!r}")
    ov = {v for v in overlapping_nodes(cover) if v in g}
    if not ov:
        raise EmptyOverlapError()
    return ov


def select_hubs(g: WeightedGraph, t: int, exclude: Iterable[str] = ()) -> List[str]:
    """The ``t`` strongest nodes outside ``exclude`` (ties: smaller index first)."""
    skip = {g.index(v) for v in exclude}
    st = g.strengths()
    ranked = sorted((i for i in range(g.number_of_nodes()) if i not in skip), key=lambda i: (-st[i], i))
    return [g.labels[i] for i in ranked[:t]]


def _finish(g: WeightedGraph, sub: WeightedGraph, method: str, s: float, policy: str,
            size_degree: str, cover: CommunityCover, info: Dict[str, object]) -> Backbone:
    if size_degree not in ("backbone", "source"):
        raise ValueError(f"size_degree must be 'backbone' or 'source', got {size_degree!r}")
    info["subnetwork_nodes"] = sub.number_of_nodes()
    info["subnetwork_edges"] = sub.number_of_edges()
    info["subnetwork_components"] = number_connected_components(sub)
    pruned = prune_low_weight_edges(sub, policy)
    info["pruned_edges"] = pruned.number_of_edges()
    final = enforce_size(pruned, s, g.number_of_nodes(), reference=g if size_degree == "source" else None)
    params = {"s": s, "alpha": None, "policy": policy, "seed": cover.params.get("seed")}
    if size_degree != "backbone":
        params["size_degree"] = size_degree
    return Backbone(final, method, params, source=g.name, info=info)


def ego_backbone(g: WeightedGraph, cover: CommunityCover, s: float = 0.3, policy: str = SKIP_BRIDGES,
                 size_degree: str = "backbone") -> Backbone:
    """Backbone grown from the overlapping nodes and their neighbours."""
    ov = _check_cover(g, cover)
    sets = overlap_neighborhood(g, ov)
    sub = induced_subgraph(g, sets.overlapping | sets.neighbors)
    info = {"m": sets.m, "k": sets.k}
    return _finish(g, sub, "ego", s, policy, size_degree, cover, info)


def hubs_backbone(g: WeightedGraph, cover: CommunityCover, s: float = 0.3, policy: str = SKIP_BRIDGES,
                  size_degree: str = "backbone") -> Backbone:
    """Backbone grown from the overlapping nodes and as many hubs as they have neighbours.

    Hubs are drawn from the non-overlapping nodes, strongest first.
    """
    ov = _check_cover(g, cover)
    sets = overlap_neighborhood(g, ov)
    hubs = select_hubs(g, sets.k, exclude=sets.overlapping)
    sub = induced_subgraph(g, set(sets.overlapping) | set(hubs))
    info = {"m": sets.m, "k": sets.k, "t": len(hubs)}
    return _finish(g, sub, "hubs", s, policy, size_degree, cover, info)


# -- disparity filter ----------------------------------------------------------

def disparity_significance(g: WeightedGraph) -> Dict[Tuple[int, int], Tuple[float, float]]:
    """Per-edge p-values under the uniform null model, seen from each endpoint.

    Maps ``(i, j)`` with ``i < j`` to ``(alpha from i, alpha from j)``.
    A node of degree one cannot vouch for its only edge, so its side is 1.
    """
    st = g.strengths()
    deg = g.degrees()
    out = {}
    for i, j, w in g.index_edges():
        a_i = (1.0 - w / st[i]) ** (deg[i] - 1) if deg[i] > 1 else 1.0
        a_j = (1.0 - w / st[j]) ** (deg[j] - 1) if deg[j] > 1 else 1.0
        out[(i, j)] = (float(a_i), float(a_j))
    return out


def _disparity_graph(g: WeightedGraph, sig, alpha: float) -> WeightedGraph:
    kept = [(i, j) for (i, j), (a_i, a_j) in sig.items() if a_i < alpha or a_j < alpha]
    nodes = sorted({v for e in kept for v in e})
    remap = {old: new for new, old in enumerate(nodes)}
    adj: List[Dict[int, float]] = [{} for _ in nodes]
    for i, j in kept:
        w = g.adj[i][j]
        adj[remap[i]][remap[j]] = w
        adj[remap[j]][remap[i]] = w
    return WeightedGraph([g.labels[v] for v in nodes], adj, name=g.name)


def disparity_filter(g: WeightedGraph, alpha: float) -> Backbone:
    """Keep the edges significant at level ``alpha`` for at least one endpoint."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    sig = disparity_significance(g)
    return Backbone(_disparity_graph(g, sig, alpha), "disparity", {"s": None, "alpha": alpha, "policy": None,
                                                                   "seed": None}, source=g.name)


def tune_alpha(g: WeightedGraph, target_nodes: int) -> Tuple[float, Backbone]:
    """Bisect alpha for the smallest disparity backbone with at least ``target_nodes`` nodes.

    The backbone size only grows with alpha, so bisection is exact up to
    :data:`ALPHA_RESOLUTION`. When the size jumps past the target the
    overshoot is stored in ``backbone.info["gap"]``.
    """
    if target_nodes < 1 or target_nodes > g.number_of_nodes():
        raise ValueError(f"target_nodes must lie in [1, {g.number_of_nodes()}], got {target_nodes}")
    sig = disparity_significance(g)

    def size(alpha: float) -> int:
        nodes: Set[int] = set()
        for (i, j), (a_i, a_j) in sig.items():
            if a_i < alpha or a_j < alpha:
                nodes.add(i)
                nodes.add(j)
        return len(nodes)

    hi = float(np.nextafter(1.0, 0.0))
    reachable = size(hi)
    if reachable < target_nodes:
        raise TuningError(target_nodes, reachable)
    lo = 0.0
    while hi - lo > ALPHA_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if size(mid) >= target_nodes:
            hi = mid
        else:
            lo = mid
    bb = Backbone(_disparity_graph(g, sig, hi), "disparity",
                  {"s": None, "alpha": hi, "policy": None, "seed": None}, source=g.name)
    bb.info["target_nodes"] = target_nodes
    bb.info["gap"] = bb.graph.number_of_nodes() - target_nodes
    return hi, bb
