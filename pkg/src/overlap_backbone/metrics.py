"""Similarity, correlation and effectiveness measures for comparing backbones."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, List, NamedTuple, Sequence, Union

import numpy as np

from .graph import WeightedGraph, betweenness


class MetricError(ValueError):
    pass


class RankedEntry(NamedTuple):
    node: str
    weighted_degree: float
    rank: int


class RankedNodeList(List[RankedEntry]):
    """Nodes by decreasing weighted degree with dense tie ranks."""

    @property
    def nodes(self) -> List[str]:
        return [e.node for e in self]

    @property
    def degrees(self) -> List[float]:
        return [e.weighted_degree for e in self]

    @property
    def ranks(self) -> List[int]:
        return [e.rank for e in self]


@dataclass(frozen=True)
class EffectivenessSummary:
    avg_betweenness: float
    avg_weighted_degree: float
    avg_link_weight: float


def rank_nodes(g: WeightedGraph, nodes: Iterable[str]) -> RankedNodeList:
    """Rank ``nodes`` by their weighted degree in ``g``.

    Order is decreasing degree, then increasing node index in ``g``. Equal
    degrees share a rank and ranks step by one per distinct degree.
    """
    st = g.strengths()
    idx = sorted({g.index(v) for v in nodes}, key=lambda i: (-st[i], i))
    out = RankedNodeList()
    rank = 0
    prev = None
    for i in idx:
        d = float(st[i])
        if d != prev:
            rank += 1
            prev = d
        out.append(RankedEntry(g.labels[i], d, rank))
    return out


def common_nodes_fraction(X: Iterable[Hashable], Y: Iterable[Hashable]) -> float:
    """Share of common nodes, ``|X & Y| / n``.

    Sizes should match; otherwise ``n`` is the larger size.
    """
    xs, ys = set(X), set(Y)
    n = max(len(xs), len(ys))
    if n == 0:
        raise MetricError("common-node fraction of two empty sets is undefined")
    return len(xs & ys) / n


def top_preservation(g_source: WeightedGraph, backbone, fraction: float = 0.1, rank_by: str = "backbone") -> float:
    """Share of the source's top ``t = round(fraction * N)`` nodes found among the backbone's top ``t``.

    With ``rank_by="backbone"`` the backbone's nodes are ranked by their
    weighted degree inside the backbone; ``rank_by="source"`` ranks them by
    their degree in ``g_source``, which reduces to asking how many source
    hubs survive. A backbone smaller than ``t`` contributes all its nodes.
    """
    if not 0 < fraction <= 1:
        raise MetricError(f"fraction must lie in (0, 1], got {fraction!r}")
    if rank_by not in ("backbone", "source"):
        raise MetricError(f"rank_by must be 'backbone' or 'source', got {rank_by!r}")
    bg = getattr(backbone, "graph", backbone)
    t = int(round(fraction * g_source.number_of_nodes()))
    if t < 1:
        raise MetricError("top set is empty; increase fraction")
    top_src = set(rank_nodes(g_source, g_source.labels).nodes[:t])
    ranker = bg if rank_by == "backbone" else g_source
    top_bb = set(rank_nodes(ranker, bg.labels).nodes[:t])
    return len(top_src & top_bb) / t


def _as_ids(x) -> List[Hashable]:
    if isinstance(x, RankedNodeList):
        return x.nodes
    return list(x)


def rank_biased_overlap(X: Union[RankedNodeList, Sequence[Hashable]], Y: Union[RankedNodeList, Sequence[Hashable]],
                        p: float = 0.9) -> float:
    """Rank-biased overlap truncated at the shorter list and renormalised.

    ``sum_d w_d * A_d / sum_d w_d`` over ``d = 1..D``, with
    ``w_d = (1 - p) p**(d - 1)``, ``A_d`` the overlap of the depth-``d``
    prefixes and ``D = min(len(X), len(Y))``. Identical lists score 1.
    """
    if not 0 < p < 1:
        raise MetricError(f"p must lie in (0, 1), got {p!r}")
    xs, ys = _as_ids(X), _as_ids(Y)
    D = min(len(xs), len(ys))
    if D == 0:
        raise MetricError("rank-biased overlap needs non-empty lists")
    seen_x, seen_y = set(), set()
    overlap = 0
    num = 0.0
    den = 0.0
    w = 1.0 - p
    for d in range(1, D + 1):
        a, b = xs[d - 1], ys[d - 1]
        if a == b:
            overlap += 1
        else:
            overlap += (a in seen_y) + (b in seen_x)
        seen_x.add(a)
        seen_y.add(b)
        num += w * overlap / d
        den += w
        w *= p
    return num / den


def pearson(X: Sequence[float], Y: Sequence[float]) -> float:
    x = np.asarray(X, dtype=float)
    y = np.asarray(Y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricError("pearson needs two 1-d sequences of equal length")
    if x.size < 2:
        raise MetricError("pearson needs at least two values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise MetricError("pearson is undefined for a constant sequence")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def kendall_tau(X: Sequence[float], Y: Sequence[float]) -> float:
    """``(n_c - n_d) / (n (n - 1) / 2)``; pairs tied in either sequence count as neither."""
    x = np.asarray(X, dtype=float)
    y = np.asarray(Y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricError("kendall_tau needs two 1-d sequences of equal length")
    n = x.size
    if n < 2:
        raise MetricError("kendall_tau needs at least two values")
    s = 0
    # row-by-row keeps memory linear in n
    for i in range(n - 1):
        s += int(np.sum(np.sign(x[i + 1:] - x[i]) * np.sign(y[i + 1:] - y[i])))
    return s / (0.5 * n * (n - 1))


def effectiveness_summary(b) -> EffectivenessSummary:
    """Mean betweenness, mean weighted degree and mean link weight of a backbone."""
    g = getattr(b, "graph", b)
    n = g.number_of_nodes()
    if n == 0:
        raise MetricError("effectiveness of an empty backbone is undefined")
    m = g.number_of_edges()
    if m == 0:
        raise MetricError("average link weight of an edgeless backbone is undefined")
    bc = betweenness(g)
    total_w = math.fsum(w for _, _, w in g.index_edges())
    return EffectivenessSummary(
        avg_betweenness=math.fsum(bc.values()) / n,
        avg_weighted_degree=math.fsum(g.strengths()) / n,
        avg_link_weight=total_w / m,
    )
