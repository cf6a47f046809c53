"""Overlapping communities via speaker-listener label propagation (SLPA).

Every node keeps a memory of labels. In each of ``T`` sweeps the nodes listen
in a freshly shuffled order; each neighbour speaks a label drawn from its own
memory with probability proportional to that label's count, and the listener
stores the most common label it heard. Afterwards a node belongs to every
community whose label fills at least a fraction ``r`` of its memory.

Speaker choice ignores edge weights.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Union

import numpy as np

from .graph import WeightedGraph

DEFAULT_ITERATIONS = 100
DEFAULT_THRESHOLD = 0.3
TIE_BREAKS = ("random", "smallest")


class CommunityError(ValueError):
    pass


@dataclass(frozen=True)
class CommunityCover:
    """Node label -> set of community ids (dense, ``0..C-1``)."""

    memberships: Mapping[str, FrozenSet[int]]
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def n_communities(self) -> int:
        labels: Set[int] = set()
        for ls in self.memberships.values():
            labels.update(ls)
        return len(labels)

    def communities(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for node, ls in self.memberships.items():
            for c in ls:
                out.setdefault(c, []).append(node)
        return {c: out[c] for c in sorted(out)}

    def covers(self, g: WeightedGraph) -> bool:
        return all(lab in self.memberships and self.memberships[lab] for lab in g.labels)


@dataclass(frozen=True)
class OverlapSets:
    overlapping: FrozenSet[str]
    neighbors: FrozenSet[str]

    @property
    def m(self) -> int:
        return len(self.overlapping)

    @property
    def k(self) -> int:
        return len(self.neighbors)


def propagate_labels(g: WeightedGraph, T: int = DEFAULT_ITERATIONS, seed: int = 0,
                     tie_break: str = "random") -> List[List[int]]:
    """Run the propagation phase and return each node's label memory.

    Labels are node indices. The memory of node ``i`` starts as ``[i]`` and
    grows by at most one label per sweep (isolated nodes hear nothing).
    When several labels are heard equally often the listener picks one of
    them uniformly at random (``tie_break="random"``, driven by ``seed``) or
    the smallest label id (``tie_break="smallest"``).
    """
    if int(T) != T or T < 1:
        raise CommunityError(f"T must be a positive integer, got {T!r}")
    if tie_break not in TIE_BREAKS:
        raise CommunityError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
    smallest = tie_break == "smallest"
    n = g.number_of_nodes()
    if n == 0:
        raise CommunityError("cannot detect communities on an empty graph")
    rng = np.random.default_rng(seed)
    nbrs = [sorted(a) for a in g.adj]
    total_slots = sum(len(a) for a in nbrs)
    memory: List[List[int]] = [[i] for i in range(n)]

    for _ in range(int(T)):
        order = rng.permutation(n).tolist()
        draws = rng.random(total_slots).tolist()
        ties = rng.random(n).tolist()
        k = 0
        for listener in order:
            heard: Dict[int, int] = {}
            for speaker in nbrs[listener]:
                mem = memory[speaker]
                lab = mem[int(draws[k] * len(mem))]
                k += 1
                heard[lab] = heard.get(lab, 0) + 1
            if not heard:
                continue
            top = max(heard.values())
            best = sorted(lab for lab, c in heard.items() if c == top)
            if len(best) == 1 or smallest:
                memory[listener].append(best[0])
            else:
                memory[listener].append(best[int(ties[listener] * len(best))])
    return memory


def memberships_from_memory(memory: Sequence[Sequence[int]], r: float) -> List[FrozenSet[int]]:
    """Labels holding at least fraction ``r`` of each memory (raw label ids).

    A node with no label over the threshold keeps its most frequent one
    (ties to the smallest label id).
    """
    if not 0 < r < 1:
        raise CommunityError(f"threshold r must lie in (0, 1), got {r!r}")
    out = []
    for mem in memory:
        counts: Dict[int, int] = {}
        for lab in mem:
            counts[lab] = counts.get(lab, 0) + 1
        size = len(mem)
        kept = frozenset(lab for lab, c in counts.items() if c >= r * size)
        if not kept:
            top = max(counts.values())
            kept = frozenset([min(lab for lab, c in counts.items() if c == top)])
        out.append(kept)
    return out


def _canonical(g: WeightedGraph, raw: Sequence[FrozenSet[int]], params: Dict[str, object]) -> CommunityCover:
    # ids assigned in order of first appearance scanning nodes by index
    remap: Dict[int, int] = {}
    for ls in raw:
        for lab in sorted(ls):
            if lab not in remap:
                remap[lab] = len(remap)
    memberships = {g.labels[i]: frozenset(remap[lab] for lab in ls) for i, ls in enumerate(raw)}
    return CommunityCover(memberships, params)


def detect_communities(g: WeightedGraph, T: int = DEFAULT_ITERATIONS, r: float = DEFAULT_THRESHOLD,
                       seed: int = 0, tie_break: str = "random") -> CommunityCover:
    """Overlapping community cover of ``g``; identical arguments give identical covers."""
    if not 0 < r < 1:
        raise CommunityError(f"threshold r must lie in (0, 1), got {r!r}")
    memory = propagate_labels(g, T, seed, tie_break)
    raw = memberships_from_memory(memory, r)
    params = {"T": int(T), "r": float(r), "seed": int(seed)}
    if tie_break != "random":
        params["tie_break"] = tie_break
    return _canonical(g, raw, params)


def overlapping_nodes(cover: CommunityCover) -> Set[str]:
    return {node for node, ls in cover.memberships.items() if len(ls) >= 2}


def overlap_neighborhood(g: WeightedGraph, overlapping: Iterable[str]) -> OverlapSets:
    """Overlapping nodes plus their one-step neighbours that are not overlapping."""
    ov = {g.index(v) for v in overlapping}
    nb: Set[int] = set()
    for i in ov:
        nb.update(g.adj[i])
    nb -= ov
    return OverlapSets(frozenset(g.labels[i] for i in ov), frozenset(g.labels[i] for i in nb))


# -- JSON interchange --------------------------------------------------------

def cover_to_dict(cover: CommunityCover, g: Optional[WeightedGraph] = None) -> dict:
    comms = cover.communities()
    if g is not None:
        pos = {lab: i for i, lab in enumerate(g.labels)}
        comms = {c: sorted(nodes, key=lambda x: pos.get(x, len(pos))) for c, nodes in comms.items()}
    return {
        "params": dict(cover.params),
        "communities": {str(c): list(nodes) for c, nodes in comms.items()},
    }


def cover_from_dict(data: Mapping) -> CommunityCover:
    if "communities" not in data:
        raise CommunityError("cover JSON needs a 'communities' object")
    members: Dict[str, Set[int]] = {}
    keys = list(data["communities"])
    try:
        keys.sort(key=lambda k: (0, int(k), "") if str(k).lstrip("-").isdigit() else (1, 0, str(k)))
    except TypeError:
        pass
    for new_id, key in enumerate(keys):
        for node in data["communities"][key]:
            members.setdefault(str(node), set()).add(new_id)
    return CommunityCover({k: frozenset(v) for k, v in members.items()}, dict(data.get("params", {})))


def write_cover(cover: CommunityCover, path: Union[str, os.PathLike], g: Optional[WeightedGraph] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cover_to_dict(cover, g), fh, indent=2)
        fh.write("\n")


def read_cover(path: Union[str, os.PathLike]) -> CommunityCover:
    with open(path, encoding="utf-8") as fh:
        return cover_from_dict(json.load(fh))
