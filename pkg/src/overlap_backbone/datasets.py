"""Small weighted networks bundled with the package."""

from importlib import resources

from .graph import WeightedGraph, load_edge_list

AVAILABLE = {
    "karate": "karate.txt",
    "lesmis": "lesmis.txt",
}


def load_dataset(name: str) -> WeightedGraph:
    """Load a bundled network: ``"karate"`` (N=34) or ``"lesmis"`` (N=77)."""
    try:
        fname = AVAILABLE[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; choose from {sorted(AVAILABLE)}") from None
    with resources.files(__package__).joinpath("data", fname).open(encoding="utf-8") as fh:
        return load_edge_list(fh, name=name)


def dataset_path(name: str):
    return resources.files(__package__).joinpath("data", AVAILABLE[name])


def planted_partition(n_nodes: int = 5000, n_edges: int = 20000, n_groups: int = 50, p_in: float = 0.8,
                      seed: int = 0) -> WeightedGraph:
    """Random weighted graph with planted groups, for scale checks.

    Each edge stays inside a group with probability ``p_in``; weights are
    ``1 + Poisson(2)`` so they look like co-occurrence counts.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    group = rng.integers(n_groups, size=n_nodes)
    members = [np.flatnonzero(group == c) for c in range(n_groups)]
    seen = set()
    edges = []
    while len(edges) < n_edges:
        u = int(rng.integers(n_nodes))
        if rng.random() < p_in:
            pool = members[group[u]]
            v = int(pool[rng.integers(len(pool))])
        else:
            v = int(rng.integers(n_nodes))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append((f"n{u}", f"n{v}", float(1 + rng.poisson(2))))
    return WeightedGraph.from_edges(edges, nodes=[f"n{i}" for i in range(n_nodes)],
                                    name=f"planted_{n_nodes}_{n_edges}")
