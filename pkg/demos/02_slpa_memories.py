"""
What SLPA remembers
===================

Two 6-cliques joined by a single edge. We look at raw label memories and
at how the threshold r turns them into memberships.
"""

# %%
from collections import Counter

from overlap_backbone import WeightedGraph
from overlap_backbone.community import propagate_labels, memberships_from_memory, detect_communities

edges = [(f"a{i}", f"a{j}", 1) for i in range(6) for j in range(i + 1, 6)]
edges += [(f"b{i}", f"b{j}", 1) for i in range(6) for j in range(i + 1, 6)]
edges.append(("a0", "b0", 1))
g = WeightedGraph.from_edges(edges, name="two-cliques")

memory = propagate_labels(g, T=100, seed=3)
for node in ("a0", "a3", "b0"):
    print(node, Counter(memory[g.index(node)]).most_common(3))

# %%
cover = detect_communities(g, seed=3)
print(cover.communities())

# %%
# The cliques are too clean to share anyone. Karate is messier: lower
# thresholds keep more labels per node, and each set is nested in the last.
from overlap_backbone import load_dataset

karate = load_dataset("karate")
memory = propagate_labels(karate, T=100, seed=0)
for r in (0.05, 0.1, 0.3, 0.5):
    kept = memberships_from_memory(memory, r)
    print(f"r={r}: {sum(len(k) > 1 for k in kept):2d} overlapping nodes,",
          f"max labels per node {max(len(k) for k in kept)}")
