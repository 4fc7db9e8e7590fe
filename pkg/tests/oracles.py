"""Independent reference implementations used as test oracles.

Written separately from the library code and deliberately naive.
"""

from __future__ import annotations

from itertools import combinations, permutations

# Link kind permitted for each (start, arrowhead) element kind pair, typed in
# from the iStar 2.0 link table row by row. Refinement is listed child first.
TRUTH_TABLE = {
    ("goal", "goal"): "refinement",
    ("goal", "quality"): "contribution",
    ("goal", "task"): "refinement",
    ("goal", "resource"): None,
    ("quality", "goal"): "qualification",
    ("quality", "quality"): "contribution",
    ("quality", "task"): "qualification",
    ("quality", "resource"): "qualification",
    ("task", "goal"): "refinement",
    ("task", "quality"): "contribution",
    ("task", "task"): "refinement",
    ("task", "resource"): None,
    ("resource", "goal"): None,
    ("resource", "quality"): "contribution",
    ("resource", "task"): "neededBy",
    ("resource", "resource"): None,
}


def cycles_by_permutation(nodes, edges) -> set[tuple]:
    """Every simple cycle, found by trying each ordering of each node subset.

    Cycles are returned rotated to start at their smallest node. Only usable
    for a handful of nodes.
    """
    edges = set(edges)
    nodes = sorted(nodes)
    found = set()
    for k in range(1, len(nodes) + 1):
        for subset in combinations(nodes, k):
            head, rest = subset[0], subset[1:]
            for order in permutations(rest):
                cyc = (head, *order)
                if all((cyc[i], cyc[(i + 1) % k]) in edges for i in range(k)):
                    found.add(cyc)
    return found


def cycles_by_path_search(graph: dict) -> set[tuple]:
    """Every simple cycle, by extending all simple paths from each start node.

    Paths from ``s`` only visit nodes larger than ``s``, so each cycle is met
    once, rotated to its smallest node.
    """
    found = set()
    for s in sorted(graph):
        stack = [(s, (s,))]
        while stack:
            v, path = stack.pop()
            for w in graph.get(v, ()):
                if w == s:
                    found.add(path)
                elif w > s and w not in path:
                    stack.append((w, path + (w,)))
    return found
