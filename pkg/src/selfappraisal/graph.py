"""Directed interaction graphs and strong connectivity.

Vertices are ``0 .. n-1``. An arc ``(i, j)`` means ``j`` is an outgoing
neighbor of ``i`` (``c_ij > 0``).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    arcs: frozenset

    def __post_init__(self):
        for i, j in self.arcs:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"arc {(i, j)} outside vertex range 0..{self.n - 1}")

    def successors(self, i):
        return sorted(j for (a, j) in self.arcs if a == i)

    def predecessors(self, j):
        return sorted(i for (i, b) in self.arcs if b == j)

    def out_degree(self, i):
        return sum(1 for (a, _) in self.arcs if a == i)

    def union(self, other: DirectedGraph) -> DirectedGraph:
        if other.n != self.n:
            raise ValueError("graphs have different vertex counts")
        return DirectedGraph(self.n, self.arcs | other.arcs)

    def strongly_connected_components(self):
        return tarjan_scc(self.n, self.adjacency())

    def is_strongly_connected(self) -> bool:
        comps = self.strongly_connected_components()
        return len(comps) == 1 and len(comps[0]) == self.n

    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for i, j in sorted(self.arcs):
            adj[i].append(j)
        return adj


def tarjan_scc(n, adjacency):
    """Strongly connected components of a graph on ``0..n-1``.

    Iterative Tarjan; components come out in reverse topological order, each
    as a sorted list.
    """
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack = []
    components = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            succ = adjacency[v]
            while pos < len(succ):
                w = succ[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if recurse:
                continue
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
    return components
