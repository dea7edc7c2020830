"""Directed-graph algorithms behind the global network metrics.

Everything here is weight-agnostic: parallel edges collapse, self-loops are
dropped, and metrics that call for an undirected view use the simple
undirected projection. Graphs in this package are single-article sharing
cascades, which are small and sparse, so distances are computed exactly by
breadth-first search with no approximation.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Optional


class DirectedGraph:
    """Simple directed graph over arbitrary hashable node ids.

    Duplicate edges collapse and self-loops are silently dropped, matching
    the set-based metric definitions used downstream.
    """

    __slots__ = ("_succ", "_pred", "_und")

    def __init__(
        self,
        edges: Iterable[tuple[Hashable, Hashable]] = (),
        nodes: Iterable[Hashable] = (),
    ) -> None:
        self._succ: dict = {}
        self._pred: dict = {}
        for n in nodes:
            self.add_node(n)
        for u, v in edges:
            self.add_edge(u, v)
        self._und: Optional[dict] = None

    def add_node(self, n: Hashable) -> None:
        if n not in self._succ:
            self._succ[n] = set()
            self._pred[n] = set()
            self._und = None

    def add_edge(self, u: Hashable, v: Hashable) -> None:
        if u == v:
            return
        self.add_node(u)
        self.add_node(v)
        self._succ[u].add(v)
        self._pred[v].add(u)
        self._und = None

    @property
    def nodes(self):
        return self._succ.keys()

    def number_of_nodes(self) -> int:
        return len(self._succ)

    def number_of_edges(self) -> int:
        return sum(len(s) for s in self._succ.values())

    def successors(self, n: Hashable) -> set:
        return self._succ[n]

    def predecessors(self, n: Hashable) -> set:
        return self._pred[n]

    def total_degree(self, n: Hashable) -> int:
        """In-degree plus out-degree on the simple directed graph."""
        return len(self._succ[n]) + len(self._pred[n])

    def undirected_adj(self) -> dict:
        """Adjacency of the undirected simple projection (cached)."""
        if self._und is None:
            self._und = {n: self._succ[n] | self._pred[n] for n in self._succ}
        return self._und


def strongly_connected_components(g: DirectedGraph) -> list[set]:
    """Partition nodes into maximal strongly connected components.

    Iterative Tarjan; linear in nodes + edges. Cascade chains can be long,
    so no recursion.
    """
    index: dict = {}
    lowlink: dict = {}
    on_stack: set = set()
    stack: list = []
    components: list[set] = []
    counter = 0

    for root in g.nodes:
        if root in index:
            continue
        work = [(root, iter(g.successors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, succ_iter = work[-1]
            advanced = False
            for w in succ_iter:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def weakly_connected_components(g: DirectedGraph) -> list[set]:
    """Partition nodes into connected components of the undirected projection."""
    und = g.undirected_adj()
    seen: set = set()
    components: list[set] = []
    for start in g.nodes:
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in und[u]:
                if v not in comp:
                    comp.add(v)
                    seen.add(v)
                    queue.append(v)
        components.append(comp)
    return components


def undirected_distance_stats(
    g: DirectedGraph, nodes: Optional[Iterable[Hashable]] = None
) -> tuple[int, int]:
    """All-pairs BFS over the undirected projection restricted to ``nodes``.

    Returns ``(max_distance, sum_of_ordered_pair_distances)``. The node set
    must induce a connected undirected subgraph (a single node counts as
    connected); otherwise ValueError. Shared by the diameter and structural
    virality metrics so the component is swept once per caller.
    """
    und = g.undirected_adj()
    if nodes is None:
        members = set(und)
    else:
        members = set(nodes)
        for n in members:
            if n not in und:
                raise ValueError(f"node {n!r} not in graph")
    n = len(members)
    if n == 0:
        raise ValueError("empty node set")

    restricted = len(members) != len(und)
    max_dist = 0
    total = 0
    for src in members:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = dist[u]
            for v in und[u]:
                if v in dist or (restricted and v not in members):
                    continue
                dist[v] = du + 1
                queue.append(v)
        if len(dist) < n:
            raise ValueError("node set does not induce a connected subgraph")
        far = max(dist.values())
        if far > max_dist:
            max_dist = far
        total += sum(dist.values())
    return max_dist, total


def diameter_undirected(
    g: DirectedGraph, nodes: Optional[Iterable[Hashable]] = None
) -> int:
    """Largest shortest-path length between any pair, ignoring directions.

    0 for a single node; ValueError if the node set is disconnected.
    """
    max_dist, _ = undirected_distance_stats(g, nodes)
    return max_dist


def structural_virality(
    g: DirectedGraph, nodes: Optional[Iterable[Hashable]] = None
) -> float:
    """Mean shortest-path distance over all ordered node pairs, undirected.

    Equals the Wiener index scaled by 2/(|V|(|V|-1)); defined as 0 for a
    single node. ValueError if the node set is disconnected.
    """
    und = g.undirected_adj()
    members = set(und) if nodes is None else set(nodes)
    n = len(members)
    if n == 1:
        return 0.0
    _, total = undirected_distance_stats(g, members)
    return total / (n * (n - 1))


def average_clustering(g: DirectedGraph) -> float:
    """Mean local clustering coefficient on the undirected simple projection.

    Nodes with fewer than two neighbours contribute 0; an empty graph scores 0.
    """
    und = g.undirected_adj()
    n = len(und)
    if n == 0:
        return 0.0
    total = 0.0
    for nbrs in und.values():
        k = len(nbrs)
        if k < 2:
            continue
        # twice the number of edges among the neighbours; no self-loops, so
        # v itself never shows up in the intersection
        links2 = 0
        for v in nbrs:
            vn = und[v]
            small, large = (vn, nbrs) if len(vn) < len(nbrs) else (nbrs, vn)
            links2 += sum(1 for w in small if w in large)
        total += links2 / (k * (k - 1))
    return total / n


def main_kcore_number(g: DirectedGraph) -> int:
    """Largest k such that some nonempty subgraph has minimum total degree >= k.

    Total degree is in-degree plus out-degree on the simple directed graph
    (a reciprocal pair contributes 2). Computed by iterative peeling; 0 for
    an empty graph.
    """
    alive = set(g.nodes)
    if not alive:
        return 0
    deg = {n: g.total_degree(n) for n in alive}
    k = 0
    while alive:
        k_try = k + 1
        queue = deque(n for n in alive if deg[n] < k_try)
        while queue:
            u = queue.popleft()
            if u not in alive:
                continue
            alive.discard(u)
            for v in g.successors(u):
                if v in alive:
                    deg[v] -= 1
                    if deg[v] == k_try - 1:
                        queue.append(v)
            for v in g.predecessors(u):
                if v in alive:
                    deg[v] -= 1
                    if deg[v] == k_try - 1:
                        queue.append(v)
        if alive:
            k = k_try
    return k


def density(g: DirectedGraph) -> float:
    """|E| / (|V| (|V|-1)) with each directed pair counted once; 0 when |V| <= 1."""
    n = g.number_of_nodes()
    if n <= 1:
        return 0.0
    return g.number_of_edges() / (n * (n - 1))
