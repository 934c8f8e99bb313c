"""Directed multigraph of phase-space cells and its invariant-set machinery.

Node sets are plain ``frozenset`` objects of node ids.  Everything here is a
pure function of an immutable :class:`FlowGraph`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidIsolation, NotInvariant, NotIsolated

NodeSet = frozenset


class Edge(NamedTuple):
    tail: int
    head: int
    weight: tuple  # tuple of Fraction, length basis_rank


class FlowGraph:
    """Directed multigraph whose edges carry rational weight vectors.

    Parallel edges with identical ``(tail, head, weight)`` are merged; the
    first occurrence fixes the position.  Node and edge order is insertion
    order.
    """

    __slots__ = ("nodes", "coords", "edges", "basis_rank", "_index", "_out", "_in")

    def __init__(self, nodes: Iterable[int], edges: Iterable = (), basis_rank: int = 0,
                 coords: dict | None = None):
        if basis_rank < 0:
            raise ValueError("basis_rank must be nonnegative")
        node_list = []
        index = {}
        for v in nodes:
            v = int(v)
            if v in index:
                continue
            index[v] = len(node_list)
            node_list.append(v)
        self.nodes = tuple(node_list)
        self._index = index
        self.basis_rank = int(basis_rank)
        self.coords = None if coords is None else {int(k): tuple(c) for k, c in coords.items()}

        seen = set()
        edge_list = []
        for e in edges:
            tail, head, weight = e
            tail, head = int(tail), int(head)
            if tail not in index or head not in index:
                raise ValueError(f"edge ({tail}, {head}) has an undeclared endpoint")
            weight = tuple(Fraction(x) for x in weight)
            if len(weight) != self.basis_rank:
                raise ValueError(
                    f"edge ({tail}, {head}) weight has length {len(weight)}, "
                    f"expected {self.basis_rank}")
            key = (tail, head, weight)
            if key in seen:
                continue
            seen.add(key)
            edge_list.append(Edge(tail, head, weight))
        self.edges = tuple(edge_list)

        out = {v: [] for v in self.nodes}
        inc = {v: [] for v in self.nodes}
        for i, e in enumerate(self.edges):
            out[e.tail].append(i)
            inc[e.head].append(i)
        self._out = {v: tuple(ix) for v, ix in out.items()}
        self._in = {v: tuple(ix) for v, ix in inc.items()}

    def __repr__(self):
        return (f"FlowGraph(n_nodes={len(self.nodes)}, n_edges={len(self.edges)}, "
                f"basis_rank={self.basis_rank})")

    def __eq__(self, other):
        if not isinstance(other, FlowGraph):
            return NotImplemented
        return (self.nodes == other.nodes and self.edges == other.edges
                and self.basis_rank == other.basis_rank and self.coords == other.coords)

    def __hash__(self):
        return hash((self.nodes, self.edges, self.basis_rank))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_node(self, v) -> bool:
        return v in self._index

    def out_edges(self, v) -> tuple:
        return self._out[v]

    def in_edges(self, v) -> tuple:
        return self._in[v]

    def successors(self, v):
        return [self.edges[i].head for i in self._out[v]]

    def predecessors(self, v):
        return [self.edges[i].tail for i in self._in[v]]

    def subgraph_edges(self, nodes) -> list:
        """Indices of edges with both endpoints in ``nodes``."""
        nodes = frozenset(nodes)
        return [i for i, e in enumerate(self.edges) if e.tail in nodes and e.head in nodes]

    def without_edges(self, drop) -> "FlowGraph":
        drop = set(drop)
        return FlowGraph(self.nodes, (e for i, e in enumerate(self.edges) if i not in drop),
                         self.basis_rank, self.coords)

    def canonical(self) -> "FlowGraph":
        """Same graph with nodes sorted and edges sorted by ``(tail, head, weight)``."""
        return FlowGraph(sorted(self.nodes), sorted(self.edges), self.basis_rank, self.coords)


@dataclass(frozen=True)
class IsolatedInvariantSet:
    """An invariant node set ``z`` together with an isolating block.

    Construction does not validate; use :func:`check_isolation`.
    """
    z: frozenset
    block: frozenset

    def __post_init__(self):
        object.__setattr__(self, "z", frozenset(self.z))
        object.__setattr__(self, "block", frozenset(self.block))


def _check_subset(g: FlowGraph, s, name="node set"):
    bad = [v for v in s if not g.has_node(v)]
    if bad:
        raise ValueError(f"{name} contains unknown nodes {sorted(bad)[:5]}")


def scc(g: FlowGraph) -> list[list[int]]:
    """Strongly connected components in topological order of the condensation.

    Every edge between distinct components goes from an earlier to a later
    component.  Nodes inside a component are sorted; ties between
    incomparable components are broken deterministically by the DFS order
    over sorted node ids.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = 0
    succ = {v: sorted(set(g.successors(v))) for v in g.nodes}

    for root in sorted(g.nodes):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    # Tarjan emits sinks first.
    comps.reverse()
    return comps


def is_invariant(g: FlowGraph, s) -> bool:
    s = frozenset(s)
    for v in s:
        if not any(g.edges[i].head in s for i in g.out_edges(v)):
            return False
        if not any(g.edges[i].tail in s for i in g.in_edges(v)):
            return False
    return True


def inv(g: FlowGraph, b) -> frozenset:
    """Maximal invariant subset of ``b``.

    A set is invariant when each of its nodes has an out-neighbour and an
    in-neighbour inside the set.  Computed by pruning to a fixpoint.
    """
    alive = set(b)
    _check_subset(g, alive)
    outdeg = {v: 0 for v in alive}
    indeg = {v: 0 for v in alive}
    for v in alive:
        for i in g.out_edges(v):
            if g.edges[i].head in alive:
                outdeg[v] += 1
                indeg[g.edges[i].head] += 1
    queue = deque(sorted(v for v in alive if outdeg[v] == 0 or indeg[v] == 0))
    removed = set()
    while queue:
        v = queue.popleft()
        if v in removed:
            continue
        removed.add(v)
        alive.discard(v)
        for i in g.out_edges(v):
            w = g.edges[i].head
            if w in alive:
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        for i in g.in_edges(v):
            u = g.edges[i].tail
            if u in alive:
                outdeg[u] -= 1
                if outdeg[u] == 0:
                    queue.append(u)
    return frozenset(alive)


def is_isolating_block(g: FlowGraph, b, z) -> bool:
    z = frozenset(z)
    return is_invariant(g, z) and inv(g, b) == z


def check_isolation(g: FlowGraph, ziso: IsolatedInvariantSet) -> None:
    """Raise if ``ziso`` is not an isolated invariant set with its block."""
    _check_subset(g, ziso.block, "block")
    if not ziso.z <= ziso.block:
        raise InvalidIsolation("z is not contained in the block")
    got = inv(g, ziso.block)
    if got != ziso.z:
        raise InvalidIsolation(
            f"Inv(block) has {len(got)} nodes, z has {len(ziso.z)}; "
            f"extra nodes {sorted(got - ziso.z)[:10]}, missing {sorted(ziso.z - got)[:10]}")


def neighborhood(g: FlowGraph, s, radius: int) -> frozenset:
    """``s`` together with all nodes within ``radius`` edge steps, ignoring direction."""
    seen = set(s)
    frontier = set(s)
    for _ in range(radius):
        nxt = set()
        for v in frontier:
            nxt.update(g.successors(v))
            nxt.update(g.predecessors(v))
        frontier = nxt - seen
        if not frontier:
            break
        seen |= frontier
    return frozenset(seen)


def find_isolating_block(g: FlowGraph, z, radius: int = 1) -> IsolatedInvariantSet:
    z = frozenset(z)
    _check_subset(g, z, "z")
    if not is_invariant(g, z):
        raise NotInvariant("z is not invariant: some node lacks an in- or out-neighbour in z")
    b = neighborhood(g, z, radius)
    got = inv(g, b)
    if got != z:
        raise NotIsolated(
            f"z is not isolated at radius {radius}: Inv of the neighbourhood "
            f"contains {sorted(got - z)[:10]}", z=z, inv=got)
    return IsolatedInvariantSet(z, b)


def z_components(g: FlowGraph, z) -> list[frozenset]:
    """Connected components of the subgraph induced on ``z``, edge directions ignored.

    Components are ordered by their least node id.
    """
    z = frozenset(z)
    parent = {v: v for v in z}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        if e.tail in z and e.head in z:
            a, b = find(e.tail), find(e.head)
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    groups = {}
    for v in z:
        groups.setdefault(find(v), set()).add(v)
    return [frozenset(groups[r]) for r in sorted(groups)]


def directed_cycle_exists(g: FlowGraph, nodes: Sequence | None = None) -> bool:
    """True when the subgraph on ``nodes`` (default: all) has a directed cycle."""
    nodes = frozenset(g.nodes if nodes is None else nodes)
    sub = FlowGraph(sorted(nodes), (e for e in g.edges if e.tail in nodes and e.head in nodes),
                    g.basis_rank)
    return any(len(c) > 1 or any(sub.edges[i].head == c[0] for i in sub.out_edges(c[0]))
               for c in scc(sub))
