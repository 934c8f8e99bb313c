"""Chain recurrence and its refinement by a cohomology class.

``chain_recurrent_set`` is the set of nodes on a nonempty closed walk.
``r_xi_set`` keeps the nodes on a nonempty closed walk whose paired weight
is exactly zero.  Per strongly connected component, after clearing
denominators:

* a positive and a negative cycle together give zero walks through every
  node of the component;
* otherwise all cycle sums share a sign, a feasible potential makes every
  reduced weight sign-definite, and zero walks live on the tight edges.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import gcd

from .cohomology import pair
from .graph import FlowGraph, scc
from .rational import common_denominator
from .shortest import Arc, bellman_ford


def _internal_edges(g: FlowGraph, comp) -> list[int]:
    comp = frozenset(comp)
    out = []
    for v in sorted(comp):
        out.extend(i for i in g.out_edges(v) if g.edges[i].head in comp)
    return out


def recurrent_components(g: FlowGraph) -> list[list[int]]:
    """SCCs that carry at least one internal edge (self-loops count)."""
    return [c for c in scc(g) if _internal_edges(g, c)]


def chain_recurrent_set(g: FlowGraph) -> frozenset:
    return frozenset(v for c in recurrent_components(g) for v in c)


def _integer_weights(g: FlowGraph, xi) -> list[int]:
    w = pair(g, xi)
    d = common_denominator(w)
    return [int(x * d) for x in w]


def _closed_walk_sets(nodes, edges, g: FlowGraph) -> frozenset:
    sub = FlowGraph(sorted(nodes), (g.edges[i] for i in edges), g.basis_rank)
    return chain_recurrent_set(sub)


class _Component:
    """Sign analysis of one recurrent SCC."""

    def __init__(self, g: FlowGraph, comp, W):
        self.nodes = frozenset(comp)
        self.edges = _internal_edges(g, comp)
        self.pos_cycle = self._cycle(g, W, sign=-1)
        self.neg_cycle = self._cycle(g, W, sign=1)
        self.tight = None
        if self.pos_cycle is not None and self.neg_cycle is not None:
            self.zero_nodes = self.nodes
            return
        # no positive cycles: costs -W are feasible; otherwise W are
        sign = -1 if self.pos_cycle is None else 1
        dist, _ = bellman_ford(self.nodes, [Arc(g.edges[i].tail, g.edges[i].head, sign * W[i], i)
                                            for i in self.edges])
        self.tight = [i for i in self.edges
                      if sign * W[i] + dist[g.edges[i].tail] - dist[g.edges[i].head] == 0]
        self.zero_nodes = _closed_walk_sets(self.nodes, self.tight, g)

    def _cycle(self, g, W, sign):
        _, cyc = bellman_ford(self.nodes, [Arc(g.edges[i].tail, g.edges[i].head, sign * W[i], i)
                                           for i in self.edges])
        return None if cyc is None else [a.tag for a in cyc]


def _analyse(g: FlowGraph, xi):
    W = _integer_weights(g, xi)
    return W, [_Component(g, c, W) for c in recurrent_components(g)]


def r_xi_set(g: FlowGraph, xi) -> frozenset:
    """Nodes on a nonempty closed walk of total paired weight exactly zero."""
    _, comps = _analyse(g, xi)
    return frozenset(v for c in comps for v in c.zero_nodes)


def _bfs_path(g: FlowGraph, allowed_edges, src, dst) -> list[int] | None:
    """Shortest edge path ``src -> dst`` using ``allowed_edges``; ``[]`` if equal."""
    if src == dst:
        return []
    allowed = set(allowed_edges)
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for i in g.out_edges(u):
            if i not in allowed:
                continue
            w = g.edges[i].head
            if w in prev:
                continue
            prev[w] = i
            if w == dst:
                path = []
                while w != src:
                    k = prev[w]
                    path.append(k)
                    w = g.edges[k].tail
                return path[::-1]
            queue.append(w)
    return None


def _closed_walk_through(g: FlowGraph, allowed_edges, v) -> list[int] | None:
    best = None
    for i in sorted(allowed_edges):
        e = g.edges[i]
        if e.head != v:
            continue
        p = _bfs_path(g, allowed_edges, v, e.tail)
        if p is not None and (best is None or len(p) + 1 < len(best)):
            best = p + [i]
    return best


def _ext_gcd(a, b):
    if b == 0:
        return a, 1, 0
    d, x, y = _ext_gcd(b, a % b)
    return d, y, x - (a // b) * y


def zero_weight_walk(g: FlowGraph, xi, v) -> list[int] | None:
    """A closed walk (edge indices, in order) through ``v`` with zero paired weight.

    Returns None when ``v`` is not in ``r_xi_set(g, xi)``.
    """
    W, comps = _analyse(g, xi)
    comp = next((c for c in comps if v in c.nodes), None)
    if comp is None or v not in comp.zero_nodes:
        return None
    if comp.tight is not None:
        return _closed_walk_through(g, comp.tight, v)

    pos = comp.pos_cycle
    neg = comp.neg_cycle
    a_node = g.edges[pos[0]].tail
    b_node = g.edges[neg[0]].tail
    p1 = _bfs_path(g, comp.edges, v, a_node)
    p2 = _bfs_path(g, comp.edges, a_node, b_node)
    p3 = _bfs_path(g, comp.edges, b_node, v)
    A = sum(W[i] for i in pos)
    B = -sum(W[i] for i in neg)
    q = sum(W[i] for i in p1 + p2 + p3)
    d = gcd(A, B)
    k = d // gcd(d, abs(q)) if q else 1
    rhs = -k * q                     # need m*A - n*B = rhs
    _, x, y = _ext_gcd(A, B)         # A*x + B*y = d
    m0, n0 = x * (rhs // d), -y * (rhs // d)
    sa, sb = B // d, A // d
    # smallest nonnegative solution on the line (m0 + t*sa, n0 + t*sb)
    t = max(-(m0 // sa), -(n0 // sb))
    m, n = m0 + t * sa, n0 + t * sb
    if m == n == 0 and not (p1 or p2 or p3):
        m, n = sa, sb
    walk = p1 + pos * m + p2 + neg * n + p3
    walk += (p1 + p2 + p3) * (k - 1)
    return walk


def r_xi_bruteforce(g: FlowGraph, xi, max_len: int = 12) -> frozenset:
    """Nodes on a closed walk of length at most ``max_len`` with zero paired weight."""
    w = pair(g, xi)
    found = set()
    for v in g.nodes:
        frontier = {(v, Fraction(0))}
        for _ in range(max_len):
            nxt = set()
            for u, s in frontier:
                for i in g.out_edges(u):
                    nxt.add((g.edges[i].head, s + w[i]))
            if (v, Fraction(0)) in nxt:
                found.add(v)
                break
            frontier = nxt
            if not frontier:
                break
    return frozenset(found)
