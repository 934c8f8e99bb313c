"""Edge cochains, coboundaries and exactness on node sets.

A cochain is a tuple of :class:`~fractions.Fraction` indexed like
``g.edges``; a potential is a ``dict`` from node id to Fraction whose key set
is its domain.
"""
from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Sequence

from .errors import NotExact, NotInHZ, RankMismatch
from .graph import FlowGraph
from .rational import to_fraction

Cochain = tuple
Potential = dict


def as_class(xi, g: FlowGraph | None = None) -> tuple:
    """Coerce ``xi`` to a tuple of Fractions, checking rank against ``g``."""
    xi = tuple(to_fraction(x) for x in xi)
    if g is not None and len(xi) != g.basis_rank:
        raise RankMismatch(f"class has length {len(xi)}, graph basis rank is {g.basis_rank}")
    return xi


def pair(g: FlowGraph, xi: Sequence) -> Cochain:
    """Edge cochain ``e -> sum_j xi_j * weight_j(e)``."""
    xi = as_class(xi, g)
    return tuple(sum((a * w for a, w in zip(xi, e.weight)), Fraction(0)) for e in g.edges)


def coboundary(g: FlowGraph, f: Potential) -> Cochain:
    missing = [v for v in g.nodes if v not in f]
    if missing:
        raise ValueError(f"potential is undefined on nodes {missing[:5]}")
    return tuple(Fraction(f[e.head]) - Fraction(f[e.tail]) for e in g.edges)


def add(*cochains) -> Cochain:
    return tuple(sum(vals, Fraction(0)) for vals in zip(*cochains))


def scale(c: Cochain, k) -> Cochain:
    k = Fraction(k)
    return tuple(k * x for x in c)


def walk_sum(c: Cochain, edge_indices) -> Fraction:
    return sum((c[i] for i in edge_indices), Fraction(0))


def spanning_forest(g: FlowGraph, nodes: frozenset, edge_ok=None):
    """BFS forest of the undirected subgraph on ``nodes``.

    Returns ``(parent, order)`` where ``parent[v] = (u, edge_index, sign)``
    with ``sign = +1`` when the edge points ``u -> v``; roots map to None.
    Roots are least node ids of their components.
    """
    parent = {}
    order = []
    for root in sorted(nodes):
        if root in parent:
            continue
        parent[root] = None
        order.append(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            nbrs = [(i, g.edges[i].head, 1) for i in g.out_edges(u)]
            nbrs += [(i, g.edges[i].tail, -1) for i in g.in_edges(u)]
            nbrs.sort(key=lambda t: (t[0], t[2]))
            for i, w, sign in nbrs:
                if w in nodes and w not in parent and (edge_ok is None or edge_ok(i)):
                    parent[w] = (u, i, sign)
                    order.append(w)
                    queue.append(w)
    return parent, order


def _tree_path(parent, a, b):
    """Signed edge list of the forest path from ``a`` to ``b`` (same tree)."""
    def chain(v):
        out = [v]
        while parent[v] is not None:
            v = parent[v][0]
            out.append(v)
        return out

    ca, cb = chain(a), chain(b)
    in_b = set(cb)
    lca = next(v for v in ca if v in in_b)
    path = []
    v = a
    while v != lca:
        u, i, sign = parent[v]
        path.append((i, -sign))   # walking from v up to u
        v = u
    down = []
    v = b
    while v != lca:
        u, i, sign = parent[v]
        down.append((i, sign))    # walking from u down to v
        v = u
    return path + down[::-1]


def primitive_on(g: FlowGraph, c: Cochain, b) -> Potential:
    """Potential ``p`` on ``b`` with ``c(e) = p(head) - p(tail)`` on edges inside ``b``.

    Each undirected component of the induced subgraph is rooted at its least
    node with value 0.  Raises :class:`NotExact` with a witness cycle if no
    primitive exists.
    """
    b = frozenset(b)
    if len(c) != g.n_edges:
        raise ValueError("cochain length does not match edge count")
    parent, order = spanning_forest(g, b)
    p = {}
    for v in order:
        if parent[v] is None:
            p[v] = Fraction(0)
        else:
            u, i, sign = parent[v]
            p[v] = p[u] + sign * c[i]
    tree_edges = {parent[v][1] for v in order if parent[v] is not None}
    for i in g.subgraph_edges(b):
        if i in tree_edges:
            continue
        e = g.edges[i]
        gap = c[i] - (p[e.head] - p[e.tail])
        if gap != 0:
            witness = [(i, 1)] + _tree_path(parent, e.head, e.tail)
            raise NotExact(f"cochain is not exact on the node set: cycle through edge {i} "
                           f"has sum {gap}", witness=witness, total=gap)
    return p


def class_in_h_z(g: FlowGraph, xi, b) -> tuple:
    """``(True, None)`` if the paired cochain is a coboundary on ``b``, else ``(False, witness)``."""
    try:
        primitive_on(g, pair(g, xi), b)
    except NotExact as exc:
        return False, exc.witness
    return True, None


def relativize(g: FlowGraph, xi, b) -> tuple:
    """Representative of ``xi`` vanishing on ``b``.

    Returns ``(w_rel, g_local)`` with ``w_rel = w_xi - delta(g_hat)``, where
    ``g_hat`` is ``g_local`` on ``b`` and zero elsewhere.
    """
    w = pair(g, xi)
    try:
        g_local = primitive_on(g, w, b)
    except NotExact as exc:
        raise NotInHZ(f"class does not vanish on the block: {exc}",
                      witness=exc.witness, total=exc.total) from None
    zero = Fraction(0)
    w_rel = tuple(
        w[i] - (g_local.get(e.head, zero) - g_local.get(e.tail, zero))
        for i, e in enumerate(g.edges))
    return w_rel, g_local


def cycle_basis(g: FlowGraph) -> list:
    """Fundamental cycles of a spanning forest: one signed edge list per chord."""
    nodes = frozenset(g.nodes)
    parent, order = spanning_forest(g, nodes)
    tree_edges = {parent[v][1] for v in order if parent[v] is not None}
    basis = []
    for i, e in enumerate(g.edges):
        if i in tree_edges:
            continue
        basis.append([(i, 1)] + _tree_path(parent, e.head, e.tail))
    return basis


def signed_sum(c: Cochain, signed_edges) -> Fraction:
    return sum((s * c[i] for i, s in signed_edges), Fraction(0))
