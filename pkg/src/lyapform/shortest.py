"""Bellman-Ford relaxation for difference-constraint systems."""
from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

from .errors import Cancelled


class Arc(NamedTuple):
    tail: int
    head: int
    cost: object   # int or Fraction
    tag: object    # caller payload, e.g. an edge index


def _pred_cycle(nodes, pred, arcs):
    """First cycle of the predecessor graph, scanning nodes in sorted order."""
    state = {}
    for start in nodes:
        if start in state:
            continue
        path = []
        v = start
        while v is not None and v not in state:
            state[v] = start
            path.append(v)
            k = pred[v]
            v = None if k is None else arcs[k].tail
        if v is not None and state[v] == start:
            # v is on the cycle closed during this walk
            cycle = []
            u = v
            while True:
                a = arcs[pred[u]]
                cycle.append(a)
                u = a.tail
                if u == v:
                    break
            cycle.reverse()
            return cycle
    return None


def bellman_ford(nodes: Sequence, arcs: Sequence[Arc], cancel: Callable[[], bool] | None = None):
    """Feasible potentials or a negative cycle.

    Starts from a virtual source joined to every node by a zero-cost arc.
    Returns ``(dist, None)`` with ``dist[h] <= dist[t] + cost`` for every arc,
    or ``(None, cycle)`` where ``cycle`` is a list of arcs forming a directed
    cycle of negative total cost, in traversal order.

    Rounds relax the out-arcs of nodes improved in the previous round, in
    sorted arc order, so results do not depend on anything but the input.
    After each round the predecessor graph is checked for a cycle; any such
    cycle has negative cost.  ``cancel`` is polled once per round.
    """
    nodes = sorted(nodes)
    arcs = sorted(arcs, key=lambda a: (a.tail, a.head, a.cost, repr(a.tag)))
    out = {v: [] for v in nodes}
    for k, a in enumerate(arcs):
        out[a.tail].append(k)
    dist = {v: 0 for v in nodes}
    pred = {v: None for v in nodes}
    active = nodes
    while True:
        if cancel is not None and cancel():
            raise Cancelled("relaxation cancelled")
        changed = set()
        for t in active:
            dt = dist[t]
            for k in out[t]:
                a = arcs[k]
                cand = dt + a.cost
                if cand < dist[a.head]:
                    dist[a.head] = cand
                    pred[a.head] = k
                    changed.add(a.head)
        if not changed:
            return dist, None
        cycle = _pred_cycle(nodes, pred, arcs)
        if cycle is not None:
            return None, cycle
        active = sorted(changed)
