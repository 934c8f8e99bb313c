"""Small hand-built flow graphs used as worked examples and test fixtures."""
from __future__ import annotations

from fractions import Fraction

from .graph import FlowGraph


def _vec(x, k):
    if isinstance(x, (int, Fraction, str)):
        x = [x] + [0] * (k - 1)
    return tuple(Fraction(v) for v in x)


def loop_graph(length: int, total=0, rank: int = 1) -> FlowGraph:
    """Directed cycle ``0 -> 1 -> ... -> length-1 -> 0``; the closing edge carries ``total``."""
    if length < 1:
        raise ValueError("length must be positive")
    zero = (0,) * rank
    edges = [(i, i + 1, zero) for i in range(length - 1)]
    edges.append((length - 1, 0, _vec(total, rank)))
    return FlowGraph(range(length), edges, rank)


def path_graph(length: int, rank: int = 1) -> FlowGraph:
    zero = (0,) * rank
    return FlowGraph(range(length), [(i, i + 1, zero) for i in range(length - 1)], rank)


def homoclinic_graph(loop_len: int, winding=1) -> FlowGraph:
    """Rest node 0 (self-loop) with an excursion ``0 -> 1 -> ... -> loop_len -> 0``.

    The edge returning to 0 carries ``winding``.  Node 0 is isolated at
    radius ``r`` exactly when ``loop_len > 2 r``.
    """
    if loop_len < 1:
        raise ValueError("loop_len must be positive")
    w = _vec(winding, 1 if isinstance(winding, (int, Fraction, str)) else len(winding))
    rank = len(w)
    zero = (0,) * rank
    edges = [(0, 0, zero), (0, 1, zero)]
    edges += [(i, i + 1, zero) for i in range(1, loop_len)]
    edges.append((loop_len, 0, w))
    return FlowGraph(range(loop_len + 1), edges, rank)


def heteroclinic_circuit(path_len: int = 3, forward=0, backward=0) -> FlowGraph:
    """Rest nodes ``a = 0`` and ``b = 1`` joined by paths ``a -> b`` and ``b -> a``.

    Each path has ``path_len`` intermediate nodes; the last edge of the
    forward (backward) path carries ``forward`` (``backward``).
    """
    edges = [(0, 0, (0,)), (1, 1, (0,))]
    nxt = 2

    def chain(src, dst, w):
        nonlocal nxt
        prev = src
        for _ in range(path_len):
            edges.append((prev, nxt, (0,)))
            prev = nxt
            nxt += 1
        edges.append((prev, dst, _vec(w, 1)))

    chain(0, 1, forward)
    chain(1, 0, backward)
    return FlowGraph(range(nxt), edges, 1)


def gradient_like_graph() -> FlowGraph:
    """Source 0, saddles 1 and 2, sink 3 (all rest nodes) joined by two-step paths.

    Acyclic apart from the self-loops at the rest nodes.
    """
    rest = [0, 1, 2, 3]
    edges = [(v, v, (0, 0)) for v in rest]
    nxt = 4
    for a, b in [(0, 1), (0, 2), (1, 3), (2, 3)]:
        edges += [(a, nxt, (0, 0)), (nxt, nxt + 1, (0, 0)), (nxt + 1, b, (0, 0))]
        nxt += 2
    return FlowGraph(range(nxt), edges, 2)


def two_loop_graph() -> FlowGraph:
    """Rest node 0, a zero-winding loop and a winding loop through a shared transit node.

    ``0 -> 1 -> 2 -> 0`` carries winding 0 in total; ``3 -> 4 -> 5 -> 3`` carries
    winding 1 and hangs off node 2 via ``2 -> 3`` (no return), so
    ``R`` minus ``R_xi`` is nonempty for ``xi != 0``.
    """
    z = (0,)
    edges = [(0, 0, z), (0, 1, z), (1, 2, z), (2, 0, z), (2, 3, z),
             (3, 4, z), (4, 5, z), (5, 3, (1,)), (5, 6, z), (6, 6, z)]
    return FlowGraph(range(7), edges, 1)
