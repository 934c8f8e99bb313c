"""Lyapunov cochains versus coherent circulations.

For a graph ``g``, an isolated invariant set ``(z, block)`` and a rational
class ``xi`` vanishing on the block, :func:`solve` returns exactly one of

* a :class:`LyapunovCertificate`: node potentials ``f`` (constant on each
  component of ``z``) and ``g_local`` (on the block) such that
  ``lam = w_xi - d(g_local) + d(f)`` is zero on ``z`` and at most
  ``-slack`` on every other edge;
* an :class:`Obstruction`: a nonnegative circulation, conserved off ``z``
  and balanced per component of ``z``, whose pairing with ``xi`` is ``>= 0``.

The decision is a difference-constraint feasibility problem on the graph
obtained by contracting each component of ``z``.  Weights are cleared to
integers and strictness is encoded by a shift ``1/(n+1)``, so the answer is
sign-exact.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .cohomology import (as_class, coboundary, pair, primitive_on, relativize,
                         spanning_forest)
from .errors import NonIntegralClass, NotExact, NotInvariant, NotIsolated
from .graph import (FlowGraph, IsolatedInvariantSet, check_isolation, find_isolating_block,
                    inv, scc, z_components)
from .rational import common_denominator, fmt
from .shortest import Arc, bellman_ford


@dataclass(frozen=True)
class LyapunovCertificate:
    xi: tuple
    f: dict
    g_local: dict
    lam: tuple
    slack: Fraction
    kind: str = field(default="lyapunov", init=False)

    @classmethod
    def from_potentials(cls, g: FlowGraph, xi, f, g_local, slack=None):
        """Rebuild ``lam = w_xi - d(g_hat) + d(f)``; slack defaults to the minimal gap."""
        xi = as_class(xi, g)
        f = {v: Fraction(x) for v, x in f.items()}
        g_local = {v: Fraction(x) for v, x in g_local.items()}
        lam = lambda_from_potentials(g, xi, f, g_local)
        if slack is None:
            gaps = [-x for x in lam if x < 0]
            slack = min(gaps) if gaps else Fraction(1)
        return cls(xi, f, g_local, lam, Fraction(slack))


@dataclass(frozen=True)
class CoherentCirculation:
    """Nonnegative edge flow, stored sparsely as ``{edge_index: amount}``."""
    flow: dict

    def __post_init__(self):
        clean = {int(i): Fraction(x) for i, x in self.flow.items() if Fraction(x) != 0}
        object.__setattr__(self, "flow", dict(sorted(clean.items())))

    def scaled(self, k) -> "CoherentCirculation":
        k = Fraction(k)
        return CoherentCirculation({i: k * x for i, x in self.flow.items()})

    def __add__(self, other):
        out = Counter()
        for src in (self.flow, other.flow):
            for i, x in src.items():
                out[i] += x
        return CoherentCirculation(dict(out))

    @property
    def support(self) -> frozenset:
        return frozenset(self.flow)


@dataclass(frozen=True)
class Obstruction:
    xi: tuple
    circulation: CoherentCirculation
    value: Fraction
    kind: str = field(default="obstruction", init=False)


def lambda_from_potentials(g: FlowGraph, xi, f, g_local) -> tuple:
    zero = Fraction(0)
    w = pair(g, xi)
    return tuple(
        w[i] - (g_local.get(e.head, zero) - g_local.get(e.tail, zero))
        + (f[e.head] - f[e.tail])
        for i, e in enumerate(g.edges))


def _representatives(g: FlowGraph, z) -> dict:
    """Map every node to its contracted id: least node of its z-component, else itself."""
    rep = {v: v for v in g.nodes}
    for comp in z_components(g, z):
        r = min(comp)
        for v in comp:
            rep[v] = r
    return rep


def contracted_arcs(g: FlowGraph, z, weights) -> tuple:
    """Contracted node ids and ``(rep_tail, rep_head, weight, edge_index)`` arcs.

    Edges with both ends in ``z`` are dropped.
    """
    z = frozenset(z)
    rep = _representatives(g, z)
    nodes = sorted(set(rep.values()))
    arcs = [(rep[e.tail], rep[e.head], weights[i], i) for i, e in enumerate(g.edges)
            if not (e.tail in z and e.head in z)]
    return nodes, arcs, rep


def solve(g: FlowGraph, ziso: IsolatedInvariantSet, xi,
          cancel: Callable[[], bool] | None = None):
    """Lyapunov certificate or obstruction for ``(g, ziso, xi)``.

    Raises :class:`~lyapform.errors.InvalidIsolation` if ``inv(block) != z``
    and :class:`~lyapform.errors.NotInHZ` if ``xi`` does not vanish on the
    block.  ``cancel`` is polled between relaxation rounds.
    """
    xi = as_class(xi, g)
    check_isolation(g, ziso)
    w_rel, g_local = relativize(g, xi, ziso.block)
    nodes, arcs, rep = contracted_arcs(g, ziso.z, w_rel)

    n = len(nodes)
    denom = common_denominator(a[2] for a in arcs)
    scale = n + 1
    # f(h) - f(t) <= -W - 1/(n+1), everything multiplied by (n+1)
    bf_arcs = [Arc(t, h, -scale * int(w * denom) - 1, i) for t, h, w, i in arcs]
    dist, cycle = bellman_ford(nodes, bf_arcs, cancel)

    if cycle is None:
        f = {v: Fraction(dist[rep[v]], scale * denom) for v in g.nodes}
        return LyapunovCertificate.from_potentials(g, xi, f, g_local)

    flow = Counter(a.tag for a in cycle)
    mu = CoherentCirculation({i: Fraction(k) for i, k in flow.items()})
    value = sum((k * w_rel[i] for i, k in flow.items()), Fraction(0))
    assert value >= 0, "negative cycle must have nonnegative relative weight"
    return Obstruction(xi, mu, value)


def _z_recurrent_edges(g: FlowGraph, z) -> set:
    """Edges inside one strongly connected component of the subgraph on ``z``."""
    z = frozenset(z)
    sub = FlowGraph(sorted(z), (e for e in g.edges if e.tail in z and e.head in z), g.basis_rank)
    comp_of = {}
    for k, comp in enumerate(scc(sub)):
        for v in comp:
            comp_of[v] = k
    return {i for i, e in enumerate(g.edges)
            if e.tail in z and e.head in z and comp_of[e.tail] == comp_of[e.head]}


def _edge_name(g, i):
    e = g.edges[i]
    return f"edge {i} ({e.tail}->{e.head})"


def verify_lyapunov(g: FlowGraph, ziso: IsolatedInvariantSet, cert: LyapunovCertificate,
                    strict: bool = False):
    """Check a certificate by direct evaluation.

    Returns ``(ok, violations)``.  Checked: ``lam`` agrees with the stored
    potentials; ``lam <= -slack`` on edges leaving, entering or avoiding
    ``z``; ``lam`` vanishes on edges inside ``z``; ``lam`` is a coboundary on
    the block; ``lam`` and ``w_xi`` agree on a cycle basis.

    For an edge with both ends in ``z`` but in different strongly connected
    components of ``z``, ``lam <= 0`` is accepted unless ``strict``.
    """
    violations = []
    z = frozenset(ziso.z)
    lam = tuple(cert.lam)
    if len(lam) != g.n_edges:
        return False, [f"lambda has {len(lam)} entries, graph has {g.n_edges} edges"]
    try:
        xi = as_class(cert.xi, g)
    except ValueError as exc:
        return False, [str(exc)]
    slack = Fraction(cert.slack)
    if slack <= 0:
        violations.append(f"slack {fmt(slack)} is not positive")

    if cert.f is not None and cert.g_local is not None:
        missing = [v for v in g.nodes if v not in cert.f]
        if missing:
            violations.append(f"f undefined on nodes {missing[:5]}")
        else:
            rebuilt = lambda_from_potentials(g, xi, cert.f, cert.g_local)
            for i, (a, b) in enumerate(zip(lam, rebuilt)):
                if a != b:
                    violations.append(f"{_edge_name(g, i)}: lambda {fmt(a)} does not match "
                                      f"potentials ({fmt(b)})")
                    break

    z_rec = _z_recurrent_edges(g, z) if not strict else None
    for i, e in enumerate(g.edges):
        x = lam[i]
        if e.tail in z and e.head in z:
            if strict or i in z_rec:
                if x != 0:
                    violations.append(f"{_edge_name(g, i)}: lambda = {fmt(x)} inside Z, must be 0")
            elif x > 0:
                violations.append(f"{_edge_name(g, i)}: lambda = {fmt(x)} > 0 between "
                                  f"components of Z")
        elif x > -slack:
            violations.append(f"{_edge_name(g, i)}: lambda = {fmt(x)} > -slack = {fmt(-slack)}")

    try:
        primitive_on(g, lam, ziso.block)
    except NotExact as exc:
        violations.append(f"lambda is not exact on the block (cycle sum {fmt(exc.total)} "
                          f"through edges {[i for i, _ in exc.witness]})")

    # same class as xi: lam - w_xi is a coboundary on the whole graph
    w = pair(g, xi)
    try:
        primitive_on(g, tuple(a - b for a, b in zip(lam, w)), g.nodes)
    except NotExact as exc:
        violations.append(f"lambda is not in the class xi: the cycle through "
                          f"{_edge_name(g, exc.witness[0][0])} differs by {fmt(exc.total)}")
    return not violations, violations


def verify_circulation(g: FlowGraph, z, mu: CoherentCirculation):
    """Nonnegativity, support off ``z``, conservation off ``z`` and per-component balance."""
    z = frozenset(z)
    violations = []
    flow = mu.flow
    if not flow:
        violations.append("circulation is identically zero")
    net = {v: Fraction(0) for v in g.nodes}
    for i, x in flow.items():
        if not 0 <= i < g.n_edges:
            violations.append(f"edge index {i} out of range")
            continue
        e = g.edges[i]
        if x < 0:
            violations.append(f"{_edge_name(g, i)}: negative flow {fmt(x)}")
        if e.tail in z and e.head in z:
            violations.append(f"{_edge_name(g, i)}: flow {fmt(x)} on an edge inside Z")
            continue
        net[e.head] += x
        net[e.tail] -= x
    for v in g.nodes:
        if v not in z and net[v] != 0:
            violations.append(f"node {v}: inflow - outflow = {fmt(net[v])}")
    for comp in z_components(g, z):
        bal = sum((net[v] for v in comp), Fraction(0))
        if bal != 0:
            violations.append(f"Z-component with least node {min(comp)}: "
                              f"inflow - outflow = {fmt(bal)}")
    return not violations, violations


def asymptotic_cycle(g: FlowGraph, ziso, mu: CoherentCirculation, xi) -> Fraction:
    """Pairing of ``mu`` with a representative of ``xi`` vanishing on the block."""
    block = ziso.block if isinstance(ziso, IsolatedInvariantSet) else frozenset(ziso)
    w_rel, _ = relativize(g, xi, block)
    return sum((x * w_rel[i] for i, x in mu.flow.items()), Fraction(0))


def conley_lyapunov(g: FlowGraph) -> dict:
    """Potential constant on SCCs, dropping by at least 1 along every other edge.

    ``f = -(longest path index in the condensation)``.
    """
    comps = scc(g)
    comp_of = {v: k for k, c in enumerate(comps) for v in c}
    level = [0] * len(comps)
    for k, c in enumerate(comps):   # topological order
        for v in c:
            for i in g.out_edges(v):
                j = comp_of[g.edges[i].head]
                if j != k:
                    level[j] = max(level[j], level[k] + 1)
    return {v: Fraction(-level[comp_of[v]]) for v in g.nodes}


def conley_certificate(g: FlowGraph) -> LyapunovCertificate:
    """Exact certificate (class 0) built from :func:`conley_lyapunov`."""
    f = conley_lyapunov(g)
    xi = (Fraction(0),) * g.basis_rank
    lam = coboundary(g, f)
    return LyapunovCertificate(xi, f, {}, lam, Fraction(1))


def solve_finite_z(g: FlowGraph, z, xi, radius: int = 1,
                   cancel: Callable[[], bool] | None = None):
    """:func:`solve` for a finite set of rest nodes, each required to be isolated."""
    z = frozenset(z)
    for v in sorted(z):
        if not any(g.edges[i].head == v for i in g.out_edges(v)):
            raise NotInvariant(f"node {v} has no self-loop, so it is not a rest node")
    block = set()
    for v in sorted(z):
        try:
            iso = find_isolating_block(g, {v}, radius)
        except NotIsolated as exc:
            raise NotIsolated(f"rest node {v} is not an isolated invariant set at radius "
                              f"{radius}", z=frozenset({v}), inv=exc.inv) from None
        block |= iso.block
    if inv(g, block) != z:
        # neighbourhoods of different rest nodes overlap into a larger invariant set
        block = set(z)
    return solve(g, IsolatedInvariantSet(z, frozenset(block)), xi, cancel)


@dataclass(frozen=True)
class LevelCut:
    level: Fraction
    ziso: IsolatedInvariantSet
    cut_edges: tuple


def circle_values(g: FlowGraph, lam) -> dict:
    """Mod-1 primitive of ``lam``; raises NonIntegralClass if some cycle sum is not an integer."""
    parent, order = spanning_forest(g, frozenset(g.nodes))
    raw = {}
    for v in order:
        if parent[v] is None:
            raw[v] = Fraction(0)
        else:
            u, i, sign = parent[v]
            raw[v] = raw[u] + sign * lam[i]
    for i, e in enumerate(g.edges):
        gap = lam[i] - (raw[e.head] - raw[e.tail])
        if gap.denominator != 1:
            raise NonIntegralClass(f"cycle through edge {i} has non-integral sum {fmt(gap)}")
    return {v: x % 1 for v, x in raw.items()}


def level_cuts(g: FlowGraph, cert: LyapunovCertificate) -> list[LevelCut]:
    lam = tuple(cert.lam)
    L = circle_values(g, lam)
    values = sorted(set(L.values()))
    if not values:
        return []
    levels = []
    for a, b in zip(values, values[1:] + [values[0] + 1]):
        levels.append(((a + b) / 2) % 1)
    cuts = []
    seen = set()
    for s in sorted(levels):
        cut = []
        for i, e in enumerate(g.edges):
            start = L[e.tail]
            end = start + lam[i]
            lo, hi = min(start, end), max(start, end)
            if (hi - s) // 1 != (lo - s) // 1:
                cut.append(i)
        zs = inv(g.without_edges(cut), g.nodes)
        if zs in seen:
            continue
        seen.add(zs)
        cuts.append(LevelCut(s, IsolatedInvariantSet(zs, frozenset(g.nodes)), tuple(cut)))
    return cuts


def level_cut_blocks(g: FlowGraph, cert: LyapunovCertificate) -> list[IsolatedInvariantSet]:
    """Invariant sets left after cutting the circle-valued primitive at every gap."""
    return [c.ziso for c in level_cuts(g, cert)]
