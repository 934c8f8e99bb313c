import dataclasses
import random
from fractions import Fraction

import pytest

from lyapform import (Cancelled, CoherentCirculation, FlowGraph, IsolatedInvariantSet,
                      InvalidIsolation, LyapunovCertificate, NonIntegralClass, NotInHZ,
                      NotInvariant, NotIsolated, asymptotic_cycle, chain_recurrent_set,
                      conley_certificate, conley_lyapunov, find_isolating_block,
                      homoclinic_graph, inv, level_cuts, loop_graph, path_graph, r_xi_set, solve,
                      scc, solve_finite_z, verify_circulation, verify_lyapunov, z_components)
from lyapform.catalog import gradient_like_graph, heteroclinic_circuit, two_loop_graph

from lyapform import pair, relativize
from lyapform.duality import contracted_arcs
from lyapform.graph import directed_cycle_exists

from _oracles import contracted_cycle_sums, random_graph, random_isolated_instance

F = Fraction
EMPTY = IsolatedInvariantSet(frozenset(), frozenset())


def test_loop_sign_decides():
    g = loop_graph(3, total=-1)
    cert = solve(g, EMPTY, (1,))
    assert cert.kind == "lyapunov"
    assert verify_lyapunov(g, EMPTY, cert, strict=True) == (True, [])
    assert all(x <= -cert.slack for x in cert.lam)

    obs = solve(g, EMPTY, (-1,))
    assert obs.kind == "obstruction"
    assert obs.value == 1
    assert obs.circulation.flow == {0: 1, 1: 1, 2: 1}
    assert verify_circulation(g, frozenset(), obs.circulation)[0]


def test_zero_loop_is_obstructed():
    g = loop_graph(2, total=0)
    obs = solve(g, EMPTY, (1,))
    assert obs.kind == "obstruction" and obs.value == 0


def test_path_gets_gradient():
    g = path_graph(4)
    cert = solve(g, EMPTY, (0,))
    assert cert.kind == "lyapunov"
    assert verify_lyapunov(g, EMPTY, cert)[0]


def test_homoclinic_with_rest_point():
    h = homoclinic_graph(4, winding=1)
    ziso = find_isolating_block(h, {0}, 1)
    cert = solve(h, ziso, (-1,))
    assert cert.kind == "lyapunov"
    ok, report = verify_lyapunov(h, ziso, cert, strict=True)
    assert ok, report
    assert cert.lam[0] == 0                       # the self-loop at the rest node
    obs = solve(h, ziso, (1,))
    assert obs.kind == "obstruction" and obs.value == 1
    assert asymptotic_cycle(h, ziso, obs.circulation, (1,)) == 1
    assert 0 not in obs.circulation.support       # nothing on the self-loop


def test_invalid_inputs():
    h = homoclinic_graph(4)
    with pytest.raises(InvalidIsolation):
        solve(h, IsolatedInvariantSet({0}, h.nodes), (1,))
    g = FlowGraph(range(3), [(0, 1, (1,)), (1, 0, (0,)), (1, 2, (0,))], 1)
    ziso = IsolatedInvariantSet({0, 1}, {0, 1})
    with pytest.raises(NotInHZ):
        solve(g, ziso, (1,))


def test_cancel():
    g = loop_graph(30, total=-1)
    with pytest.raises(Cancelled):
        solve(g, EMPTY, (1,), cancel=lambda: True)


def _agree(g, ziso, xi, out):
    if out.kind == "lyapunov":
        ok, report = verify_lyapunov(g, ziso, out, strict=True)
        assert ok, report
    else:
        assert verify_circulation(g, ziso.z, out.circulation)[0]
        val = asymptotic_cycle(g, ziso, out.circulation, xi)
        assert val == out.value >= 0


def test_dichotomy_against_cycle_oracle():
    rng = random.Random(21)
    seen = set()
    for _ in range(150):
        g, ziso, xi = random_isolated_instance(rng, n_max=9, m_max=18)
        out = solve(g, ziso, xi)
        _agree(g, ziso, xi, out)
        _, top = contracted_cycle_sums(g, ziso.z, [sum(a * b for a, b in zip(xi, e.weight))
                                                   for e in g.edges])
        assert (out.kind == "lyapunov") == (top is None or top < 0)
        seen.add(out.kind)
    assert seen == {"lyapunov", "obstruction"}


def test_ray_invariance():
    rng = random.Random(22)
    for _ in range(60):
        g, ziso, xi = random_isolated_instance(rng, n_max=12, m_max=30)
        a = solve(g, ziso, xi).kind
        b = solve(g, ziso, tuple(x * F(7, 3) for x in xi)).kind
        assert a == b


def test_perturbed_certificate_rejected():
    h = homoclinic_graph(4, winding=1)
    ziso = find_isolating_block(h, {0}, 1)
    cert = solve(h, ziso, (-1,))
    for i in range(h.n_edges):
        lam = list(cert.lam)
        lam[i] += 10
        bad = dataclasses.replace(cert, lam=tuple(lam))
        ok, report = verify_lyapunov(h, ziso, bad)
        assert not ok and report
    worse = dataclasses.replace(cert, slack=cert.slack * 1000)
    assert not verify_lyapunov(h, ziso, worse)[0]


def test_circulation_checks():
    h = homoclinic_graph(3)
    z = frozenset({0})
    good = CoherentCirculation({1: 1, 2: 1, 3: 1, 4: 1})
    assert verify_circulation(h, z, good) == (True, [])
    assert not verify_circulation(h, z, CoherentCirculation({1: 1, 2: 1}))[0]
    assert not verify_circulation(h, z, CoherentCirculation({0: 1, 1: 1, 2: 1, 3: 1, 4: 1}))[0]
    assert not verify_circulation(h, z, good.scaled(-1))[0]
    assert not verify_circulation(h, z, CoherentCirculation({}))[0]
    # balanced per component, not per node
    g = FlowGraph(range(4), [(0, 1, ()), (1, 0, ()), (0, 2, ()), (2, 3, ()), (3, 1, ())], 0)
    assert verify_circulation(g, {0, 1}, CoherentCirculation({2: 1, 3: 1, 4: 1}))[0]


def test_circulation_arithmetic():
    a = CoherentCirculation({0: 1, 2: F(1, 2)})
    b = CoherentCirculation({2: F(1, 2), 3: 0})
    assert (a + b).flow == {0: 1, 2: 1}
    assert a.scaled(2).flow == {0: 2, 2: 1}
    assert b.support == {2}


def test_conley_examples():
    for g in (two_loop_graph(), gradient_like_graph(), homoclinic_graph(3), path_graph(5)):
        r = chain_recurrent_set(g)
        cert = conley_certificate(g)
        ok, report = verify_lyapunov(g, IsolatedInvariantSet(r, r), cert)
        assert ok, report
        f = conley_lyapunov(g)
        assert all(f[e.head] <= f[e.tail] for e in g.edges)


def test_strict_l2_counterexample():
    # two rest nodes joined directly and through a transit node: no potential
    # is constant on Z and strictly decreasing along a -> x -> b as well
    g = FlowGraph(range(3), [(0, 0, ()), (1, 1, ()), (0, 1, ()), (0, 2, ()), (2, 1, ())], 0)
    z = frozenset({0, 1})
    ziso = IsolatedInvariantSet(z, z)
    cert = conley_certificate(g)
    assert verify_lyapunov(g, ziso, cert)[0]
    assert not verify_lyapunov(g, ziso, cert, strict=True)[0]
    # solve respects the strict form and so reports the transit loop
    assert solve(g, ziso, ()).kind == "obstruction"


def test_zero_class_with_recurrent_z_is_solvable():
    rng = random.Random(23)
    for _ in range(100):
        g = random_graph(rng, 10, 2)
        r = chain_recurrent_set(g)
        # components of R joined by an edge break the strict form; skip those
        if len(z_components(g, r)) != len([c for c in scc(g) if set(c) <= r]):
            continue
        out = solve(g, IsolatedInvariantSet(r, r), (0,))
        assert out.kind == "lyapunov"


def test_solve_finite_z():
    h = homoclinic_graph(3, winding=1)
    assert solve_finite_z(h, {0}, (-1,)).kind == "lyapunov"
    with pytest.raises(NotIsolated):
        solve_finite_z(homoclinic_graph(2), {0}, (-1,))
    with pytest.raises(NotInvariant):
        solve_finite_z(path_graph(3), {1}, (0,))
    g = gradient_like_graph()
    cert = solve_finite_z(g, {0, 1, 2, 3}, (0, 0))
    assert cert.kind == "lyapunov"


def test_level_cuts_homoclinic():
    h = homoclinic_graph(6, winding=1)
    ziso = find_isolating_block(h, {0}, 1)
    cert = solve(h, ziso, (-1,))
    cuts = level_cuts(h, cert)
    assert cuts
    inter = frozenset(h.nodes)
    for c in cuts:
        assert inv(h, c.ziso.z) == c.ziso.z
        inter &= c.ziso.z
    assert inter == r_xi_set(h, (-1,)) == {0}


def test_level_cuts_need_integral_class():
    g = loop_graph(3, total=-1)
    cert = solve(g, EMPTY, (F(1, 2),))
    with pytest.raises(NonIntegralClass):
        level_cuts(g, cert)


def test_prop_composition_two_loop():
    g = two_loop_graph()
    for xi, expect in (((1,), "obstruction"), ((-1,), "lyapunov")):
        ziso = find_isolating_block(g, r_xi_set(g, xi), 1)
        assert solve(g, ziso, xi).kind == expect


def test_certificate_from_potentials():
    g = loop_graph(2, total=-2)
    cert = LyapunovCertificate.from_potentials(g, (1,), {0: 0, 1: -1}, {})
    assert cert.lam == (-1, -1) and cert.slack == 1
    assert verify_lyapunov(g, EMPTY, cert)[0]


def test_heteroclinic_needs_negative_total():
    for fw, bw, kind in ((1, -2, "lyapunov"), (1, -1, "obstruction"), (2, -1, "obstruction")):
        h = heteroclinic_circuit(2, forward=fw, backward=bw)
        out = solve_finite_z(h, {0, 1}, (1,))
        assert out.kind == kind


def test_verify_names_perturbed_potential():
    g = loop_graph(3, total=-1)
    cert = solve(g, EMPTY, (1,))
    f = dict(cert.f)
    f[1] += 10
    bad = dataclasses.replace(cert, f=f)
    ok, report = verify_lyapunov(g, EMPTY, bad)
    assert not ok and "edge" in report[0]


def test_verify_empty_graph():
    g = FlowGraph([], [], 1)
    cert = LyapunovCertificate.from_potentials(g, (0,), {}, {})
    assert verify_lyapunov(g, EMPTY, cert) == (True, [])


def test_verify_circulation_documented_examples():
    assert not verify_circulation(path_graph(3), frozenset(), CoherentCirculation({0: 1, 1: 1}))[0]
    g = FlowGraph(range(3), [(0, 0, ()), (1, 0, ()), (0, 2, ()), (2, 1, ())], 0)
    uneven = CoherentCirculation({1: 1, 2: 2, 3: 1})
    assert not verify_circulation(g, {0}, uneven)[0]


def test_asymptotic_cycle_properties():
    h = homoclinic_graph(4, winding=3)
    ziso = find_isolating_block(h, {0}, 1)
    mu = CoherentCirculation({1: 1, 2: 1, 3: 1, 4: 1, 5: 1})
    assert asymptotic_cycle(h, ziso, mu, (1,)) == 3
    assert asymptotic_cycle(h, ziso, mu, (0,)) == 0
    assert asymptotic_cycle(h, ziso, mu.scaled(2), (1,)) == 6
    # a different primitive on the block changes nothing
    w = pair(h, (1,))
    _, gl = relativize(h, (1,), ziso.block)
    shifted = {v: x + 7 for v, x in gl.items()}
    alt = [w[i] - (shifted.get(e.head, 0) - shifted.get(e.tail, 0)) for i, e in enumerate(h.edges)]
    assert sum(x * alt[i] for i, x in mu.flow.items()) == 3


def test_conley_path():
    assert conley_lyapunov(path_graph(3)) == {0: 0, 1: -1, 2: -2}
    assert set(conley_lyapunov(loop_graph(4)).values()) == {0}


def test_solve_finite_z_not_isolated_two_cycle():
    # rest node 0 sits on a 2-cycle 1 <-> 2 inside its 1-neighbourhood
    g = FlowGraph(range(3), [(0, 0, (0,)), (0, 1, (0,)), (1, 2, (0,)), (2, 1, (0,)), (2, 0, (0,))], 1)
    with pytest.raises(NotIsolated) as err:
        solve_finite_z(g, {0}, (1,))
    assert "0" in str(err.value)


def test_level_cut_documented_examples():
    g = loop_graph(4, total=-1)
    cert = solve(g, EMPTY, (1,))
    cuts = level_cuts(g, cert)
    assert len(cuts) == 1 and cuts[0].ziso.z == frozenset()
    two = FlowGraph(range(4), [(0, 1, (0,)), (1, 0, (-1,)), (2, 3, (0,)), (3, 2, (-1,))], 1)
    cert = solve(two, EMPTY, (1,))
    inter = frozenset(two.nodes)
    for c in level_cuts(two, cert):
        inter &= c.ziso.z
    assert inter == frozenset()


def test_intersection_closure():
    rng = random.Random(31)
    checked = 0
    for _ in range(400):
        g = random_graph(rng, 8, 2)
        xi = (F(1),)
        cands = []
        for v in g.nodes:
            if any(g.edges[i].head == v for i in g.out_edges(v)):
                try:
                    cands.append(find_isolating_block(g, {v}, 1))
                except (NotIsolated, NotInvariant):
                    pass
        cands.append(EMPTY)
        for a in cands:
            for b in cands:
                try:
                    ca, cb = solve(g, a, xi), solve(g, b, xi)
                except NotInHZ:
                    continue
                if ca.kind != "lyapunov" or cb.kind != "lyapunov":
                    continue
                z = a.z & b.z
                block = a.block & b.block
                if inv(g, block) != z:
                    continue
                lam = tuple(x + y for x, y in zip(ca.lam, cb.lam))
                cert = LyapunovCertificate(tuple(2 * x for x in xi), None, None, lam,
                                           ca.slack + cb.slack)
                ok, report = verify_lyapunov(g, IsolatedInvariantSet(z, block), cert)
                assert ok, report
                checked += 1
    assert checked > 50


def test_support_confinement():
    rng = random.Random(32)
    seen = 0
    for _ in range(300):
        g = random_graph(rng, 9, 2)
        r = chain_recurrent_set(g)
        z = frozenset(v for v in r if any(g.edges[i].head == v for i in g.out_edges(v)))
        try:
            ziso = find_isolating_block(g, z, 1)
            out = solve(g, ziso, (1,))
        except (NotIsolated, NotInvariant, NotInHZ):
            continue
        if out.kind == "obstruction":
            seen += 1
            nodes = {g.edges[i].tail for i in out.circulation.support}
            nodes |= {g.edges[i].head for i in out.circulation.support}
            assert nodes <= r
    assert seen > 20


def test_zero_class_iff_acyclic():
    rng = random.Random(33)
    for _ in range(200):
        g, ziso, _ = random_isolated_instance(rng, n_max=10, m_max=20)
        out = solve(g, ziso, (0,))
        nodes, arcs, _ = contracted_arcs(g, ziso.z, [0] * g.n_edges)
        contracted = FlowGraph(nodes, [(t, h, ()) for t, h, _, _ in arcs], 0)
        assert (out.kind == "lyapunov") == (not directed_cycle_exists(contracted))
