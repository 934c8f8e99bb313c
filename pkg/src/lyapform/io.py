"""JSON file formats: graphs, node sets and certificates.

Rationals are written as ``"p/q"`` strings in lowest terms (``"p"`` when
``q == 1``).  Output is compact and key order is fixed, so identical inputs
give byte-identical files.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .duality import CoherentCirculation, LyapunovCertificate, Obstruction
from .graph import FlowGraph, IsolatedInvariantSet
from .rational import fmt, to_fraction


class FormatError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="ascii")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None


# -- graphs -------------------------------------------------------------------

def graph_to_dict(g: FlowGraph) -> dict:
    g = g.canonical()
    nodes = []
    for v in g.nodes:
        item = {"id": v}
        if g.coords is not None and v in g.coords:
            item["coords"] = list(g.coords[v])
        nodes.append(item)
    edges = [{"tail": e.tail, "head": e.head, "w": [fmt(x) for x in e.weight]}
             for e in g.edges]
    return {"basis_rank": g.basis_rank, "nodes": nodes, "edges": edges}


def graph_from_dict(d: dict) -> FlowGraph:
    try:
        k = int(d["basis_rank"])
        ids = []
        coords = {}
        for item in d["nodes"]:
            v = int(item["id"])
            ids.append(v)
            if "coords" in item:
                coords[v] = tuple(int(c) for c in item["coords"])
        edges = [(int(e["tail"]), int(e["head"]), tuple(to_fraction(x) for x in e["w"]))
                 for e in d["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed graph: {exc}") from None
    try:
        return FlowGraph(ids, edges, k, coords or None)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_graph(path) -> FlowGraph:
    return graph_from_dict(read_json(path))


def write_graph(path, g: FlowGraph) -> None:
    write_json(path, graph_to_dict(g))


# -- node sets ----------------------------------------------------------------

def nodeset_to_dict(s) -> dict:
    return {"nodes": sorted(int(v) for v in s)}


def read_nodeset(path) -> frozenset:
    d = read_json(path)
    try:
        return frozenset(int(v) for v in d["nodes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed node set: {exc}") from None


def write_nodeset(path, s) -> None:
    write_json(path, nodeset_to_dict(s))


# -- certificates ---------------------------------------------------------------

def _potential(p: dict) -> dict:
    return {str(v): fmt(p[v]) for v in sorted(p)}


def certificate_to_dict(cert) -> dict:
    if isinstance(cert, LyapunovCertificate):
        return {"kind": "lyapunov", "xi": [fmt(x) for x in cert.xi], "f": _potential(cert.f),
                "g_local": _potential(cert.g_local), "slack": fmt(cert.slack)}
    if isinstance(cert, Obstruction):
        return {"kind": "obstruction", "xi": [fmt(x) for x in cert.xi],
                "circulation": {str(i): fmt(x) for i, x in cert.circulation.flow.items()},
                "value": fmt(cert.value)}
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def certificate_from_dict(d: dict, g: FlowGraph):
    """Rebuild a certificate against ``g`` (edge indices follow ``g.canonical()`` order)."""
    if not isinstance(d, dict) or "kind" not in d:
        raise FormatError("certificate has no 'kind'")
    try:
        xi = tuple(to_fraction(x) for x in d["xi"])
        if d["kind"] == "lyapunov":
            f = {int(k): to_fraction(x) for k, x in d["f"].items()}
            g_local = {int(k): to_fraction(x) for k, x in d["g_local"].items()}
            slack = to_fraction(d["slack"])
            missing = [v for v in g.nodes if v not in f]
            if missing or len(xi) != g.basis_rank:
                raise FormatError("certificate does not match the graph")
            return LyapunovCertificate.from_potentials(g, xi, f, g_local, slack)
        if d["kind"] == "obstruction":
            flow = {int(k): to_fraction(x) for k, x in d["circulation"].items()}
            return Obstruction(xi, CoherentCirculation(flow), to_fraction(d["value"]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed certificate: {exc}") from None
    raise FormatError(f"unknown certificate kind {d['kind']!r}")


def write_certificate(path, cert) -> None:
    write_json(path, certificate_to_dict(cert))


def read_certificate(path, g: FlowGraph):
    return certificate_from_dict(read_json(path), g)


def cuts_to_list(cuts) -> list:
    return [{"level": fmt(c.level), "z": sorted(c.ziso.z), "block": sorted(c.ziso.block),
             "cut_edges": list(c.cut_edges)} for c in cuts]


def ziso_to_dict(ziso: IsolatedInvariantSet) -> dict:
    return {"z": sorted(ziso.z), "block": sorted(ziso.block)}


def fraction_list(xs) -> list:
    return [fmt(Fraction(x)) for x in xs]
