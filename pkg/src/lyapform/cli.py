"""Command-line front end.

Exit codes: 0 success / Lyapunov certificate, 1 verification failed,
2 bad input, 3 step too large, 10 obstruction, 11 class not in H_Z,
12 not isolated, 13 non-integral class.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .cohomology import as_class
from .discretize import GridSpec, TorusField, build_graph, mark_zero_set
from .duality import (LyapunovCertificate, Obstruction, asymptotic_cycle, level_cuts, solve,
                      solve_finite_z, verify_circulation, verify_lyapunov)
from .errors import (InvalidIsolation, NonIntegralClass, NotInHZ, NotInvariant, NotIsolated,
                     RankMismatch, StepTooLarge)
from .graph import IsolatedInvariantSet, find_isolating_block
from .rational import fmt, parse_vector
from .recurrence import chain_recurrent_set, r_xi_set

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_BAD_INPUT = 2
EXIT_STEP = 3
EXIT_OBSTRUCTION = 10
EXIT_NOT_IN_HZ = 11
EXIT_NOT_ISOLATED = 12
EXIT_NON_INTEGRAL = 13


class UsageError(Exception):
    pass


def load_config(path) -> tuple:
    """``(TorusField, GridSpec)`` from a JSON or TOML config file."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            cfg = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            cfg = json.loads(path.read_text(encoding="utf-8"))
        fld = cfg["field"]
        grid = cfg["grid"]
        field = TorusField(int(fld.get("dim", 2)), fld["kind"], dict(fld.get("params", {})))
        spec = GridSpec(int(grid["resolution"]), float(Fraction(str(grid["h"]))),
                        int(grid.get("samples", 4)), float(grid.get("epsilon", 0.0)))
    except StepTooLarge:
        raise
    except Exception as exc:  # any malformed config is a usage error
        raise UsageError(f"bad config {path}: {exc}") from None
    return field, spec


def _xi(args, g):
    if args.xi is None:
        return (Fraction(0),) * g.basis_rank
    try:
        return as_class(parse_vector(args.xi), g)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad class {args.xi!r}: {exc}") from None


def _z(args, g):
    if getattr(args, "z", None):
        z = io.read_nodeset(args.z)
    elif getattr(args, "auto_z", None) is not None:
        if not args.config:
            raise UsageError("--auto-z needs --config")
        field, grid = load_config(args.config)
        z = mark_zero_set(field, grid, args.auto_z)
    else:
        z = frozenset()
    bad = [v for v in z if not g.has_node(v)]
    if bad:
        raise UsageError(f"z contains unknown nodes {sorted(bad)[:5]}")
    return z


def _emit(args, text):
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------

def cmd_discretize(args) -> int:
    field, grid = load_config(args.config)
    g = build_graph(field, grid, n_jobs=args.jobs)
    io.write_graph(args.out, g)
    print(f"wrote {args.out}: {g.n_nodes} nodes, {g.n_edges} edges", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    g = io.read_graph(args.graph)
    want_r = args.R or not args.rxi
    result = {}
    if want_r:
        result["R"] = sorted(chain_recurrent_set(g))
    if args.rxi:
        xi = _xi(args, g)
        result["xi"] = [fmt(x) for x in xi]
        result["R_xi"] = sorted(r_xi_set(g, xi))
    if args.json:
        _emit(args, io.dumps(result))
    else:
        lines = []
        for key in ("R", "R_xi"):
            if key in result:
                lines.append(f"{key}: " + " ".join(map(str, result[key])))
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _block(args, g, z):
    if args.block:
        return IsolatedInvariantSet(z, io.read_nodeset(args.block))
    return find_isolating_block(g, z, args.auto_block)


def cmd_solve(args) -> int:
    g = io.read_graph(args.graph)
    xi = _xi(args, g)
    z = _z(args, g)
    if args.finite_z:
        outcome = solve_finite_z(g, z, xi, radius=args.auto_block)
    else:
        outcome = solve(g, _block(args, g, z), xi)
    text = io.dumps(io.certificate_to_dict(outcome))
    _emit(args, text)
    if isinstance(outcome, Obstruction):
        print(f"obstruction: circulation on {len(outcome.circulation.flow)} edges, "
              f"value {fmt(outcome.value)}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    print(f"lyapunov certificate, slack {fmt(outcome.slack)}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = io.read_graph(args.graph)
    cert = io.read_certificate(args.certificate, g)
    z = _z(args, g)
    if isinstance(cert, LyapunovCertificate):
        block = io.read_nodeset(args.block) if args.block else frozenset(cert.g_local) | z
        ok, report = verify_lyapunov(g, IsolatedInvariantSet(z, block), cert)
    else:
        ok, report = verify_circulation(g, z, cert.circulation)
        if ok:
            block = io.read_nodeset(args.block) if args.block else z
            try:
                value = asymptotic_cycle(g, IsolatedInvariantSet(z, block), cert.circulation,
                                         cert.xi)
            except NotInHZ as exc:
                ok, report = False, [f"class does not vanish near Z: {exc}"]
            else:
                if value != cert.value:
                    ok, report = False, [f"stated value {fmt(cert.value)} != computed "
                                         f"{fmt(value)}"]
                elif value < 0:
                    ok, report = False, [f"value {fmt(value)} is negative"]
    for line in report:
        print(line, file=sys.stderr)
    print("valid" if ok else "INVALID", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_cut(args) -> int:
    g = io.read_graph(args.graph)
    cert = io.read_certificate(args.certificate, g)
    if not isinstance(cert, LyapunovCertificate):
        raise UsageError("cut needs a lyapunov certificate")
    cuts = level_cuts(g, cert)
    _emit(args, io.dumps(io.cuts_to_list(cuts)))
    return EXIT_OK


def _dot_color(x, lo, hi):
    if hi == lo:
        t = 0.0
    else:
        t = float((x - lo) / (hi - lo))
    r = int(round(255 * (1 - t)))
    b = int(round(255 * t))
    return f"#{r:02x}00{b:02x}"


def cmd_export(args) -> int:
    g = io.read_graph(args.graph)
    overlays = [io.read_nodeset(p) for p in (args.nodes or [])]
    lam = None
    if args.cert:
        cert = io.read_certificate(args.cert, g)
        if isinstance(cert, LyapunovCertificate):
            lam = cert.lam
        else:
            lam = tuple(cert.circulation.flow.get(i, Fraction(0)) for i in range(g.n_edges))
    palette = ["red", "blue", "green", "orange", "purple"]
    if args.csv:
        lines = ["index,tail,head," + ",".join(f"w{j}" for j in range(g.basis_rank))
                 + (",value" if lam is not None else "")]
        for i, e in enumerate(g.edges):
            row = [str(i), str(e.tail), str(e.head)] + [fmt(x) for x in e.weight]
            if lam is not None:
                row.append(fmt(lam[i]))
            lines.append(",".join(row))
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    lines = ["digraph flow {"]
    for v in g.nodes:
        attrs = []
        for k, s in enumerate(overlays):
            if v in s:
                attrs.append(f'color="{palette[k % len(palette)]}"')
                break
        if g.coords and v in g.coords:
            attrs.append(f'label="{v} {tuple(g.coords[v])}"')
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    lo = min(lam) if lam else 0
    hi = max(lam) if lam else 0
    for i, e in enumerate(g.edges):
        attrs = [f'label="{",".join(fmt(x) for x in e.weight)}"'] if g.basis_rank else []
        if lam is not None:
            attrs.append(f'color="{_dot_color(lam[i], lo, hi)}"')
            attrs.append(f'tooltip="{fmt(lam[i])}"')
        lines.append(f"  {e.tail} -> {e.head}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    lines.append("}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lyapform",
                                description="Lyapunov 1-forms and coherent circulations on flow graphs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("discretize", help="build a graph from a field config")
    s.add_argument("config")
    s.add_argument("out")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_discretize)

    s = sub.add_parser("analyze", help="chain recurrent set and R_xi")
    s.add_argument("graph")
    s.add_argument("--xi")
    s.add_argument("-R", action="store_true", help="chain recurrent set")
    s.add_argument("--rxi", action="store_true", help="zero-weight recurrent set for --xi")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_analyze)

    def zspec(s):
        s.add_argument("--z", help="node-set file")
        s.add_argument("--auto-z", type=float, help="mark rest cells below this speed")
        s.add_argument("--config", help="field config for --auto-z")

    s = sub.add_parser("solve", help="certificate or obstruction")
    s.add_argument("graph")
    s.add_argument("--xi")
    zspec(s)
    s.add_argument("--block", help="node-set file with the isolating block")
    s.add_argument("--auto-block", type=int, default=1, metavar="R")
    s.add_argument("--finite-z", action="store_true",
                   help="treat z as rest nodes, each required to be isolated")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check a certificate")
    s.add_argument("graph")
    s.add_argument("certificate")
    zspec(s)
    s.add_argument("--block")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("cut", help="level-cut isolated invariant sets of a certificate")
    s.add_argument("graph")
    s.add_argument("certificate")
    s.add_argument("--out")
    s.set_defaults(func=cmd_cut)

    s = sub.add_parser("export", help="DOT or CSV export")
    s.add_argument("graph")
    fmt_group = s.add_mutually_exclusive_group(required=True)
    fmt_group.add_argument("--dot", action="store_true")
    fmt_group.add_argument("--csv", action="store_true")
    s.add_argument("--nodes", action="append", help="node-set overlay (repeatable)")
    s.add_argument("--cert", help="certificate whose cochain colours the edges")
    s.add_argument("--out")
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except StepTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STEP
    except NotInHZ as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_IN_HZ
    except (NotIsolated, InvalidIsolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ISOLATED
    except NonIntegralClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NON_INTEGRAL
    except BrokenPipeError:
        # output piped into e.g. head; not an error
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (UsageError, io.FormatError, RankMismatch, NotInvariant, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
