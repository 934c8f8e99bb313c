"""Lyapunov 1-forms on flow graphs, decided with exact dual certificates."""
from .catalog import heteroclinic_circuit, homoclinic_graph, loop_graph, path_graph
from .cohomology import (class_in_h_z, coboundary, cycle_basis, pair, primitive_on,
                         relativize)
from .discretize import (GridSpec, TorusField, build_graph, catalog_field, flow_step,
                         mark_zero_set)
from .duality import (CoherentCirculation, LevelCut, LyapunovCertificate, Obstruction,
                      asymptotic_cycle, conley_certificate, conley_lyapunov, level_cut_blocks,
                      level_cuts, solve, solve_finite_z, verify_circulation, verify_lyapunov)
from .errors import (Cancelled, InvalidIsolation, LyapformError, NonIntegralClass, NotExact,
                     NotInHZ, NotInvariant, NotIsolated, RankMismatch, StepTooLarge)
from .graph import (Edge, FlowGraph, IsolatedInvariantSet, find_isolating_block, inv,
                    is_isolating_block, scc, z_components)
from .recurrence import chain_recurrent_set, r_xi_bruteforce, r_xi_set, zero_weight_walk

__version__ = "0.1.0"

__all__ = [
    "Cancelled",
    "CoherentCirculation",
    "Edge",
    "FlowGraph",
    "GridSpec",
    "InvalidIsolation",
    "IsolatedInvariantSet",
    "LevelCut",
    "LyapformError",
    "LyapunovCertificate",
    "NonIntegralClass",
    "NotExact",
    "NotInHZ",
    "NotInvariant",
    "NotIsolated",
    "Obstruction",
    "RankMismatch",
    "StepTooLarge",
    "TorusField",
    "asymptotic_cycle",
    "build_graph",
    "catalog_field",
    "chain_recurrent_set",
    "class_in_h_z",
    "coboundary",
    "conley_certificate",
    "conley_lyapunov",
    "cycle_basis",
    "find_isolating_block",
    "flow_step",
    "heteroclinic_circuit",
    "homoclinic_graph",
    "inv",
    "is_isolating_block",
    "level_cut_blocks",
    "level_cuts",
    "loop_graph",
    "mark_zero_set",
    "pair",
    "path_graph",
    "primitive_on",
    "r_xi_bruteforce",
    "r_xi_set",
    "relativize",
    "scc",
    "solve",
    "solve_finite_z",
    "verify_circulation",
    "verify_lyapunov",
    "z_components",
    "zero_weight_walk",
]
