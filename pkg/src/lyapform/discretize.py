"""Flow graphs from vector fields on flat tori.

Cells of a uniform grid on ``[0, 1)^dim`` become nodes.  Each cell is
sampled on a regular lattice (corners included) plus its centre, the samples
are advanced one RK4 step in the universal cover, and an edge is added to
every cell meeting the inflated bounding box of the images.  The edge weight
is the lattice displacement of the target cell in the cover, so weight sums
over closed walks are winding numbers.

Floating point is confined to this module; the graphs it produces carry
integer weights.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import StepTooLarge
from .graph import FlowGraph

TAU = 2.0 * math.pi
_SNAP = 1e-9


def _param(params, name, default):
    x = params.get(name, default)
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def _torus_delta(x, c):
    d = (x - c) % 1.0
    return np.where(d > 0.5, d - 1.0, d)


def _linear(p, dim):
    names = "abc"[:dim]
    vec = np.array([_param(p, k, 0.0) for k in names])

    def V(x):
        return np.broadcast_to(vec, x.shape).copy()
    return V


def _gradient(p, dim):
    phase = _param(p, "phase", 0.013)
    amp = _param(p, "amplitude", 1.0)

    # V = -grad F, F = amp * sum_k cos(2 pi (x_k - phase))
    def V(x):
        return amp * TAU * np.sin(TAU * (x - phase))
    return V


def _homoclinic(p, dim):
    if dim != 2:
        raise ValueError("homoclinic field is defined on T^2 only")
    px = _param(p, "px", 0.013)
    py = _param(p, "py", 0.013)
    speed = _param(p, "speed", 1.0)

    # saddle-node in x times a hyperbolic direction in y: rest points at
    # (px, py) and (px, py + 1/2); the rows through them are homoclinic loops
    # winding once around the x-circle
    def V(x):
        out = np.empty_like(x)
        out[..., 0] = speed * (1.0 - np.cos(TAU * (x[..., 0] - px)))
        out[..., 1] = np.sin(TAU * (x[..., 1] - py))
        return out
    return V


def _slowed_minimal(p, dim):
    if dim != 2:
        raise ValueError("slowed_minimal field is defined on T^2 only")
    alpha = _param(p, "alpha", (math.sqrt(5.0) - 1.0) / 2.0)
    cx = _param(p, "cx", 0.5)
    cy = _param(p, "cy", 0.5)
    r = _param(p, "radius", 0.1)
    if r <= 0 or r >= 0.5:
        raise ValueError("radius must lie in (0, 1/2)")
    direction = np.array([1.0, alpha])

    def V(x):
        dx = _torus_delta(x[..., 0], cx)
        dy = _torus_delta(x[..., 1], cy)
        d = np.sqrt(dx * dx + dy * dy)
        bump = np.clip((d - r) / r, 0.0, 1.0) ** 2
        return bump[..., None] * direction
    return V


CATALOG = {
    "linear": _linear,
    "gradient": _gradient,
    "homoclinic": _homoclinic,
    "slowed_minimal": _slowed_minimal,
}


@dataclass(frozen=True)
class TorusField:
    dim: int
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.kind not in CATALOG:
            raise ValueError(f"unknown field {self.kind!r}; known: {sorted(CATALOG)}")
        object.__setattr__(self, "_V", CATALOG[self.kind](dict(self.params), self.dim))

    def __call__(self, x):
        """Evaluate at points of shape ``(..., dim)``; input is taken mod 1."""
        x = np.asarray(x, dtype=float)
        return self._V(x % 1.0)


def catalog_field(name: str, params: dict | None = None, dim: int = 2) -> TorusField:
    return TorusField(dim, name, dict(params or {}))


@dataclass(frozen=True)
class GridSpec:
    """``samples`` is the number of lattice points per axis inside a cell, corners included."""
    resolution: int
    h: float
    samples: int = 4
    epsilon: float = 0.0

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 8:
            raise ValueError("resolution must be an integer >= 8")
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if int(self.samples) != self.samples or self.samples < 4:
            raise ValueError("samples must be an integer >= 4")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")


def _rk4(field: TorusField, x, h):
    k1 = field(x)
    k2 = field(x + 0.5 * h * k1)
    k3 = field(x + 0.5 * h * k2)
    k4 = field(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def flow_step(field: TorusField, x, h: float):
    """One RK4 step.  Returns ``(point in [0,1)^dim, integer lattice displacement)``."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    y = _rk4(field, x, h)
    disp = np.floor(y)
    return y - disp, tuple(int(k) for k in disp)


def _cell_offsets(samples: int, dim: int):
    ticks = np.linspace(0.0, 1.0, samples)
    lattice = np.array(list(itertools.product(ticks, repeat=dim)))
    return np.vstack([lattice, np.full((1, dim), 0.5)])


def cell_index(resolution: int, dim: int):
    """All cell multi-indices in node-id order (C order, axis 0 slowest)."""
    return np.array(list(itertools.product(range(resolution), repeat=dim)), dtype=np.int64)


def node_id(multi, resolution: int) -> int:
    out = 0
    for k in multi:
        out = out * resolution + int(k)
    return out


def _sample_points(field: TorusField, grid: GridSpec, cells):
    offsets = _cell_offsets(grid.samples, field.dim)
    return (cells[:, None, :] + offsets[None, :, :]) / grid.resolution


def _edges_for(field: TorusField, grid: GridSpec, cells):
    N = grid.resolution
    pts = _sample_points(field, grid, cells)
    img = _rk4(field, pts, grid.h)
    if np.any(np.abs(img - pts) > 0.5):
        raise StepTooLarge(f"a sample moves more than half the torus in one step (h={grid.h})")
    pad = grid.epsilon / N
    lo = img.min(axis=1) - pad
    hi = img.max(axis=1) + pad
    lo_idx = np.floor(lo * N + _SNAP).astype(np.int64)
    hi_idx = np.maximum(lo_idx, np.ceil(hi * N - _SNAP).astype(np.int64) - 1)
    edges = []
    for c, a, b in zip(cells, lo_idx, hi_idx):
        tail = node_id(c, N)
        for lifted in itertools.product(*(range(x, y + 1) for x, y in zip(a, b))):
            head = node_id([k % N for k in lifted], N)
            edges.append((tail, head, tuple(k // N for k in lifted)))
    return edges


def build_graph(field: TorusField, grid: GridSpec, n_jobs: int = 1) -> FlowGraph:
    """Outer-approximation transition graph with winding-number weights.

    ``n_jobs`` threads process disjoint chunks of cells; the edge list is
    sorted afterwards so the result does not depend on it.
    """
    N = grid.resolution
    cells = cell_index(N, field.dim)
    if n_jobs <= 1:
        edges = _edges_for(field, grid, cells)
    else:
        chunks = np.array_split(cells, n_jobs * 4)
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda ch: _edges_for(field, grid, ch), chunks))
        edges = [e for part in parts for e in part]
    edges = sorted(set(edges))
    nodes = [node_id(c, N) for c in cells]
    coords = {node_id(c, N): tuple(int(k) for k in c) for c in cells}
    return FlowGraph(nodes, edges, field.dim, coords)


def mark_zero_set(field: TorusField, grid: GridSpec, threshold: float) -> frozenset:
    """Cells on which every sampled ``|V|`` is at most ``threshold``."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    N = grid.resolution
    cells = cell_index(N, field.dim)
    speed = np.linalg.norm(field(_sample_points(field, grid, cells)), axis=-1)
    hit = speed.max(axis=1) <= threshold
    return frozenset(node_id(c, N) for c, ok in zip(cells, hit) if ok)


def cell_of(point, resolution: int) -> int:
    x = np.asarray(point, dtype=float) % 1.0
    return node_id(np.minimum(np.floor(x * resolution).astype(int), resolution - 1), resolution)
