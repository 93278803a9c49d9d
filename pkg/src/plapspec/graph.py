"""Multigraphs, vertex functions and the constraint set used by the p-Laplacian.

Vertices are the integers ``0..m-1``.  Edges are stored with the orientation
given at construction; every quantity exposed here depends only on ``|dx|`` or
on symmetric functions of the endpoints, so the orientation never matters.
A loop ``(u, u)`` adds 2 to ``valency[u]`` and contributes 0 to ``dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, DimensionError, ParameterError

_BISECT_MAX_ITERS = 200
_BISECT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Multigraph:
    m: int
    edges: np.ndarray
    valency: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.m) < 1:
            raise ParameterError(f"vertex count must be >= 1, got {self.m}")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= self.m):
            raise ParameterError("edge endpoint outside [0, m)")
        edges = edges.copy()
        edges.setflags(write=False)
        val = np.bincount(edges.ravel(), minlength=self.m).astype(np.int64)
        val.setflags(write=False)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "valency", val)

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.m, self.edges.tobytes()))

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def tails(self) -> np.ndarray:
        return self.edges[:, 0]

    @property
    def heads(self) -> np.ndarray:
        return self.edges[:, 1]

    def loop_mask(self) -> np.ndarray:
        return self.edges[:, 0] == self.edges[:, 1]

    def adjacency(self) -> np.ndarray:
        """Dense symmetric matrix of non-loop edge multiplicities."""
        a = np.zeros((self.m, self.m))
        e = self.edges[~self.loop_mask()]
        np.add.at(a, (e[:, 0], e[:, 1]), 1.0)
        np.add.at(a, (e[:, 1], e[:, 0]), 1.0)
        return a

    def pair_multiplicities(self) -> dict[tuple[int, int], int]:
        """Map each unordered vertex pair (u <= v) to the number of edges joining it."""
        lo = np.minimum(self.edges[:, 0], self.edges[:, 1])
        hi = np.maximum(self.edges[:, 0], self.edges[:, 1])
        keys, counts = np.unique(lo * self.m + hi, return_counts=True)
        return {(int(k // self.m), int(k % self.m)): int(c) for k, c in zip(keys, counts)}

    def is_simple(self) -> bool:
        if self.loop_mask().any():
            return False
        return all(c == 1 for c in self.pair_multiplicities().values())

    def components(self) -> np.ndarray:
        """Connected-component label per vertex (labels are 0, 1, ... in order of first vertex)."""
        parent = list(range(self.m))

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for u, v in self.edges.tolist():
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        roots = [find(u) for u in range(self.m)]
        relabel: dict[int, int] = {}
        return np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=np.int64)

    def is_connected(self) -> bool:
        return int(self.components().max()) == 0

    def has_isolated_vertices(self) -> bool:
        return bool((self.valency == 0).any())

    def union(self, other: "Multigraph") -> "Multigraph":
        if other.m != self.m:
            raise DimensionError("union needs graphs on the same vertex set")
        return Multigraph(self.m, np.vstack([self.edges, other.edges]))

    def edge_subgraph(self, mask) -> "Multigraph":
        return Multigraph(self.m, self.edges[np.asarray(mask, dtype=bool)])

    def degree_sequence(self) -> "DegreeSequence":
        return DegreeSequence(self.valency)


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    d: np.ndarray
    d_max: int = field(init=False)
    d_min: int = field(init=False)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.int64).ravel().copy()
        if d.size == 0:
            raise ParameterError("empty degree sequence")
        if (d < 0).any():
            raise ParameterError("degrees must be non-negative")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "d_max", int(d.max()))
        object.__setattr__(self, "d_min", int(d.min()))

    def __len__(self):
        return int(self.d.size)

    @property
    def theta(self) -> float:
        """Degree ratio d_max / d_min."""
        return self.d_max / self.d_min if self.d_min > 0 else math.inf


def _weights(d) -> np.ndarray:
    if isinstance(d, DegreeSequence):
        return d.d.astype(float)
    return np.asarray(d, dtype=float)


def signed_power(x, e: float) -> np.ndarray:
    """sign(x)|x|^e, with 0 mapped to 0."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** e


# ---------------------------------------------------------------------------
# constructors

def complete_graph(m: int) -> Multigraph:
    iu, ju = np.triu_indices(m, 1)
    return Multigraph(m, np.column_stack([iu, ju]))


def complete_multipartite(k: int, M: int) -> Multigraph:
    """K_{k x M}: k parts of size M, part i holding vertices iM .. (i+1)M - 1."""
    part = np.repeat(np.arange(k), M)
    iu, ju = np.triu_indices(k * M, 1)
    keep = part[iu] != part[ju]
    return Multigraph(k * M, np.column_stack([iu[keep], ju[keep]]))


def cycle_graph(m: int) -> Multigraph:
    u = np.arange(m)
    return Multigraph(m, np.column_stack([u, (u + 1) % m]))


def path_graph(m: int) -> Multigraph:
    u = np.arange(m - 1)
    return Multigraph(m, np.column_stack([u, u + 1]))


def star_graph(leaves: int) -> Multigraph:
    """Vertex 0 joined to vertices 1..leaves."""
    v = np.arange(1, leaves + 1)
    return Multigraph(leaves + 1, np.column_stack([np.zeros_like(v), v]))


def disjoint_union(*graphs: Multigraph) -> Multigraph:
    offset, parts = 0, []
    for g in graphs:
        parts.append(g.edges + offset)
        offset += g.m
    return Multigraph(offset, np.vstack(parts) if parts else np.empty((0, 2)))


# ---------------------------------------------------------------------------
# text format: "m <count>" header then one "u v" per line, '#' comments

def write_graph(G: Multigraph, path) -> None:
    lines = [f"m {G.m}"] + [f"{u} {v}" for u, v in G.edges.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_graph(text: str) -> Multigraph:
    m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if m is None:
            if len(tok) != 2 or tok[0] != "m":
                raise ParameterError(f"line {lineno}: expected header 'm <count>'")
            m = int(tok[1])
            continue
        if len(tok) != 2:
            raise ParameterError(f"line {lineno}: expected 'u v'")
        edges.append((int(tok[0]), int(tok[1])))
    if m is None:
        raise ParameterError("missing 'm <count>' header")
    return Multigraph(m, np.array(edges, dtype=np.int64).reshape(-1, 2))


def read_graph(path) -> Multigraph:
    return parse_graph(Path(path).read_text())


# ---------------------------------------------------------------------------
# vertex-function operations

def _check_len(x, n, what="vertex function"):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionError(f"{what} has shape {x.shape}, expected ({n},)")
    return x


def total_derivative(G: Multigraph, x) -> np.ndarray:
    """dx(e) = x(e+) - x(e-), one entry per edge."""
    x = _check_len(x, G.m)
    return x[G.heads] - x[G.tails]


def weighted_p_norm(x, d, p: float) -> float:
    """Sum_u |x_u|^p d_u.  This is the p-th power of the norm, not the norm itself."""
    w = _weights(d)
    x = _check_len(x, w.size)
    if p < 1:
        raise ParameterError("p must be >= 1")
    return float(np.dot(np.abs(x) ** p, w))


def p_mean_residual(x, d, p: float) -> float:
    """Sum_u {x_u}^{p-1} d_u; zero exactly on the zero-p-mean hyperplane."""
    return float(np.dot(signed_power(x, p - 1.0), _weights(d)))


def center_to_zero_p_mean(x, d, p: float) -> tuple[np.ndarray, float]:
    """Shift x by the unique c minimising c -> Sum |x_u - c|^p d_u.

    The root of the decreasing map c -> Sum {x_u - c}^{p-1} d_u is bracketed by
    [min x, max x] and located by bisection; a Newton step is tried first at every
    iteration and only kept when it stays inside the current bracket.
    """
    if p <= 1:
        raise ParameterError("p must be > 1")
    w = _weights(d)
    x = _check_len(x, w.size)
    if not (w > 0).any():
        raise DegenerateInputError("all weights are zero")
    lo, hi = float(x.min()), float(x.max())
    tol = _BISECT_RTOL * (float(np.abs(x).max()) + 1.0)
    if hi - lo <= tol:
        return x - lo, lo

    e = p - 1.0

    def g(c):
        r = x - c
        return float(np.dot(np.sign(r) * np.abs(r) ** e, w))

    if p == 2.0:
        c = float(np.dot(x, w) / w.sum())
        return x - c, c

    c = float(np.dot(x, w) / w.sum())
    c = min(max(c, lo), hi)
    for _ in range(_BISECT_MAX_ITERS):
        gc = g(c)
        if gc == 0.0:
            break
        if gc > 0:
            lo = c
        else:
            hi = c
        if hi - lo <= tol:
            break
        with np.errstate(divide="ignore"):
            slope = e * float(np.dot(np.abs(x - c) ** (e - 1.0), w))
        cn = c + gc / slope if 0.0 < slope < math.inf else math.nan
        if not (lo < cn < hi):
            cn = 0.5 * (lo + hi)
        if abs(cn - c) <= 0.25 * tol:
            c = cn
            break
        c = cn
    return x - c, c


def normalize_to_sphere(x, d, p: float) -> np.ndarray:
    """Scale x so that Sum |x_u|^p d_u = 1."""
    w = _weights(d)
    x = _check_len(x, w.size)
    s = weighted_p_norm(x, w, p)
    if s == 0.0:
        raise DegenerateInputError("cannot normalise a function of zero weighted norm")
    return x / s ** (1.0 / p)


def project_to_s(x, d, p: float) -> np.ndarray:
    """Centre to zero p-mean, then normalise: lands in S_{p,d}."""
    y, _ = center_to_zero_p_mean(x, d, p)
    return normalize_to_sphere(y, d, p)


def energy(G: Multigraph, x, p: float) -> float:
    """||dx||_p^p."""
    return float(np.sum(np.abs(total_derivative(G, x)) ** p))


def rayleigh_quotient(G: Multigraph, x, p: float) -> float:
    """||dx||_p^p / inf_c Sum_u |x_u - c|^p val(u)."""
    if p <= 1:
        raise ParameterError("p must be > 1")
    x = _check_len(x, G.m)
    y, _ = center_to_zero_p_mean(x, G.valency, p)
    den = weighted_p_norm(y, G.valency, p)
    if den <= 0.0:
        raise DegenerateInputError("x is constant on the support of the valency")
    return energy(G, x, p) / den
