"""Random graph models and checks on their outputs.

Samplers take an ``RngSeed``; equal seeds give byte-identical edge lists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SizeError
from .graph import DegreeSequence, Multigraph, complete_multipartite

EXACT_DENSITY_MAX_M = 14
_DENSITY_BLOCK = 512


@dataclass(frozen=True)
class RngSeed:
    """Counter-style stream id: (seed, stream) maps to an independent Philox generator."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ParameterError(f"{name} must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RngSeed":
        """A distinct stream derived from this one, for sub-purposes of a trial."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), int(index)))
        return RngSeed(int(self.seed), int(ss.generate_state(2, np.uint64)[0]))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngSeed):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngSeed(int(rng)).generator()


def _check_rho(rho):
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho}")


def sample_er(m: int, rho: float, rng) -> Multigraph:
    """G(m, rho): each of the C(m, 2) pairs present independently with probability rho."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    _check_rho(rho)
    iu, ju = np.triu_indices(m, 1)
    keep = _gen(rng).random(iu.size) < rho
    return Multigraph(m, np.column_stack([iu[keep], ju[keep]]))


@dataclass(frozen=True, eq=False)
class HalfEdgeMatching:
    points: np.ndarray  # (n, 2): vertex, slot
    pairing: np.ndarray  # (n/2, 2): indices into points

    def partner(self) -> np.ndarray:
        """The matching as an involution on point indices."""
        inv = np.empty(self.points.shape[0], dtype=np.int64)
        inv[self.pairing[:, 0]] = self.pairing[:, 1]
        inv[self.pairing[:, 1]] = self.pairing[:, 0]
        return inv

    def projection(self, m: int) -> Multigraph:
        """M(F): one edge per matched pair of half-edges."""
        v = self.points[:, 0]
        return Multigraph(m, np.column_stack([v[self.pairing[:, 0]], v[self.pairing[:, 1]]]))


def half_edge_points(d) -> np.ndarray:
    d = d.d if isinstance(d, DegreeSequence) else np.asarray(d, dtype=np.int64)
    verts = np.repeat(np.arange(d.size), d)
    starts = np.repeat(np.cumsum(d) - d, d)
    return np.column_stack([verts, np.arange(verts.size) - starts])


def sample_configuration(d, rng) -> tuple[HalfEdgeMatching, Multigraph]:
    """Configuration model: uniform perfect matching of half-edges, projected to a multigraph."""
    ds = d if isinstance(d, DegreeSequence) else DegreeSequence(d)
    if int(ds.d.sum()) % 2:
        raise ParameterError("degree sum must be even")
    pts = half_edge_points(ds)
    perm = _gen(rng).permutation(pts.shape[0])
    matching = HalfEdgeMatching(pts, perm.reshape(-1, 2))
    return matching, matching.projection(len(ds))


def sample_multipartite_er(k: int, M: int, rho: float, rng) -> Multigraph:
    """Keep each edge of K_{k x M} independently with probability rho."""
    if k < 2 or M < 1:
        raise ParameterError("need k >= 2 and M >= 1")
    _check_rho(rho)
    full = complete_multipartite(k, M)
    keep = _gen(rng).random(full.n_edges) < rho
    return full.edge_subgraph(keep)


@dataclass(frozen=True, eq=False)
class DegreeMatrix:
    """entries[u, j] = number of half-edges at u pointing into part j; part of u is u // M."""

    k: int
    M: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64).copy()
        if e.shape != (self.k * self.M, self.k):
            raise ParameterError(f"entries must have shape ({self.k * self.M}, {self.k})")
        if (e < 0).any():
            raise ParameterError("degrees must be non-negative")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def part_of(self, u: int) -> int:
        return u // self.M

    def part(self, i: int) -> np.ndarray:
        return np.arange(i * self.M, (i + 1) * self.M)

    def block_totals(self) -> np.ndarray:
        """Delta[i, j] = Sum_{u in V_i} d_{u, j}."""
        return self.entries.reshape(self.k, self.M, self.k).sum(axis=1)

    def is_admissible(self) -> bool:
        own = self.entries[np.arange(self.k * self.M), np.arange(self.k * self.M) // self.M]
        if own.any():
            return False
        t = self.block_totals()
        return bool(np.array_equal(t, t.T))

    @classmethod
    def uniform(cls, k: int, M: int, cross: int) -> "DegreeMatrix":
        e = np.full((k * M, k), cross, dtype=np.int64)
        e[np.arange(k * M), np.arange(k * M) // M] = 0
        return cls(k, M, e)


def sample_multipartite_matching(D: DegreeMatrix, rng) -> Multigraph:
    """For every pair of parts, a uniform matching between the half-edges pointing at each other."""
    if not D.is_admissible():
        raise ParameterError("degree matrix is not admissible")
    gen = _gen(rng)
    chunks = []
    for i in range(D.k):
        for j in range(i + 1, D.k):
            left = np.repeat(D.part(i), D.entries[D.part(i), j])
            right = np.repeat(D.part(j), D.entries[D.part(j), i])
            chunks.append(np.column_stack([left, right[gen.permutation(right.size)]]))
    edges = np.vstack(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Multigraph(D.k * D.M, edges)


# ---------------------------------------------------------------------------
# checks

@dataclass(frozen=True)
class ConcentrationResult:
    ok: bool
    worst_vertex: int
    worst_deviation: float  # |val - expected| / expected


def degree_concentration_check(G: Multigraph, expected: float, delta: float) -> ConcentrationResult:
    """Is every valency within a factor (1 +- delta) of ``expected``?"""
    if expected <= 0:
        raise ParameterError("expected degree must be positive")
    dev = np.abs(G.valency - expected) / expected
    u = int(np.argmax(dev))
    return ConcentrationResult(bool(dev.max() <= delta), u, float(dev[u]))


@dataclass(frozen=True)
class DensityWitness:
    A: tuple
    B: tuple
    edges: float
    mu: float

    @property
    def ratio(self) -> float:
        return self.edges / self.mu


@dataclass(frozen=True)
class DensityVerdict:
    controlled: bool
    definitive: bool
    pairs_checked: int
    witness: DensityWitness | None  # violating pair, or the pair with the largest edges/mu


def _violations(E, a_size, b_size, m, d, theta, C):
    mu = theta * a_size * b_size * d / m
    s = np.maximum(a_size, b_size)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_a = E <= C * mu
        lhs = np.where(E > 0, E * np.log(E / mu), 0.0)
        cond_b = lhs <= C * s * np.log(m / s)
    return ~(cond_a | cond_b), mu


def edge_density_check(G: Multigraph, theta: float, C: float, mode: str = "exact",
                       n_samples: int = 100_000, rng=0) -> DensityVerdict:
    """Check (theta, C)-controlled edge density.

    For vertex sets A, B let E(A, B) = 1_A^T Adj 1_B and mu(A, B) = theta |A||B| d / m
    with d the maximum valency.  The pair is fine if E <= C mu or
    E log(E/mu) <= C s log(m/s), s = max(|A|, |B|).
    """
    if theta < 1 or C < math.e:
        raise ParameterError("need theta >= 1 and C >= e")
    m = G.m
    d = int(G.valency.max()) if G.n_edges else 0
    if d == 0:
        return DensityVerdict(True, mode == "exact", 0, None)
    adj = G.adjacency()
    state = {"best": None, "violation": None}

    def witness(sa, sb, E, mu):
        return DensityWitness(tuple(int(t) for t in np.flatnonzero(sa)),
                              tuple(int(t) for t in np.flatnonzero(sb)), float(E), float(mu))

    def consider(E, bad, mu, lookup):
        # E, bad, mu are flat arrays; lookup(i) returns the subset pair of entry i
        ratio = E / mu
        if bad.any():
            i = int(np.flatnonzero(bad)[np.argmax(ratio[bad])])
            key = "violation"
        else:
            i = int(np.argmax(ratio))
            key = "best"
        cur = state[key]
        if cur is None or ratio[i] > cur.ratio:
            state[key] = witness(*lookup(i), E[i], mu[i])

    if mode == "exact":
        if m > EXACT_DENSITY_MAX_M:
            raise SizeError(f"exact mode enumerates all subset pairs; m must be <= {EXACT_DENSITY_MAX_M}")
        codes = np.arange(1, 2**m)
        subsets = ((codes[:, None] >> np.arange(m)) & 1).astype(float)
        sizes = subsets.sum(axis=1)
        through = subsets @ adj
        count = 0
        for lo in range(0, codes.size, _DENSITY_BLOCK):
            hi = min(lo + _DENSITY_BLOCK, codes.size)
            # unordered pairs: row index a in [lo, hi), column index b >= a
            E = through[lo:hi] @ subsets[lo:].T
            bad, mu = _violations(E, sizes[lo:hi, None], sizes[None, lo:], m, d, theta, C)
            upper = np.arange(hi - lo)[:, None] <= np.arange(codes.size - lo)[None, :]
            count += int(upper.sum())
            width = E.shape[1]

            def lookup(i, lo=lo, width=width):
                r, c = divmod(i, width)
                return subsets[lo + r], subsets[lo + c]

            ratio_mask = np.where(upper, 1.0, 0.0).ravel()
            consider((E.ravel() * ratio_mask), (bad & upper).ravel(),
                     np.broadcast_to(mu, E.shape).ravel(), lookup)
        definitive = True
    elif mode == "sampled":
        gen = _gen(rng)
        half = max(1, m // 2)
        count = int(n_samples)
        SA = np.zeros((count, m))
        SB = np.zeros((count, m))
        for row in range(count):
            for S in (SA, SB):
                size = int(min(half, max(1, math.floor(math.exp(gen.random() * math.log(half + 1))))))
                S[row, gen.choice(m, size, replace=False)] = 1.0
        E = np.einsum("ij,jk,ik->i", SA, adj, SB)
        bad, mu = _violations(E, SA.sum(axis=1), SB.sum(axis=1), m, d, theta, C)
        consider(E, bad, mu, lambda i: (SA[i], SB[i]))
        definitive = False
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    violation = state["violation"]
    if violation is not None:
        return DensityVerdict(False, True, count, violation)
    return DensityVerdict(True, definitive, count, state["best"])
