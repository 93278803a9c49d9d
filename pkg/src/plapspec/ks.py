"""Deterministic ingredients of the Kahn-Szemeredi style eigenvalue bound.

Remainder functions for a pair of reals (a, b):

    r       = |a|^p + |b|^p - |a - b|^p
    r_tilde = {a}^{p-1} b + a {b}^{p-1}
    r_bar   = max(|a|^{p-1}|b|, |a||b|^{p-1})

Summing r over the edges of G gives X_x, and ||dx||_p^p = ||x||_{p,val}^p - X_x.
The net T_{p,d,R} lives in signed-power coordinates y_i = {x_i}^{p-1}, on the
per-vertex grid eps d^{1/p} / (d_i m^{1/q}) Z with q = p/(p-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError, PreconditionError, SizeError
from .graph import DegreeSequence, Multigraph, signed_power

NET_ENUM_LIMIT = 10**7
_SPHERE_TOL = 1e-8


@dataclass(frozen=True)
class RemainderTriple:
    r: float
    r_tilde: float
    r_bar: float


def remainder_arrays(a, b, p):
    """Vectorised (r, r_tilde, r_bar)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aa, ab = np.abs(a), np.abs(b)
    r = aa**p + ab**p - np.abs(a - b) ** p
    r_tilde = signed_power(a, p - 1) * b + a * signed_power(b, p - 1)
    r_bar = np.maximum(aa ** (p - 1) * ab, aa * ab ** (p - 1))
    return r, r_tilde, r_bar


def remainders(a: float, b: float, p: float) -> RemainderTriple:
    if p < 2:
        raise ParameterError("p must be >= 2")
    r, rt, rb = remainder_arrays(a, b, p)
    return RemainderTriple(float(r), float(rt), float(rb))


@dataclass
class InequalityReport:
    samples: int
    violations: dict
    tightest: dict  # smallest observed slack ratio per inequality (1 means tight)

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations.values()))


def remainder_inequality_suite(samples: int, p_range=(2.0, 6.0), rng=0, ab_range=10.0,
                               rel_tol: float = 1e-10) -> InequalityReport:
    """Check the remainder inequalities on random (a, b, p).

    r_bar <= |r| <= (1 + p 2^{p-1}) r_bar,  r_tilde <= |r_tilde| <= 2 r_bar,
    and r <= p r_tilde when p >= 3.  Comparisons allow rel_tol * max(|a|,|b|)^p.
    """
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    a = gen.uniform(-ab_range, ab_range, samples)
    b = gen.uniform(-ab_range, ab_range, samples)
    p = gen.uniform(p_range[0], p_range[1], samples)
    if p_range[0] < 2:
        raise ParameterError("p must be >= 2")
    r, rt, rb = remainder_arrays(a, b, p)
    slack = rel_tol * np.maximum(np.abs(a), np.abs(b)) ** p + 1e-300
    const = 1.0 + p * 2.0 ** (p - 1)
    high_p = p >= 3
    checks = {
        "r_bar_le_abs_r": (rb, np.abs(r), np.ones_like(p, dtype=bool)),
        "abs_r_le_const_r_bar": (np.abs(r), const * rb, np.ones_like(p, dtype=bool)),
        "r_tilde_le_abs_r_tilde": (rt, np.abs(rt), np.ones_like(p, dtype=bool)),
        "abs_r_tilde_le_two_r_bar": (np.abs(rt), 2.0 * rb, np.ones_like(p, dtype=bool)),
        "r_le_p_r_tilde": (r, p * rt, high_p),
    }
    violations, tightest = {}, {}
    for name, (lhs, rhs, mask) in checks.items():
        violations[name] = int(np.sum((lhs > rhs + slack) & mask))
        # ratio lhs/rhs where both are positive; values near 1 mean the inequality is tight
        ok = mask & (rhs > slack) & (lhs > 0)
        tightest[name] = float((lhs[ok] / rhs[ok]).max()) if ok.any() else math.nan
    return InequalityReport(samples, violations, tightest)


# ---------------------------------------------------------------------------
# light / heavy split

def light_heavy_beta(p: float) -> float:
    return p / (2.0 + 2.0 * p)


def light_threshold(p: float, d: float, m: int) -> float:
    """d^beta / (d m) with beta = p / (2 + 2p)."""
    return d ** light_heavy_beta(p) / (d * m)


@dataclass
class Decomposition:
    light_edges: np.ndarray
    heavy_edges: np.ndarray
    X: float  # X_l + X_h
    X_l: float
    X_h: float
    threshold: float
    energy: float  # ||dx||_p^p
    norm_p: float  # Sum |x_u|^p val(u)

    def identity_gap(self) -> float:
        """| ||dx||_p^p - (||x||^p - X) |, zero up to rounding for every x."""
        return abs(self.energy - (self.norm_p - self.X))


def decompose_light_heavy(G: Multigraph, x, p: float, d_max: int | None = None) -> Decomposition:
    """Split edges by r_bar(x_u, x_v) <= threshold (light) or > threshold (heavy)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (G.m,):
        raise DimensionError(f"vertex function has shape {x.shape}, expected ({G.m},)")
    d = int(G.valency.max()) if d_max is None else int(d_max)
    if d < 1:
        raise ParameterError("d_max must be >= 1")
    thr = light_threshold(p, d, G.m)
    a, b = x[G.tails], x[G.heads]
    r, _, rb = remainder_arrays(a, b, p)
    heavy = rb > thr
    X_l = float(np.sum(r[~heavy]))
    X_h = float(np.sum(r[heavy]))
    energy = float(np.sum(np.abs(b - a) ** p))
    norm_p = float(np.dot(np.abs(x) ** p, G.valency))
    return Decomposition(np.flatnonzero(~heavy), np.flatnonzero(heavy), X_l + X_h, X_l, X_h,
                         thr, energy, norm_p)


def light_tilde_sum(G: Multigraph, x, p: float, d_max: int | None = None) -> float:
    """Sum of r_tilde over light edges."""
    dec = decompose_light_heavy(G, x, p, d_max)
    x = np.asarray(x, dtype=float)
    e = G.edges[dec.light_edges]
    _, rt, _ = remainder_arrays(x[e[:, 0]], x[e[:, 1]], p)
    return float(rt.sum())


def heavy_pair_sum(x, d, p: float, gamma: float) -> float:
    """Sum of r_bar(x_i, x_j) over ordered pairs (i, j) with r_bar >= gamma / (d_max m)."""
    w = d.d if isinstance(d, DegreeSequence) else np.asarray(d)
    x = np.asarray(x, dtype=float)
    m = x.size
    _, _, rb = remainder_arrays(x[:, None], x[None, :], p)
    return float(rb[rb >= gamma / (int(w.max()) * m)].sum())


def heavy_pair_bound(m: int, theta: float, A: float, gamma: float, p: float, d: float) -> float:
    """2 m theta^2 A^2 / (gamma^{1/p} d): bound on ``heavy_pair_sum`` when Sum|x|^p d_i <= A."""
    return 2.0 * m * theta**2 * A**2 / (gamma ** (1.0 / p) * d)


# ---------------------------------------------------------------------------
# the net

@dataclass(frozen=True, eq=False)
class NetParams:
    p: float
    epsilon: float
    theta: float
    d: DegreeSequence
    R: float = field(default=None)

    def __post_init__(self):
        if not isinstance(self.d, DegreeSequence):
            object.__setattr__(self, "d", DegreeSequence(self.d))
        if self.p < 2:
            raise ParameterError("p must be >= 2")
        if not 0 < self.epsilon <= 1:
            raise ParameterError("epsilon must lie in (0, 1]")
        if self.theta < 1 or self.epsilon * self.theta > 1 + 1e-15:
            raise ParameterError("need theta >= 1 and epsilon * theta <= 1")
        if self.d.d_min < 1:
            raise ParameterError("degrees must be positive")
        if self.theta * self.d.d_min < self.d.d_max:
            raise ParameterError("theta must be at least d_max / d_min")
        if self.R is None:
            object.__setattr__(self, "R", self.R_plus)
        if self.R < 1:
            raise ParameterError("R must be >= 1")

    @property
    def m(self) -> int:
        return len(self.d)

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def R_plus(self) -> float:
        return (1.0 + self.epsilon * self.theta ** (1.0 / self.p)) ** self.q

    @property
    def R_minus(self) -> float:
        return (1.0 - self.epsilon * self.theta ** (1.0 / self.p)) ** self.q

    def unit(self) -> float:
        """eps d^{1/p} / m^{1/q}; vertex i's grid step is unit / d_i."""
        return self.epsilon * self.d.d_max ** (1.0 / self.p) / self.m ** (1.0 / self.q)

    def steps(self) -> np.ndarray:
        return self.unit() / self.d.d.astype(float)

    def size_bound(self) -> float:
        """(4 e R / eps)^m."""
        return (4.0 * math.e * self.R / self.epsilon) ** self.m

    def perturbation_bound(self) -> float:
        """Bound on |Z_x - Z_x'| for the rounded point when Z_x <= 1."""
        s = (self.epsilon * self.theta) ** (1.0 / (self.p - 1.0))
        return 2.0 * self.p * s * (1.0 + 2.0 * s) ** (self.p - 1.0)

    def from_grid(self, k) -> np.ndarray:
        """Vertex function with {x_i}^{p-1} = k_i * step_i."""
        y = np.asarray(k, dtype=float) * self.steps()
        return signed_power(y, 1.0 / (self.p - 1.0))


def net_round(x, params: NetParams) -> tuple[np.ndarray, int, np.ndarray]:
    """Round x in S_{p,d} to the net: floor in grid units, then bump the first r coordinates.

    Returns (x_prime, r, k_prime) where k_prime are the integer grid coordinates of x_prime.
    """
    x = np.asarray(x, dtype=float)
    w = params.d.d.astype(float)
    if x.shape != (params.m,):
        raise DimensionError("x must have one entry per vertex")
    norm = float(np.dot(np.abs(x) ** params.p, w))
    y = signed_power(x, params.p - 1.0)
    mean = float(np.dot(y, w))
    scale = float(np.dot(np.abs(y), w)) + 1.0
    if abs(norm - 1.0) > _SPHERE_TOL or abs(mean) > _SPHERE_TOL * scale:
        raise PreconditionError("x is not on S_{p,d}")
    k = np.floor(y / params.steps()).astype(np.int64)
    r = -int(k.sum())
    if not 0 <= r <= params.m:
        raise PreconditionError(f"grid shift {r} outside [0, m]; x is too far from S_{{p,d}}")
    k[:r] += 1
    return params.from_grid(k), r, k


def _grid_radius(params: NetParams) -> np.ndarray:
    # |k_i step_i|^q d_i <= R
    return np.floor((params.R / params.d.d) ** (1.0 / params.q) / params.steps() + 1e-9).astype(np.int64)


def net_enumerate_tiny(params: NetParams, m: int | None = None) -> tuple[np.ndarray, int]:
    """All points of T_{p,d,R} as integer grid vectors (rows), and their count."""
    m = params.m if m is None else m
    if m != params.m:
        raise DimensionError("m must match the degree sequence length")
    if m > 4:
        raise SizeError("enumeration is limited to m <= 4")
    rad = _grid_radius(params)
    total = int(np.prod(2 * rad[:-1] + 1))
    if total > NET_ENUM_LIMIT:
        raise SizeError(f"{total} candidates exceed the enumeration limit")
    axes = [np.arange(-r, r + 1) for r in rad[:-1]]
    head = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m - 1)
    last = -head.sum(axis=1, keepdims=True)
    k = np.hstack([head, last])
    y = np.abs(k * params.steps()) ** params.q
    inside = y @ params.d.d.astype(float) <= params.R * (1 + 1e-12)
    pts = k[inside]
    return pts, int(pts.shape[0])


def azuma_tail(T: float, N: int, c: float) -> float:
    """2 exp(-T^2 / (2 N c^2)), clamped to [0, 2]."""
    if N < 1 or c <= 0:
        raise ParameterError("need N >= 1 and c > 0")
    return float(min(2.0, max(0.0, 2.0 * math.exp(-(T * T) / (2.0 * N * c * c)))))


# ---------------------------------------------------------------------------
# bound evaluators (constants as published; the o(m^{2/3}) term is not modelled)

@dataclass(frozen=True)
class LightBound:
    value: float  # high-probability upper bound on X^l
    log_failure: float  # log of (failure probability / 2), without the o(m^{2/3}) term
    branch: str


def light_bound(p: float, theta: float, K: float, d: float, m: int, epsilon: float,
                R: float | None = None) -> LightBound:
    """Uniform upper bound on light terms over the net, with its failure exponent."""
    beta = light_heavy_beta(p)
    decay = d ** (beta / p)
    entropy = m * math.log(16.0 * math.e / epsilon)
    if p >= 3:
        return LightBound(p * (128 * theta**3 + K) / decay, -K * K * m / 128.0 + entropy, "p>=3")
    if p >= 2:
        if R is None:
            R = (1.0 + epsilon * theta ** (1.0 / p)) ** (p / (p - 1.0))
        return LightBound(R * (1 - theta**-2) + (1200 * theta**3 + K) / decay,
                          -K * K * m / 6000.0 + entropy, "2<=p<3")
    raise ParameterError("p must be >= 2")


def light_tilde_expectation_bound(theta: float, R: float, d: float, p: float) -> float:
    """8 theta^3 R^2 / d^{beta/p}: bound on the mean of the light r_tilde sum."""
    return 8.0 * theta**3 * R**2 / d ** (light_heavy_beta(p) / p)


def light_increment(p: float, d: float, m: int) -> float:
    """Martingale increment bound 8 d^beta / (d m) for the light r_tilde sum."""
    return 8.0 * d ** light_heavy_beta(p) / (d * m)
