"""First nontrivial eigenvalue of the graph p-Laplacian.

``lambda_exact_p2`` is exact at p = 2 (dense symmetric eigensolve).  For other p,
``lambda_estimate`` runs projected gradient descent of the energy ||dx||_p^p on
the constraint set S_{p,d}; the returned value is the Rayleigh quotient of an
actual vertex function, hence an upper bound on the true infimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import DegenerateInputError, DimensionError, ParameterError, SizeError
from .graph import Multigraph, rayleigh_quotient, signed_power
from .jacobi import jacobi_eigenvalues

P_MIN = 1.5
JACOBI_MAX_M = 64
ARMIJO_C = 1e-4
_LBFGS_MEMORY = 8
_ROUNDING_SLACK = 1e-14


@dataclass(frozen=True)
class SolverOptions:
    restarts: int = 32
    max_iters: int = 100_000
    grad_tol: float = 1e-10
    step_shrink: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        if self.max_iters < 1 or self.grad_tol <= 0:
            raise ParameterError("max_iters and grad_tol must be positive")
        if not 0 < self.step_shrink < 1:
            raise ParameterError("step_shrink must lie in (0, 1)")


@dataclass
class EigenEstimate:
    eigenvalue: float
    minimizer: np.ndarray = field(repr=False)
    restarts_used: int
    converged: bool
    residual: float
    method: str = "iterative-upper-bound"

    def to_dict(self) -> dict:
        return {
            "lambda": self.eigenvalue,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "residual": self.residual,
            "method": self.method,
        }


def _check_p(p):
    if not p >= P_MIN:
        raise ParameterError(f"p must be >= {P_MIN}, got {p}")


def _require_no_isolated(G: Multigraph):
    if G.has_isolated_vertices():
        raise DegenerateInputError("graph has isolated vertices; the p-Laplacian is undefined there")


def energy_gradient(G: Multigraph, x, p: float) -> np.ndarray:
    """Gradient of x -> ||dx||_p^p, i.e. p * val(u) * (Delta_p x)(u)."""
    x = np.asarray(x, dtype=float)
    dx = x[G.heads] - x[G.tails]
    s = np.sign(dx) * np.abs(dx) ** (p - 1.0)
    return p * (np.bincount(G.heads, s, G.m) - np.bincount(G.tails, s, G.m))


def apply_p_laplacian(G: Multigraph, x, p: float) -> np.ndarray:
    """(Delta_p x)(u) = (1/val(u)) Sum_{edges uv} {x_u - x_v}^{p-1}; loops add nothing."""
    if p <= 1:
        raise ParameterError("p must be > 1")
    _require_no_isolated(G)
    x = np.asarray(x, dtype=float)
    if x.shape != (G.m,):
        raise DimensionError(f"vertex function has shape {x.shape}, expected ({G.m},)")
    return energy_gradient(G, x, p) / (p * G.valency)


def eigen_residual(G: Multigraph, x, eigenvalue: float, p: float) -> float:
    """max_u |(Delta_p x)(u) - lambda {x_u}^{p-1}|."""
    r = apply_p_laplacian(G, x, p) - eigenvalue * signed_power(x, p - 1.0)
    return float(np.abs(r).max())


def verify_eigenpair(G: Multigraph, x, eigenvalue: float, p: float, tol: float = 1e-6):
    """Return (ok, residual) for the eigen-equation Delta_p x = lambda {x}^{p-1}."""
    x = np.asarray(x, dtype=float)
    res = eigen_residual(G, x, eigenvalue, p)
    scale = float(np.abs(x).max()) ** (p - 1.0)
    return res <= tol * (1.0 + abs(eigenvalue)) * scale, res


# ---------------------------------------------------------------------------
# exact p = 2

def normalized_laplacian(G: Multigraph) -> np.ndarray:
    """D^{-1/2} (D' - A) D^{-1/2} with D the full valency and D' the loop-free degree.

    Its spectrum is that of Delta_2; without loops it is I - W.
    """
    _require_no_isolated(G)
    a = G.adjacency()
    s = 1.0 / np.sqrt(G.valency.astype(float))
    lap = np.diag(a.sum(axis=1)) - a
    return lap * s[:, None] * s[None, :]


def lambda_exact_p2(G: Multigraph) -> float:
    """Second-smallest eigenvalue of Delta_2 (0 exactly when G is disconnected)."""
    if G.m < 2:
        raise DegenerateInputError("need at least two vertices")
    mat = normalized_laplacian(G)
    if G.m <= JACOBI_MAX_M:
        ev = jacobi_eigenvalues(mat)
    else:
        ev = np.linalg.eigvalsh(mat)
    if not G.is_connected():
        return 0.0
    return float(ev[1])


# ---------------------------------------------------------------------------
# iterative estimate

def _center(x, w, p, e):
    lo, hi = float(x.min()), float(x.max())
    tol = 1e-12 * (float(np.abs(x).max()) + 1.0)
    if hi - lo <= tol:
        return x - lo
    c = float(np.dot(x, w)) / float(w.sum())
    if p == 2.0:
        return x - c
    for _ in range(200):
        r = x - c
        a = np.abs(r)
        ae = a ** (e - 1.0)
        gc = float(np.dot(np.sign(r) * a * ae, w))
        if gc == 0.0:
            break
        if gc > 0:
            lo = c
        else:
            hi = c
        if hi - lo <= tol:
            break
        with np.errstate(divide="ignore"):
            slope = e * float(np.dot(ae, w))
        cn = c + gc / slope if 0.0 < slope < math.inf else math.nan
        if not (lo < cn < hi):
            cn = 0.5 * (lo + hi)
        if abs(cn - c) <= 0.25 * tol:
            c = cn
            break
        c = cn
    return x - c


def _project(x, w, p, e):
    y = _center(x, w, p, e)
    s = float(np.dot(np.abs(y) ** p, w))
    if not s > 0:
        return None
    return y / s ** (1.0 / p)


def _restart_rng(seed: int, r: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), r])))


def initial_points(G: Multigraph, opts: SolverOptions) -> list[np.ndarray]:
    """Coordinate vectors at the lowest-valency vertices, then Gaussian directions."""
    n_coord = min(G.m, max(1, opts.restarts // 2)) if opts.restarts > 1 else 0
    order = np.lexsort((np.arange(G.m), G.valency))
    starts = []
    for r in range(opts.restarts):
        if r < n_coord:
            x = np.zeros(G.m)
            x[order[r]] = 1.0
        else:
            x = _restart_rng(opts.seed, r).standard_normal(G.m)
        starts.append(x)
    return starts


def _lbfgs_direction(g, hist):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(hist):
        a = rho * float(np.dot(s, q))
        alphas.append(a)
        q -= a * y
    if hist:
        s, y, _ = hist[-1]
        q *= float(np.dot(s, y)) / float(np.dot(y, y))
    for (s, y, rho), a in zip(hist, reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q += (a - b) * s
    return -q


def _descend(G, x0, p, opts, w, heads, tails):
    e = p - 1.0
    m = G.m

    def energy_and_grad(x):
        dx = x[heads] - x[tails]
        a = np.abs(dx)
        ap = a ** e
        s = np.sign(dx) * ap
        en = float(np.dot(ap, a))
        gn = p * (np.bincount(heads, s, m) - np.bincount(tails, s, m))
        g = gn - en * p * w * (np.sign(x) * np.abs(x) ** e)
        return en, g

    x = _project(x0, w, p, e)
    if x is None:
        return None
    en, g = energy_and_grad(x)
    t0 = 1.0 / (float(w.max()) * p * 2.0 ** e)
    hist = []
    converged = False
    for _ in range(opts.max_iters):
        if float(np.abs(g).max()) < opts.grad_tol:
            converged = True
            break
        direction = _lbfgs_direction(g, hist)
        if not hist or float(np.dot(direction, g)) >= 0:
            direction = -t0 * g
            hist.clear()
        step = 1.0
        accepted = False
        while step > 1e-12:
            xn = _project(x + step * direction, w, p, e)
            if xn is not None:
                en_new, gn = energy_and_grad(xn)
                if en_new <= en + ARMIJO_C * float(np.dot(g, xn - x)):
                    accepted = True
                    break
                # near the optimum energy differences drown in rounding; fall back to gradient decrease
                if en_new <= en + _ROUNDING_SLACK * en and np.abs(gn).max() < np.abs(g).max():
                    accepted = True
                    break
            step *= opts.step_shrink
        if not accepted:
            if hist:
                hist.clear()
                continue
            break
        s = xn - x
        yv = gn - g
        sy = float(np.dot(s, yv))
        if sy > 1e-16 * float(np.dot(s, s)) ** 0.5 * float(np.dot(yv, yv)) ** 0.5:
            hist.append((s, yv, 1.0 / sy))
            if len(hist) > _LBFGS_MEMORY:
                hist.pop(0)
        x, en, g = xn, en_new, gn
    return x, converged


def lambda_estimate(G: Multigraph, p: float, opts: SolverOptions | None = None) -> EigenEstimate:
    """Minimise ||dx||_p^p over S_{p,d} from several starts; returns the best (an upper bound)."""
    opts = opts or SolverOptions()
    _check_p(p)
    _require_no_isolated(G)
    if G.m < 2:
        raise DegenerateInputError("need at least two vertices")
    w = G.valency.astype(float)
    comp = G.components()
    if comp.max() > 0:
        x = _project((comp == 0).astype(float), w, p, p - 1.0)
        return EigenEstimate(0.0, x, 0, True, eigen_residual(G, x, 0.0, p))

    nl = ~G.loop_mask()
    heads, tails = G.heads[nl], G.tails[nl]
    best = None
    for x0 in initial_points(G, opts):
        out = _descend(G, x0, p, opts, w, heads, tails)
        if out is None:
            continue
        x, conv = out
        lam = rayleigh_quotient(G, x, p)
        if best is None or lam < best[0]:
            best = (lam, x, conv)
    if best is None:
        raise DegenerateInputError("every start was degenerate")
    lam, x, conv = best
    method = "exact" if p == 2.0 else "iterative-upper-bound"
    return EigenEstimate(lam, x, opts.restarts, conv, eigen_residual(G, x, lam, p), method)


# ---------------------------------------------------------------------------
# brute-force oracle for tiny graphs, deliberately independent of the code above

_ORACLE_GRID_STEP = {2: 0.05, 3: 0.05, 4: 0.05, 5: 0.2, 6: 1.0 / 3.0}


def _oracle_quotient(edge_list, val, p, y):
    """Rayleigh quotient of (0, y_1, ..., y_{m-1}) in plain Python."""
    x = (0.0,) + tuple(float(t) for t in y)
    num = 0.0
    for u, v in edge_list:
        num += abs(x[u] - x[v]) ** p

    def slope(c):
        tot = 0.0
        for xu, du in zip(x, val):
            r = xu - c
            tot += du * math.copysign(abs(r) ** (p - 1.0), r)
        return tot

    lo, hi = min(x), max(x)
    if hi - lo < 1e-14:
        return math.inf
    c = optimize.brentq(slope, lo, hi, xtol=1e-15, rtol=1e-15) if slope(lo) * slope(hi) < 0 else lo
    den = sum(du * abs(xu - c) ** p for xu, du in zip(x, val))
    return num / den


def _oracle_grid(m, step):
    n = int(round(2.0 / step)) + 1
    axis = np.linspace(-1.0, 1.0, n)
    mesh = np.stack(np.meshgrid(*([axis] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
    on_surface = np.isclose(np.abs(mesh).max(axis=1), 1.0)
    return mesh[on_surface]


def _oracle_grid_quotients(edge_list, val, p, pts):
    x = np.hstack([np.zeros((pts.shape[0], 1)), pts])
    num = np.zeros(pts.shape[0])
    for u, v in edge_list:
        num += np.abs(x[:, u] - x[:, v]) ** p
    lo, hi = x.min(axis=1), x.max(axis=1)
    w = np.asarray(val, dtype=float)
    for _ in range(60):
        c = 0.5 * (lo + hi)
        r = x - c[:, None]
        s = (np.sign(r) * np.abs(r) ** (p - 1.0)) @ w
        pos = s > 0
        lo = np.where(pos, c, lo)
        hi = np.where(pos, hi, c)
    c = 0.5 * (lo + hi)
    den = (np.abs(x - c[:, None]) ** p) @ w
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, np.inf)


def oracle_tiny(G: Multigraph, p: float, n_refine: int = 20) -> float:
    """lambda_{1,p} for m <= 6 by a grid scan of directions and Nelder-Mead polishing.

    By shift and scale invariance of the Rayleigh quotient it suffices to search
    x = (0, y) with y on the surface of the cube max|y_i| = 1.
    """
    if G.m > 6:
        raise SizeError("oracle_tiny handles at most 6 vertices")
    if G.m < 2:
        raise DegenerateInputError("need at least two vertices")
    if p <= 1:
        raise ParameterError("p must be > 1")
    edge_list = [(int(u), int(v)) for u, v in G.edges.tolist() if u != v]
    val = [int(t) for t in G.valency.tolist()]
    if any(t == 0 for t in val):
        raise DegenerateInputError("graph has isolated vertices")
    pts = _oracle_grid(G.m, _ORACLE_GRID_STEP[G.m])
    q = _oracle_grid_quotients(edge_list, val, p, pts)
    best = float(q.min())
    if best == 0.0:
        return 0.0
    for i in np.argsort(q, kind="stable")[:n_refine]:
        # pin the coordinate that sits on the cube face to kill the scale direction
        start = pts[i]
        face = int(np.argmax(np.abs(start)))
        pinned = float(start[face])
        free = [j for j in range(G.m - 1) if j != face]
        if not free:
            continue

        def objective(z, face=face, pinned=pinned, free=free):
            y = np.empty(G.m - 1)
            y[face] = pinned
            y[free] = z
            return _oracle_quotient(edge_list, val, p, y)

        res = optimize.minimize(
            objective,
            start[free],
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000},
        )
        best = min(best, float(res.fun))
    return best


# ---------------------------------------------------------------------------
# closed forms and bounds

class Bounds(NamedTuple):
    lower: float
    upper: float
    asymptotic: bool = False


def complete_graph_value(m: int, p: float) -> float:
    """lambda_{1,p}(K_m) = (m - 2 + 2^{p-1}) / (m - 1)."""
    return (m - 2 + 2.0 ** (p - 1.0)) / (m - 1)


def closed_form_bounds(kind: str, p: float, **params) -> Bounds:
    """Known values or two-sided bounds for complete, complete multipartite and bipartite graphs.

    kind="complete" needs m; kind="multipartite" needs k and M; kind="bipartite_envelope"
    returns the large-M envelope ((1/2) 2^{-p}, (2/sqrt 5)^p) flagged as asymptotic.
    """
    if kind == "complete":
        m = params.get("m")
        if m is None or m < 2 or p < 2:
            raise ParameterError("complete needs m >= 2 and p >= 2")
        v = complete_graph_value(m, p)
        return Bounds(v, v)
    if kind == "multipartite":
        k, M = params.get("k"), params.get("M")
        if k is None or M is None or k < 2 or M < 2 or p < 2:
            raise ParameterError("multipartite needs k, M >= 2 and p >= 2")
        if p == 2:
            return Bounds(1.0, 1.0)
        m = k * M
        lower = (m - 2 + 2.0 ** (p - 1.0)) * k / (m * (k - 1 + 2.0 ** (p + 2.0)))
        return Bounds(lower, 1.0)
    if kind == "bipartite_envelope":
        if p < 2:
            raise ParameterError("p must be >= 2")
        return Bounds(0.5 * 2.0 ** (-p), (2.0 / math.sqrt(5.0)) ** p, True)
    raise ParameterError(f"unknown kind {kind!r}")


def semicontinuity_bound(lambda_pprime: float, E: int, p: float, pprime: float) -> float:
    """Lower bound E^{1-p/p'} lambda_{1,p'}^{p/p'} on lambda_{1,p} for p >= p' >= 2."""
    if not (p >= pprime >= 2) or E < 1 or lambda_pprime < 0:
        raise ParameterError("need p >= p' >= 2, E >= 1 and lambda >= 0")
    r = p / pprime
    return float(E) ** (1.0 - r) * lambda_pprime ** r


def composition_bounds(kind: str, lambdas, iota: float) -> float:
    """Lower bounds on lambda_{1,p} of a union of graphs.

    split_three: three classes each with degrees in [(1-iota)d, (1+iota)d],
    bound (1-iota)/(1+iota) * mean(lambdas).
    add_few_edges: H added to G with val_H <= iota val_G, bound lambda(G)/(1+iota).
    """
    if not 0 <= iota < 1:
        raise ParameterError("iota must lie in [0, 1)")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if kind == "split_three":
        if lam.size != 3:
            raise ParameterError("split_three needs three eigenvalues")
        return float((1 - iota) / (1 + iota) * lam.mean())
    if kind == "add_few_edges":
        if lam.size != 1:
            raise ParameterError("add_few_edges needs one eigenvalue")
        return float(lam[0] / (1 + iota))
    raise ParameterError(f"unknown kind {kind!r}")


def degree_spread_iota(graphs) -> float:
    """Smallest iota with every valency of every graph in [(1-iota)d, (1+iota)d] for one d."""
    vals = np.concatenate([g.valency for g in graphs]).astype(float)
    lo, hi = vals.min(), vals.max()
    if hi <= 0:
        raise DegenerateInputError("all valencies are zero")
    return float((hi - lo) / (hi + lo))


def added_edges_iota(G: Multigraph, H: Multigraph) -> float:
    """max_u val_H(u) / val_G(u)."""
    if G.m != H.m:
        raise DimensionError("graphs must share the vertex set")
    if G.has_isolated_vertices():
        raise DegenerateInputError("G has isolated vertices")
    return float((H.valency / G.valency).max())
