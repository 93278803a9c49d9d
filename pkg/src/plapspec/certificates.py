"""Implication arithmetic from link eigenvalues to fixed-point and boundary statements.

Nothing here simulates group actions.  A certificate records which deterministic
implication was applied to which eigenvalue evidence; asymptotic qualifiers of
the random models are carried as metadata only.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import ParameterError, PreconditionError

EXACT = "exact"
RIGOR_EXACT = "exact-p2"
RIGOR_UPPER = "iterative-upper-bound"
MONOTONE = {"increasing", "decreasing"}


@dataclass
class Certificate:
    property: str  # "FLp" | "KazhdanT" | "ConfdimBounds"
    p: float
    epsilon: float
    lipschitz: float
    rigor: str
    evidence: list = field(default_factory=list)  # [link_id, lambda, method]
    parameters: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        raw = json.loads(text)
        raw["evidence"] = [list(e) for e in raw.get("evidence", [])]
        return cls(**raw)


@dataclass
class Refusal:
    property: str
    reason: str
    evidence: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _evidence(link_lambdas, methods):
    """Normalise to [[id, lambda, method], ...]."""
    out = []
    for i, item in enumerate(link_lambdas):
        if isinstance(item, (tuple, list)):
            lid, lam, meth = item
        else:
            lid, lam = i, item
            meth = methods[i] if isinstance(methods, (list, tuple)) else (methods or RIGOR_UPPER)
        lam = float(lam)
        if not math.isfinite(lam):
            raise ParameterError("eigenvalue evidence must be finite")
        out.append([lid, lam, str(meth)])
    if not out:
        raise ParameterError("no eigenvalue evidence")
    return out


def lipschitz_constant(epsilon: float, p: float) -> float:
    """(2 - 2 eps)^{1/(2p)}."""
    return (2.0 - 2.0 * epsilon) ** (1.0 / (2.0 * p))


def flp_certificate(link_lambdas, p: float, epsilon: float, max_link_vertices: int,
                    methods=None):
    """FL^p_{m+1, (2-2eps)^{1/2p}} when every link has lambda_{1,p} > 1 - eps (eps < 1/2)."""
    if not 0 < epsilon < 0.5:
        raise ParameterError("epsilon must lie in (0, 1/2)")
    if p < 2:
        raise ParameterError("p must be >= 2")
    ev = _evidence(link_lambdas, methods)
    worst = min(e[1] for e in ev)
    if not worst > 1.0 - epsilon:
        return Refusal("FLp", f"min link eigenvalue {worst!r} is not above 1 - epsilon = {1.0 - epsilon!r}", ev)
    exact = p == 2 and all(e[2] == EXACT for e in ev)
    return Certificate(
        property="FLp",
        p=float(p),
        epsilon=float(epsilon),
        lipschitz=lipschitz_constant(epsilon, p),
        rigor=RIGOR_EXACT if exact else RIGOR_UPPER,
        evidence=ev,
        parameters={"m": int(max_link_vertices), "dimension_threshold": int(max_link_vertices) + 1},
    )


def kazhdan_certificate(link_lambda2, methods=None):
    """Property (T) when every link has lambda_{1,2} > 1/2."""
    ev = _evidence(link_lambda2, methods if methods is not None else EXACT)
    worst = min(e[1] for e in ev)
    if not worst > 0.5:
        return Refusal("KazhdanT", f"min link eigenvalue {worst!r} is not above 1/2", ev)
    warnings = []
    rigor = RIGOR_EXACT
    if any(e[2] != EXACT for e in ev):
        rigor = RIGOR_UPPER
        warnings.append("non-exact p=2 evidence; certificate downgraded")
    return Certificate("KazhdanT", 2.0, 0.5, 1.0, rigor, ev, {}, warnings)


def certified_p_range(certificates) -> tuple[float, float] | None:
    """[2, sup p] over issued FL^p certificates, or None if there are none."""
    ps = [c.p for c in certificates if isinstance(c, Certificate) and c.property == "FLp"]
    return (2.0, max(ps)) if ps else None


def flp_range(m: int, f_of_m: float, C: float) -> tuple[float, float]:
    """[2, max(2, (1/C) (log f / log log f)^{1/2})]."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    if f_of_m < 16:
        raise ParameterError("f(m) must be >= 16")
    if C <= 0:
        raise ParameterError("C must be positive")
    lf = math.log(f_of_m)
    return 2.0, max(2.0, math.sqrt(lf / math.log(lf)) / C)


@dataclass
class ConfdimReport:
    m: int
    density: float
    delta: float  # hyperbolicity constant 5 / (1 - 2d)
    confdim_upper: float  # 30 / (1 - 2d) * log(2m - 1)
    isoperimetric_coefficient: float  # 3 (1 - 2d - eps)
    isoperimetric_epsilon: float
    confdim_lower: float | None
    regime: str = "asymptotic"


def hyperbolicity_and_confdim(m: int, d: float, certified_p: float | None = None,
                              epsilon: float = 0.01) -> ConfdimReport:
    if not d < 0.5:
        raise ParameterError("density must be < 1/2; the bounds diverge at 1/2")
    if d <= 0 or m < 1:
        raise ParameterError("need d > 0 and m >= 1")
    gap = 1.0 - 2.0 * d
    upper = 30.0 / gap * math.log(2 * m - 1)
    if certified_p is not None and certified_p > upper:
        raise PreconditionError(f"certified p {certified_p} exceeds the conformal dimension upper bound {upper}")
    return ConfdimReport(m, d, 5.0 / gap, upper, 3.0 * (gap - epsilon), epsilon, certified_p)


@dataclass
class TransferStatement:
    property_name: str
    monotonicity: str
    model: str
    source: str
    target: str
    coupling: str
    rho: float
    rho_error_scale: float


def monotone_transfer(property_name: str, monotonicity: str | None, model: str, **params):
    """Bookkeeping for moving an a.a.s. monotone property from a binomial model to a density model.

    model="triangular" needs m and count f; coupling rho = f (2m)^{-3} + O(sqrt(f) (2m)^{-3}).
    model="gromov" needs k, l and count f; coupling rho = f (2k-1)^{-l} + O(sqrt(f) (2k-1)^{-l}).
    """
    if monotonicity not in MONOTONE:
        return Refusal(property_name, "property not declared monotone; transfer not licensed")
    f = float(params["f"])
    if model == "triangular":
        base = float(2 * params["m"]) ** -3
        coupling = "rho = f (2m)^-3 + O(sqrt(f) (2m)^-3)"
    elif model == "gromov":
        base = float(2 * params["k"] - 1) ** -params["l"]
        coupling = "rho = f (2k-1)^-l + O(sqrt(f) (2k-1)^-l)"
    else:
        raise ParameterError(f"unknown model {model!r}")
    return TransferStatement(property_name, monotonicity, model, "binomial", "density", coupling,
                             f * base, math.sqrt(f) * base)
