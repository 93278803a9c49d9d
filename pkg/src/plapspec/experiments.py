"""Reproducible parameter sweeps: sample, solve, tabulate.

Each (cell, trial) pair owns one RNG stream, so results do not depend on how
trials are scheduled across worker threads.  Records are written in
(cell, trial) order by a single collector.
"""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .graph import Multigraph, complete_graph, complete_multipartite
from .models import RngSeed, sample_configuration, sample_er, sample_multipartite_er
from .presentations import build_link_graph, class_structure, sample_triangular
from .solver import SolverOptions, lambda_estimate, lambda_exact_p2

MODELS = ("complete", "multipartite", "er", "config", "multi-er", "triangular")
AXES = ("m", "k", "M", "rho", "rho_log", "rho_exp", "degree")
INT_AXES = {"m", "k", "M", "degree"}
STAT_COLUMNS = ("n_vertices", "n_edges", "deg_min", "deg_max", "duplicate_edges",
                "max_multiplicity", "triple_pairs", "relators")
STREAMS_PER_CELL = 1 << 20
QUANTILES = (0.1, 0.5, 0.9)


def format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def p_label(p: float) -> str:
    return format(float(p), "g")


@dataclass
class ExperimentConfig:
    model: str
    grid: dict  # axis -> list of values, iterated in insertion order
    trials: int = 1
    seed: int = 0
    ps: tuple = (2.0,)
    solver: SolverOptions = field(default_factory=SolverOptions)
    csv_path: str | None = None
    json_path: str | None = None
    summary_path: str | None = None
    envelope: bool = False
    envelope_C: float = 1.0
    name: str = "experiment"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            raise ParameterError("parameter grid is empty")
        unknown = set(self.grid) - set(AXES)
        if unknown:
            raise ParameterError(f"unknown grid axes {sorted(unknown)}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if not self.ps:
            raise ParameterError("need at least one p")

    def cells(self) -> list[dict]:
        axes = list(self.grid)
        return [dict(zip(axes, combo)) for combo in itertools.product(*(self.grid[a] for a in axes))]

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        """Parse [experiment], [grid], [solver] and [output] sections."""
        cp = configparser.ConfigParser()
        cp.optionxform = str  # axis names are case sensitive (M vs m)
        cp.read_string(text)
        if not cp.has_section("experiment"):
            raise ParameterError("config needs an [experiment] section")
        ex = cp["experiment"]
        grid = {}
        if cp.has_section("grid"):
            for axis, raw in cp["grid"].items():
                conv = int if axis in INT_AXES else float
                grid[axis] = [conv(t) for t in raw.replace(",", " ").split()]
        solver = SolverOptions()
        if cp.has_section("solver"):
            s = cp["solver"]
            solver = SolverOptions(
                restarts=s.getint("restarts", solver.restarts),
                max_iters=s.getint("max_iters", solver.max_iters),
                grad_tol=s.getfloat("grad_tol", solver.grad_tol),
                step_shrink=s.getfloat("step_shrink", solver.step_shrink),
            )
        out = cp["output"] if cp.has_section("output") else {}
        return cls(
            model=ex.get("model", ""),
            grid=grid,
            trials=ex.getint("trials", 1),
            seed=int(ex.get("seed", "0")),
            ps=tuple(float(t) for t in ex.get("p", "2").replace(",", " ").split()),
            solver=solver,
            csv_path=out.get("csv"),
            json_path=out.get("json"),
            summary_path=out.get("summary"),
            envelope=str(out.get("envelope", "false")).lower() in ("1", "true", "yes"),
            envelope_C=float(out.get("envelope_C", "1.0")),
            name=ex.get("name", "experiment"),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_ini(Path(path).read_text())


@dataclass
class TrialRecord:
    cell_index: int
    cell: dict
    trial: int
    stream: int
    lambdas: dict = field(default_factory=dict)  # p label -> value
    methods: dict = field(default_factory=dict)
    envelopes: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    status: str = "ok"
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"


# ---------------------------------------------------------------------------
# sampling

def cell_rho(model: str, cell: dict) -> float | None:
    if "rho" in cell:
        return float(cell["rho"])
    m = cell.get("m")
    if "rho_log" in cell:
        return float(cell["rho_log"]) * math.log(m) / m
    if "rho_exp" in cell:
        return float(m) ** float(cell["rho_exp"]) / float(m) ** 2
    return None


def _need(cell, *names):
    missing = [n for n in names if n not in cell]
    if missing:
        raise ParameterError(f"grid is missing axes {missing}")
    return [cell[n] for n in names]


def build_instance(model: str, cell: dict, rs: RngSeed) -> tuple[Multigraph, dict]:
    """The graph whose eigenvalues a trial reports, plus structural stats."""
    rho = cell_rho(model, cell)
    extra = {"relators": 0}
    if model == "complete":
        (m,) = _need(cell, "m")
        G = complete_graph(m)
    elif model == "multipartite":
        k, M = _need(cell, "k", "M")
        G = complete_multipartite(k, M)
    elif model == "er":
        (m,) = _need(cell, "m")
        if rho is None:
            raise ParameterError("er model needs rho, rho_log or rho_exp")
        G = sample_er(m, rho, rs)
    elif model == "config":
        m, deg = _need(cell, "m", "degree")
        _, G = sample_configuration(np.full(m, deg), rs)
    elif model == "multi-er":
        k, M, rho = _need(cell, "k", "M", "rho")
        G = sample_multipartite_er(k, M, rho, rs)
    else:
        (m,) = _need(cell, "m")
        if rho is None:
            raise ParameterError("triangular model needs rho, rho_log or rho_exp")
        P = sample_triangular(m, ("binomial", rho), rs)
        L = build_link_graph(P)
        G = L.base
        per_class = [class_structure(L.link_class(i)) for i in (1, 2, 3)]
        extra = {
            "relators": len(P.relators),
            "duplicate_edges": sum(c.duplicate_edges for c in per_class),
            "max_multiplicity": max(c.max_multiplicity for c in per_class),
            "triple_pairs": sum(c.triple_pairs for c in per_class),
        }
    cs = class_structure(G)
    stats = {
        "n_vertices": G.m,
        "n_edges": G.n_edges,
        "deg_min": int(G.valency.min()) if G.m else 0,
        "deg_max": int(G.valency.max()) if G.m else 0,
        "duplicate_edges": cs.duplicate_edges,
        "max_multiplicity": cs.max_multiplicity,
        "triple_pairs": cs.triple_pairs,
    }
    stats.update(extra)
    return G, stats


def envelope_value(p: float, rho: float, m: int, C: float) -> float:
    """1 - C p^4 / (rho m)^{1/(2 p^2)}."""
    return 1.0 - C * p**4 / (rho * m) ** (1.0 / (2.0 * p * p))


def trial_stream(cell_index: int, trial: int) -> int:
    return cell_index * STREAMS_PER_CELL + trial


def run_trial(config: ExperimentConfig, cell_index: int, cell: dict, trial: int) -> TrialRecord:
    stream = trial_stream(cell_index, trial)
    rec = TrialRecord(cell_index, dict(cell), trial, stream)
    t0 = time.perf_counter()
    try:
        rs = RngSeed(config.seed, stream)
        G, rec.stats = build_instance(config.model, cell, rs.child(0))
        solver_seed = int(rs.child(1).stream % 2**63)
        opts = SolverOptions(config.solver.restarts, config.solver.max_iters, config.solver.grad_tol,
                             config.solver.step_shrink, solver_seed)
        rho = cell_rho(config.model, cell)
        for p in config.ps:
            key = p_label(p)
            if p == 2:
                rec.lambdas[key] = float(lambda_exact_p2(G))
                rec.methods[key] = "exact"
            else:
                est = lambda_estimate(G, p, opts)
                rec.lambdas[key] = float(est.eigenvalue)
                rec.methods[key] = est.method
            if config.envelope and rho is not None:
                rec.envelopes[key] = envelope_value(p, rho, G.m, config.envelope_C)
    except Exception as exc:  # recorded, not fatal
        rec.status = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    rec.wall_time = time.perf_counter() - t0
    return rec


# ---------------------------------------------------------------------------
# output

def csv_columns(config: ExperimentConfig) -> list[str]:
    cols = ["cell", *config.grid, "trial", "stream"]
    for p in config.ps:
        key = p_label(p)
        cols += [f"lambda_p{key}", f"method_p{key}"]
        if config.envelope:
            cols.append(f"envelope_p{key}")
    return cols + list(STAT_COLUMNS) + ["status"]


def record_row(rec: TrialRecord, config: ExperimentConfig) -> list[str]:
    row = [str(rec.cell_index), *(format_value(rec.cell[a]) for a in config.grid), str(rec.trial), str(rec.stream)]
    for p in config.ps:
        key = p_label(p)
        row += [format_value(rec.lambdas[key]) if key in rec.lambdas else "", rec.methods.get(key, "")]
        if config.envelope:
            row.append(format_value(rec.envelopes[key]) if key in rec.envelopes else "")
    row += [format_value(rec.stats[c]) if c in rec.stats else "" for c in STAT_COLUMNS]
    return row + [rec.status]


def record_from_row(row: dict, config: ExperimentConfig) -> TrialRecord:
    cell = {}
    for a in config.grid:
        cell[a] = int(row[a]) if a in INT_AXES else float(row[a])
    rec = TrialRecord(int(row["cell"]), cell, int(row["trial"]), int(row["stream"]), status=row["status"])
    for p in config.ps:
        key = p_label(p)
        if row.get(f"lambda_p{key}"):
            rec.lambdas[key] = float(row[f"lambda_p{key}"])
            rec.methods[key] = row[f"method_p{key}"]
        if row.get(f"envelope_p{key}"):
            rec.envelopes[key] = float(row[f"envelope_p{key}"])
    for c in STAT_COLUMNS:
        if row.get(c):
            rec.stats[c] = int(row[c])
    return rec


def records_to_csv(records, config: ExperimentConfig) -> str:
    """Header plus one row per record; wall time is left out so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_columns(config))
    for rec in records:
        w.writerow(record_row(rec, config))
    return buf.getvalue()


def records_from_csv(text: str, config: ExperimentConfig) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != csv_columns(config):
        raise ParameterError("CSV header does not match the config")
    return [record_from_row(r, config) for r in reader]


def records_to_json(records) -> str:
    return json.dumps([asdict(r) for r in records], indent=1, sort_keys=True)


def records_from_json(text: str) -> list[TrialRecord]:
    return [TrialRecord(**raw) for raw in json.loads(text)]


@dataclass
class CellSummary:
    cell_index: int
    cell: dict
    p: str
    count: int
    failures: int
    mean: float
    min: float
    max: float
    quantiles: tuple
    frac_above_half: float
    envelope: float | None


def summarize(records, config: ExperimentConfig) -> list[CellSummary]:
    """Per cell and p: mean, extremes, 10/50/90% quantiles and the fraction above 1/2."""
    out = []
    for ci, cell in enumerate(config.cells()):
        recs = [r for r in records if r.cell_index == ci]
        for p in config.ps:
            key = p_label(p)
            vals = np.array([r.lambdas[key] for r in recs if r.ok and key in r.lambdas])
            env = next((r.envelopes[key] for r in recs if key in r.envelopes), None)
            if vals.size:
                q = tuple(float(v) for v in np.quantile(vals, QUANTILES))
                s = CellSummary(ci, cell, key, int(vals.size), len(recs) - int(vals.size), float(vals.mean()),
                                float(vals.min()), float(vals.max()), q, float(np.mean(vals > 0.5)), env)
            else:
                nan = float("nan")
                s = CellSummary(ci, cell, key, 0, len(recs), nan, nan, nan, (nan,) * len(QUANTILES), nan, env)
            out.append(s)
    return out


def summary_to_csv(summary, config: ExperimentConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    qcols = [f"q{int(q * 100)}" for q in QUANTILES]
    w.writerow(["cell", *config.grid, "p", "count", "failures", "mean", "min", "max", *qcols,
                "frac_above_half", "envelope"])
    for s in summary:
        w.writerow([s.cell_index, *(format_value(s.cell[a]) for a in config.grid), s.p, s.count, s.failures,
                    *(format_value(v) for v in (s.mean, s.min, s.max, *s.quantiles, s.frac_above_half)),
                    "" if s.envelope is None else format_value(s.envelope)])
    return buf.getvalue()


def check_summary(records, summary, config: ExperimentConfig, rtol: float = 1e-12) -> bool:
    """Recompute the summary from raw records and compare."""
    again = summarize(records, config)
    if len(again) != len(summary):
        return False
    for a, b in zip(again, summary):
        if a.count != b.count or a.p != b.p:
            return False
        x = np.array([a.mean, a.min, a.max, *a.quantiles])
        y = np.array([b.mean, b.min, b.max, *b.quantiles])
        if not np.allclose(x, y, rtol=rtol, atol=0.0, equal_nan=True):
            return False
    return True


# ---------------------------------------------------------------------------
# driver

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: list

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)


def _reusable(config: ExperimentConfig) -> dict:
    if not config.csv_path or not Path(config.csv_path).exists():
        return {}
    try:
        old = records_from_csv(Path(config.csv_path).read_text(), config)
    except (ParameterError, KeyError, ValueError):
        return {}
    return {(r.cell_index, r.trial): r for r in old if r.ok}


def run_experiment(config: ExperimentConfig, threads: int = 1, resume: bool = False,
                   write: bool = True) -> ExperimentResult:
    """Run every (cell, trial); optionally reuse completed rows of an existing CSV."""
    if threads < 1:
        raise ParameterError("threads must be >= 1")
    done = _reusable(config) if resume else {}
    jobs = [(ci, cell, t) for ci, cell in enumerate(config.cells()) for t in range(config.trials)]
    todo = [j for j in jobs if (j[0], j[2]) not in done]
    if threads == 1:
        fresh = [run_trial(config, *j) for j in todo]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            fresh = list(pool.map(lambda j: run_trial(config, *j), todo))
    by_key = dict(done)
    by_key.update({(r.cell_index, r.trial): r for r in fresh})
    records = [by_key[(ci, t)] for ci, _, t in jobs]
    result = ExperimentResult(config, records, summarize(records, config))
    if write:
        emit(result)
    return result


def emit(result: ExperimentResult) -> list[Path]:
    """Write whichever of the CSV, JSON and summary outputs the config names."""
    cfg = result.config
    written = []
    targets = [
        (cfg.csv_path, lambda: records_to_csv(result.records, cfg)),
        (cfg.json_path, lambda: records_to_json(result.records)),
        (cfg.summary_path, lambda: summary_to_csv(result.summary, cfg)),
    ]
    for path, render in targets:
        if not path:
            continue
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render())
        written.append(path)
    return written
