"""Command line entry point: ``plapspec <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import certificates as cert
from .errors import PlapError
from .experiments import ExperimentConfig, run_experiment
from .graph import project_to_s, read_graph, write_graph
from .ks import (NetParams, decompose_light_heavy, net_enumerate_tiny, net_round,
                 remainder_inequality_suite)
from .models import (DegreeMatrix, RngSeed, sample_configuration, sample_er, sample_multipartite_er,
                     sample_multipartite_matching)
from .presentations import (Presentation, build_link_graph, gromov_lift, link_structure_report,
                            sample_gromov, sample_triangular)
from .solver import SolverOptions, lambda_estimate, lambda_exact_p2


def _dump(obj, as_json=True):
    print(json.dumps(obj, indent=1, sort_keys=True, default=_jsonable) if as_json else obj)


def _jsonable(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def cmd_lambda(args) -> int:
    G = read_graph(args.graph)
    if args.exact2:
        if args.p != 2:
            raise PlapError("--exact2 requires --p 2")
        out = {"lambda": lambda_exact_p2(G), "converged": True, "restarts_used": 0,
               "residual": 0.0, "method": "exact"}
    else:
        est = lambda_estimate(G, args.p, SolverOptions(restarts=args.restarts, seed=args.seed))
        out = est.to_dict()
    if args.json:
        _dump(out)
    else:
        print(format(out["lambda"], ".17g"))
    return 0


def cmd_gen_graph(args) -> int:
    rs = RngSeed(args.seed)
    meta = {"model": args.model, "seed": args.seed}
    if args.model == "er":
        G = sample_er(args.m, args.rho, rs)
        meta.update(m=args.m, rho=args.rho)
    elif args.model == "config":
        deg = np.loadtxt(args.deg_file, dtype=np.int64, ndmin=1)
        _, G = sample_configuration(deg, rs)
        meta.update(deg_file=str(args.deg_file))
    elif args.model == "multi-er":
        G = sample_multipartite_er(args.k, args.M, args.rho, rs)
        meta.update(k=args.k, M=args.M, rho=args.rho)
    else:
        entries = np.loadtxt(args.deg_file, dtype=np.int64, ndmin=2)
        G = sample_multipartite_matching(DegreeMatrix(args.k, args.M, entries), rs)
        meta.update(k=args.k, M=args.M, deg_file=str(args.deg_file))
    meta.update(n_vertices=G.m, n_edges=G.n_edges)
    write_graph(G, args.out)
    Path(str(args.out) + ".json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return 0


def _ks_net(params: dict, samples: int, seed: int) -> dict:
    net = NetParams(params["p"], params["epsilon"], params["theta"], params["d"])
    gen = RngSeed(seed).generator()
    w = net.d.d.astype(float)
    norms = []
    for _ in range(samples):
        x = project_to_s(gen.standard_normal(net.m), w, net.p)
        xr, _, _ = net_round(x, net)
        norms.append(float(np.dot(np.abs(xr) ** net.p, w)))
    out = {"R_plus": net.R_plus, "R_minus": net.R_minus, "size_bound": net.size_bound(),
           "rounded": samples, "norm_min": min(norms, default=None), "norm_max": max(norms, default=None)}
    if net.m <= 4:
        out["enumerated"] = net_enumerate_tiny(net)[1]
    return out


def _ks_decomposition(params: dict, samples: int, seed: int) -> dict:
    G = read_graph(params["graph"])
    p = float(params["p"])
    gen = RngSeed(seed).generator()
    gaps, light, heavy = [], [], []
    for _ in range(samples):
        x = project_to_s(gen.standard_normal(G.m), G.valency.astype(float), p)
        dec = decompose_light_heavy(G, x, p)
        gaps.append(dec.identity_gap())
        light.append(dec.X_l)
        heavy.append(dec.X_h)
    return {"samples": samples, "max_identity_gap": max(gaps), "mean_X_light": float(np.mean(light)),
            "mean_X_heavy": float(np.mean(heavy))}


def cmd_ks(args) -> int:
    params = json.loads(Path(args.params).read_text()) if args.params else {}
    if args.check == "inequalities":
        rep = remainder_inequality_suite(args.samples, tuple(params.get("p_range", (2.0, 6.0))),
                                         rng=args.seed, ab_range=params.get("ab_range", 10.0))
        out = asdict(rep)
        out["total_violations"] = rep.total_violations
    elif args.check == "net":
        out = _ks_net(params, args.samples, args.seed)
    else:
        out = _ks_decomposition(params, args.samples, args.seed)
    _dump(out)
    return 0


def _mode(args):
    if args.rho is not None:
        return ("binomial", args.rho)
    if args.density_count is not None:
        return ("density", args.density_count)
    raise PlapError("give --rho or --count")


def cmd_gen_group(args) -> int:
    rs = RngSeed(args.seed)
    if args.model == "triangular":
        P = sample_triangular(args.m, _mode(args), rs)
    else:
        P = sample_gromov(args.k, args.l, _mode(args), rs)
    P.write(args.out)
    return 0


def cmd_link(args) -> int:
    P = Presentation.read(args.presentation)
    L = build_link_graph(P)
    out = {"vertices": L.base.m, "edges": L.base.n_edges}
    if args.classes:
        out["classes"] = {str(i): asdict(s) for i, s in link_structure_report(L).items()}
    if args.lambda2:
        out["lambda2"] = lambda_exact_p2(L.base)
    if args.out:
        write_graph(L.base, args.out)
    _dump(out)
    return 0


def cmd_lift(args) -> int:
    P = Presentation.read(args.presentation)
    lift = gromov_lift(P)
    lift.presentation.write(args.out)
    _dump({"generators": lift.presentation.m, "relators": len(lift.presentation.relators),
           "block_length": lift.block_length, "part_size": lift.part_size})
    return 0


def _read_links(path) -> list:
    """JSON list of numbers or [id, lambda, method] triples, or whitespace separated numbers."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [float(t) for t in text.split()]
    if not isinstance(data, list):
        data = [data]
    return [tuple(e) if isinstance(e, list) else float(e) for e in data]


def cmd_certify(args) -> int:
    links = _read_links(args.links)
    if args.kazhdan:
        res = cert.kazhdan_certificate(links, methods=args.method)
    else:
        res = cert.flp_certificate(links, args.p, args.epsilon, args.max_link_vertices, methods=args.method)
    print(res.to_json())
    return 0 if isinstance(res, cert.Certificate) else 2


def cmd_confdim(args) -> int:
    _dump(asdict(cert.hyperbolicity_and_confdim(args.m, args.d, args.p, args.epsilon)))
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    try:
        res = run_experiment(cfg, threads=args.threads, resume=args.resume)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 1
    failed = sum(not r.ok for r in res.records)
    print(f"{len(res.records)} trials, {failed} failed", file=sys.stderr)
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plapspec", description="Graph p-Laplacian eigenvalues and link certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lambda", help="first nontrivial p-Laplacian eigenvalue of a graph file")
    s.add_argument("--graph", required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--exact2", action="store_true")
    s.add_argument("--restarts", type=int, default=32)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_lambda)

    s = sub.add_parser("gen-graph", help="sample a random graph")
    s.add_argument("--model", choices=["er", "config", "multi-er", "multi-deg"], required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--M", type=int)
    s.add_argument("--rho", type=float)
    s.add_argument("--deg-file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("ks", help="concentration diagnostics")
    s.add_argument("--check", choices=["inequalities", "net", "decomposition"], required=True)
    s.add_argument("--params")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_ks)

    s = sub.add_parser("gen-group", help="sample a random presentation")
    s.add_argument("--model", choices=["triangular", "gromov"], required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--rho", type=float)
    s.add_argument("--count", dest="density_count", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen_group)

    s = sub.add_parser("link", help="link graph of a triangular presentation")
    s.add_argument("--presentation", required=True)
    s.add_argument("--classes", action="store_true")
    s.add_argument("--lambda2", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_link)

    s = sub.add_parser("lift", help="rewrite a length-l presentation as a triangular one")
    s.add_argument("--presentation", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("certify", help="FL^p or (T) certificate from link eigenvalues")
    s.add_argument("--links", required=True)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--epsilon", type=float, default=0.25)
    s.add_argument("--max-link-vertices", type=int, default=0)
    s.add_argument("--method", default=None, help="method recorded for bare eigenvalues")
    s.add_argument("--kazhdan", action="store_true")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("confdim", help="hyperbolicity and conformal dimension bounds")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d", type=float, required=True)
    s.add_argument("--p", type=float, default=None)
    s.add_argument("--epsilon", type=float, default=0.01)
    s.set_defaults(func=cmd_confdim)

    s = sub.add_parser("experiment", help="run a parameter sweep from an INI config")
    s.add_argument("--config", required=True)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--resume", action="store_true")
    s.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PlapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
