"""End-to-end acceptance checks.  Each test prints one PASS/FAIL line before asserting."""
import itertools
import math
import time

import numpy as np
import pytest

from conftest import random_connected_graph
from plapspec.certificates import Certificate, flp_certificate, hyperbolicity_and_confdim, kazhdan_certificate
from plapspec.experiments import ExperimentConfig, run_experiment
from plapspec.graph import complete_graph, complete_multipartite, project_to_s, weighted_p_norm
from plapspec.ks import NetParams, net_enumerate_tiny, net_round, remainder_inequality_suite
from plapspec.models import RngSeed
from plapspec.presentations import (build_link_graph, count_completions, gromov_lift, link_structure_report,
                                    reduced_word_count_qn, sample_gromov, sample_triangular)
from plapspec.solver import (SolverOptions, closed_form_bounds, complete_graph_value, lambda_estimate,
                             lambda_exact_p2, oracle_tiny, semicontinuity_bound)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_01_complete_graph_closed_form(capsys):
    t0 = time.perf_counter()
    worst = 0.0
    for m in range(3, 13):
        for p in (2.0, 2.5, 3.0, 4.0, 6.0):
            exact = complete_graph_value(m, p)
            worst = max(worst, abs(lambda_estimate(complete_graph(m), p).eigenvalue - exact) / exact)
    elapsed = time.perf_counter() - t0
    report(capsys, 1, worst <= 1e-6 and elapsed < 60, f"max rel err {worst:.2e}, {elapsed:.1f} s")


def test_02_multipartite_p2(capsys):
    worst = max(abs(lambda_exact_p2(complete_multipartite(k, M)) - 1.0)
                for k in (2, 3, 4) for M in (2, 3, 4))
    report(capsys, 2, worst <= 1e-10, f"max |lambda - 1| = {worst:.2e}")


def test_03_multipartite_sandwich(capsys):
    k, M = 4, 5
    m = k * M
    lines, ok = [], True
    for p in (3.0, 4.0):
        lower = (m - 2 + 2 ** (p - 1)) * k / (m * (k - 1 + 2 ** (p + 2)))
        lam = lambda_estimate(complete_multipartite(k, M), p).eigenvalue
        ok &= lower <= lam <= 1 + 1e-8
        lines.append(f"p={p:g}: {lower:.4f} <= {lam:.6f} <= 1")
    report(capsys, 3, ok, "; ".join(lines))


def test_04_bipartite_envelope(capsys):
    p = 4.0
    upper = 1.05 * (2 / math.sqrt(5)) ** p
    lower = 0.4 * 2 ** -p
    assert closed_form_bounds("bipartite_envelope", p).upper == pytest.approx(upper / 1.05)
    lines, ok = [], True
    for M in (25, 50):
        lam = lambda_estimate(complete_multipartite(2, M), p).eigenvalue
        ok &= lower <= lam <= upper
        lines.append(f"M={M}: lambda={lam:.4f} vs [{lower:.4f}, {upper:.4f}]")
    report(capsys, 4, ok, "; ".join(lines))


def test_05_oracle_equivalence(capsys):
    rng = np.random.default_rng(2024)
    worst, worst_p2 = 0.0, 0.0
    for _ in range(200):
        m = int(rng.integers(2, 7))
        G = random_connected_graph(m, float(rng.uniform(0.3, 1.0)), int(rng.integers(2**31)))
        for p in (2.0, 3.0, 4.0):
            orc = oracle_tiny(G, p)
            worst = max(worst, abs(lambda_estimate(G, p, SolverOptions(restarts=16)).eigenvalue - orc))
            if p == 2.0:
                worst_p2 = max(worst_p2, abs(orc - lambda_exact_p2(G)))
    report(capsys, 5, worst <= 1e-4 and worst_p2 <= 1e-4,
           f"max |solver - oracle| = {worst:.2e}, max |oracle - exact p=2| = {worst_p2:.2e}")


def test_06_semicontinuity(capsys):
    rng = np.random.default_rng(6)
    opts = SolverOptions(restarts=16)
    worst = math.inf
    for _ in range(100):
        G = random_connected_graph(int(rng.integers(4, 10)), float(rng.uniform(0.3, 0.9)), int(rng.integers(2**31)))
        lam = {p: lambda_estimate(G, p, opts).eigenvalue for p in (2.0, 3.0, 4.0)}
        for pp, p in ((2.0, 3.0), (2.0, 4.0), (3.0, 4.0)):
            worst = min(worst, lam[p] - semicontinuity_bound(lam[pp], G.n_edges, p, pp))
    report(capsys, 6, worst >= -1e-8, f"min (lambda_p - bound) = {worst:.3e}")


def test_07_remainder_inequalities(capsys):
    rep = remainder_inequality_suite(100_000, p_range=(2.0, 6.0), rng=7)
    report(capsys, 7, rep.total_violations == 0, f"violations {rep.violations}")


def test_08_net_machinery(capsys):
    rng = np.random.default_rng(8)
    ok, lines = True, []
    for m in (2, 3):
        for eps in (0.5, 1.0):
            # eps * theta <= 1 forces theta = 1 when eps = 1
            d, theta = ([2, 3, 2][:m], 1.5) if eps == 0.5 else ([2] * m, 1.0)
            net = NetParams(3.0, eps, theta, d)
            _, count = net_enumerate_tiny(net)
            ok &= count <= net.size_bound()
            w = net.d.d.astype(float)
            lo, hi, gap = math.inf, -math.inf, 0.0
            for _ in range(1000):
                x = project_to_s(rng.standard_normal(m), w, net.p)
                xr, _, k = net_round(x, net)
                y = np.sign(x) * np.abs(x) ** (net.p - 1) / net.steps()
                gap = max(gap, float(np.abs(y - k).max()))
                norm = weighted_p_norm(xr, w, net.p)
                lo, hi = min(lo, norm), max(hi, norm)
            # eps * theta = 1 puts R_plus on the grid, so allow rounding in the norm evaluation
            ok &= gap < 1 + 1e-9 and net.R_minus * (1 - 1e-12) <= lo and hi <= net.R_plus * (1 + 1e-12)
            lines.append(f"m={m} eps={eps}: |T|={count} <= {net.size_bound():.0f}, norms in [{lo:.3f}, {hi:.3f}]")
    report(capsys, 8, ok, "; ".join(lines))


def test_09_er_spectral_regime(capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig.from_ini("""
[experiment]
model = er
trials = 50
seed = 9
p = 2
[grid]
m = 800
rho_log = 4 8 16
""")
    res = run_experiment(cfg, write=False)
    means = {s.cell["rho_log"]: s.mean for s in res.summary}
    above = sum(r.lambdas["2"] > 0.5 for r in res.records if r.cell["rho_log"] == 8)
    monotone = means[4] <= means[8] <= means[16]
    elapsed = time.perf_counter() - t0
    ok = res.all_ok and above >= 49 and monotone and elapsed < 600
    report(capsys, 9, ok, f"{above}/50 above 1/2 at 8 log(m)/m; means {means}; {elapsed:.0f} s")


def test_10_link_pipeline(capsys):
    m = 300
    rho = m ** 0.6 / m ** 2
    matchings, no_triples, certified = 0, 0, 0
    for seed in range(10):
        L = build_link_graph(sample_triangular(m, ("binomial", rho), RngSeed(10, seed)))
        rep = link_structure_report(L)
        matchings += all(s.duplicates_form_matching for s in rep.values())
        no_triples += all(s.triple_pairs == 0 for s in rep.values())
        certified += isinstance(kazhdan_certificate([lambda_exact_p2(L.base)]), Certificate)
    ok = matchings == 10 and no_triples == 10 and certified >= 8
    report(capsys, 10, ok, f"duplicates a matching in {matchings}/10, no triple edges in {no_triples}/10, "
                           f"(T) certified in {certified}/10")


def test_11_word_counting(capsys):
    ok, checked = True, 0
    for k in (2, 3):
        for n in range(2, 7):
            q = reduced_word_count_qn(k, n)
            for a, b in itertools.product(range(2 * k), repeat=2):
                ok &= count_completions(k, a, b, n) in (q, q + 1)
                checked += 1
    report(capsys, 11, ok, f"{checked} (k, n, first, last) cases")


def test_12_gromov_lift(capsys):
    k, ok, lines = 2, True, []
    for length in (6, 9):
        P = sample_gromov(k, length, ("binomial", 1.0), RngSeed(12))
        lift = gromov_lift(P)
        ok &= all(lift.phi_word(r) == w for r, w in zip(lift.presentation.relators, P.relators))
        sizes = np.bincount(lift.vertex_part, minlength=2 * k)
        ok &= bool((sizes == (2 * k - 1) ** (length // 3 - 1)).all())
        lines.append(f"l={length}: {len(P.relators)} relators, part sizes {sizes.tolist()}")
    report(capsys, 12, ok, "; ".join(lines))


def test_13_certificate_arithmetic(capsys):
    c = flp_certificate([0.9], p=2, epsilon=0.2, max_link_vertices=10)
    m = 40
    r = hyperbolicity_and_confdim(m, 0.4)
    ok = (isinstance(c, Certificate) and c.lipschitz == 1.6 ** 0.25
          and abs(r.delta - 25.0) <= 4 * np.spacing(25.0)
          and abs(r.confdim_upper - 150 * math.log(2 * m - 1)) <= 4 * np.spacing(r.confdim_upper))
    report(capsys, 13, ok, f"L={c.lipschitz!r}, delta={r.delta!r}, upper={r.confdim_upper!r}")


def test_14_determinism(capsys, tmp_path):
    text = """
[experiment]
model = er
trials = 4
seed = 14
p = 2 3
[grid]
m = 30 40
rho_log = 3
[solver]
restarts = 4
[output]
envelope = true
csv = {}
"""
    outputs = []
    for threads, name in ((1, "a.csv"), (4, "b.csv"), (1, "c.csv")):
        cfg = ExperimentConfig.from_ini(text.format(tmp_path / name))
        run_experiment(cfg, threads=threads)
        outputs.append((tmp_path / name).read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    report(capsys, 14, ok, f"3 runs (threads 1, 4, 1) byte-identical: {ok}")
