import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import binom

from plapspec.errors import ParameterError, SizeError
from plapspec.graph import Multigraph, complete_graph, disjoint_union, star_graph
from plapspec.models import (
    DegreeMatrix,
    RngSeed,
    degree_concentration_check,
    edge_density_check,
    half_edge_points,
    sample_configuration,
    sample_er,
    sample_multipartite_er,
    sample_multipartite_matching,
)


def test_same_seed_same_graph_and_streams_differ():
    a = sample_er(50, 0.2, RngSeed(9, 1))
    b = sample_er(50, 0.2, RngSeed(9, 1))
    c = sample_er(50, 0.2, RngSeed(9, 2))
    assert a.edges.tobytes() == b.edges.tobytes()
    assert a != c
    assert RngSeed(9, 1).child(0) != RngSeed(9, 1).child(1)


def test_seed_range_validated():
    with pytest.raises(ParameterError):
        RngSeed(-1)
    with pytest.raises(ParameterError):
        sample_er(5, 1.5, 0)


def test_er_extremes_and_mean():
    assert sample_er(6, 0.0, 0).n_edges == 0
    assert sample_er(6, 1.0, 0) == complete_graph(6)
    counts = [sample_er(40, 0.1, RngSeed(1, s)).n_edges for s in range(200)]
    n_pairs = 40 * 39 // 2
    se = math.sqrt(n_pairs * 0.1 * 0.9 / 200)
    assert abs(np.mean(counts) - 0.1 * n_pairs) < 5 * se


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8), st.integers(0, 2**31))
def test_configuration_model_realises_degrees(deg, seed):
    if sum(deg) % 2:
        deg[0] += 1
    matching, G = sample_configuration(deg, seed)
    np.testing.assert_array_equal(G.valency, deg)
    inv = matching.partner()
    assert (inv[inv] == np.arange(inv.size)).all()
    assert (inv != np.arange(inv.size)).all()


def test_configuration_model_rejects_odd_sum():
    with pytest.raises(ParameterError):
        sample_configuration([1, 2], 0)


def test_configuration_model_path_to_loop_ratio():
    # degrees (2, 1, 1): of the 3 perfect matchings of 4 half-edges, 2 give a path and 1 a loop
    n = 6000
    loops = sum(sample_configuration([2, 1, 1], RngSeed(5, s))[1].loop_mask().any() for s in range(n))
    se = math.sqrt(n * (1 / 3) * (2 / 3))
    assert abs(loops - n / 3) < 5 * se


def test_half_edge_points_labels():
    pts = half_edge_points([2, 0, 1])
    assert pts.tolist() == [[0, 0], [0, 1], [2, 0]]


def test_multipartite_er_has_no_within_part_edges():
    G = sample_multipartite_er(3, 5, 0.5, 1)
    assert (G.edges[:, 0] // 5 != G.edges[:, 1] // 5).all()


def test_degree_matrix_admissibility():
    D = DegreeMatrix.uniform(3, 2, 2)
    assert D.is_admissible()
    np.testing.assert_array_equal(D.block_totals(), [[0, 4, 4], [4, 0, 4], [4, 4, 0]])
    e = D.entries.copy()
    e[0, 1] += 1
    assert not DegreeMatrix(3, 2, e).is_admissible()
    with pytest.raises(ParameterError):
        sample_multipartite_matching(DegreeMatrix(3, 2, e), 0)


def test_multipartite_matching_realises_degree_matrix():
    D = DegreeMatrix.uniform(3, 4, 2)
    G = sample_multipartite_matching(D, 7)
    part = np.arange(12) // 4
    for u in range(12):
        nbrs = np.concatenate([G.edges[G.edges[:, 0] == u, 1], G.edges[G.edges[:, 1] == u, 0]])
        np.testing.assert_array_equal(np.bincount(part[nbrs], minlength=3), D.entries[u])


def test_multipartite_matching_is_uniform_over_all_outcomes():
    # k=3, M=2, one half-edge per (vertex, other part): 2 matchings per part pair, 8 outcomes
    D = DegreeMatrix.uniform(3, 2, 1)
    n = 8000
    seen = Counter(tuple(sorted(map(tuple, sample_multipartite_matching(D, RngSeed(2, s)).edges.tolist())))
                   for s in range(n))
    # exhaustive list of outcomes
    blocks = []
    for i, j in itertools.combinations(range(3), 2):
        L, R = [2 * i, 2 * i + 1], [2 * j, 2 * j + 1]
        blocks.append([tuple(zip(L, perm)) for perm in itertools.permutations(R)])
    outcomes = {tuple(sorted(e for b in combo for e in b)) for combo in itertools.product(*blocks)}
    assert set(seen) == outcomes and len(outcomes) == 8
    se = math.sqrt(n * (1 / 8) * (7 / 8))
    assert all(abs(c - n / 8) < 5 * se for c in seen.values())


def test_degree_concentration_pass_rate_follows_binomial_tail():
    m, rho = 1000, 0.05
    mu = rho * (m - 1)
    for delta, lo, hi in ((0.3, 0.0, 0.2), (0.6, 0.8, 1.0)):
        tail = binom.cdf(math.ceil(mu * (1 - delta)) - 1, m - 1, rho) + binom.sf(math.floor(mu * (1 + delta)), m - 1, rho)
        predicted = (1 - tail) ** m
        assert lo <= predicted <= hi
        passes = np.mean([degree_concentration_check(sample_er(m, rho, RngSeed(8, s)), mu, delta).ok
                          for s in range(20)])
        assert lo <= passes <= hi


def test_concentration_reports_worst_vertex():
    r = degree_concentration_check(star_graph(4), 1.0, 0.5)
    assert not r.ok and r.worst_vertex == 0 and r.worst_deviation == 3.0


def test_density_check_complete_and_star_are_controlled():
    v = edge_density_check(complete_graph(6), 1.0, math.e)
    assert v.controlled and v.definitive
    v = edge_density_check(star_graph(9), 1.0, math.e)
    assert v.controlled and v.witness.ratio <= 10 / 9 + 1e-12


@pytest.mark.slow
def test_density_check_finds_dense_clump():
    G = disjoint_union(complete_graph(5), Multigraph(9, []))
    v = edge_density_check(G, 1.0, math.e)
    assert not v.controlled and v.definitive
    assert v.witness.edges > math.e * v.witness.mu


def test_density_check_sampled_mode_and_limits():
    G = disjoint_union(complete_graph(5), Multigraph(20, []))
    v = edge_density_check(G, 1.0, math.e, mode="sampled", n_samples=3000, rng=1)
    assert not v.definitive or not v.controlled
    with pytest.raises(SizeError):
        edge_density_check(G, 1.0, math.e)
    with pytest.raises(ParameterError):
        edge_density_check(G, 0.5, math.e)
