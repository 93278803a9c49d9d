import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_connected_graph
from plapspec.errors import ParameterError, PreconditionError, SizeError
from plapspec.graph import project_to_s, weighted_p_norm
from plapspec.ks import (
    NetParams,
    azuma_tail,
    decompose_light_heavy,
    heavy_pair_bound,
    heavy_pair_sum,
    light_bound,
    light_heavy_beta,
    light_increment,
    light_threshold,
    light_tilde_expectation_bound,
    light_tilde_sum,
    net_enumerate_tiny,
    net_round,
    remainder_inequality_suite,
    remainders,
)
from plapspec.models import RngSeed, sample_configuration

reals = st.floats(-20, 20, allow_nan=False)


@given(reals, reals)
def test_remainders_at_p2(a, b):
    t = remainders(a, b, 2.0)
    assert t.r == pytest.approx(2 * a * b, abs=1e-9 * (1 + a * a + b * b))
    assert t.r_tilde == pytest.approx(2 * a * b, abs=1e-9 * (1 + a * a + b * b))
    assert t.r_bar == pytest.approx(abs(a * b))


def test_remainders_reject_small_p():
    with pytest.raises(ParameterError):
        remainders(1.0, 2.0, 1.5)


def test_inequality_suite_has_no_violations():
    rep = remainder_inequality_suite(20_000, rng=3)
    assert rep.total_violations == 0
    assert set(rep.violations) == {"r_bar_le_abs_r", "abs_r_le_const_r_bar", "r_tilde_le_abs_r_tilde",
                                   "abs_r_tilde_le_two_r_bar", "r_le_p_r_tilde"}


@given(st.integers(0, 2**31), st.floats(2.0, 6.0))
def test_decomposition_identity_and_partition(seed, p):
    G = random_connected_graph(10, 0.4, seed)
    x = project_to_s(np.random.default_rng(seed).standard_normal(G.m), G.valency, p)
    dec = decompose_light_heavy(G, x, p)
    assert dec.identity_gap() <= 1e-10 * (1 + dec.norm_p)
    idx = np.sort(np.concatenate([dec.light_edges, dec.heavy_edges]))
    np.testing.assert_array_equal(idx, np.arange(G.n_edges))
    assert dec.threshold == light_threshold(p, int(G.valency.max()), G.m)


def test_threshold_formula():
    assert light_heavy_beta(2.0) == pytest.approx(1 / 3)
    assert light_threshold(4.0, 16, 10) == pytest.approx(16 ** 0.4 / 160)


@given(st.integers(0, 2**31), st.floats(2.0, 5.0), st.floats(1e-3, 10.0), st.floats(1.0, 4.0))
def test_heavy_pair_sum_bound(seed, p, gamma, A):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 12))
    d = rng.integers(2, 6, m)
    theta = d.max() / d.min()
    x = rng.standard_normal(m)
    x *= (A / weighted_p_norm(x, d, p)) ** (1 / p)
    assert heavy_pair_sum(x, d, p, gamma) <= heavy_pair_bound(m, theta, A, gamma, p, d.max()) * (1 + 1e-12)


def test_light_tilde_mean_within_bound():
    # Monte Carlo over 6-regular configuration graphs for one fixed x on S
    m, deg, p = 120, 6, 3.0
    d = np.full(m, deg)
    x = project_to_s(np.random.default_rng(0).standard_normal(m), d, p)
    vals = [light_tilde_sum(sample_configuration(d, RngSeed(4, s))[1], x, p, deg) for s in range(300)]
    R = weighted_p_norm(x, d, p)
    assert np.mean(vals) <= light_tilde_expectation_bound(1.0, R, deg, p)


def test_azuma_exponent_matches_the_light_bound_constant():
    # T = K / d^{beta/p}, N = d m, c = 8 d^beta / (d m): exponent is K^2 m / 128
    for p, K, d, m in ((3.0, 0.5, 20, 400), (4.0, 1.0, 50, 300), (2.5, 2.0, 10, 50)):
        T = K / d ** (light_heavy_beta(p) / p)
        got = azuma_tail(T, d * m, light_increment(p, d, m))
        assert got == pytest.approx(min(2.0, 2 * math.exp(-K * K * m / 128)), rel=1e-10)


def test_azuma_tail_clamped():
    assert azuma_tail(0.0, 5, 1.0) == 2.0
    with pytest.raises(ParameterError):
        azuma_tail(1.0, 0, 1.0)


def test_light_bound_branches():
    hi = light_bound(3.5, 1.0, 2.0, 100.0, 50, 0.5)
    lo = light_bound(2.5, 1.0, 2.0, 100.0, 50, 0.5)
    assert hi.branch == "p>=3" and lo.branch == "2<=p<3"
    assert hi.value == pytest.approx(3.5 * 130 / 100 ** (light_heavy_beta(3.5) / 3.5))
    assert lo.log_failure == pytest.approx(-4 * 50 / 6000 + 50 * math.log(32 * math.e))


def test_net_params_validation():
    with pytest.raises(ParameterError):
        NetParams(3.0, 0.5, 1.0, [1, 2])  # theta below d_max/d_min
    with pytest.raises(ParameterError):
        NetParams(3.0, 0.9, 1.5, [2, 2])  # eps * theta > 1
    net = NetParams(3.0, 0.5, 1.5, [2, 3, 2])
    assert net.R == net.R_plus and net.R_minus < 1 < net.R_plus
    np.testing.assert_allclose(net.steps(), 0.5 * 3 ** (1 / 3) / 3 ** (2 / 3) / np.array([2, 3, 2]))


@pytest.mark.parametrize("eps", [0.5, 1.0])
def test_two_vertex_net_count_has_closed_form(eps):
    net = NetParams(3.0, eps, 1.0, [2, 2])
    s = net.steps()
    # k2 = -k1, so |k| (s1^q d1 + s2^q d2)^{1/q} <= R^{1/q}
    kmax = math.floor((net.R / (s[0] ** net.q * 2 + s[1] ** net.q * 2)) ** (1 / net.q) + 1e-9)
    pts, count = net_enumerate_tiny(net)
    assert count == 2 * kmax + 1
    assert (pts.sum(axis=1) == 0).all()
    assert count <= net.size_bound()


def test_net_enumeration_limits():
    with pytest.raises(SizeError):
        net_enumerate_tiny(NetParams(3.0, 0.5, 1.0, [2] * 5))


def test_net_round_lands_on_grid_within_norm_band():
    net = NetParams(4.0, 0.5, 1.5, [2, 3, 2, 3])
    w = net.d.d.astype(float)
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = project_to_s(rng.standard_normal(4), w, net.p)
        xr, r, k = net_round(x, net)
        assert k.sum() == 0 and 0 <= r <= net.m
        gap = np.sign(x) * np.abs(x) ** (net.p - 1) / net.steps() - k
        assert (np.abs(gap) < 1 + 1e-9).all()
        assert net.R_minus <= weighted_p_norm(xr, w, net.p) <= net.R_plus


def test_net_round_requires_point_on_s():
    net = NetParams(3.0, 0.5, 1.0, [2, 2])
    with pytest.raises(PreconditionError):
        net_round(np.array([1.0, 1.0]), net)
