import math

import pytest
from hypothesis import given, strategies as st

from plapspec.certificates import (
    Certificate,
    Refusal,
    certified_p_range,
    flp_certificate,
    flp_range,
    hyperbolicity_and_confdim,
    kazhdan_certificate,
    lipschitz_constant,
    monotone_transfer,
)
from plapspec.errors import ParameterError, PreconditionError


def test_flp_certificate_constant():
    c = flp_certificate([0.9], p=2, epsilon=0.2, max_link_vertices=10)
    assert isinstance(c, Certificate)
    assert c.lipschitz == 1.6 ** 0.25
    assert c.parameters["dimension_threshold"] == 11


def test_flp_refusal_below_threshold():
    r = flp_certificate([0.4], p=2, epsilon=0.2, max_link_vertices=10)
    assert isinstance(r, Refusal)
    # equality is not enough
    assert isinstance(flp_certificate([0.75], p=3, epsilon=0.25, max_link_vertices=4), Refusal)


def test_flp_epsilon_gate():
    with pytest.raises(ParameterError):
        flp_certificate([0.9], p=2, epsilon=0.5, max_link_vertices=4)
    with pytest.raises(ParameterError):
        flp_certificate([math.nan], p=2, epsilon=0.2, max_link_vertices=4)


def test_rigor_follows_evidence():
    exact = flp_certificate([(0, 0.9, "exact")], p=2, epsilon=0.2, max_link_vertices=4)
    assert exact.rigor == "exact-p2"
    iterative = flp_certificate([(0, 0.9, "exact")], p=3, epsilon=0.2, max_link_vertices=4)
    assert iterative.rigor == "iterative-upper-bound"


@given(st.lists(st.floats(0.0, 2.0), min_size=1, max_size=6), st.floats(0.01, 0.49), st.floats(0.0, 1.0))
def test_flp_monotone_in_lambda(lams, eps, bump):
    before = flp_certificate(lams, 2.5, eps, 8)
    after = flp_certificate([lam + bump for lam in lams], 2.5, eps, 8)
    if isinstance(before, Certificate):
        assert isinstance(after, Certificate)


@given(st.floats(0.01, 0.48), st.floats(2.0, 8.0))
def test_lipschitz_decreasing_in_epsilon_towards_one(eps, p):
    assert lipschitz_constant(eps + 0.01, p) < lipschitz_constant(eps, p)
    assert lipschitz_constant(eps, p) > 1.0
    assert lipschitz_constant(0.5 - 1e-12, p) == pytest.approx(1.0)


def test_kazhdan_threshold_and_downgrade():
    assert isinstance(kazhdan_certificate([0.51]), Certificate)
    assert isinstance(kazhdan_certificate([0.5]), Refusal)
    c = kazhdan_certificate([0.6], methods="iterative-upper-bound")
    assert c.rigor == "iterative-upper-bound" and c.warnings


def test_certificate_json_round_trip():
    c = flp_certificate([(3, 0.95, "exact"), (4, 0.9, "exact")], p=2, epsilon=0.2, max_link_vertices=12)
    assert Certificate.from_json(c.to_json()) == c


def test_certified_p_range():
    certs = [flp_certificate([0.9], p, 0.2, 4) for p in (2, 3, 5)]
    certs.append(flp_certificate([0.1], 7, 0.2, 4))
    assert certified_p_range(certs) == (2.0, 5.0)
    assert certified_p_range([]) is None


def test_flp_range():
    assert flp_range(10, 16, 1e6) == (2.0, 2.0)
    f = 10 ** 1.8
    lf = math.log(f)
    # the raw value is about 1.71, so the interval clamps to [2, 2]
    assert flp_range(10**6, f, 1.0) == (2.0, max(2.0, math.sqrt(lf / math.log(lf))))
    assert flp_range(10**6, f, 0.5)[1] == pytest.approx(2 * math.sqrt(lf / math.log(lf)))
    with pytest.raises(ParameterError):
        flp_range(10, 15.9, 1.0)


def test_flp_range_scales_with_inverse_c():
    f = 1e40
    a = flp_range(10, f, 0.1)[1]
    b = flp_range(10, f, 0.2)[1]
    assert a == pytest.approx(2 * b)


def test_hyperbolicity_and_confdim_values():
    r = hyperbolicity_and_confdim(50, 0.4)
    assert r.delta == pytest.approx(25.0, rel=1e-15)
    assert r.confdim_upper == pytest.approx(150 * math.log(99), rel=1e-15)
    assert r.isoperimetric_coefficient == pytest.approx(3 * (0.2 - 0.01))
    r = hyperbolicity_and_confdim(100, 0.45, certified_p=2.5)
    assert r.confdim_lower == 2.5 <= r.confdim_upper
    assert r.confdim_upper == pytest.approx(300 * math.log(199))


def test_confdim_pole_and_sandwich():
    with pytest.raises(ParameterError):
        hyperbolicity_and_confdim(10, 0.5)
    with pytest.raises(PreconditionError):
        hyperbolicity_and_confdim(2, 0.34, certified_p=1e6)


def test_monotone_transfer():
    s = monotone_transfer("FLp", "increasing", "triangular", m=10, f=1000.0)
    assert s.rho == pytest.approx(1000.0 / 20**3)
    assert s.rho_error_scale == pytest.approx(math.sqrt(1000.0) / 20**3)
    g = monotone_transfer("infinite", "decreasing", "gromov", k=2, l=6, f=50.0)
    assert g.rho == pytest.approx(50.0 / 3**6) and g.monotonicity == "decreasing"
    assert isinstance(monotone_transfer("something", None, "triangular", m=10, f=1.0), Refusal)
