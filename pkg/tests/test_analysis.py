# tests/test_analysis.py
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utils.analysis import (
    CONSTANTS,
    DEFAULT_CONNECTIVITY_B,
    SMALL_GAMMA_C,
    binomial_tail_lower,
    binomial_tail_upper,
    chernoff_lower,
    chernoff_upper,
    estimate_intersect_prob,
    gk_connectivity,
    gk_reference_params,
    growth_condition,
    intersect_prob_bound,
    load_bound,
    regime_onset,
    theorem_params,
    throughput_floor,
    txset_bound,
)
from utils.errors import ParameterError, RegimeError
from utils.propagation import ensures_sinr


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 500), q=st.floats(0.01, 0.99), fraction=st.floats(0.0, 0.999))
def test_chernoff_upper_dominates_exact_tail(n, q, fraction):
    nu = 1.0 + fraction * (1.0 / q - 1.0)
    assert binomial_tail_upper(n, q, nu * n * q) <= chernoff_upper(n, q, nu) + 1e-12


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 500), q=st.floats(0.01, 0.99), nu=st.floats(0.01, 1.0))
def test_chernoff_lower_dominates_exact_tail(n, q, nu):
    assert binomial_tail_lower(n, q, nu * n * q) <= chernoff_lower(n, q, nu) + 1e-12


def test_chernoff_ranges():
    assert chernoff_upper(100, 0.1, 1.0) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        chernoff_upper(100, 0.1, 10.0)
    with pytest.raises(ParameterError):
        chernoff_upper(100, 0.1, 0.5)
    with pytest.raises(ParameterError):
        chernoff_lower(100, 0.1, 1.5)
    with pytest.raises(ParameterError):
        chernoff_lower(0, 0.1, 0.5)
    with pytest.raises(ParameterError):
        chernoff_lower(10, 1.0, 0.5)


def test_exact_tails():
    # Binomial(4, 1/2)
    assert binomial_tail_upper(4, 0.5, 3) == pytest.approx(5.0 / 16.0)
    assert binomial_tail_upper(4, 0.5, 2.5) == pytest.approx(5.0 / 16.0)
    assert binomial_tail_lower(4, 0.5, 1) == pytest.approx(5.0 / 16.0)
    assert binomial_tail_lower(4, 0.5, 1.5) == pytest.approx(5.0 / 16.0)


def test_intersection_frequency_respects_bound():
    z, radius = 1.0, 10.0
    p, stderr = estimate_intersect_prob(z, radius, lines=20000, seed=4)
    assert 0.0 < p <= min(1.0, 6.0 * z / radius) + 4.0 * stderr
    assert intersect_prob_bound(1.0, 100, 0.5) == pytest.approx(0.6)
    assert intersect_prob_bound(5.0, 100, 0.5) == 1.0
    with pytest.raises(ParameterError):
        intersect_prob_bound(11.0, 100, 0.5)


def test_intersection_estimate_is_reproducible():
    assert estimate_intersect_prob(2.0, 10.0, 5000, seed=9) == estimate_intersect_prob(2.0, 10.0, 5000, seed=9)


def test_closed_form_bounds():
    n, gamma, C, D = 10000, 0.5, 2.0, 1.0
    assert load_bound(n, gamma, C) == pytest.approx(CONSTANTS.c_route * 100.0 / 2.0 + 1.0)
    assert txset_bound(n, gamma, C, D) == pytest.approx(18.0 / math.pi * n * (6.0 / 100.0) ** 2)
    assert throughput_floor(n, gamma, C, D, W=2.0) == pytest.approx(2.0 / (CONSTANTS.c_thru * 100.0 * 2.0 * 9.0))
    assert growth_condition(n, gamma, C) == pytest.approx(CONSTANTS.a * n * 0.02**2 + math.log(0.02))
    assert gk_connectivity(n, gamma, C) == pytest.approx(n * 0.02**2 - math.log(n))


def test_constants():
    assert CONSTANTS.a == pytest.approx((1.0 - math.log(2.0)) / (8192.0 * math.pi))
    assert CONSTANTS.mu == 1.0 / 512
    assert DEFAULT_CONNECTIVITY_B == pytest.approx(math.sqrt(2.0 / CONSTANTS.a))


def test_gk_reference_params():
    assert gk_reference_params(100, 1.0, connectivity_b=2.0) == pytest.approx(10.0 * 2.0 * math.sqrt(math.log(100)))
    with pytest.raises(ParameterError):
        gk_reference_params(1, 1.0)
    with pytest.raises(ParameterError):
        gk_reference_params(100, 1.0, connectivity_b=0.0)


def test_small_gamma_params_do_not_depend_on_n():
    small = theorem_params(100, 0.3, 3.0, 1.0, 1.0)
    large = theorem_params(100000, 0.3, 3.0, 1.0, 1.0)
    assert small.C == large.C == SMALL_GAMMA_C
    assert small.D == large.D
    assert small.P == large.P
    assert ensures_sinr(small.dc, 3.0, 1.0)
    assert small.to_dict()["n"] == 100


def test_large_gamma_params():
    params = theorem_params(10000, 1.0, 3.0, 1.0, 1.0, connectivity_b=1.0)
    assert params.C == pytest.approx(100.0 * math.sqrt(math.log(10000)))
    assert params.C < 10000 / 2.0
    assert ensures_sinr(params.dc, 3.0, 1.0)
    assert params.P > 0


def test_large_gamma_refuses_small_n():
    with pytest.raises(RegimeError, match="asymptotic regime"):
        theorem_params(100, 1.0, 3.0, 1.0, 1.0)


def test_theorem_params_validation():
    with pytest.raises(ParameterError):
        theorem_params(100, 0.3, 2.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        theorem_params(100, 0.3, 3.0, 1.0, 0.0)


def test_regime_onset():
    # 4 ln n < n first holds at n = 9
    assert regime_onset(1.0, connectivity_b=1.0) == 9
    onset = regime_onset(0.75)
    assert gk_reference_params(onset, 0.75) < onset**0.75 / 2.0
    assert gk_reference_params(onset - 1, 0.75) >= (onset - 1) ** 0.75 / 2.0


def test_route_and_throughput_constants_agree():
    assert CONSTANTS.c_route * 18.0 / math.pi == pytest.approx(CONSTANTS.c_thru)


def test_connectivity_calculus_along_n():
    ns = [10**k for k in range(3, 10)]
    b = 1.0 / math.sqrt(2.0 * CONSTANTS.a)

    def C_for(n, multiplier):
        return multiplier * math.sqrt(math.log(n) / n) * n**0.5

    growth = [growth_condition(n, 0.5, C_for(n, b)) for n in ns]
    connectivity = [gk_connectivity(n, 0.5, C_for(n, b)) for n in ns]
    assert all(later > earlier for earlier, later in zip(growth, growth[1:]))
    assert all(value > 0 for value in connectivity)
    assert all(later > earlier for earlier, later in zip(connectivity, connectivity[1:]))
    for n in ns:
        assert gk_connectivity(n, 0.5, C_for(n, 1.0)) == pytest.approx(0.0, abs=1e-8)
