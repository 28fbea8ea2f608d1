import pytest
from hypothesis import given
from hypothesis import strategies as st

from cencon import Exponent, milnor_component_bound, thom_milnor_cc_bound
from cencon.bounds import cc_max_degree
from cencon.errors import HypothesisError, InputError


def bound_by_loop(beta, nvars):
    value = beta
    for _ in range(nvars - 1):
        value *= 2 * beta - 1
    return value


@pytest.mark.parametrize("beta, nvars, expected", [(1, 5, 1), (2, 3, 18), (8, 11, 8 * 15**10)])
def test_milnor_examples(beta, nvars, expected):
    assert milnor_component_bound(beta, nvars).value == expected


def test_milnor_validation():
    with pytest.raises(InputError):
        milnor_component_bound(0, 3)
    with pytest.raises(InputError):
        milnor_component_bound(2, 0)


def test_newtonian_four_body_bound():
    res = thom_milnor_cc_bound(4, Exponent(-3))
    assert res.beta == 8 and res.nvars == 11
    assert str(res) == "4613203125000"


def test_positive_exponent_same_beta():
    assert thom_milnor_cc_bound(4, Exponent(6)).value == 4613203125000


def test_five_body_bound():
    res = thom_milnor_cc_bound(5, Exponent(-3))
    assert res.beta == 10
    assert res.value == 10 * 19**15


def test_large_exponent_takes_over():
    assert cc_max_degree(4, Exponent(-9)) == 11
    assert cc_max_degree(4, Exponent(10)) == 10


def test_hypothesis_and_exponent_checks():
    with pytest.raises(HypothesisError):
        thom_milnor_cc_bound(3, Exponent(-3))
    with pytest.raises(InputError):
        thom_milnor_cc_bound(4, Exponent(0))


@given(beta=st.integers(1, 60), nvars=st.integers(1, 80))
def test_closed_form_matches_loop(beta, nvars):
    assert milnor_component_bound(beta, nvars).value == bound_by_loop(beta, nvars)


@given(n=st.integers(4, 12), two_a=st.integers(-30, 30).filter(lambda v: v != 0))
def test_monotone_in_n(n, two_a):
    a = Exponent(two_a)
    assert thom_milnor_cc_bound(n + 1, a).value >= thom_milnor_cc_bound(n, a).value


@given(n=st.integers(4, 8), k=st.integers(1, 20))
def test_monotone_in_exponent_beyond_threshold(n, k):
    base = 2 * n  # once 2|a| + 2 passes 2n the exponent drives beta
    lo, hi = Exponent(-(base + k)), Exponent(-(base + k + 1))
    assert thom_milnor_cc_bound(n, hi).value >= thom_milnor_cc_bound(n, lo).value
