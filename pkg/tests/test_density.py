import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oddjac import density
from oddjac.density import (BLOCK, Estimate, LocalDensityTable, coprime_brute_force, coprime_probability, eta,
                            eta_series, nu_of_set, padic_coefficients, prop17_bounds, refined_genus2_bounds,
                            rho_interval)


def test_eta_closed_form_matches_series():
    for j in (1, 2, 3):
        assert eta(j) == eta_series(j)
    assert eta(1) == F(5, 6)
    assert density.unit_square_fraction(1) == F(1, 4)


@pytest.mark.parametrize("p", [2, 3])
def test_coprime_matches_brute_force(p):
    for m, n in itertools.product((1, 2, 3), repeat=2):
        assert coprime_probability(p, m, n) == coprime_brute_force(p, m, n), (p, m, n)
    assert coprime_probability(p, 2, 3) == coprime_probability(p, 3, 2)


def test_bounds_examples():
    assert prop17_bounds(2, 3) == (F(8, 729), F(41, 2187))
    lo, hi = refined_genus2_bounds(3)
    assert prop17_bounds(2, 3)[0] <= lo < hi <= prop17_bounds(2, 3)[1]
    with pytest.raises(ValueError):
        prop17_bounds(3, 3)
    with pytest.raises(ValueError):
        prop17_bounds(2, 2)


def test_estimates_are_deterministic_across_blocks():
    n = BLOCK + 500
    a = density.estimate_q_n(2, n, seed=7)
    b = density.estimate_q_n(2, n, seed=7)
    assert (a.hits, a.value, a.std_error) == (b.hits, b.value, b.std_error)
    assert density.estimate_q_n(2, n, seed=8).hits != a.hits
    # a shorter run is the prefix of the longer stream
    full = density._dyadic_block(7, 1, BLOCK, 3)
    assert np.array_equal(density._dyadic_block(7, 1, 500, 3), full[:500])


def test_q2_against_integration():
    m = 2000
    t = (np.arange(m) + 0.5) / m
    x, y = np.meshgrid(t, t)
    oracle = 0.5 * np.minimum(1.0, 2.0 * np.sqrt(x * y)).mean()
    assert abs(oracle - (31 - 6 * np.log(2)) / 72) < 1e-5
    est = density.estimate_q_n(2, 200_000, seed=1)
    assert abs(est.value - oracle) < 3 * est.std_error + 1e-4


def test_odd_degree_has_a_real_root():
    assert density.estimate_q_n(1, 1000, seed=0).value == 0
    assert density.estimate_q_n(5, 1000, seed=0).value == 0


def test_s_inf_against_q6():
    s = density.estimate_s_inf(2, 100_000, seed=2)
    q = density.estimate_q_n(6, 100_000, seed=3)
    assert abs(s.value - q.value / 2) <= 3 * (s.std_error ** 2 + (q.std_error / 2) ** 2) ** 0.5
    assert s.value <= 0.25 + 3 * s.std_error


def test_odd_genus_is_exactly_zero():
    assert density.estimate_s_inf(3, 10, seed=0).exact == 0
    assert density.estimate_s_p(3, 2, 10, seed=0).exact == 0
    assert density.estimate_s_p(1, 3, 10, seed=0).exact == 0
    assert rho_interval(3, LocalDensityTable(3, Estimate.exactly(0), {}, 2)) == (0, 0)
    est, hist = density.estimate_rho_direct(3, 50, 20, seed=0)
    assert est.exact == 0 and hist == {(): 20}


@given(st.integers(0, 1000), st.sampled_from([2, 3, 5]), st.integers(1, 30), st.integers(1, 30))
def test_digit_streams_extend(sample, p, d1, d2):
    lo, hi = sorted((d1, d2))
    short = padic_coefficients(5, p, sample, 7, lo)
    long = padic_coefficients(5, p, sample, 7, hi)
    assert short == [v % p ** lo for v in long]
    assert all(0 <= v < p ** hi for v in long)


def test_local_decision_is_reproducible():
    assert [density.local_decision(2, 3, 9, i) for i in range(40)] == \
           [density.local_decision(2, 3, 9, i) for i in range(40)]


def _exact_table(values, tail="none"):
    s_inf = Estimate.exactly(values.pop("inf"))
    return LocalDensityTable(2, s_inf, {p: (F(v), F(v)) for p, v in values.items()}, 7, tail)


def test_rho_trivial_tables():
    zero = _exact_table({"inf": 0, 2: 0, 3: 0, 5: 0, 7: 0})
    assert rho_interval(2, zero) == (0, 0)
    assert nu_of_set([], zero) == (1, 1)
    assert nu_of_set(["inf"], zero) == (0, 0)


def test_rho_is_mass_on_odd_sets():
    vals = {"inf": F(1, 10), 2: F(1, 40), 3: F(1, 75), 5: F(1, 250), 7: F(1, 700)}
    table = _exact_table(dict(vals))
    places = table.places()
    total = odd = F(0)
    for r in range(len(places) + 1):
        for S in itertools.combinations(places, r):
            lo, hi = nu_of_set(S, table)
            assert lo == hi
            total += lo
            odd += lo if r % 2 else 0
    assert total == 1
    assert rho_interval(2, table) == (odd, odd)


def test_nu_covers_one_within_tail_slack():
    vals = {"inf": F(1, 10), 2: F(1, 40), 3: F(1, 75), 5: F(1, 250), 7: F(1, 700)}
    table = _exact_table(dict(vals), tail="prop17")
    places = table.places()
    lo_sum = hi_sum = F(0)
    for r in range(len(places) + 1):
        for S in itertools.combinations(places, r):
            lo, hi = nu_of_set(S, table)
            lo_sum, hi_sum = lo_sum + lo, hi_sum + hi
    slack = table.tail_mass()
    assert 0 < slack < F(1, 100)
    assert lo_sum <= 1 <= hi_sum
    assert 1 - lo_sum <= slack


def test_table_intervals_use_bounds_beyond_measured_primes():
    table = density.build_table(2, 13, seed=0, n_inf=1000, n_2=50, n_odd=50, measured=(3,))
    assert table.s_p[11] == refined_genus2_bounds(11)
    lo, hi = table.interval(3)
    blo, bhi = refined_genus2_bounds(3)
    assert lo <= bhi and hi >= blo


def test_local_densities_decrease_in_p():
    ests = {p: density.estimate_s_p(2, p, 30_000, seed=4) for p in (3, 5, 7, 11)}
    for p in (3, 5, 7):  # at p = 11 about ten hits are expected, too few for a normal 3 SE band
        e = ests[p]
        lo, hi = prop17_bounds(2, p)
        assert float(lo) - 3 * e.std_error <= e.value <= float(hi) + 3 * e.std_error
    assert all(e.n_undecided == 0 for e in ests.values())
    vals = [ests[p].value for p in (3, 5, 7, 11)]
    assert vals == sorted(vals, reverse=True)


def test_rho_direct_small_run():
    est, hist = density.estimate_rho_direct(2, 100, 200, seed=1)
    assert sum(hist.values()) == 200 - est.config["singular"] - est.n_undecided
    assert all(isinstance(k, tuple) for k in hist)
    odd = sum(v for k, v in hist.items() if len(k) % 2)
    assert est.hits == odd
