import random

import pytest
import sympy
from hypothesis import given, strategies as st

from oddjac.discsearch import has_root
from oddjac.locsolve import (DEFICIENT, NOT_DEFICIENT, Curve, binary_discriminant, deficient_at_finite,
                             deficient_at_infinity, has_point_over, lemma16_certificate, verify_point)
from oddjac.qp import enumerate_odd_extensions, qp_field, unramified_field

X = sympy.symbols("x")


def expand(expr):
    return [int(c) for c in reversed(sympy.Poly(sympy.expand(expr), X).all_coeffs())]


CONSTRUCTED = expand(-(X ** 3 + 1) ** 2 + 3)
PROP27 = expand(-3 * (X ** 2 + 1) * (X ** 2 - 6 * X + 1) * (X ** 2 + 6 * X + 1))


@given(st.lists(st.integers(-12, 12), min_size=3, max_size=7))
def test_discriminant_matches_sympy(cs):
    if cs[-1] == 0:
        cs[-1] = 1
    f = sum(c * X ** i for i, c in enumerate(cs))
    assert binary_discriminant(cs) == sympy.discriminant(f, X)


@given(st.lists(st.integers(-12, 12), min_size=2, max_size=6))
def test_form_discriminant_with_missing_top(cs):
    # a vanishing top coefficient scales the discriminant by lc^2
    if cs[-1] == 0:
        cs[-1] = 1
    if len(cs) < 3:
        return
    f = sum(c * X ** i for i, c in enumerate(cs))
    assert binary_discriminant(cs + [0]) == cs[-1] ** 2 * sympy.discriminant(f, X)


def test_discriminant_small_forms():
    assert binary_discriminant([0, 1, 0]) == 1  # the form xz
    assert binary_discriminant([1, 0, 1]) == -4
    assert binary_discriminant([1, 0, 0, 0, 0, 0, 1]) == -46656


def test_curve_validation():
    with pytest.raises(ValueError):
        Curve(2, [1, 2, 1, 0, 0, 0, 0])  # (x+1)^2 with a double root at infinity
    with pytest.raises(ValueError):
        Curve(2, [1] * 8)
    with pytest.raises(ValueError):
        Curve.local(2, [0, 0, 0, 0, 0, 0, 9], 3, 2)
    c = Curve.local(2, [26, 0, 0, 0, 0, 0, -1], 5, 2)
    assert c.coeffs[0] == 1 and c.coeffs[-1] == 24


# -- point search against a brute-force oracle --------------------------------------

def _square_in_qp(n: int, p: int) -> bool:
    if n == 0:
        return True
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    if v % 2:
        return False
    if p == 2:
        return n % 8 == 1
    return pow(n % p, (p - 1) // 2, p) == 1


def _brute_point(cs, p, depth=4):
    """Look for a Q_p-point among small integer x and x = 1/(p t)."""
    f = lambda x: sum(c * x ** i for i, c in enumerate(cs))
    fstar = lambda u: sum(c * u ** (len(cs) - 1 - i) for i, c in enumerate(cs))
    for x in range(p ** depth):
        if _square_in_qp(f(x), p):
            return True
    for t in range(p ** (depth - 1)):
        if _square_in_qp(fstar(p * t), p):
            return True
    return False


@pytest.mark.parametrize("p", [2, 3, 5])
def test_point_search_agrees_with_brute_force(p):
    rng = random.Random(p)
    seen = {"yes": 0, "no": 0}
    for _ in range(150):
        cs = [rng.randint(-60, 60) for _ in range(7)]
        try:
            c = Curve(2, cs)
        except ValueError:
            continue
        res = has_point_over(c, qp_field(p))
        seen[res.status] += 1
        brute = _brute_point(cs, p)
        if brute:
            assert res.status == "yes", cs
        if res.status == "yes":
            assert verify_point(c, res)
    assert seen["yes"] > 0
    if p != 5:  # at 5 pointless curves are too rare for this sample size
        assert seen["no"] > 0


def test_pointless_curve_at_5():
    cs = expand(2 * (X ** 3 + 1) ** 2 + 5)
    assert has_point_over(Curve(2, cs), qp_field(5)).status == "no"
    assert not _brute_point(cs, 5)


@given(st.lists(st.integers(-40, 40), min_size=7, max_size=7), st.sampled_from([2, 3, 5]))
def test_chart_swap_invariance(cs, p):
    try:
        c = Curve(2, cs)
    except ValueError:
        return
    rev = Curve(2, list(reversed(cs)))
    assert has_point_over(c, qp_field(p)).status == has_point_over(rev, qp_field(p)).status


@given(st.lists(st.integers(-20, 20), min_size=7, max_size=7))
def test_witnesses_verify_in_extensions(cs):
    try:
        c = Curve(2, cs)
    except ValueError:
        return
    for L in (unramified_field(2, 3), enumerate_odd_extensions(3, 3, dedupe=True)[3]):
        res = has_point_over(c, L)
        if res.status == "yes":
            assert verify_point(c, res)


def test_point_at_infinity_found_on_second_chart():
    # y^2 = x^6 + 3 over Q_3: a_6 = 1 is a square, so u = 0 gives a point
    c = Curve(2, [3, 0, 0, 0, 0, 0, 1])
    res = has_point_over(c, qp_field(3))
    assert res.status == "yes" and verify_point(c, res)


def test_odd_degree_model_has_point_at_infinity():
    c = Curve(2, [2, 0, 0, 0, 0, 1, 0])
    res = has_point_over(c, qp_field(3))
    assert res.status == "yes" and res.chart == 2 and res.kind == "root"


def test_root_finding_stalls_without_digits():
    L = qp_field(3)
    poly = [(-3 ** 10,), (0,), (1,)]
    with pytest.raises(ArithmeticError):
        has_root(L, poly, N0=4, cap=8)
    assert has_root(L, poly)


# -- deficiency ------------------------------------------------------------------------

def test_constructed_curve_certificate_and_search_agree():
    c = Curve(2, CONSTRUCTED)
    cert = lemma16_certificate(c, 3)
    assert cert is not None
    fast = deficient_at_finite(c, 3)
    assert fast.decision == DEFICIENT and fast.certificate["reason"] == "unit-square certificate"
    slow = deficient_at_finite(c, 3, fast_paths=False)
    assert slow.decision == DEFICIENT and slow.certificate["reason"] == "exhaustive search"
    assert len(slow.certificate["searched"]) == 11


def test_prop27_curve_deficient_at_3():
    c = Curve(2, PROP27)
    assert deficient_at_finite(c, 3).deficient
    assert deficient_at_finite(c, 3, fast_paths=False).deficient


def test_theorem23_witness_at_2():
    c = Curve(2, [3, 0, 0, 0, 0, 0, 2])
    v = deficient_at_finite(c, 2)
    assert v.decision == DEFICIENT
    assert [s["field"] for s in v.certificate["searched"]] == ["Q_2", "Q_2:unram3", "Q_2:eis3[-2,0,0]"]


def test_not_deficient_witness_reverifies():
    c = Curve(2, [1, 0, 0, 0, 0, 0, 1])
    for p in (2, 3):
        v = deficient_at_finite(c, p, fast_paths=False)
        assert v.decision == NOT_DEFICIENT
        assert v.certificate["reason"] == "point"


def test_odd_genus_never_deficient():
    c = Curve(1, [-1, 0, 0, 0, -1])
    assert deficient_at_finite(c, 3).decision == NOT_DEFICIENT
    assert deficient_at_infinity(c).decision == NOT_DEFICIENT


def test_infinity():
    assert deficient_at_infinity(Curve(2, [-1, 0, 0, 0, 0, 0, -1])).deficient
    assert not deficient_at_infinity(Curve(2, [1, 0, 0, 0, 0, 0, 1])).deficient
    # negative leading coefficient but a real root
    v = deficient_at_infinity(Curve(2, [-1, 0, 0, 0, 0, 5, -1]))
    assert not v.deficient


@given(st.lists(st.integers(-30, 30), min_size=7, max_size=7))
def test_fast_paths_agree_with_exhaustive_search(cs):
    try:
        c = Curve(2, cs)
    except ValueError:
        return
    for p in (3, 5):
        assert deficient_at_finite(c, p).decision == deficient_at_finite(c, p, fast_paths=False).decision


def test_local_mode_decisions_hold_for_every_lift():
    # a decision made from digits mod 3^6 must survive any change of the higher digits
    rng = random.Random(7)
    for _ in range(40):
        a = [rng.randrange(3 ** 6) for _ in range(7)]
        try:
            c = Curve.local(2, a, 3, 6)
        except ValueError:
            continue
        d = deficient_at_finite(c, 3).decision
        if d == "Undecided":
            continue
        for _ in range(3):
            lift = [x + 3 ** 6 * rng.randint(-50, 50) for x in a]
            try:
                g = Curve(2, lift)
            except ValueError:
                continue
            assert deficient_at_finite(g, 3).decision == d
