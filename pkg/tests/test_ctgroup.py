import itertools
import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oddjac.ctgroup import (EVEN, ODD, ConstructionFailed, PairedGroup, decompose, enumerate_paired_groups,
                            is_square, kernel_order_lattice, kernel_witness_brute, parity_of, validate)

Z2_ODD = PairedGroup((2,), ((F(1, 2),),), (1,))
HYP = PairedGroup((2, 2), ((0, F(1, 2)), (F(1, 2), 0)), (0, 0))
PROP28_SHAPE = PairedGroup((2, 2), ((0, F(1, 2)), (F(1, 2), F(1, 2))), (1, 0))
Z4_BLOCK = PairedGroup((4, 4), ((0, F(1, 4)), (F(3, 4), F(1, 2))), (2, 0))


def elements(pg):
    return list(itertools.product(*[range(n) for n in pg.invariant_factors]))


def add(pg, x, y):
    return tuple((a + b) % n for a, b, n in zip(x, y, pg.invariant_factors))


def twist(pg, y):
    """y^c: y when <y, c> = 0, else y + c."""
    return y if pg.pair(y, pg.c) == 0 else add(pg, y, pg.c)


def test_structure_checks():
    with pytest.raises(ValueError):
        PairedGroup((4, 2), ((0, 0), (0, 0)), (0, 0))
    with pytest.raises(ValueError):
        PairedGroup((2,), ((F(1, 4),),), (0,))
    with pytest.raises(ValueError):
        PairedGroup((4, 4), ((0, F(1, 4)), (F(1, 4), 0)), (0, 0))


def test_validate_examples():
    assert validate(Z2_ODD).ok
    assert validate(HYP).ok
    bad = PairedGroup((2, 2), ((0, F(1, 2)), (F(1, 2), 0)), (1, 0))
    v = validate(bad)
    assert not v.ok and v.axiom == "self_pairing" and v.witness == (0, 1)
    deg = PairedGroup((2,), ((0,),), (0,))
    v = validate(deg)
    assert not v.ok and v.axiom == "nondegenerate" and v.witness == (1,)


def test_parity_examples():
    assert parity_of(Z2_ODD) == (ODD, F(1, 2))
    assert parity_of(PROP28_SHAPE) == (EVEN, 0)
    assert parity_of(HYP)[0] == EVEN


def test_decompose_examples():
    w = decompose(Z2_ODD)
    assert w.case == "odd" and w.T == () and w.complement == ()
    w = decompose(PROP28_SHAPE)
    assert (w.case, w.n, w.a, w.b, w.T, w.complement) == ("hyperbolic_block", 1, (1, 0), (0, 1), (2,), ())
    w = decompose(Z4_BLOCK)
    assert w.n == 2 and w.T == (4,) and w.complement == ()
    a, b = w.a, w.b
    assert Z4_BLOCK.pair(a, a) == 0 and Z4_BLOCK.pair(a, b) == F(1, 4) and Z4_BLOCK.pair(b, b) == F(1, 2)
    assert tuple(2 * x % 4 for x in a) == Z4_BLOCK.c
    assert decompose(HYP).case == "alternating" and decompose(HYP).T == (2,)
    assert all(w.checks.values())


def test_decompose_rejects_invalid():
    with pytest.raises(ValueError):
        decompose(PairedGroup((2,), ((0,),), (0,)))
    assert issubclass(ConstructionFailed, RuntimeError)


def test_json_round_trip():
    d = json.loads(json.dumps(Z4_BLOCK.to_dict()))
    assert d["gram"][1][0] == "3/4"
    assert PairedGroup.from_dict(d) == Z4_BLOCK


@st.composite
def antisymmetric(draw):
    k = draw(st.integers(1, 3))
    exps = sorted(draw(st.lists(st.integers(1, 3), min_size=k, max_size=k)))
    ns = tuple(2 ** e for e in exps)
    g = [[F(0)] * k for _ in range(k)]
    for i in range(k):
        g[i][i] = F(draw(st.integers(0, 1)), 2)
        for j in range(i + 1, k):
            d = min(ns[i], ns[j])
            v = F(draw(st.integers(0, d - 1)), d)
            g[i][j], g[j][i] = v, (-v) % 1
    return PairedGroup(ns, tuple(map(tuple, g)), (0,) * k)


@given(antisymmetric())
def test_lattice_kernel_matches_brute_force(pg):
    kernel = [x for x in elements(pg) if all(pg.pair(x, y) % 1 == 0 for y in elements(pg))]
    assert kernel_order_lattice(pg) == len(kernel)
    assert (kernel_witness_brute(pg) is None) == (len(kernel) == 1)


def test_enumeration_small_orders():
    got = list(enumerate_paired_groups(2))
    assert [(g.invariant_factors, g.c) for g in got] == [((), ()), ((2,), (1,))]
    assert got[1].gram == ((F(1, 2),),)
    four = [g for g in enumerate_paired_groups(4) if g.invariant_factors == (2, 2)]
    assert any(not any(g.c) for g in four) and any(any(g.c) for g in four)
    assert all(parity_of(g)[0] == EVEN for g in four)
    assert all(validate(g).ok for g in enumerate_paired_groups(16))


def test_enumeration_is_deterministic():
    a = [g.to_dict() for g in enumerate_paired_groups(64, exhaustive_limit=16, samples=8, seed=3)]
    b = [g.to_dict() for g in enumerate_paired_groups(64, exhaustive_limit=16, samples=8, seed=3)]
    assert a == b
    assert all(any(g.c) for g in enumerate_paired_groups(16, "nonzero"))
    assert all(not any(g.c) for g in enumerate_paired_groups(16, "zero"))


def brute_theorem8(pg):
    """Everything the structure theorem promises, checked element by element."""
    G = elements(pg)
    kind, _ = parity_of(pg)
    for x in G:
        assert pg.pair(x, twist(pg, x)) == 0  # modified pairing alternating
    two_torsion = [x for x in G if not any(add(pg, x, x))]
    if kind == EVEN:
        assert is_square(pg.order) and is_square(len(two_torsion))
        images = {twist(pg, y) for y in G}
        assert len(images) == len(G)
        assert all(twist(pg, twist(pg, y)) == y for y in G)
    else:
        assert pg.order % 2 == 0 and is_square(pg.order // 2) and not is_square(len(two_torsion))
        perp = [y for y in G if pg.pair(y, pg.c) == 0]
        assert {twist(pg, y) for y in G} == set(perp)  # projection onto c-perp
        zero = tuple(0 for _ in pg.c)
        assert {y for y in G if twist(pg, y) == zero} == {zero, pg.c}
        assert all(pg.pair(y, y) == 0 for y in perp)


@pytest.mark.parametrize("pg", [Z2_ODD, HYP, PROP28_SHAPE, Z4_BLOCK])
def test_theorem8_examples(pg):
    brute_theorem8(pg)
    assert all(decompose(pg).checks.values())


def test_theorem8_on_enumerated_groups_up_to_32():
    rng = random.Random(0)
    groups = list(enumerate_paired_groups(32))
    for pg in rng.sample(groups, min(150, len(groups))):
        brute_theorem8(pg)
        w = decompose(pg)
        size = 1
        for t in w.T:
            size *= t
        assert pg.order == size * size * (2 if w.case == "odd" else 1)
